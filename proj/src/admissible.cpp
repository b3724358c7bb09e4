#include "vcone/admissible.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vcone {

namespace {

void require_matching(const Vector& w, const Vector& x)
{
    if (w.size() != x.size())
        throw std::invalid_argument("w and x must have the same length");
}

Matrix similarity(const Matrix& Q, const Vector& x, const Matrix& Qinv)
{
    return Q * x.asDiagonal() * Qinv;
}

}  // namespace

AdmissibilityReport check_admissible(const Matrix& Q, const Vector& w, const Vector& x,
                                     const AdmissibilityTolerance& tol, const std::optional<Matrix>& Qinv)
{
    const Eigen::Index n = Q.rows();
    if (Q.cols() != n || w.size() != n || x.size() != n)
        throw std::invalid_argument("check_admissible: dimension mismatch");

    AdmissibilityReport r;

    Eigen::JacobiSVD<Matrix> svd(Q);
    const auto& sv = svd.singularValues();
    const double smin = sv[n - 1];
    r.condition_number = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    r.invertible = std::isfinite(r.condition_number) && r.condition_number <= tol.max_condition;

    r.row_deviation = (Q.row(n - 1).transpose() - w).cwiseAbs().maxCoeff();
    r.row_condition = r.row_deviation <= tol.equality;

    Vector col = Q * Vector::Ones(n);
    col[n - 1] -= w.sum();
    r.column_deviation = col.cwiseAbs().maxCoeff();
    r.column_condition = r.column_deviation <= tol.equality;

    if (!r.invertible) {
        r.worst_value = std::numeric_limits<double>::quiet_NaN();
        return r;
    }

    Matrix G;
    if (Qinv) {
        G = similarity(Q, x, *Qinv);
    } else {
        // G Q = Q diag(x)  <=>  Q' G' = (Q diag(x))'
        Matrix rhs = (Q * x.asDiagonal()).transpose();
        G = Q.transpose().fullPivLu().solve(rhs).transpose();
    }

    r.worst_value = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i != j && G(i, j) > r.worst_value) {
                r.worst_value = G(i, j);
                r.worst_row = static_cast<int>(i);
                r.worst_col = static_cast<int>(j);
            }
        }
    }
    if (n == 1)
        r.worst_value = 0.0;
    r.offdiag_condition = r.worst_value <= tol.sign;
    return r;
}

AdmissibilityReport check_admissible(const AdmissibleMatrix& m, const AdmissibilityTolerance& tol)
{
    return check_admissible(m.Q, m.w, m.x, tol, m.Qinv);
}

Matrix canonical_inverse(const Vector& w)
{
    require_positive_weights(w);
    const Eigen::Index n = w.size();

    // partial[j] = w_1 + ... + w_{j+1} (0-based)
    Vector partial(n);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        acc += w[j];
        partial[j] = acc;
    }

    Matrix R = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        R(i, n - 1) = 1.0 / partial[n - 1];
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const double upper = w[j + 1] / (partial[j] * partial[j + 1]);
        for (Eigen::Index i = 0; i <= j; ++i)
            R(i, j) = upper;
        R(j + 1, j) = -1.0 / partial[j + 1];
    }
    return R;
}

AdmissibleMatrix build_canonical(const Vector& w, const Vector& x)
{
    require_positive_weights(w);
    require_matching(w, x);
    require_ordered_nodes(x);
    const Eigen::Index n = w.size();

    Matrix Q = Matrix::Zero(n, n);
    double partial = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        partial += w[i];
        for (Eigen::Index j = 0; j <= i; ++j)
            Q(i, j) = w[j];
        if (i + 1 < n)
            Q(i, i + 1) = -partial;
    }

    AdmissibleMatrix m{Q, canonical_inverse(w), Matrix(), w, x};
    m.G = similarity(m.Q, x, m.Qinv);
    return m;
}

AdmissibleMatrix build_q2(const Vector& w, const Vector& x, double q)
{
    if (w.size() != 2)
        throw std::invalid_argument("build_q2 requires N = 2");
    require_positive_weights(w);
    require_matching(w, x);
    require_ordered_nodes(x);
    if (!(q > 0.0) || !std::isfinite(q))
        throw std::invalid_argument("build_q2 requires q > 0");

    Matrix Q(2, 2);
    Q << q, -q, w[0], w[1];
    const double wbar = w[0] + w[1];
    // det = q (w1 + w2)
    Matrix Qinv(2, 2);
    Qinv << w[1] / (q * wbar), 1.0 / wbar, -w[0] / (q * wbar), 1.0 / wbar;

    AdmissibleMatrix m{Q, Qinv, Matrix(), w, x};
    m.G = similarity(Q, x, Qinv);
    return m;
}

Q3Bounds q3_bounds(const Vector& w, const Vector& x)
{
    if (w.size() != 3 || x.size() != 3)
        throw std::invalid_argument("q3_bounds requires N = 3");
    require_positive_weights(w);
    require_ordered_nodes(x);
    const double y1 = x[1] - x[0];
    const double y2 = x[2] - x[1];
    if (!(y1 > 0.0 && y2 > 0.0))
        throw std::invalid_argument("q3_bounds requires strictly increasing nodes");

    const double w1 = w[0], w2 = w[1], w3 = w[2];
    const double c = w3 * y1 + w2 * (y1 + y2) - w1 * y2;
    const double root = std::sqrt(c * c + 4.0 * w1 * w2 * y2 * (y1 + y2));
    const double denom = w2 * y1 + w3 * (y1 + y2);

    Q3Bounds b;
    b.a_lo = std::max((-c + root) / (2.0 * w1 * y2), (w2 / w1) * (w1 * y1 - w3 * y2) / denom);
    b.a_hi = (y1 + y2) / y2;
    b.b_lo = std::max(0.0, (w2 / w1) * (-w1 * y1 + w3 * y2) / denom);
    b.b_hi = (c + root) / (2.0 * w1 * y2);
    return b;
}

AdmissibleMatrix build_q3(const Vector& w, const Vector& x, double a, double b)
{
    if (w.size() != 3 || x.size() != 3)
        throw std::invalid_argument("build_q3 requires N = 3");
    require_positive_weights(w);
    require_ordered_nodes(x);
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("build_q3: a and b must be finite");
    if (a + b == 0.0)
        throw std::invalid_argument("build_q3: a + b = 0 gives a singular matrix");

    Matrix Q(3, 3);
    Q << 1.0, -a, -1.0 + a,
         1.0, b, -1.0 - b,
         w[0], w[1], w[2];
    return from_matrix(Q, w, x);
}

AdmissibleMatrix from_matrix(const Matrix& Q, const Vector& w, const Vector& x)
{
    require_matching(w, x);
    if (Q.rows() != Q.cols() || Q.rows() != w.size())
        throw std::invalid_argument("from_matrix: dimension mismatch");
    Eigen::FullPivLU<Matrix> lu(Q);
    if (!lu.isInvertible())
        throw std::invalid_argument("from_matrix: Q is singular");
    AdmissibleMatrix m{Q, lu.inverse(), Matrix(), w, x};
    m.G = similarity(Q, x, m.Qinv);
    return m;
}

}  // namespace vcone
