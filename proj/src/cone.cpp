#include "vcone/cone.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace vcone {

double anchor_level(const Vector& w, const Vector& x, double Y0)
{
    if (!(Y0 >= 0.0))
        throw std::invalid_argument("canonical_anchor: Y0 must be nonnegative");
    if (w.size() != x.size())
        throw std::invalid_argument("canonical_anchor: dimension mismatch");
    double denom = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        denom += w[i] / x[i];
    return Y0 / denom;
}

Vector canonical_anchor(const Vector& w, const Vector& x, double Y0)
{
    const double mu = anchor_level(w, x, Y0);
    return (mu * x.cwiseInverse()).eval();
}

ConeDomain::ConeDomain(AdmissibleMatrix matrix, Vector shift, double tol)
    : matrix_(std::move(matrix)), shift_(std::move(shift)), tol_(tol)
{
    if (shift_.size() != matrix_.Q.rows())
        throw std::invalid_argument("ConeDomain: shift has wrong dimension");
}

ConeDomain ConeDomain::for_anchor(AdmissibleMatrix matrix, const Vector& y0, double tol)
{
    const double Y0 = matrix.w.dot(y0);
    if (Y0 < 0.0)
        throw std::invalid_argument("ConeDomain: w'y0 must be nonnegative");
    Vector shift = y0 - canonical_anchor(matrix.w, matrix.x, Y0);
    return ConeDomain(std::move(matrix), std::move(shift), tol);
}

Vector ConeDomain::transformed(const Vector& y) const
{
    if (y.size() != shift_.size())
        throw std::invalid_argument("ConeDomain: dimension mismatch");
    return matrix_.Q * (y - shift_);
}

bool ConeDomain::contains(const Vector& y) const
{
    return transformed(y).minCoeff() >= -tol_;
}

std::vector<Halfspace> canonical_halfspaces(const Vector& w)
{
    const Eigen::Index n = w.size();
    std::vector<Halfspace> out;
    out.reserve(static_cast<std::size_t>(n));
    out.push_back({w, 0.0});
    double partial = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        partial += w[i];
        Vector c = Vector::Zero(n);
        c.head(i + 1) = w.head(i + 1);
        c[i + 1] = -partial;
        out.push_back({c, 0.0});
    }
    return out;
}

bool m_matrix_inverse_check(const AdmissibleMatrix& matrix, double tol)
{
    const Matrix M = matrix.Q * matrix.x.cwiseInverse().asDiagonal() * matrix.Qinv;
    return M.minCoeff() >= -tol;
}

BoundaryConditionReport boundary_condition_check(const AdmissibleMatrix& matrix, const ModelParams& params,
                                                 double mu, std::size_t n_samples, std::uint64_t seed,
                                                 double drift_tol)
{
    if (!(mu >= 0.0))
        throw std::invalid_argument("boundary_condition_check: mu must be nonnegative");
    const Eigen::Index n = matrix.Q.rows();
    if (static_cast<std::size_t>(n) != params.dim())
        throw std::invalid_argument("boundary_condition_check: dimension mismatch");

    const double wbar = params.weight_sum();
    const double box = 10.0 * std::max(params.v0().maxCoeff(), params.theta() / params.nodes().minCoeff());
    const double hi = box > 0.0 ? box : 1.0;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, hi);

    BoundaryConditionReport rep;
    rep.worst_drift = std::numeric_limits<double>::infinity();

    auto audit = [&](const Vector& z, Eigen::Index face) {
        const double zN = z[n - 1];
        Vector drift = -matrix.G * z;
        drift[n - 1] += wbar * (params.drift(zN) + mu);
        Vector diffusion = Vector::Zero(n);
        diffusion[n - 1] = wbar * params.diffusion(zN);

        ++rep.n_points;
        const double d = drift[face];
        if (d < rep.worst_drift) {
            rep.worst_drift = d;
            rep.worst_face = static_cast<int>(face);
            rep.worst_point = z;
        }
        if (d < -drift_tol)
            ++rep.n_drift_violations;
        const double s = std::abs(diffusion[face]);
        rep.max_abs_diffusion = std::max(rep.max_abs_diffusion, s);
        if (s != 0.0)
            ++rep.n_diffusion_violations;
    };

    const Vector corner = Vector::Zero(n);
    for (Eigen::Index face = 0; face < n; ++face)
        audit(corner, face);

    for (std::size_t k = 0; k < n_samples; ++k) {
        for (Eigen::Index face = 0; face < n; ++face) {
            Vector z(n);
            for (Eigen::Index j = 0; j < n; ++j)
                z[j] = coord(rng);
            z[face] = 0.0;
            audit(z, face);
        }
    }
    return rep;
}

}  // namespace vcone
