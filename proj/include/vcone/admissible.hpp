#pragma once

#include <optional>

#include "vcone/model.hpp"

namespace vcone {

/// Tolerances used when deciding admissibility.
struct AdmissibilityTolerance {
    double equality = 1e-10;   ///< row/column conditions and Q*Qinv = Id
    double sign = 1e-12;       ///< off-diagonals of Q diag(x) Q^-1
    double max_condition = 1e12;
};

struct AdmissibilityReport {
    bool invertible = false;
    double condition_number = 0.0;

    bool row_condition = false;      ///< e_N' Q = w'
    double row_deviation = 0.0;

    bool column_condition = false;   ///< Q 1 = wbar e_N
    double column_deviation = 0.0;

    bool offdiag_condition = false;  ///< (Q diag(x) Q^-1)_ij <= 0 for i != j
    int worst_row = -1;              ///< 0-based; -1 when not evaluated
    int worst_col = -1;
    double worst_value = 0.0;

    bool admissible() const
    {
        return invertible && row_condition && column_condition && offdiag_condition;
    }
};

/// A matrix Q together with its inverse and the similarity transform
/// G = Q diag(x) Q^-1 for a fixed (w, x).
struct AdmissibleMatrix {
    Matrix Q;
    Matrix Qinv;
    Matrix G;
    Vector w;
    Vector x;

    std::size_t dim() const { return static_cast<std::size_t>(Q.rows()); }
};

/// Evaluates the four admissibility conditions. G is obtained from a linear
/// solve against Q unless @p Qinv is supplied. Never throws for singular or
/// non-admissible input; the report says what failed.
AdmissibilityReport check_admissible(const Matrix& Q, const Vector& w, const Vector& x,
                                     const AdmissibilityTolerance& tol = {},
                                     const std::optional<Matrix>& Qinv = std::nullopt);

AdmissibilityReport check_admissible(const AdmissibleMatrix& m, const AdmissibilityTolerance& tol = {});

/// Lower-Hessenberg matrix with q_ij = w_j (j <= i), q_{i,i+1} = -(w_1 + ... + w_i).
/// The inverse is filled from its closed form, not by numerical inversion.
AdmissibleMatrix build_canonical(const Vector& w, const Vector& x);

/// Closed-form inverse of the canonical matrix.
Matrix canonical_inverse(const Vector& w);

/// N = 2 family Q = [[q, -q], [w1, w2]], admissible for every q > 0.
AdmissibleMatrix build_q2(const Vector& w, const Vector& x, double q);

/// Feasible intervals of the N = 3 family Q = [[1, -a, a-1], [1, b, -1-b], w'].
struct Q3Bounds {
    double a_lo;
    double a_hi;
    double b_lo;
    double b_hi;

    bool contains(double a, double b) const { return a_lo <= a && a <= a_hi && b_lo <= b && b <= b_hi; }
};

/// Requires strictly increasing nodes.
Q3Bounds q3_bounds(const Vector& w, const Vector& x);

/// Builds the N = 3 matrix for any (a, b) with a + b != 0. Out-of-bounds
/// parameters are accepted; check_admissible flags them.
AdmissibleMatrix build_q3(const Vector& w, const Vector& x, double a, double b);

/// Wraps an arbitrary invertible Q (inverse and G computed numerically).
AdmissibleMatrix from_matrix(const Matrix& Q, const Vector& w, const Vector& x);

}  // namespace vcone
