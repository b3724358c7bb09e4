#pragma once

#include <cstdint>
#include <vector>

#include "vcone/admissible.hpp"

namespace vcone {

inline constexpr double kDefaultMembershipTol = 1e-9;

/// y0~ = mu diag(x)^-1 1 with mu chosen so that w'y0~ = Y0.
Vector canonical_anchor(const Vector& w, const Vector& x, double Y0);

/// The scalar mu of canonical_anchor: Y0 / sum_i w_i / x_i.
double anchor_level(const Vector& w, const Vector& x, double Y0);

/// State space Q^-1 R_+^N + shift, where shift = y0 - y0~ has w'shift = 0.
class ConeDomain {
public:
    ConeDomain(AdmissibleMatrix matrix, Vector shift, double tol = kDefaultMembershipTol);

    /// Domain for a model anchored at y0: shift = y0 - canonical_anchor(w, x, w'y0).
    static ConeDomain for_anchor(AdmissibleMatrix matrix, const Vector& y0, double tol = kDefaultMembershipTol);

    const AdmissibleMatrix& matrix() const { return matrix_; }
    const Vector& shift() const { return shift_; }
    double tol() const { return tol_; }

    /// Q (y - shift).
    Vector transformed(const Vector& y) const;
    bool contains(const Vector& y) const;

private:
    AdmissibleMatrix matrix_;
    Vector shift_;
    double tol_;
};

struct Halfspace {
    Vector coeff;
    double bound;  ///< constraint reads coeff' y >= bound

    bool satisfied(const Vector& y, double tol) const { return coeff.dot(y) >= bound - tol; }
};

/// The N inequalities describing the canonical cone (zero shift):
/// w'y >= 0 and sum_{j<=i} w_j y_j - (sum_{j<=i} w_j) y_{i+1} >= 0.
std::vector<Halfspace> canonical_halfspaces(const Vector& w);

/// True iff every entry of Q diag(x)^-1 Q^-1 is >= -1e-12.
bool m_matrix_inverse_check(const AdmissibleMatrix& matrix, double tol = 1e-12);

struct BoundaryConditionReport {
    std::size_t n_points = 0;            ///< sampled boundary points (all faces)
    std::size_t n_drift_violations = 0;  ///< inward-drift failures below -drift_tol
    std::size_t n_diffusion_violations = 0;
    double worst_drift = 0.0;            ///< min over checked points of e_i' drift on face i
    int worst_face = -1;                 ///< 0-based
    Vector worst_point;
    double max_abs_diffusion = 0.0;      ///< max |e_i' sigma~| over points on face i

    bool ok() const { return n_drift_violations == 0 && n_diffusion_violations == 0; }
};

/// Samples points z in R_+^N with z_i = 0 on each face i and audits the
/// transformed coefficients
///   drift(z)     = -G z + wbar (b(z_N) + mu) e_N,
///   diffusion(z) = wbar sigma(z_N) e_N,
/// for the tangency/inward-pointing conditions. The corner z = 0 is always
/// included.
BoundaryConditionReport boundary_condition_check(const AdmissibleMatrix& matrix, const ModelParams& params,
                                                 double mu, std::size_t n_samples, std::uint64_t seed = 1,
                                                 double drift_tol = 1e-10);

}  // namespace vcone
