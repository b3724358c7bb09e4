#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "vcone/cone.hpp"

namespace vcone {

/// Exact flow over a step h of the linear ODE z' = A z + b:
///   z(h) = E z(0) + c,  E = exp(A h),  c = int_0^h exp(A s) ds b.
struct Propagator {
    double h = 0.0;
    Matrix E;
    Vector c;

    Vector apply(const Vector& z) const { return E * z + c; }
};

/// Drift part of the multifactor square-root model:
///   A = -lambda 1 w' - diag(x),  b = theta 1 + diag(x) v0.
class DriftSystem {
public:
    explicit DriftSystem(const ModelParams& params);

    const Matrix& A() const { return A_; }
    const Vector& b() const { return b_; }

    /// Computed from the exponential of the augmented block [[A h, b h], [0, 0]],
    /// so A is never inverted.
    Propagator propagator(double h) const;

private:
    Matrix A_;
    Vector b_;
};

/// exp(M) by scaling and squaring with a Pade approximant.
Matrix matrix_exponential(const Matrix& M);

/// D(z, h): exact solution of the drift ODE after time h >= 0.
Vector ode_step(const DriftSystem& system, const Vector& z, double h);

/// Three-point law of the stochastic step: Y_h takes value x_i with
/// probability p_i and matches the first three raw moments
///   m1 = x, m2 = x^2 + x z, m3 = x^3 + 3 x^2 z + 1.5 x z^2.
struct ThreePointLaw {
    double x = 0.0;  ///< input aggregate
    double z = 0.0;  ///< variance budget nu^2 wbar^2 h
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;
    double p1 = 1.0, p2 = 0.0, p3 = 0.0;

    bool degenerate() const { return p1 == 1.0 && x1 == x2 && x2 == x3; }

    /// Inverse-CDF on [0, p1), [p1, p1 + p2), [p1 + p2, 1).
    double sample(double u) const
    {
        if (u < p1)
            return x1;
        if (u < p1 + p2)
            return x2;
        return x3;
    }
};

/// Inputs at or below this level collapse the law to a point mass at x.
inline constexpr double kDegenerateThreshold = 1e-14;

ThreePointLaw three_point_law(double x, double z);

/// S^(y, h): moves y along 1 so that w'y becomes a draw from the three-point
/// law with x = w'y and z = nu^2 wbar^2 h. Throws ConeViolation when
/// w'y < -agg_tol.
Vector stochastic_step(const ModelParams& params, const Vector& y, double h, double u,
                       double agg_tol = kDefaultMembershipTol);

struct ConeViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Test hook for mutation checks of the splitting.
enum class SplittingVariant { strang, skip_final_half_drift };

/// Half-step propagators cached for one (system, h).
class StrangStepper {
public:
    StrangStepper(const ModelParams& params, const DriftSystem& system, double h);

    double h() const { return h_; }
    const Propagator& half() const { return half_; }

    /// D(S^(D(v, h/2), h), h/2).
    Vector step(const Vector& v, double u) const;

    /// Same step; also reports the aggregate w'y fed to the stochastic part.
    Vector step(const Vector& v, double u, double& agg_in,
                SplittingVariant variant = SplittingVariant::strang) const;

private:
    const ModelParams* params_;
    double h_;
    Propagator half_;
};

Vector strang_step(const ModelParams& params, const DriftSystem& system, const Vector& v, double h, double u);

/// Per-path random stream: path k of master seed s draws from a
/// std::mt19937_64 seeded with seed_seq{lo(s), hi(s), lo(k), hi(k)}.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path);
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

enum class RecordMode { terminal, full };

struct PathConfig {
    double T = 1.0;
    std::size_t M = 1;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    RecordMode record = RecordMode::terminal;
    std::size_t record_stride = 1;  ///< with RecordMode::full, keep every k-th step
    unsigned threads = 1;
    std::optional<Vector> initial;  ///< defaults to params.v0()
    SplittingVariant variant = SplittingVariant::strang;

    void validate() const;
};

struct PathSummary {
    double min_transformed = 0.0;  ///< min over steps of min_i (Q (V - shift))_i
    double min_aggregate = 0.0;    ///< min over steps of w'V
    std::size_t n_violations = 0;  ///< steps with min_transformed < -tol
    std::size_t n_negative_aggregate = 0;  ///< stochastic steps fed w'y < 0
    Vector terminal;
};

struct RecordedState {
    std::size_t path = 0;
    std::size_t step = 0;
    double t = 0.0;
    Vector v;
};

struct SampleCloud {
    std::vector<PathSummary> paths;
    std::vector<RecordedState> states;  ///< ordered by (path, step)
    Vector terminal_mean_state;

    double min_transformed() const;
    double min_aggregate() const;
    std::size_t n_violations() const;
    std::size_t n_negative_aggregate() const;
};

/// Runs n_paths independent trajectories of the Strang scheme on the uniform
/// grid t_j = j T / M. The domain supplies Q and the shift used for auditing.
/// Throws std::invalid_argument when the initial state is outside the domain
/// unless allow_outside is set.
SampleCloud simulate(const ModelParams& params, const ConeDomain& domain, const PathConfig& config,
                     bool allow_outside = false);

/// E[V_t] of the continuous model: solves m' = A m + b from m(0) = initial.
Vector mean_oracle(const ModelParams& params, double t, const std::optional<Vector>& initial = std::nullopt);

/// Resolves a worker count: explicit value if nonzero, else the
/// VOLTERRA_CONE_THREADS environment variable, else 1.
unsigned resolve_threads(unsigned requested);

}  // namespace vcone
