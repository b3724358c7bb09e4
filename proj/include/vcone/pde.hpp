#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vcone/admissible.hpp"

namespace vcone {

struct Interval {
    double lo;
    double hi;
    double length() const { return hi - lo; }
};

enum class TimeScheme { implicit_euler, crank_nicolson };
enum class Advection { central, upwind };

/// Backward pricing PDE in the transformed coordinates z = Q v,
///
///   u_t - (grad u)' G (z - z0) + wbar (theta - lambda z_N) u_{z_N}
///       + 1/2 nu^2 wbar^2 z_N u_{z_N z_N} = phi,
///
/// with manufactured solution u~(z, t) = 1 + sum_i alpha_i z_i^2 + beta t,
/// Dirichlet data u~ on the boundary of a box and terminal data u~(., T).
struct PdeProblem {
    ModelParams params;
    AdmissibleMatrix matrix;
    Vector z0;
    Vector alpha;
    double beta = 0.0;
    double T = 1.0;
    std::vector<Interval> box;
    std::size_t n = 2;  ///< cells per dimension and number of time steps
    TimeScheme scheme = TimeScheme::crank_nicolson;

    std::size_t dim() const { return box.size(); }
    void validate() const;
};

/// Fills z0 = Q v0 and validates.
PdeProblem make_pde_problem(const ModelParams& params, const AdmissibleMatrix& matrix, Vector alpha, double beta,
                            double T, std::vector<Interval> box, std::size_t n,
                            TimeScheme scheme = TimeScheme::crank_nicolson);

double manufactured_solution(const PdeProblem& problem, const Vector& z, double t);

/// phi(z) = beta - 2 sum_i alpha_i z_i sum_j G_ij (z_j - z0_j)
///        + 2 alpha_N wbar (theta - lambda z_N) z_N + nu^2 wbar^2 alpha_N z_N.
double source_term(const PdeProblem& problem, const Vector& z);

using SourceFn = std::function<double(const Vector&)>;

/// Analytic PDE operator applied to u~ minus the source, at (z, t).
double pde_residual(const PdeProblem& problem, const Vector& z, double t, const SourceFn& source);

/// Max |residual| over random points of box x [0, T].
double residual_check(const PdeProblem& problem, std::size_t n_samples, std::uint64_t seed = 7,
                      const SourceFn& source = {});

struct SolveReport {
    std::size_t n = 0;
    double l2_error = 0.0;        ///< L2(box) norm of the multilinear reconstruction error at t = 0
    double nodal_l2_error = 0.0;  ///< trapezoid-weighted nodal error at t = 0 (interior nodes)
    double max_nodal_error = 0.0;
    bool blow_up = false;
    bool fallback_upwind = false;
    double runtime = 0.0;         ///< seconds
};

inline constexpr double kBlowUpThreshold = 1e6;

struct SolveOptions {
    Advection advection = Advection::central;
    /// Zero alpha/beta/phi sanity runs use this to replace the source.
    SourceFn source;
    bool allow_upwind_fallback = true;
};

SolveReport solve(const PdeProblem& problem, const SolveOptions& options = {});

/// Nodal values at t = 0 on the full (n+1)^N grid, first coordinate fastest.
/// Throws std::runtime_error on NaN/Inf.
std::vector<double> solve_nodal(const PdeProblem& problem, const SolveOptions& options = {});

struct ConvergenceRow {
    SolveReport report;
    double order = 0.0;  ///< NaN for the first row or after a blow-up
};

std::vector<ConvergenceRow> convergence_study(const PdeProblem& problem, const std::vector<std::size_t>& n_list,
                                              unsigned threads = 1);

/// CSV with header n,l2_error,order,blow_up,fallback_upwind,runtime_s,nodal_l2_error.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

/// Named truncation boxes: "box1" = [0,4]^2, "box2" = [-0.5,3.5]^2,
/// "box3" = [-0.5,3.5] x [0,4].
std::vector<Interval> box_preset(const std::string& name);

}  // namespace vcone
