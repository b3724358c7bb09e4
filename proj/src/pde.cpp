#include "vcone/pde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace vcone {

void PdeProblem::validate() const
{
    const std::size_t N = params.dim();
    if (N < 1 || N > 3)
        throw std::invalid_argument("PdeProblem: only N in {1, 2, 3} is supported");
    if (box.size() != N || static_cast<std::size_t>(alpha.size()) != N || static_cast<std::size_t>(z0.size()) != N)
        throw std::invalid_argument("PdeProblem: box, alpha and z0 must have dimension N");
    if (matrix.dim() != N)
        throw std::invalid_argument("PdeProblem: matrix dimension mismatch");
    for (const auto& iv : box) {
        if (!(iv.length() > 0.0) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
            throw std::invalid_argument("PdeProblem: box sides must have positive length");
    }
    if (n < 2)
        throw std::invalid_argument("PdeProblem: n must be at least 2");
    if (!alpha.allFinite() || !std::isfinite(beta))
        throw std::invalid_argument("PdeProblem: alpha and beta must be finite");
    if (!(T > 0.0))
        throw std::invalid_argument("PdeProblem: T must be positive");
}

PdeProblem make_pde_problem(const ModelParams& params, const AdmissibleMatrix& matrix, Vector alpha, double beta,
                            double T, std::vector<Interval> box, std::size_t n, TimeScheme scheme)
{
    PdeProblem p{params, matrix, matrix.Q * params.v0(), std::move(alpha), beta, T, std::move(box), n, scheme};
    p.validate();
    return p;
}

double manufactured_solution(const PdeProblem& problem, const Vector& z, double t)
{
    return 1.0 + problem.alpha.dot(z.cwiseAbs2()) + problem.beta * t;
}

double source_term(const PdeProblem& problem, const Vector& z)
{
    const auto N = static_cast<Eigen::Index>(problem.dim());
    const ModelParams& m = problem.params;
    const double wbar = m.weight_sum();
    const double zN = z[N - 1];
    const double aN = problem.alpha[N - 1];
    const Vector drift = problem.matrix.G * (z - problem.z0);
    return problem.beta - 2.0 * problem.alpha.cwiseProduct(z).dot(drift) + 2.0 * aN * wbar * m.drift(zN) * zN
           + m.nu() * m.nu() * wbar * wbar * aN * zN;
}

double pde_residual(const PdeProblem& problem, const Vector& z, double /*t*/, const SourceFn& source)
{
    const auto N = static_cast<Eigen::Index>(problem.dim());
    const ModelParams& m = problem.params;
    const double wbar = m.weight_sum();
    const double zN = z[N - 1];

    // derivatives of u~
    const double u_t = problem.beta;
    const Vector grad = 2.0 * problem.alpha.cwiseProduct(z);
    const double u_NN = 2.0 * problem.alpha[N - 1];

    const double lhs = u_t - grad.dot(problem.matrix.G * (z - problem.z0)) + wbar * m.drift(zN) * grad[N - 1]
                       + 0.5 * m.nu() * m.nu() * wbar * wbar * zN * u_NN;
    const double phi = source ? source(z) : source_term(problem, z);
    return lhs - phi;
}

double residual_check(const PdeProblem& problem, std::size_t n_samples, std::uint64_t seed, const SourceFn& source)
{
    const auto N = static_cast<Eigen::Index>(problem.dim());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        Vector z(N);
        for (Eigen::Index d = 0; d < N; ++d) {
            const auto& iv = problem.box[static_cast<std::size_t>(d)];
            z[d] = iv.lo + iv.length() * unit(rng);
        }
        const double t = problem.T * unit(rng);
        worst = std::max(worst, std::abs(pde_residual(problem, z, t, source)));
    }
    return worst;
}

namespace {

/// Tensor grid with (n+1)^N nodes, first coordinate varying fastest.
struct Grid {
    std::size_t N;
    std::size_t n;
    std::vector<Interval> box;
    std::vector<double> h;
    std::size_t n_nodes;

    Grid(const std::vector<Interval>& b, std::size_t cells) : N(b.size()), n(cells), box(b), h(b.size())
    {
        n_nodes = 1;
        for (std::size_t d = 0; d < N; ++d) {
            h[d] = box[d].length() / static_cast<double>(n);
            n_nodes *= n + 1;
        }
    }

    void unpack(std::size_t idx, std::size_t* multi) const
    {
        for (std::size_t d = 0; d < N; ++d) {
            multi[d] = idx % (n + 1);
            idx /= n + 1;
        }
    }

    std::size_t stride(std::size_t d) const
    {
        std::size_t s = 1;
        for (std::size_t k = 0; k < d; ++k)
            s *= n + 1;
        return s;
    }

    bool on_boundary(const std::size_t* multi) const
    {
        for (std::size_t d = 0; d < N; ++d)
            if (multi[d] == 0 || multi[d] == n)
                return true;
        return false;
    }

    Vector point(const std::size_t* multi) const
    {
        Vector z(static_cast<Eigen::Index>(N));
        for (std::size_t d = 0; d < N; ++d)
            z[static_cast<Eigen::Index>(d)] =
                (multi[d] == n) ? box[d].hi : box[d].lo + static_cast<double>(multi[d]) * h[d];
        return z;
    }
};

using SpMat = Eigen::SparseMatrix<double>;

struct Discretization {
    SpMat L;             ///< operator restricted to interior unknowns
    Vector g_space;      ///< boundary contribution of the spatial part of u~
    Vector g_time;       ///< boundary contribution per unit of beta t
    Vector phi;          ///< source at interior nodes
    std::vector<std::size_t> interior;  ///< grid index of each unknown
    std::vector<long> unknown;          ///< unknown index of each grid node, -1 on the boundary
};

Discretization discretize(const PdeProblem& problem, const Grid& grid, Advection advection, const SourceFn& source)
{
    const std::size_t N = grid.N;
    const auto NN = static_cast<Eigen::Index>(N);
    const ModelParams& m = problem.params;
    const double wbar = m.weight_sum();
    const double diff_scale = 0.5 * m.nu() * m.nu() * wbar * wbar;

    Discretization disc;
    disc.unknown.assign(grid.n_nodes, -1);
    std::vector<std::size_t> multi(N);
    for (std::size_t idx = 0; idx < grid.n_nodes; ++idx) {
        grid.unpack(idx, multi.data());
        if (!grid.on_boundary(multi.data())) {
            disc.unknown[idx] = static_cast<long>(disc.interior.size());
            disc.interior.push_back(idx);
        }
    }

    const auto n_unknowns = static_cast<Eigen::Index>(disc.interior.size());
    disc.g_space = Vector::Zero(n_unknowns);
    disc.g_time = Vector::Zero(n_unknowns);
    disc.phi = Vector::Zero(n_unknowns);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_unknowns) * (2 * N + 1));

    std::vector<std::size_t> nb(N);
    auto add = [&](Eigen::Index row, std::size_t node, double coeff) {
        if (coeff == 0.0)
            return;
        const long col = disc.unknown[node];
        if (col >= 0) {
            trip.emplace_back(row, col, coeff);
        } else {
            grid.unpack(node, nb.data());
            const Vector zb = grid.point(nb.data());
            disc.g_space[row] += coeff * manufactured_solution(problem, zb, 0.0);
            disc.g_time[row] += coeff;
        }
    };

    for (Eigen::Index row = 0; row < n_unknowns; ++row) {
        const std::size_t idx = disc.interior[static_cast<std::size_t>(row)];
        grid.unpack(idx, multi.data());
        const Vector z = grid.point(multi.data());
        Vector drift = -problem.matrix.G * (z - problem.z0);
        drift[NN - 1] += wbar * m.drift(z[NN - 1]);

        disc.phi[row] = source ? source(z) : source_term(problem, z);

        double diag = 0.0;
        for (std::size_t d = 0; d < N; ++d) {
            const std::size_t s = grid.stride(d);
            const double h = grid.h[d];
            const double b = drift[static_cast<Eigen::Index>(d)];
            double lo = 0.0, hi = 0.0;
            if (advection == Advection::central) {
                lo -= b / (2.0 * h);
                hi += b / (2.0 * h);
            } else if (b > 0.0) {
                hi += b / h;
                diag -= b / h;
            } else {
                lo -= b / h;
                diag += b / h;
            }
            if (d == N - 1) {
                const double c = diff_scale * z[NN - 1];
                lo += c / (h * h);
                hi += c / (h * h);
                diag -= 2.0 * c / (h * h);
            }
            add(row, idx - s, lo);
            add(row, idx + s, hi);
        }
        if (diag != 0.0)
            trip.emplace_back(row, row, diag);
    }

    disc.L.resize(n_unknowns, n_unknowns);
    disc.L.setFromTriplets(trip.begin(), trip.end());
    return disc;
}

/// Returns nodal values at t = 0, or nullopt on NaN/Inf or overflow.
std::optional<std::vector<double>> march(const PdeProblem& problem, const Grid& grid, Advection advection,
                                         const SourceFn& source)
{
    const Discretization disc = discretize(problem, grid, advection, source);
    const auto n_unknowns = static_cast<Eigen::Index>(disc.interior.size());
    const double dt = problem.T / static_cast<double>(problem.n);
    const bool cn = problem.scheme == TimeScheme::crank_nicolson;
    const double theta = cn ? 0.5 : 1.0;

    SpMat I(n_unknowns, n_unknowns);
    I.setIdentity();
    SpMat lhs = I - (theta * dt) * disc.L;
    SpMat rhs_op = I + ((1.0 - theta) * dt) * disc.L;
    lhs.makeCompressed();

    Eigen::SparseLU<SpMat> lu;
    lu.compute(lhs);
    if (lu.info() != Eigen::Success)
        return std::nullopt;

    std::vector<std::size_t> multi(grid.N);
    Vector u(n_unknowns);
    for (Eigen::Index k = 0; k < n_unknowns; ++k) {
        grid.unpack(disc.interior[static_cast<std::size_t>(k)], multi.data());
        u[k] = manufactured_solution(problem, grid.point(multi.data()), problem.T);
    }

    auto boundary = [&](double t) -> Vector { return disc.g_space + (problem.beta * t) * disc.g_time; };

    // time runs backward from T; tau = T - t runs forward
    for (std::size_t k = 0; k < problem.n; ++k) {
        const double t_old = problem.T - static_cast<double>(k) * dt;
        const double t_new = (k + 1 == problem.n) ? 0.0 : problem.T - static_cast<double>(k + 1) * dt;
        Vector rhs = rhs_op * u + dt * (theta * boundary(t_new) + (1.0 - theta) * boundary(t_old)) - dt * disc.phi;
        u = lu.solve(rhs);
        if (lu.info() != Eigen::Success || !u.allFinite() || u.cwiseAbs().maxCoeff() > 1e150)
            return std::nullopt;
    }

    std::vector<double> nodal(grid.n_nodes);
    for (std::size_t idx = 0; idx < grid.n_nodes; ++idx) {
        const long k = disc.unknown[idx];
        if (k >= 0) {
            nodal[idx] = u[k];
        } else {
            grid.unpack(idx, multi.data());
            nodal[idx] = manufactured_solution(problem, grid.point(multi.data()), 0.0);
        }
    }
    return nodal;
}

struct ErrorNorms {
    double l2;
    double nodal_l2;
    double max_nodal;
};

ErrorNorms error_norms(const PdeProblem& problem, const Grid& grid, const std::vector<double>& nodal)
{
    const std::size_t N = grid.N;
    std::vector<std::size_t> multi(N);

    ErrorNorms e{0.0, 0.0, 0.0};
    double cell_volume = 1.0;
    for (std::size_t d = 0; d < N; ++d)
        cell_volume *= grid.h[d];

    for (std::size_t idx = 0; idx < grid.n_nodes; ++idx) {
        grid.unpack(idx, multi.data());
        if (grid.on_boundary(multi.data()))
            continue;
        const double err = nodal[idx] - manufactured_solution(problem, grid.point(multi.data()), 0.0);
        e.nodal_l2 += cell_volume * err * err;
        e.max_nodal = std::max(e.max_nodal, std::abs(err));
    }
    e.nodal_l2 = std::sqrt(e.nodal_l2);

    // 3-point Gauss-Legendre per direction on each cell; exact for the
    // squared error of a multilinear interpolant against a quadratic.
    const double gp[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
    const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

    std::size_t n_cells = 1;
    std::size_t n_quad = 1;
    for (std::size_t d = 0; d < N; ++d) {
        n_cells *= grid.n;
        n_quad *= 3;
    }
    const std::size_t n_corners = std::size_t{1} << N;

    std::vector<std::size_t> cell(N);
    std::vector<double> frac(N);
    Vector z(static_cast<Eigen::Index>(N));
    double sum = 0.0;
    for (std::size_t c = 0; c < n_cells; ++c) {
        std::size_t rem = c;
        std::size_t base = 0;
        for (std::size_t d = 0; d < N; ++d) {
            cell[d] = rem % grid.n;
            rem /= grid.n;
            base += cell[d] * grid.stride(d);
        }
        for (std::size_t q = 0; q < n_quad; ++q) {
            std::size_t qr = q;
            double weight = cell_volume;
            for (std::size_t d = 0; d < N; ++d) {
                const std::size_t k = qr % 3;
                qr /= 3;
                frac[d] = gp[k];
                weight *= gw[k];
                z[static_cast<Eigen::Index>(d)] =
                    grid.box[d].lo + (static_cast<double>(cell[d]) + gp[k]) * grid.h[d];
            }
            double interp = 0.0;
            for (std::size_t corner = 0; corner < n_corners; ++corner) {
                double coeff = 1.0;
                std::size_t node = base;
                for (std::size_t d = 0; d < N; ++d) {
                    if (corner & (std::size_t{1} << d)) {
                        coeff *= frac[d];
                        node += grid.stride(d);
                    } else {
                        coeff *= 1.0 - frac[d];
                    }
                }
                interp += coeff * nodal[node];
            }
            const double err = interp - manufactured_solution(problem, z, 0.0);
            sum += weight * err * err;
        }
    }
    e.l2 = std::sqrt(sum);
    return e;
}

/// Oscillation test for coarse grids: nodal values leaving the boundary data
/// range by more than ten times its width.
bool oscillates(const PdeProblem& problem, const Grid& grid, const std::vector<double>& nodal)
{
    std::vector<std::size_t> multi(grid.N);
    double bmin = std::numeric_limits<double>::infinity();
    double bmax = -std::numeric_limits<double>::infinity();
    double vmin = bmin, vmax = bmax;
    for (std::size_t idx = 0; idx < grid.n_nodes; ++idx) {
        grid.unpack(idx, multi.data());
        vmin = std::min(vmin, nodal[idx]);
        vmax = std::max(vmax, nodal[idx]);
        if (grid.on_boundary(multi.data())) {
            // boundary data over the whole time window
            const double s = manufactured_solution(problem, grid.point(multi.data()), 0.0);
            const double e = s + problem.beta * problem.T;
            bmin = std::min({bmin, s, e});
            bmax = std::max({bmax, s, e});
        }
    }
    const double range = std::max(bmax - bmin, 1e-300);
    return vmin < bmin - 10.0 * range || vmax > bmax + 10.0 * range;
}

}  // namespace

std::vector<double> solve_nodal(const PdeProblem& problem, const SolveOptions& options)
{
    problem.validate();
    const Grid grid(problem.box, problem.n);
    auto nodal = march(problem, grid, options.advection, options.source);
    if (!nodal)
        throw std::runtime_error("solve_nodal: non-finite values encountered");
    return *nodal;
}

SolveReport solve(const PdeProblem& problem, const SolveOptions& options)
{
    problem.validate();
    const auto start = std::chrono::steady_clock::now();
    const Grid grid(problem.box, problem.n);

    SolveReport rep;
    rep.n = problem.n;

    auto nodal = march(problem, grid, options.advection, options.source);
    if (nodal && options.allow_upwind_fallback && options.advection == Advection::central && problem.n <= 8
        && oscillates(problem, grid, *nodal)) {
        nodal = march(problem, grid, Advection::upwind, options.source);
        rep.fallback_upwind = true;
    }

    if (!nodal) {
        rep.blow_up = true;
    } else {
        const ErrorNorms e = error_norms(problem, grid, *nodal);
        rep.l2_error = e.l2;
        rep.nodal_l2_error = e.nodal_l2;
        rep.max_nodal_error = e.max_nodal;
        if (!std::isfinite(e.l2) || e.l2 > kBlowUpThreshold)
            rep.blow_up = true;
    }
    if (rep.blow_up) {
        rep.l2_error = std::numeric_limits<double>::infinity();
        if (!nodal) {
            rep.nodal_l2_error = std::numeric_limits<double>::infinity();
            rep.max_nodal_error = std::numeric_limits<double>::infinity();
        }
    }
    rep.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

std::vector<ConvergenceRow> convergence_study(const PdeProblem& problem, const std::vector<std::size_t>& n_list,
                                              unsigned threads)
{
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("convergence_study: n_list must be increasing");

    std::vector<ConvergenceRow> rows(n_list.size());
    auto run = [&](std::size_t i) {
        PdeProblem p = problem;
        p.n = n_list[i];
        rows[i].report = solve(p);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_list.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < n_list.size(); ++i)
            run(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n_list.size(); i += workers)
                    run(i);
            });
        for (auto& th : pool)
            th.join();
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].order = std::numeric_limits<double>::quiet_NaN();
        if (i == 0)
            continue;
        const SolveReport& a = rows[i - 1].report;
        const SolveReport& b = rows[i].report;
        if (a.blow_up || b.blow_up || !(a.l2_error > 0.0) || !(b.l2_error > 0.0))
            continue;
        rows[i].order = std::log(a.l2_error / b.l2_error)
                        / std::log(static_cast<double>(b.n) / static_cast<double>(a.n));
    }
    return rows;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
    const auto old_flags = os.flags();
    const auto old_prec = os.precision();
    os << "n,l2_error,order,blow_up,fallback_upwind,runtime_s,nodal_l2_error\n";
    os << std::setprecision(17);
    for (const auto& r : rows) {
        os << r.report.n << ',';
        if (r.report.blow_up)
            os << "inf";
        else
            os << r.report.l2_error;
        os << ',';
        if (!std::isnan(r.order))
            os << r.order;
        os << ',' << (r.report.blow_up ? "true" : "false") << ',' << (r.report.fallback_upwind ? "true" : "false")
           << ',' << r.report.runtime << ',';
        if (std::isfinite(r.report.nodal_l2_error))
            os << r.report.nodal_l2_error;
        else
            os << "inf";
        os << '\n';
    }
    os.flags(old_flags);
    os.precision(old_prec);
}

std::vector<Interval> box_preset(const std::string& name)
{
    if (name == "box1")
        return {{0.0, 4.0}, {0.0, 4.0}};
    if (name == "box2")
        return {{-0.5, 3.5}, {-0.5, 3.5}};
    if (name == "box3")
        return {{-0.5, 3.5}, {0.0, 4.0}};
    throw std::invalid_argument("unknown box preset '" + name + "'");
}

}  // namespace vcone
