// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vcone/admissible.hpp"
#include "vcone/cone.hpp"
#include "vcone/params_io.hpp"
#include "vcone/pde.hpp"
#include "vcone/weak_scheme.hpp"

using namespace vcone;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

void random_weights_nodes(std::mt19937_64& rng, int n, Vector& w, Vector& x)
{
    std::uniform_real_distribution<double> logw(-2.0, 2.0), ux(0.0, 50.0);
    w.resize(n);
    x.resize(n);
    for (int i = 0; i < n; ++i) {
        w[i] = std::pow(10.0, logw(rng));
        x[i] = 50.0 - ux(rng);
    }
    std::sort(x.begin(), x.end());
}

Outcome canonical_admissibility()
{
    std::mt19937_64 rng(20240501);
    double worst_identity = 0.0, worst_offdiag = -1e300;
    int failures = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + trial % 8;
        Vector w, x;
        random_weights_nodes(rng, n, w, x);
        const AdmissibleMatrix m = build_canonical(w, x);
        if (!check_admissible(m).admissible())
            ++failures;
        worst_identity = std::max(worst_identity, (m.Q * m.Qinv - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j)
                    worst_offdiag = std::max(worst_offdiag, m.G(i, j));
    }
    std::ostringstream os;
    os << "failures=" << failures << " max|Q Qinv - I|=" << worst_identity << " max offdiag G=" << worst_offdiag;
    return {failures == 0 && worst_identity <= 1e-10 && worst_offdiag <= 1e-12, os.str()};
}

Outcome q3_bounds_check()
{
    Vector w(3), x(3);
    w << 1, 2, 3;
    x << 1, 5, 25;
    const Q3Bounds b = q3_bounds(w, x);
    const double r85 = std::sqrt(85.0);
    const double dev = std::max({std::abs(b.a_lo - (-5 + r85) / 5), std::abs(b.a_hi - 1.2), std::abs(b.b_lo - 1.4),
                                 std::abs(b.b_hi - (5 + r85) / 5)});
    const bool feasible = b.contains(1.0, 2.0) && check_admissible(build_q3(w, x, 1.0, 2.0)).admissible();
    const AdmissibilityReport bad = check_admissible(build_q3(w, x, 1.3, 2.0));
    std::ostringstream os;
    os << "a in [" << b.a_lo << ", " << b.a_hi << "] b in [" << b.b_lo << ", " << b.b_hi << "] dev=" << dev
       << " (1,2) feasible=" << feasible << " (1.3,2) offdiag=" << bad.offdiag_condition;
    return {dev <= 1e-12 && feasible && !bad.offdiag_condition, os.str()};
}

Outcome moment_exactness()
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_sum = 0.0, worst_rel = 0.0, min_x1 = 1e300;
    for (int k = 0; k < 1000; ++k) {
        const double x = 10.0 * (1.0 - u(rng)), z = 1.0 - u(rng);
        const ThreePointLaw l = three_point_law(x, z);
        const double m[3] = {x, x * x + x * z, x * x * x + 3 * x * x * z + 1.5 * x * z * z};
        worst_sum = std::max(worst_sum, std::abs(l.p1 + l.p2 + l.p3 - 1.0));
        for (int j = 1; j <= 3; ++j) {
            const double got = l.p1 * std::pow(l.x1, j) + l.p2 * std::pow(l.x2, j) + l.p3 * std::pow(l.x3, j);
            worst_rel = std::max(worst_rel, std::abs(got / m[j - 1] - 1.0));
        }
        min_x1 = std::min(min_x1, l.x1);
    }
    std::ostringstream os;
    os << "max|sum p - 1|=" << worst_sum << " max rel moment err=" << worst_rel << " min x1=" << min_x1;
    return {worst_sum <= 1e-12 && worst_rel <= 1e-10 && min_x1 >= 0.0, os.str()};
}

PathConfig desk_config(std::uint64_t seed)
{
    PathConfig cfg;
    cfg.T = 10.0;
    cfg.M = 10000;
    cfg.n_paths = 1000;
    cfg.seed = seed;
    cfg.threads = resolve_threads(0);
    return cfg;
}

Outcome cone_preservation()
{
    const ModelParams p = preset("fig2").params;
    const ConeDomain d = ConeDomain::for_anchor(build_canonical(p.weights(), p.nodes()), p.v0());
    try {
        const SampleCloud c = simulate(p, d, desk_config(2024));
        std::ostringstream os;
        os << "min Q V=" << c.min_transformed() << " min w'V=" << c.min_aggregate()
           << " violations=" << c.n_violations() << " negative sqrt args=" << c.n_negative_aggregate();
        return {c.min_transformed() >= -1e-9 && c.min_aggregate() >= 0.0 && c.n_violations() == 0
                    && c.n_negative_aggregate() == 0,
                os.str()};
    } catch (const std::exception& e) {
        return {false, e.what()};
    }
}

Outcome nonadmissible_escape()
{
    const Preset good = preset("fig3a");
    const Preset bad = preset("fig3c");
    const ModelParams& p = good.params;
    auto run = [&](const Preset& pr) {
        const AdmissibleMatrix m = build_q3(p.weights(), p.nodes(), pr.q3->first, pr.q3->second);
        return simulate(p, ConeDomain::for_anchor(m, p.v0()), desk_config(7), true).min_transformed();
    };
    try {
        const double min_bad = run(bad);
        const double min_good = run(good);
        std::ostringstream os;
        os << "(a,b)=(" << bad.q3->first << "," << bad.q3->second << ") min=" << min_bad << "; (1,2) min=" << min_good;
        return {min_bad < -1e-3 && min_good >= -1e-3, os.str()};
    } catch (const std::exception& e) {
        return {false, e.what()};
    }
}

double mc_aggregate_error(const ModelParams& p, std::size_t paths, double& se)
{
    const ConeDomain d = ConeDomain::for_anchor(build_canonical(p.weights(), p.nodes()), p.v0());
    PathConfig cfg;
    cfg.T = 1.0;
    cfg.M = 1000;
    cfg.n_paths = paths;
    cfg.seed = 31337;
    cfg.threads = resolve_threads(0);
    const SampleCloud c = simulate(p, d, cfg);
    double s = 0.0, s2 = 0.0;
    for (const auto& path : c.paths) {
        const double y = p.weights().dot(path.terminal);
        s += y;
        s2 += y * y;
    }
    const double n = static_cast<double>(paths);
    const double mean = s / n;
    se = std::sqrt(std::max(0.0, (s2 - n * mean * mean) / (n - 1)) / n);
    return mean - p.weights().dot(mean_oracle(p, 1.0));
}

Outcome mean_accuracy()
{
    const ModelParams p = preset("fig2").params;
    double se = 0.0;
    const double err = mc_aggregate_error(p, 10000, se);
    const ModelParams flat(p.weights(), p.nodes(), p.theta(), p.lambda(), 0.0, p.v0());
    double se0 = 0.0;
    const double err0 = mc_aggregate_error(flat, 100, se0);
    std::ostringstream os;
    os << "MC-oracle=" << err << " (" << err / se << " se); nu=0 diff=" << err0;
    return {std::abs(err) <= 3.0 * se && std::abs(err0) <= 1e-10, os.str()};
}

PdeProblem table_one(const std::string& box, std::size_t n)
{
    const ModelParams p = preset("table1").params;
    Vector alpha(2);
    alpha << 3, 4;
    return make_pde_problem(p, build_canonical(p.weights(), p.nodes()), alpha, 1.6, 2.0, box_preset(box), n);
}

Outcome residual()
{
    const double r = residual_check(table_one("box1", 8), 100);
    std::ostringstream os;
    os << "max residual=" << r;
    return {r <= 1e-10, os.str()};
}

Outcome convergence_order()
{
    const auto b1 = convergence_study(table_one("box1", 32), {32, 64, 128});
    const auto b3 = convergence_study(table_one("box3", 32), {32, 64, 128});
    const double min_order = std::min({b1[1].order, b1[2].order, b3[1].order, b3[2].order});
    const double e1 = b1[2].report.l2_error, e3 = b3[2].report.l2_error;
    // the two errors tie up to rounding with this discretization; 1e-9 relative absorbs it
    const bool ranked = e1 <= e3 * (1.0 + 1e-9);
    std::ostringstream os;
    os.precision(12);
    os << "orders box1=(" << b1[1].order << ", " << b1[2].order << ") box3=(" << b3[1].order << ", " << b3[2].order
       << ") e128 box1=" << e1 << " box3=" << e3;
    return {min_order >= 1.7 && ranked, os.str()};
}

Outcome instability()
{
    bool all = true;
    std::ostringstream os;
    for (std::size_t n : {64u, 128u}) {
        const SolveReport r = solve(table_one("box2", n));
        const bool flagged = r.blow_up || r.l2_error > 1e3;
        all = all && flagged;
        os << "n=" << n << " blow_up=" << r.blow_up << " l2=" << r.l2_error << "; ";
    }
    return {all, os.str()};
}

Outcome m_matrix_anchor()
{
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> uy(0.0, 10.0);
    int bad_sign = 0, outside = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 1 + trial % 8;
        Vector w, x;
        random_weights_nodes(rng, n, w, x);
        const AdmissibleMatrix m = build_canonical(w, x);
        bad_sign += !m_matrix_inverse_check(m);
        outside += !ConeDomain(m, Vector::Zero(n)).contains(canonical_anchor(w, x, uy(rng)));
    }
    std::ostringstream os;
    os << "negative entries in " << bad_sign << " draws, anchor outside in " << outside << " draws";
    return {bad_sign == 0 && outside == 0, os.str()};
}

}  // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "canonical Q admissibility", 5, canonical_admissibility},
        {2, "N = 3 family bounds", 1, q3_bounds_check},
        {3, "three-point moment exactness", 1, moment_exactness},
        {4, "cone preservation (fig2 desk scale)", 60, cone_preservation},
        {5, "non-admissible escape", 120, nonadmissible_escape},
        {6, "weak-scheme mean accuracy", 60, mean_accuracy},
        {7, "manufactured-solution residual", 1, residual},
        {8, "PDE convergence order and ranking", 120, convergence_order},
        {9, "PDE instability on [-0.5,3.5]^2", 60, instability},
        {10, "M-matrix anchor", 5, m_matrix_anchor},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = dt < c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s criterion %2d  %-38s %.2fs/%gs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, dt, c.budget_s,
                    o.detail.c_str(), in_time ? "" : "  [over time budget]");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
