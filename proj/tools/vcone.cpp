// vcone: command-line front end.
//
// Exit codes
//   0  success, every audit passed
//   1  unexpected error (I/O, numerical failure)
//   2  invalid parameters or usage
//   3  the requested matrix is not admissible
//   4  cone audit failure during simulation
//   5  Monte Carlo mean outside its 3 sigma band
//   6  a solve on a stable PDE box blew up

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vcone/admissible.hpp"
#include "vcone/cone.hpp"
#include "vcone/params_io.hpp"
#include "vcone/pde.hpp"
#include "vcone/weak_scheme.hpp"

#ifndef VCONE_VERSION
#define VCONE_VERSION "unknown"
#endif

namespace {

using nlohmann::json;
using namespace vcone;

enum Exit : int {
    kOk = 0,
    kOther = 1,
    kInvalid = 2,
    kNonAdmissible = 3,
    kAudit = 4,
    kStatistical = 5,
    kBlowUp = 6,
};

struct Failure {
    int code;
    std::string message;
};

std::vector<double> parse_list(const std::string& text, char sep = ',')
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw Failure{kInvalid, "cannot parse number '" + item + "'"};
        }
        if (item.find_first_not_of(" \t", used) != std::string::npos)
            throw Failure{kInvalid, "cannot parse number '" + item + "'"};
        out.push_back(v);
    }
    if (out.empty())
        throw Failure{kInvalid, "empty list"};
    return out;
}

std::vector<Interval> parse_box(const std::string& text)
{
    std::vector<Interval> box;
    std::stringstream ss(text);
    std::string dim;
    while (std::getline(ss, dim, ';')) {
        const auto v = parse_list(dim);
        if (v.size() != 2)
            throw Failure{kInvalid, "box dimension '" + dim + "' needs lo,hi"};
        box.push_back({v[0], v[1]});
    }
    return box;
}

void write_json(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw Failure{kOther, "cannot write '" + path + "'"};
    out << j.dump(2) << '\n';
}

std::string fmt17(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------

struct ModelOptions {
    std::string params_file;
    std::string preset_name;
    std::string variant = "auto";
    double q = std::numeric_limits<double>::quiet_NaN();
    double a = std::numeric_limits<double>::quiet_NaN();
    double b = std::numeric_limits<double>::quiet_NaN();
    bool allow_nonadmissible = false;

    std::optional<std::pair<double, double>> preset_q3;
    json resolved;  // filled by build_matrix
};

void add_model_options(CLI::App* cmd, ModelOptions& o, bool with_matrix)
{
    auto* pf = cmd->add_option("--params", o.params_file, "JSON parameter file");
    auto* pp = cmd->add_option("--preset", o.preset_name, "table1, fig2, fig3a, fig3b or fig3c");
    pf->excludes(pp);
    if (!with_matrix)
        return;
    cmd->add_option("--variant", o.variant, "canonical, q2 or q3 (default: q3 for fig3 presets, else canonical)")
        ->check(CLI::IsMember({"auto", "canonical", "q2", "q3"}));
    cmd->add_option("--q", o.q, "q of the N = 2 family (default w1)");
    cmd->add_option("--a", o.a, "a of the N = 3 family");
    cmd->add_option("--b", o.b, "b of the N = 3 family");
    cmd->add_flag("--allow-nonadmissible", o.allow_nonadmissible, "proceed with a non-admissible matrix");
}

ModelParams load_model(ModelOptions& o, const std::string& fallback_preset = {})
{
    try {
        if (!o.params_file.empty())
            return load_params(o.params_file);
        const std::string name = o.preset_name.empty() ? fallback_preset : o.preset_name;
        if (name.empty())
            throw std::invalid_argument("one of --params or --preset is required");
        o.preset_name = name;
        Preset p = preset(name);
        o.preset_q3 = p.q3;
        return p.params;
    } catch (const std::invalid_argument& e) {
        throw Failure{kInvalid, e.what()};
    }
}

AdmissibleMatrix build_matrix(ModelOptions& o, const ModelParams& params)
{
    std::string variant = o.variant;
    if (variant == "auto")
        variant = o.preset_q3 ? "q3" : "canonical";
    const Vector& w = params.weights();
    const Vector& x = params.nodes();
    o.resolved = {{"variant", variant}};
    try {
        if (variant == "canonical")
            return build_canonical(w, x);
        if (variant == "q2") {
            if (params.dim() != 2)
                throw std::invalid_argument("variant q2 needs N = 2");
            const double q = std::isnan(o.q) ? w[0] : o.q;
            o.resolved["q"] = q;
            return build_q2(w, x, q);
        }
        if (params.dim() != 3)
            throw std::invalid_argument("variant q3 needs N = 3");
        double a = o.preset_q3 ? o.preset_q3->first : 1.0;
        double b = o.preset_q3 ? o.preset_q3->second : w[1] / w[0];
        if (!std::isnan(o.a))
            a = o.a;
        if (!std::isnan(o.b))
            b = o.b;
        o.resolved["a"] = a;
        o.resolved["b"] = b;
        return build_q3(w, x, a, b);
    } catch (const std::invalid_argument& e) {
        throw Failure{kInvalid, e.what()};
    }
}

json report_json(const AdmissibilityReport& r)
{
    json j = {{"admissible", r.admissible()},
              {"invertible", r.invertible},
              {"condition_number", r.condition_number},
              {"row_condition", r.row_condition},
              {"row_deviation", r.row_deviation},
              {"column_condition", r.column_condition},
              {"column_deviation", r.column_deviation},
              {"offdiag_condition", r.offdiag_condition},
              {"worst_row", r.worst_row},
              {"worst_col", r.worst_col}};
    j["worst_value"] = std::isfinite(r.worst_value) ? json(r.worst_value) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------

struct Run {
    std::string command;
    std::vector<std::string> argv;
    std::string out;
    std::string manifest;
    unsigned threads = 0;
    json config = json::object();
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;

    std::string manifest_path() const { return manifest.empty() ? out + ".manifest.json" : manifest; }

    void write_manifest(double wall) const
    {
        json m = {{"command", command},       {"argv", argv},          {"config", config},
                  {"version", VCONE_VERSION}, {"outputs", outputs},    {"wall_clock_s", wall},
                  {"threads", resolve_threads(threads)}};
        m["seed"] = seed ? json(*seed) : json(nullptr);
        write_json(manifest_path(), m);
    }
};

void add_output_options(CLI::App* cmd, Run& run, const std::string& default_out)
{
    run.out = default_out;
    cmd->add_option("--out", run.out, "output file")->capture_default_str();
    cmd->add_option("--manifest-out", run.manifest, "run manifest path (default <out>.manifest.json)");
}

// ---------------------------------------------------------------------------

int cmd_build_q(Run& run, ModelOptions& mo)
{
    const ModelParams params = load_model(mo);
    const AdmissibleMatrix m = build_matrix(mo, params);
    const AdmissibilityReport report = check_admissible(m);
    const double mu = anchor_level(params.weights(), params.nodes(), aggregate(params, params.v0()));
    const BoundaryConditionReport bc = boundary_condition_check(m, params, std::max(mu, 0.0), 1000);

    json j = {{"Q", matrix_to_json(m.Q)},
              {"Qinv", matrix_to_json(m.Qinv)},
              {"G", matrix_to_json(m.G)},
              {"report", report_json(report)},
              {"m_matrix_inverse_nonnegative", m_matrix_inverse_check(m)},
              {"boundary_check",
               {{"ok", bc.ok()},
                {"n_points", bc.n_points},
                {"n_drift_violations", bc.n_drift_violations},
                {"worst_drift", bc.worst_drift},
                {"worst_face", bc.worst_face}}}};
    write_json(run.out, j);
    run.outputs.push_back(run.out);
    run.config = {{"params", params_to_json(params)}, {"matrix", mo.resolved}};
    std::cout << j["report"].dump(2) << '\n';
    return report.admissible() ? kOk : kNonAdmissible;
}

int cmd_q3_bounds(Run& run, ModelOptions& mo, double a, double b)
{
    const ModelParams params = load_model(mo);
    if (params.dim() != 3)
        throw Failure{kInvalid, "q3-bounds needs N = 3"};
    Q3Bounds bounds{};
    try {
        bounds = q3_bounds(params.weights(), params.nodes());
    } catch (const std::invalid_argument& e) {
        throw Failure{kInvalid, e.what()};
    }
    const Vector& w = params.weights();
    if (std::isnan(a))
        a = 1.0;
    if (std::isnan(b))
        b = w[1] / w[0];
    const bool admissible = check_admissible(build_q3(w, params.nodes(), a, b)).admissible();
    json j = {{"a", {bounds.a_lo, bounds.a_hi}},
              {"b", {bounds.b_lo, bounds.b_hi}},
              {"query", {{"a", a}, {"b", b}, {"within_bounds", bounds.contains(a, b)}, {"admissible", admissible}}}};
    write_json(run.out, j);
    run.outputs.push_back(run.out);
    run.config = {{"params", params_to_json(params)}, {"a", a}, {"b", b}};
    std::cout << j.dump(2) << '\n';
    return kOk;
}

int cmd_check_domain(Run& run, ModelOptions& mo, const std::string& point)
{
    const ModelParams params = load_model(mo);
    const AdmissibleMatrix m = build_matrix(mo, params);
    const bool admissible = check_admissible(m).admissible();
    if (!admissible && !mo.allow_nonadmissible)
        throw Failure{kNonAdmissible, "matrix is not admissible (use --allow-nonadmissible)"};

    Vector v = params.v0();
    if (!point.empty()) {
        v = to_vector(parse_list(point));
        if (static_cast<std::size_t>(v.size()) != params.dim())
            throw Failure{kInvalid, "point has wrong dimension"};
    }
    const ConeDomain domain = ConeDomain::for_anchor(m, params.v0());
    const Vector u = domain.transformed(v);
    json j = {{"contains", domain.contains(v)},
              {"transformed", vector_to_json(u)},
              {"worst_component", u.minCoeff()},
              {"admissible", admissible}};
    write_json(run.out, j);
    run.outputs.push_back(run.out);
    run.config = {{"params", params_to_json(params)}, {"matrix", mo.resolved}, {"point", vector_to_json(v)}};
    std::cout << j.dump(2) << '\n';
    return kOk;
}

struct SimOptions {
    double T = 10.0;
    std::size_t M = 10000;
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    std::string record = "terminal";
    std::size_t stride = 1;
    std::string audit;
};

void add_sim_options(CLI::App* cmd, SimOptions& so)
{
    cmd->add_option("--T", so.T, "horizon")->capture_default_str();
    cmd->add_option("--M", so.M, "time steps")->capture_default_str();
    cmd->add_option("--paths", so.paths, "number of paths")->capture_default_str();
    cmd->add_option("--seed", so.seed, "master seed")->capture_default_str();
    cmd->add_option("--record", so.record, "terminal or full")
        ->check(CLI::IsMember({"terminal", "full"}))
        ->capture_default_str();
    cmd->add_option("--stride", so.stride, "with --record full, keep every k-th step")->capture_default_str();
    cmd->add_option("--audit", so.audit, "audit JSON path (default <out>.audit.json)");
}

int cmd_simulate(Run& run, ModelOptions& mo, const SimOptions& so)
{
    const ModelParams params = load_model(mo);
    const AdmissibleMatrix m = build_matrix(mo, params);
    const bool admissible = check_admissible(m).admissible();
    if (!admissible && !mo.allow_nonadmissible)
        throw Failure{kNonAdmissible, "matrix is not admissible (use --allow-nonadmissible)"};

    const ConeDomain domain = ConeDomain::for_anchor(m, params.v0());
    PathConfig cfg;
    cfg.T = so.T;
    cfg.M = so.M;
    cfg.n_paths = so.paths;
    cfg.seed = so.seed;
    cfg.record = so.record == "full" ? RecordMode::full : RecordMode::terminal;
    cfg.record_stride = so.stride;
    cfg.threads = run.threads;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw Failure{kInvalid, e.what()};
    }

    run.seed = so.seed;
    run.config = {{"params", params_to_json(params)},
                  {"matrix", mo.resolved},
                  {"T", so.T},
                  {"M", so.M},
                  {"paths", so.paths},
                  {"record", so.record},
                  {"stride", so.stride},
                  {"allow_nonadmissible", mo.allow_nonadmissible}};

    SampleCloud cloud;
    std::string aborted;
    try {
        cloud = simulate(params, domain, cfg, mo.allow_nonadmissible);
    } catch (const ConeViolation& e) {
        aborted = e.what();
    } catch (const std::invalid_argument& e) {
        throw Failure{kInvalid, e.what()};
    }

    const std::string audit_path = so.audit.empty() ? run.out + ".audit.json" : so.audit;
    if (!aborted.empty()) {
        write_json(audit_path, {{"aborted", aborted}, {"admissible", admissible}});
        run.outputs.push_back(audit_path);
        std::cerr << "simulate: " << aborted << '\n';
        return kAudit;
    }

    std::ofstream csv(run.out);
    if (!csv)
        throw Failure{kOther, "cannot write '" + run.out + "'"};
    const std::size_t n = params.dim();
    csv << "path_id,step,t";
    for (std::size_t i = 1; i <= n; ++i)
        csv << ",v_" << i;
    for (std::size_t i = 1; i <= n; ++i)
        csv << ",u_" << i;
    csv << ",agg\n";
    for (const RecordedState& s : cloud.states) {
        const Vector u = domain.transformed(s.v);
        csv << s.path << ',' << s.step << ',' << fmt17(s.t);
        for (Eigen::Index i = 0; i < s.v.size(); ++i)
            csv << ',' << fmt17(s.v[i]);
        for (Eigen::Index i = 0; i < u.size(); ++i)
            csv << ',' << fmt17(u[i]);
        csv << ',' << fmt17(aggregate(params, s.v)) << '\n';
    }
    csv.close();
    run.outputs.push_back(run.out);

    const bool passed = cloud.n_violations() == 0 && cloud.min_aggregate() >= -domain.tol();
    json audit = {{"min_transformed", cloud.min_transformed()},
                  {"min_aggregate", cloud.min_aggregate()},
                  {"n_violations", cloud.n_violations()},
                  {"n_negative_aggregate", cloud.n_negative_aggregate()},
                  {"admissible", admissible},
                  {"passed", passed}};
    write_json(audit_path, audit);
    run.outputs.push_back(audit_path);
    std::cout << audit.dump(2) << '\n';
    return passed ? kOk : kAudit;
}

struct MeanOptions {
    double t = 1.0;
    std::size_t M = 1000;
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    std::string mutate = "none";
};

int cmd_mean_check(Run& run, ModelOptions& mo, const MeanOptions& opt)
{
    const ModelParams params = load_model(mo);
    const AdmissibleMatrix m = build_canonical(params.weights(), params.nodes());
    const ConeDomain domain = ConeDomain::for_anchor(m, params.v0());

    PathConfig cfg;
    cfg.T = opt.t;
    cfg.M = opt.M;
    cfg.n_paths = opt.paths;
    cfg.seed = opt.seed;
    cfg.threads = run.threads;
    cfg.variant = opt.mutate == "skip-half-drift" ? SplittingVariant::skip_final_half_drift : SplittingVariant::strang;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw Failure{kInvalid, e.what()};
    }
    if (opt.paths < 2)
        throw Failure{kInvalid, "mean-check needs at least 2 paths"};

    run.seed = opt.seed;
    run.config = {{"params", params_to_json(params)}, {"t", opt.t},         {"M", opt.M},
                  {"paths", opt.paths},               {"mutate", opt.mutate}};

    const SampleCloud cloud = simulate(params, domain, cfg, true);
    const Vector oracle = mean_oracle(params, opt.t);
    const double n = static_cast<double>(opt.paths);

    double sum = 0.0, sum2 = 0.0;
    for (const PathSummary& p : cloud.paths) {
        const double y = aggregate(params, p.terminal);
        sum += y;
        sum2 += y * y;
    }
    const double mc = sum / n;
    const double var = std::max(0.0, (sum2 - n * mc * mc) / (n - 1.0));
    const double se = std::sqrt(var / n);
    const double target = aggregate(params, oracle);
    const double diff = mc - target;
    const bool deterministic = params.nu() == 0.0;
    const bool pass = deterministic ? std::abs(diff) <= 1e-10 : std::abs(diff) <= 3.0 * se;

    json j = {{"oracle_aggregate", target},
              {"mc_aggregate", mc},
              {"std_error", se},
              {"difference", diff},
              {"band", deterministic ? 1e-10 : 3.0 * se},
              {"oracle_state", vector_to_json(oracle)},
              {"mc_state", vector_to_json(cloud.terminal_mean_state)},
              {"pass", pass}};
    j["z_score"] = se > 0.0 ? json(diff / se) : json(nullptr);
    write_json(run.out, j);
    run.outputs.push_back(run.out);
    std::cout << j.dump(2) << '\n';
    return pass ? kOk : kStatistical;
}

struct PdeOptions {
    std::string alpha;
    double beta = 1.6;
    double T = 2.0;
    std::string box;
    std::string box_preset_name;
    std::size_t n = 64;
    std::string n_list = "8,16,32,64,128";
    std::string scheme = "cn";
    bool upwind = false;
};

void add_pde_options(CLI::App* cmd, PdeOptions& po, bool convergence)
{
    cmd->add_option("--alpha", po.alpha, "comma separated alpha (default 3,4 for N = 2, else all 1)");
    cmd->add_option("--beta", po.beta)->capture_default_str();
    cmd->add_option("--T", po.T)->capture_default_str();
    auto* b = cmd->add_option("--box", po.box, "\"lo1,hi1;lo2,hi2\"");
    cmd->add_option("--box-preset", po.box_preset_name, "box1, box2 or box3")->excludes(b);
    if (convergence)
        cmd->add_option("--n-list", po.n_list, "increasing grid sizes")->capture_default_str();
    else
        cmd->add_option("--n", po.n, "cells per dimension and time steps")->capture_default_str();
    cmd->add_option("--scheme", po.scheme)->check(CLI::IsMember({"cn", "ie"}))->capture_default_str();
    cmd->add_flag("--upwind", po.upwind, "upwind first-order terms");
}

int cmd_pde(Run& run, ModelOptions& mo, const PdeOptions& po, bool convergence)
{
    const ModelParams params = load_model(mo, "table1");
    const AdmissibleMatrix m = build_matrix(mo, params);
    if (!check_admissible(m).admissible() && !mo.allow_nonadmissible)
        throw Failure{kNonAdmissible, "matrix is not admissible (use --allow-nonadmissible)"};

    const std::size_t N = params.dim();
    Vector alpha = Vector::Ones(static_cast<Eigen::Index>(N));
    if (!po.alpha.empty())
        alpha = to_vector(parse_list(po.alpha));
    else if (N == 2)
        alpha << 3.0, 4.0;

    std::vector<Interval> box;
    std::string box_name = po.box_preset_name;
    if (!po.box.empty()) {
        box = parse_box(po.box);
    } else {
        if (box_name.empty())
            box_name = "box1";
        try {
            box = box_preset(box_name);
        } catch (const std::invalid_argument& e) {
            throw Failure{kInvalid, e.what()};
        }
    }

    std::vector<std::size_t> ns;
    if (convergence) {
        for (double v : parse_list(po.n_list)) {
            if (v < 1 || v != std::floor(v))
                throw Failure{kInvalid, "--n-list needs positive integers"};
            ns.push_back(static_cast<std::size_t>(v));
        }
    } else {
        ns.push_back(po.n);
    }

    PdeProblem problem = [&] {
        try {
            return make_pde_problem(params, m, alpha, po.beta, po.T, box, ns.front(),
                                    po.scheme == "ie" ? TimeScheme::implicit_euler : TimeScheme::crank_nicolson);
        } catch (const std::invalid_argument& e) {
            throw Failure{kInvalid, e.what()};
        }
    }();

    json box_json = json::array();
    for (const Interval& iv : box)
        box_json.push_back({iv.lo, iv.hi});
    run.config = {{"params", params_to_json(params)},
                  {"matrix", mo.resolved},
                  {"alpha", vector_to_json(alpha)},
                  {"beta", po.beta},
                  {"T", po.T},
                  {"box", box_json},
                  {"n", ns},
                  {"scheme", po.scheme},
                  {"upwind", po.upwind}};

    std::vector<ConvergenceRow> rows;
    if (convergence && !po.upwind) {
        try {
            rows = convergence_study(problem, ns, run.threads);
        } catch (const std::invalid_argument& e) {
            throw Failure{kInvalid, e.what()};
        }
    } else {
        SolveOptions opts;
        opts.advection = po.upwind ? Advection::upwind : Advection::central;
        for (std::size_t k = 0; k < ns.size(); ++k) {
            problem.n = ns[k];
            ConvergenceRow row{solve(problem, opts), std::numeric_limits<double>::quiet_NaN()};
            if (k > 0 && !row.report.blow_up && !rows.back().report.blow_up)
                row.order = std::log(rows.back().report.l2_error / row.report.l2_error) /
                            std::log(static_cast<double>(ns[k]) / static_cast<double>(ns[k - 1]));
            rows.push_back(row);
        }
    }

    std::ofstream csv(run.out);
    if (!csv)
        throw Failure{kOther, "cannot write '" + run.out + "'"};
    write_convergence_csv(csv, rows);
    csv.close();
    run.outputs.push_back(run.out);

    bool any_blow_up = false;
    for (const auto& r : rows) {
        any_blow_up = any_blow_up || r.report.blow_up;
        std::cout << "n=" << r.report.n << " l2_error=" << fmt17(r.report.l2_error)
                  << (r.report.blow_up ? " (blow-up)" : "") << '\n';
    }
    const bool stable_box = box.back().lo >= 0.0;
    return (stable_box && any_blow_up) ? kBlowUp : kOk;
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args);

int cmd_rerun(const std::string& manifest_path)
{
    std::ifstream in(manifest_path);
    if (!in)
        throw Failure{kInvalid, "cannot open manifest '" + manifest_path + "'"};
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw Failure{kInvalid, std::string("cannot parse manifest: ") + e.what()};
    }
    if (!m.contains("argv") || !m["argv"].is_array())
        throw Failure{kInvalid, "manifest has no argv"};
    const auto args = m["argv"].get<std::vector<std::string>>();
    if (!args.empty() && args.front() == "rerun")
        throw Failure{kInvalid, "manifest refers to another rerun"};
    return dispatch(args);
}

int dispatch(const std::vector<std::string>& args)
{
    CLI::App app{"Cone state spaces, weak simulation and PDE checks for multifactor square-root models"};
    app.set_version_flag("--version", VCONE_VERSION);
    app.require_subcommand(1);

    Run run;
    run.argv = args;
    ModelOptions mo;

    auto* build_q = app.add_subcommand("build-q", "build Q, Q^-1 and G and check admissibility");
    add_model_options(build_q, mo, true);
    add_output_options(build_q, run, "build_q.json");

    double qa = std::numeric_limits<double>::quiet_NaN();
    double qb = std::numeric_limits<double>::quiet_NaN();
    auto* q3b = app.add_subcommand("q3-bounds", "feasible (a, b) intervals of the N = 3 family");
    add_model_options(q3b, mo, false);
    q3b->add_option("--a", qa, "query a (default 1)");
    q3b->add_option("--b", qb, "query b (default w2/w1)");
    add_output_options(q3b, run, "q3_bounds.json");

    std::string point;
    auto* chk = app.add_subcommand("check-domain", "membership of a point in the cone domain");
    add_model_options(chk, mo, true);
    chk->add_option("--point", point, "comma separated state (default v0)");
    add_output_options(chk, run, "check_domain.json");

    SimOptions so;
    auto* sim = app.add_subcommand("simulate", "simulate paths and audit the cone");
    add_model_options(sim, mo, true);
    add_sim_options(sim, so);
    add_output_options(sim, run, "paths.csv");

    SimOptions co;
    auto* cloud = app.add_subcommand("cloud", "terminal sample cloud with transformed coordinates");
    add_model_options(cloud, mo, true);
    add_sim_options(cloud, co);
    add_output_options(cloud, run, "cloud.csv");

    MeanOptions mopt;
    auto* mean = app.add_subcommand("mean-check", "Monte Carlo mean of w'V_t against the exact mean");
    add_model_options(mean, mo, false);
    mean->add_option("--t", mopt.t)->capture_default_str();
    mean->add_option("--M", mopt.M)->capture_default_str();
    mean->add_option("--paths", mopt.paths)->capture_default_str();
    mean->add_option("--seed", mopt.seed)->capture_default_str();
    mean->add_option("--mutate", mopt.mutate)
        ->check(CLI::IsMember({"none", "skip-half-drift"}))
        ->group("");
    add_output_options(mean, run, "mean_check.json");

    PdeOptions po;
    auto* pde = app.add_subcommand("pde", "one manufactured-solution PDE solve");
    add_model_options(pde, mo, true);
    add_pde_options(pde, po, false);
    add_output_options(pde, run, "pde.csv");

    PdeOptions pco;
    auto* pdec = app.add_subcommand("pde-convergence", "PDE convergence study over several n");
    add_model_options(pdec, mo, true);
    add_pde_options(pdec, pco, true);
    add_output_options(pdec, run, "pde_convergence.csv");

    std::string manifest;
    auto* rerun = app.add_subcommand("rerun", "re-execute a run from its manifest");
    rerun->add_option("--manifest", manifest, "manifest JSON")->required();

    for (auto* sub : {build_q, q3b, chk, sim, cloud, mean, pde, pdec})
        sub->add_option("--threads", run.threads, "worker threads (0: VOLTERRA_CONE_THREADS or 1)");

    std::vector<const char*> cargv{"vcone"};
    for (const auto& a : args)
        cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    if (rerun->parsed())
        return cmd_rerun(manifest);

    const auto start = std::chrono::steady_clock::now();
    int code = kOther;
    if (build_q->parsed()) {
        run.command = "build-q";
        code = cmd_build_q(run, mo);
    } else if (q3b->parsed()) {
        run.command = "q3-bounds";
        code = cmd_q3_bounds(run, mo, qa, qb);
    } else if (chk->parsed()) {
        run.command = "check-domain";
        code = cmd_check_domain(run, mo, point);
    } else if (sim->parsed()) {
        run.command = "simulate";
        code = cmd_simulate(run, mo, so);
    } else if (cloud->parsed()) {
        run.command = "cloud";
        code = cmd_simulate(run, mo, co);
    } else if (mean->parsed()) {
        run.command = "mean-check";
        code = cmd_mean_check(run, mo, mopt);
    } else if (pde->parsed()) {
        run.command = "pde";
        code = cmd_pde(run, mo, po, false);
    } else if (pdec->parsed()) {
        run.command = "pde-convergence";
        code = cmd_pde(run, mo, pco, true);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.write_manifest(wall);
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return dispatch(std::vector<std::string>(argv + 1, argv + argc));
    } catch (const Failure& f) {
        std::cerr << "vcone: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "vcone: " << e.what() << '\n';
        return kOther;
    }
}
