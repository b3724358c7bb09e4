#include "vcone/weak_scheme.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

namespace vcone {

void PathConfig::validate() const
{
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("PathConfig: T must be positive");
    if (M < 1)
        throw std::invalid_argument("PathConfig: M must be at least 1");
    if (n_paths < 1)
        throw std::invalid_argument("PathConfig: n_paths must be at least 1");
    if (record_stride < 1)
        throw std::invalid_argument("PathConfig: record_stride must be at least 1");
}

double SampleCloud::min_transformed() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : paths)
        m = std::min(m, p.min_transformed);
    return m;
}

double SampleCloud::min_aggregate() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : paths)
        m = std::min(m, p.min_aggregate);
    return m;
}

std::size_t SampleCloud::n_violations() const
{
    std::size_t n = 0;
    for (const auto& p : paths)
        n += p.n_violations;
    return n;
}

std::size_t SampleCloud::n_negative_aggregate() const
{
    std::size_t n = 0;
    for (const auto& p : paths)
        n += p.n_negative_aggregate;
    return n;
}

unsigned resolve_threads(unsigned requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("VOLTERRA_CONE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0)
                return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

namespace {

struct PathResult {
    PathSummary summary;
    std::vector<RecordedState> states;
};

PathResult run_path(const ModelParams& params, const ConeDomain& domain, const PathConfig& config,
                    const StrangStepper& stepper, const Vector& start, std::size_t path)
{
    PathResult out;
    PathRng rng(config.seed, path);
    const double tol = domain.tol();
    const double dt = config.T / static_cast<double>(config.M);

    PathSummary& s = out.summary;
    s.min_transformed = std::numeric_limits<double>::infinity();
    s.min_aggregate = std::numeric_limits<double>::infinity();

    auto audit = [&](const Vector& v) {
        const double mt = domain.transformed(v).minCoeff();
        s.min_transformed = std::min(s.min_transformed, mt);
        s.min_aggregate = std::min(s.min_aggregate, aggregate(params, v));
        if (mt < -tol)
            ++s.n_violations;
    };

    const bool full = config.record == RecordMode::full;
    if (full)
        out.states.reserve(config.M / config.record_stride + 2);

    Vector v = start;
    audit(v);
    if (full)
        out.states.push_back({path, 0, 0.0, v});

    for (std::size_t j = 1; j <= config.M; ++j) {
        double agg_in = 0.0;
        v = stepper.step(v, rng.uniform(), agg_in, config.variant);
        if (agg_in < 0.0)
            ++s.n_negative_aggregate;
        audit(v);
        const double t = (j == config.M) ? config.T : static_cast<double>(j) * dt;
        if ((full && j % config.record_stride == 0) || (!full && j == config.M))
            out.states.push_back({path, j, t, v});
    }
    s.terminal = v;
    return out;
}

}  // namespace

SampleCloud simulate(const ModelParams& params, const ConeDomain& domain, const PathConfig& config,
                     bool allow_outside)
{
    config.validate();
    if (domain.matrix().dim() != params.dim())
        throw std::invalid_argument("simulate: domain and model dimensions differ");

    const Vector start = config.initial.value_or(params.v0());
    if (static_cast<std::size_t>(start.size()) != params.dim())
        throw std::invalid_argument("simulate: initial state has wrong dimension");
    if (!allow_outside && !domain.contains(start))
        throw std::invalid_argument("simulate: initial state is outside the cone domain");

    const DriftSystem system(params);
    const double dt = config.T / static_cast<double>(config.M);
    const StrangStepper stepper(params, system, dt);

    std::vector<PathResult> results(config.n_paths);
    const unsigned workers = std::max(1u, std::min<unsigned>(resolve_threads(config.threads),
                                                             static_cast<unsigned>(config.n_paths)));

    if (workers == 1) {
        for (std::size_t k = 0; k < config.n_paths; ++k)
            results[k] = run_path(params, domain, config, stepper, start, k);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < config.n_paths && !failed; k = next++) {
                    try {
                        results[k] = run_path(params, domain, config, stepper, start, k);
                    } catch (...) {
                        if (!failed.exchange(true))
                            failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool)
            th.join();
        if (failure)
            std::rethrow_exception(failure);
    }

    SampleCloud cloud;
    cloud.paths.reserve(config.n_paths);
    cloud.terminal_mean_state = Vector::Zero(start.size());
    for (auto& r : results) {
        cloud.terminal_mean_state += r.summary.terminal;
        cloud.paths.push_back(std::move(r.summary));
        std::move(r.states.begin(), r.states.end(), std::back_inserter(cloud.states));
    }
    cloud.terminal_mean_state /= static_cast<double>(config.n_paths);
    return cloud;
}

}  // namespace vcone
