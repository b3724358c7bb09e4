#include "vcone/model.hpp"

#include <cmath>
#include <stdexcept>

namespace vcone {

void require_positive_weights(const Vector& w)
{
    if (w.size() == 0)
        throw std::invalid_argument("weights must be non-empty");
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!std::isfinite(w[i]) || w[i] <= 0.0)
            throw std::invalid_argument("weight w_" + std::to_string(i + 1) + " must be positive");
    }
}

void require_ordered_nodes(const Vector& x)
{
    if (x.size() == 0)
        throw std::invalid_argument("nodes must be non-empty");
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || x[i] <= 0.0)
            throw std::invalid_argument("node x_" + std::to_string(i + 1) + " must be positive");
        if (i > 0 && x[i] < x[i - 1])
            throw std::invalid_argument("nodes must be non-decreasing");
    }
}

ModelParams::ModelParams(Vector w, Vector x, double theta, double lambda, double nu, Vector v0)
    : w_(std::move(w)), x_(std::move(x)), theta_(theta), lambda_(lambda), nu_(nu), v0_(std::move(v0))
{
    require_positive_weights(w_);
    require_ordered_nodes(x_);
    if (x_.size() != w_.size())
        throw std::invalid_argument("w and x must have the same length");
    if (v0_.size() != w_.size())
        throw std::invalid_argument("v0 must have the same length as w");
    if (!std::isfinite(theta_) || theta_ < 0.0)
        throw std::invalid_argument("theta must be nonnegative");
    if (!std::isfinite(lambda_))
        throw std::invalid_argument("lambda must be finite");
    if (!std::isfinite(nu_) || nu_ < 0.0)
        throw std::invalid_argument("nu must be nonnegative");
    if (!v0_.allFinite())
        throw std::invalid_argument("v0 must be finite");
    // plain left-to-right sum so that kernel_eval(0) reproduces it bit for bit
    w_sum_ = 0.0;
    for (Eigen::Index i = 0; i < w_.size(); ++i)
        w_sum_ += w_[i];
}

double ModelParams::diffusion(double y) const
{
    if (y < 0.0)
        throw std::domain_error("square-root diffusion evaluated at a negative argument");
    return nu_ * std::sqrt(y);
}

double kernel_eval(const ModelParams& params, double t)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("kernel_eval: t must be nonnegative");
    const Vector& w = params.weights();
    const Vector& x = params.nodes();
    double k = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        k += w[i] * std::exp(-x[i] * t);
    return k;
}

double aggregate(const ModelParams& params, const Vector& y)
{
    if (y.size() != params.weights().size())
        throw std::invalid_argument("aggregate: dimension mismatch");
    return params.weights().dot(y);
}

Vector to_vector(std::span<const double> values)
{
    Vector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = values[i];
    return v;
}

std::vector<double> to_std(const Vector& v)
{
    return {v.data(), v.data() + v.size()};
}

}  // namespace vcone
