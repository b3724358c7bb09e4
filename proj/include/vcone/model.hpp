#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vcone {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Parameters of the multifactor square-root model
///
///   dV = -diag(x)(V - v0) dt + (theta - lambda w'V) 1 dt + nu sqrt(w'V) 1 dW
///
/// with Prony kernel K(t) = sum_i w_i exp(-x_i t). All invariants are checked
/// once in the constructor; an instance is immutable afterwards.
class ModelParams {
public:
    ModelParams(Vector w, Vector x, double theta, double lambda, double nu, Vector v0);

    std::size_t dim() const { return static_cast<std::size_t>(w_.size()); }
    const Vector& weights() const { return w_; }
    const Vector& nodes() const { return x_; }
    double theta() const { return theta_; }
    double lambda() const { return lambda_; }
    double nu() const { return nu_; }
    const Vector& v0() const { return v0_; }

    /// 1'w
    double weight_sum() const { return w_sum_; }

    /// Drift coefficient b(y) = theta - lambda*y of the aggregated process.
    double drift(double y) const { return theta_ - lambda_ * y; }
    /// Diffusion coefficient sigma(y) = nu*sqrt(y); y must be nonnegative.
    double diffusion(double y) const;

private:
    Vector w_;
    Vector x_;
    double theta_;
    double lambda_;
    double nu_;
    Vector v0_;
    double w_sum_;
};

/// K(t) = sum_i w_i exp(-x_i t), t >= 0.
double kernel_eval(const ModelParams& params, double t);

/// w'y.
double aggregate(const ModelParams& params, const Vector& y);

/// Throws std::invalid_argument unless w > 0 componentwise.
void require_positive_weights(const Vector& w);
/// Throws std::invalid_argument unless 0 < x_1 <= ... <= x_N.
void require_ordered_nodes(const Vector& x);

Vector to_vector(std::span<const double> values);
std::vector<double> to_std(const Vector& v);

}  // namespace vcone
