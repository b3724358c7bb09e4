#include "vcone/weak_scheme.hpp"

#include <cmath>
#include <iostream>

#include <unsupported/Eigen/MatrixFunctions>

namespace vcone {

namespace {

// (3 + sqrt 3) / 4
const double kA = (3.0 + std::sqrt(3.0)) / 4.0;
const double kB = kA + 0.75;

void audit_probability(double p, const ThreePointLaw& law)
{
    if (p < -1e-12 || p > 1.0 + 1e-12) {
        std::clog << "vcone: three-point probability " << p << " outside [0, 1] at x=" << law.x
                  << " z=" << law.z << '\n';
    }
}

}  // namespace

DriftSystem::DriftSystem(const ModelParams& params)
{
    const Eigen::Index n = static_cast<Eigen::Index>(params.dim());
    const Vector& w = params.weights();
    const Vector& x = params.nodes();
    A_ = -params.lambda() * Vector::Ones(n) * w.transpose();
    A_.diagonal() -= x;
    b_ = Vector::Constant(n, params.theta()) + x.cwiseProduct(params.v0());
}

Matrix matrix_exponential(const Matrix& M)
{
    return M.exp();
}

Propagator DriftSystem::propagator(double h) const
{
    if (!(h >= 0.0))
        throw std::invalid_argument("propagator: h must be nonnegative");
    const Eigen::Index n = A_.rows();
    Propagator p;
    p.h = h;
    if (h == 0.0) {
        p.E = Matrix::Identity(n, n);
        p.c = Vector::Zero(n);
        return p;
    }
    Matrix aug = Matrix::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = A_ * h;
    aug.topRightCorner(n, 1) = b_ * h;
    const Matrix e = matrix_exponential(aug);
    p.E = e.topLeftCorner(n, n);
    p.c = e.topRightCorner(n, 1);
    return p;
}

Vector ode_step(const DriftSystem& system, const Vector& z, double h)
{
    if (!(h >= 0.0))
        throw std::invalid_argument("ode_step: h must be nonnegative");
    if (h == 0.0)
        return z;
    return system.propagator(h).apply(z);
}

ThreePointLaw three_point_law(double x, double z)
{
    if (!(x >= 0.0) || !(z >= 0.0))
        throw std::invalid_argument("three_point_law: x and z must be nonnegative");

    ThreePointLaw law;
    law.x = x;
    law.z = z;
    if (x <= kDegenerateThreshold || z <= kDegenerateThreshold) {
        law.x1 = law.x2 = law.x3 = x;
        law.p1 = 1.0;
        law.p2 = law.p3 = 0.0;
        return law;
    }

    const double s = std::sqrt((3.0 * x + kB * kB * z) * z);
    // Offsets d_i = x_i - x. The lower one is rewritten as -3 x z / (B z + s)
    // to avoid cancellation; x1 likewise stays >= 0 in floating point.
    const double d1 = -3.0 * x * z / (kB * z + s);
    const double d2 = kA * z;
    const double d3 = kB * z + s;

    law.x1 = (x * x + (2.0 * kA - 1.5) * x * z) / (x + kB * z + s);
    law.x2 = x + d2;
    law.x3 = x + d3;

    // Lagrange weights for central moments (1, 0, x z); equivalent to the
    // raw-moment (m1, m2, m3) system since the nodes are the law's support.
    const double c2 = x * z;
    law.p1 = (c2 + d2 * d3) / ((d1 - d2) * (d1 - d3));
    law.p2 = (c2 + d1 * d3) / ((d2 - d1) * (d2 - d3));
    law.p3 = (c2 + d1 * d2) / ((d3 - d1) * (d3 - d2));

    audit_probability(law.p1, law);
    audit_probability(law.p2, law);
    audit_probability(law.p3, law);
    return law;
}

Vector stochastic_step(const ModelParams& params, const Vector& y, double h, double u, double agg_tol)
{
    if (!(h >= 0.0))
        throw std::invalid_argument("stochastic_step: h must be nonnegative");
    const double agg = aggregate(params, y);
    if (agg < -agg_tol)
        throw ConeViolation("stochastic_step: negative aggregate " + std::to_string(agg));
    const double wbar = params.weight_sum();
    const double z = params.nu() * params.nu() * wbar * wbar * h;
    const ThreePointLaw law = three_point_law(std::max(agg, 0.0), z);
    const double next = law.sample(u);
    return (y.array() + (next - agg) / wbar).matrix();
}

StrangStepper::StrangStepper(const ModelParams& params, const DriftSystem& system, double h)
    : params_(&params), h_(h), half_(system.propagator(0.5 * h))
{
}

Vector StrangStepper::step(const Vector& v, double u) const
{
    double agg = 0.0;
    return step(v, u, agg);
}

Vector StrangStepper::step(const Vector& v, double u, double& agg_in, SplittingVariant variant) const
{
    const Vector a = half_.apply(v);
    agg_in = aggregate(*params_, a);
    const Vector b = stochastic_step(*params_, a, h_, u);
    if (variant == SplittingVariant::skip_final_half_drift)
        return b;
    return half_.apply(b);
}

Vector strang_step(const ModelParams& params, const DriftSystem& system, const Vector& v, double h, double u)
{
    if (!(h >= 0.0))
        throw std::invalid_argument("strang_step: h must be nonnegative");
    return StrangStepper(params, system, h).step(v, u);
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t path)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    engine_.seed(seq);
}

Vector mean_oracle(const ModelParams& params, double t, const std::optional<Vector>& initial)
{
    if (!(t >= 0.0))
        throw std::invalid_argument("mean_oracle: t must be nonnegative");
    const Vector start = initial.value_or(params.v0());
    return ode_step(DriftSystem(params), start, t);
}

}  // namespace vcone
