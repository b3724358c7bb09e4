#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "vcone/model.hpp"

using namespace vcone;

namespace {

ModelParams make(std::initializer_list<double> w, std::initializer_list<double> x)
{
    Vector wv(static_cast<Eigen::Index>(w.size())), xv(static_cast<Eigen::Index>(x.size()));
    Eigen::Index i = 0;
    for (double v : w)
        wv[i++] = v;
    i = 0;
    for (double v : x)
        xv[i++] = v;
    return ModelParams(wv, xv, 0.0, 0.0, 0.0, Vector::Zero(wv.size()));
}

}  // namespace

TEST(Kernel, AtZeroIsWeightSum)
{
    const ModelParams p = make({1.0, 2.0}, {1.0, 10.0});
    EXPECT_EQ(kernel_eval(p, 0.0), 3.0);
    EXPECT_EQ(p.weight_sum(), 3.0);
}

TEST(Kernel, LargeTimeDecays)
{
    const ModelParams p = make({1.0, 2.0}, {1.0, 10.0});
    EXPECT_LT(kernel_eval(p, 50.0), 1e-20);
    EXPECT_GE(kernel_eval(p, 50.0), 0.0);
}

TEST(Kernel, HandValue)
{
    const ModelParams p = make({1.0, 2.0}, {1.0, 10.0});
    EXPECT_NEAR(kernel_eval(p, 0.5), std::exp(-0.5) + 2.0 * std::exp(-5.0), 1e-15);
}

TEST(Kernel, NegativeTimeThrows)
{
    const ModelParams p = make({1.0}, {1.0});
    EXPECT_THROW(kernel_eval(p, -1e-3), std::invalid_argument);
}

TEST(Kernel, PositiveAndNonIncreasing)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uw(1e-2, 1e2), ux(1e-3, 50.0), ut(0.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 6;
        Vector w(n), x(n);
        for (int i = 0; i < n; ++i) {
            w[i] = uw(rng);
            x[i] = ux(rng);
        }
        std::sort(x.begin(), x.end());
        const ModelParams p(w, x, 0.0, 0.0, 0.0, Vector::Zero(n));
        double t0 = ut(rng), t1 = ut(rng);
        if (t0 > t1)
            std::swap(t0, t1);
        EXPECT_GT(kernel_eval(p, t0), 0.0);
        EXPECT_GE(kernel_eval(p, t0), kernel_eval(p, t1));
    }
}

TEST(Aggregate, Examples)
{
    const ModelParams p = make({1.0, 2.0}, {1.0, 10.0});
    EXPECT_EQ(aggregate(p, Vector::Zero(2)), 0.0);
    EXPECT_EQ(aggregate(p, Vector::Ones(2)), 3.0);
    const ModelParams q = make({0.4, 1.8}, {0.1, 3.5});
    Vector v(2);
    v << 0.2, 0.3;
    EXPECT_NEAR(aggregate(q, v), 0.62, 1e-15);
}

TEST(Aggregate, DimensionMismatchThrows)
{
    const ModelParams p = make({1.0, 2.0}, {1.0, 10.0});
    EXPECT_THROW(aggregate(p, Vector::Ones(3)), std::invalid_argument);
}

TEST(Aggregate, Linear)
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const ModelParams p = make({0.3, 1.1, 2.0}, {0.5, 2.0, 9.0});
    for (int k = 0; k < 100; ++k) {
        Vector u(3), v(3);
        for (int i = 0; i < 3; ++i) {
            u[i] = g(rng);
            v[i] = g(rng);
        }
        const double a = g(rng), b = g(rng);
        EXPECT_NEAR(aggregate(p, a * u + b * v), a * aggregate(p, u) + b * aggregate(p, v), 1e-12);
    }
}

TEST(Params, Validation)
{
    Vector w(2), x(2), v0 = Vector::Zero(2);
    w << 1.0, 2.0;
    x << 1.0, 10.0;
    EXPECT_NO_THROW(ModelParams(w, x, 0.1, 0.2, 0.3, v0));

    Vector bad_w = w;
    bad_w[0] = 0.0;
    EXPECT_THROW(ModelParams(bad_w, x, 0.1, 0.2, 0.3, v0), std::invalid_argument);

    Vector bad_x = x;
    bad_x << 10.0, 1.0;
    EXPECT_THROW(ModelParams(w, bad_x, 0.1, 0.2, 0.3, v0), std::invalid_argument);
    bad_x << 0.0, 1.0;
    EXPECT_THROW(ModelParams(w, bad_x, 0.1, 0.2, 0.3, v0), std::invalid_argument);

    EXPECT_THROW(ModelParams(w, x, 0.1, 0.2, -0.3, v0), std::invalid_argument);
    EXPECT_THROW(ModelParams(w, Vector::Ones(3), 0.1, 0.2, 0.3, v0), std::invalid_argument);
    EXPECT_THROW(ModelParams(w, x, 0.1, 0.2, 0.3, Vector::Zero(3)), std::invalid_argument);

    Vector equal_x(2);
    equal_x << 2.0, 2.0;
    EXPECT_NO_THROW(ModelParams(w, equal_x, 0.1, 0.2, 0.3, v0));
}

TEST(Params, Coefficients)
{
    Vector w = Vector::Ones(1), x = Vector::Ones(1);
    const ModelParams p(w, x, 0.8, 1.2, 0.7, Vector::Zero(1));
    EXPECT_DOUBLE_EQ(p.drift(0.5), 0.8 - 0.6);
    EXPECT_DOUBLE_EQ(p.diffusion(0.25), 0.35);
    EXPECT_EQ(p.diffusion(0.0), 0.0);
    EXPECT_THROW(p.diffusion(-1e-3), std::domain_error);
}
