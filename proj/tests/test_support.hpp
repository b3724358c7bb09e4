#pragma once

#include <algorithm>
#include <random>

#include "vcone/model.hpp"

namespace vcone::testing {

/// Random weights in [1e-2, 1e2] (log-uniform) and sorted nodes in (0, 50].
struct WeightsNodes {
    Vector w;
    Vector x;
};

inline WeightsNodes random_weights_nodes(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> logw(-2.0, 2.0), ux(0.0, 50.0);
    WeightsNodes out{Vector(n), Vector(n)};
    for (int i = 0; i < n; ++i) {
        out.w[i] = std::pow(10.0, logw(rng));
        double xi = 0.0;
        while (xi <= 0.0)
            xi = 50.0 - ux(rng);  // (0, 50]
        out.x[i] = xi;
    }
    std::sort(out.x.begin(), out.x.end());
    return out;
}

inline Vector from_list(std::initializer_list<double> values)
{
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double d : values)
        v[i++] = d;
    return v;
}

inline Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.begin()->size());
    Matrix m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index k = 0;
        for (double d : row)
            m(i, k++) = d;
        ++i;
    }
    return m;
}

}  // namespace vcone::testing
