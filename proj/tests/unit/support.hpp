#pragma once

#include "instanton/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace instanton::test {

/// base_c + amplitude cos(2 pi x / L) in every component.
inline Field smooth_state(const Model& m, std::vector<double> base, double amplitude = 0.1,
                          double phase = 0.0) {
    Field f = m.zero_field();
    const auto x = m.domain().coordinates();
    const double length = m.domain().is_point() ? 1.0 : m.domain().length;
    for (int c = 0; c < f.components(); ++c)
        for (int i = 0; i < f.points(); ++i)
            f(c, i) = base[static_cast<std::size_t>(c)] +
                      amplitude * std::cos(2.0 * std::numbers::pi * x[static_cast<std::size_t>(i)] /
                                               length +
                                           phase);
    return f;
}

inline Field random_field(const Model& m, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal;
    Field f = m.zero_field();
    for (double& v : f.values()) v = scale * normal(rng);
    return f;
}

} // namespace instanton::test
