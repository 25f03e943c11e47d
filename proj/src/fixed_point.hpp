#pragma once

#include "instanton/errors.hpp"
#include "instanton/field.hpp"

#include <algorithm>
#include <string>

namespace instanton::detail {

inline constexpr int max_fixed_point_iterations = 50;
inline constexpr double fixed_point_residual = 1e-12;

/// Solves x = g(x) by damped fixed-point iteration. The damping factor is
/// halved whenever the residual grows.
template <class Map>
Field solve_fixed_point(Map&& g, Field x, int time_index, const char* what) {
    double omega = 1.0;
    double previous = 0.0;
    double residual = 0.0;
    for (int it = 0; it < max_fixed_point_iterations; ++it) {
        Field gx = g(x);
        if (!gx.all_finite()) throw SolverError(std::string(what) + ": non-finite state", time_index);
        Field step = gx - x;
        residual = max_abs(step);
        if (residual <= 1e-14 * (1.0 + max_abs(x))) return gx;
        if (it > 0 && residual > previous) omega *= 0.5;
        previous = residual;
        x.axpy(omega, step);
    }
    if (residual < fixed_point_residual) return x;
    throw SolverError(std::string(what) + ": fixed-point iteration did not converge (residual " +
                          std::to_string(residual) + ")",
                      time_index);
}

} // namespace instanton::detail
