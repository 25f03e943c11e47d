#pragma once

#include "instanton/field.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace instanton {

/// Uniform time grid t_k = k * dt, k = 0..steps, with t_steps == final_time.
class TimeGrid {
public:
    TimeGrid(double final_time, int steps);

    double final_time() const noexcept { return final_time_; }
    int steps() const noexcept { return steps_; }
    int nodes() const noexcept { return steps_ + 1; }
    double dt() const noexcept { return dt_; }
    double node(int k) const noexcept;

    /// Trapezoid weights: dt/2 at both ends, dt in between.
    std::vector<double> trapezoid_weights() const;

private:
    double final_time_;
    int steps_;
    double dt_;
};

enum class Boundary { periodic, neumann, point };

std::string_view to_string(Boundary bc);

/// One-dimensional spatial domain [0, length], or a point for SDEs.
struct SpatialDomain {
    double length = 0.0;
    int points = 1;
    Boundary bc = Boundary::point;

    static SpatialDomain point();
    static SpatialDomain periodic(double length, int points);
    static SpatialDomain neumann(double length, int points);

    bool is_point() const noexcept { return bc == Boundary::point; }
    double spacing() const noexcept;
    std::vector<double> coordinates() const;
    /// Spatial quadrature: rectangle (periodic), trapezoid (neumann), unit (point).
    std::vector<double> quadrature_weights() const;
    void validate() const;
};

/// Sum over components of the quadrature of f*g.
double inner_product(const Field& f, const Field& g, const SpatialDomain& domain);
double inner_product(const Field& f, const Field& g, std::span<const double> weights);
double norm(const Field& f, const SpatialDomain& domain);

/// Trapezoid rule over the nodes of `grid`.
double time_quadrature(std::span<const double> series, const TimeGrid& grid);

} // namespace instanton
