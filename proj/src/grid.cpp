#include "instanton/grid.hpp"

#include "instanton/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace instanton {

TimeGrid::TimeGrid(double final_time, int steps)
    : final_time_(final_time), steps_(steps), dt_(final_time / steps) {
    if (!(final_time > 0.0) || !std::isfinite(final_time))
        throw std::invalid_argument("TimeGrid: final time must be positive");
    if (steps < 2) throw std::invalid_argument("TimeGrid: need at least 2 steps");
}

double TimeGrid::node(int k) const noexcept {
    return k == steps_ ? final_time_ : static_cast<double>(k) * dt_;
}

std::vector<double> TimeGrid::trapezoid_weights() const {
    std::vector<double> w(static_cast<std::size_t>(nodes()), dt_);
    w.front() = 0.5 * dt_;
    w.back() = 0.5 * dt_;
    return w;
}

std::string_view to_string(Boundary bc) {
    switch (bc) {
    case Boundary::periodic: return "periodic";
    case Boundary::neumann: return "neumann";
    case Boundary::point: return "point";
    }
    return "unknown";
}

SpatialDomain SpatialDomain::point() { return {0.0, 1, Boundary::point}; }

SpatialDomain SpatialDomain::periodic(double length, int points) {
    SpatialDomain d{length, points, Boundary::periodic};
    d.validate();
    return d;
}

SpatialDomain SpatialDomain::neumann(double length, int points) {
    SpatialDomain d{length, points, Boundary::neumann};
    d.validate();
    return d;
}

void SpatialDomain::validate() const {
    if (points < 1) throw std::invalid_argument("SpatialDomain: need at least one point");
    if (bc == Boundary::point) {
        if (points != 1) throw std::invalid_argument("SpatialDomain: point domain has one site");
        return;
    }
    if (!(length > 0.0)) throw std::invalid_argument("SpatialDomain: length must be positive");
    if (points < 2) throw std::invalid_argument("SpatialDomain: spatial grid needs >= 2 points");
}

double SpatialDomain::spacing() const noexcept {
    switch (bc) {
    case Boundary::periodic: return length / points;
    case Boundary::neumann: return length / (points - 1);
    case Boundary::point: return 1.0;
    }
    return 1.0;
}

std::vector<double> SpatialDomain::coordinates() const {
    std::vector<double> x(static_cast<std::size_t>(points), 0.0);
    if (bc == Boundary::point) return x;
    const double h = spacing();
    for (int i = 0; i < points; ++i) x[static_cast<std::size_t>(i)] = i * h;
    if (bc == Boundary::neumann) x.back() = length;
    return x;
}

std::vector<double> SpatialDomain::quadrature_weights() const {
    std::vector<double> w(static_cast<std::size_t>(points), spacing());
    if (bc == Boundary::neumann) {
        w.front() *= 0.5;
        w.back() *= 0.5;
    }
    return w;
}

double inner_product(const Field& f, const Field& g, std::span<const double> weights) {
    require_same_shape(f, g, "inner_product");
    if (weights.size() != static_cast<std::size_t>(f.points()))
        throw ShapeError("inner_product: field does not live on this domain");
    double sum = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        auto a = f.row(c);
        auto b = g.row(c);
        for (std::size_t i = 0; i < a.size(); ++i) sum += weights[i] * a[i] * b[i];
    }
    return sum;
}

double inner_product(const Field& f, const Field& g, const SpatialDomain& domain) {
    return inner_product(f, g, domain.quadrature_weights());
}

double norm(const Field& f, const SpatialDomain& domain) {
    return std::sqrt(inner_product(f, f, domain));
}

double time_quadrature(std::span<const double> series, const TimeGrid& grid) {
    if (series.size() != static_cast<std::size_t>(grid.nodes()))
        throw ShapeError("time_quadrature: expected " + std::to_string(grid.nodes()) +
                         " samples, got " + std::to_string(series.size()));
    double sum = 0.5 * (series.front() + series.back());
    for (std::size_t k = 1; k + 1 < series.size(); ++k) sum += series[k];
    return sum * grid.dt();
}

} // namespace instanton
