#include "instanton/field.hpp"

#include "instanton/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace instanton {

Field::Field(int components, int points, double value)
    : components_(components), points_(points) {
    if (components <= 0 || points <= 0)
        throw ShapeError("field dimensions must be positive");
    data_.assign(static_cast<std::size_t>(components) * static_cast<std::size_t>(points), value);
}

std::span<double> Field::row(int c) {
    return values().subspan(index(c, 0), static_cast<std::size_t>(points_));
}

std::span<const double> Field::row(int c) const {
    return values().subspan(index(c, 0), static_cast<std::size_t>(points_));
}

bool Field::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Field::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Field& Field::operator+=(const Field& other) {
    require_same_shape(*this, other, "Field::operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_shape(*this, other, "Field::operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Field& Field::axpy(double alpha, const Field& x) {
    require_same_shape(*this, x, "Field::axpy");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * x.data_[i];
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

void require_same_shape(const Field& a, const Field& b, const char* where) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(where) + ": shape mismatch (" +
                         std::to_string(a.components()) + "x" + std::to_string(a.points()) +
                         " vs " + std::to_string(b.components()) + "x" +
                         std::to_string(b.points()) + ")");
}

Trajectory::Trajectory(int nodes, int components, int points, double value)
    : nodes_(nodes), components_(components), points_(points) {
    if (nodes <= 0 || components <= 0 || points <= 0)
        throw ShapeError("trajectory dimensions must be positive");
    data_.assign(static_cast<std::size_t>(nodes) * node_size(), value);
}

Field Trajectory::node(int k) const {
    Field f(components_, points_);
    auto src = node_values(k);
    std::copy(src.begin(), src.end(), f.values().begin());
    return f;
}

void Trajectory::set_node(int k, const Field& f) {
    if (!matches(f)) throw ShapeError("Trajectory::set_node: shape mismatch");
    auto dst = node_values(k);
    std::copy(f.values().begin(), f.values().end(), dst.begin());
}

std::span<double> Trajectory::node_values(int k) {
    return std::span<double>(data_).subspan(static_cast<std::size_t>(k) * node_size(), node_size());
}

std::span<const double> Trajectory::node_values(int k) const {
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(k) * node_size(),
                                                  node_size());
}

} // namespace instanton
