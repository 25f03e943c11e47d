#pragma once

#include <boost/container/small_vector.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace instanton {

/// State of a system at one instant: `components` rows of `points` samples.
/// Point (0D) systems use one sample per component.
class Field {
public:
    Field() = default;
    Field(int components, int points, double value = 0.0);

    int components() const noexcept { return components_; }
    int points() const noexcept { return points_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(int c, int i) { return data_[index(c, i)]; }
    double operator()(int c, int i) const { return data_[index(c, i)]; }

    std::span<double> row(int c);
    std::span<const double> row(int c) const;
    std::span<double> values() noexcept { return {data_.data(), data_.size()}; }
    std::span<const double> values() const noexcept { return {data_.data(), data_.size()}; }

    bool same_shape(const Field& other) const noexcept {
        return components_ == other.components_ && points_ == other.points_;
    }
    bool all_finite() const noexcept;
    void fill(double value);

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double s);
    /// this += alpha * x
    Field& axpy(double alpha, const Field& x);

private:
    std::size_t index(int c, int i) const noexcept {
        return static_cast<std::size_t>(c) * static_cast<std::size_t>(points_) +
               static_cast<std::size_t>(i);
    }

    int components_ = 0;
    int points_ = 0;
    // Inline storage keeps point-system states off the heap.
    boost::container::small_vector<double, 4> data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

double max_abs(const Field& f);
void require_same_shape(const Field& a, const Field& b, const char* where);

/// Fields at the time nodes 0..Nt, stored contiguously as (time, component, space).
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(int nodes, int components, int points, double value = 0.0);

    int nodes() const noexcept { return nodes_; }
    int components() const noexcept { return components_; }
    int points() const noexcept { return points_; }
    std::size_t node_size() const noexcept {
        return static_cast<std::size_t>(components_) * static_cast<std::size_t>(points_);
    }

    Field node(int k) const;
    void set_node(int k, const Field& f);
    std::span<double> node_values(int k);
    std::span<const double> node_values(int k) const;

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    bool same_shape(const Trajectory& other) const noexcept {
        return nodes_ == other.nodes_ && components_ == other.components_ &&
               points_ == other.points_;
    }
    bool matches(const Field& f) const noexcept {
        return components_ == f.components() && points_ == f.points();
    }

private:
    int nodes_ = 0;
    int components_ = 0;
    int points_ = 0;
    std::vector<double> data_;
};

} // namespace instanton
