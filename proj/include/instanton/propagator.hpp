#pragma once

#include "instanton/model.hpp"

#include <complex>
#include <utility>
#include <vector>

namespace instanton {

/// (e^z - 1) / z, with a Taylor expansion near zero.
std::complex<double> phi1(std::complex<double> z);
/// (e^z - 1 - z) / z^2, with a Taylor expansion near zero.
std::complex<double> phi2(std::complex<double> z);

/// Exact propagators of the linear drift part over one step dt, applied in
/// the model's spectral basis: E = e^{L dt} and P = dt phi1(L dt), plus the
/// weights of a forcing interpolated linearly over the step,
///   int_0^dt e^{L(dt-s)} f(s) ds = dt/2 (A f_k + B f_{k+1}),
///   A = 2 (phi1 - phi2)(L dt),  B = 2 phi2(L dt).
/// A and B tend to 1 for slow modes (the trapezoid rule) and damp fast ones.
/// Trivial (E = A = B = identity, P = 0) for point models.
class LinearPropagator {
public:
    LinearPropagator(const Model& model, double dt);

    bool spatial() const noexcept { return basis_ != nullptr; }
    double dt() const noexcept { return dt_; }

    /// E x + P y.
    Field step(const Field& x, const Field& y) const;
    /// E x + P y + dt/2 A f.
    Field step(const Field& x, const Field& y, const Field& f) const;
    /// E x.
    Field exponential(const Field& x) const;
    /// B f.
    Field smooth(const Field& f) const;
    /// B^* v.
    Field smooth_adjoint(const Field& v) const;

    struct AdjointParts {
        Field e;  ///< E^* v
        Field p;  ///< P^* v
        Field a;  ///< A^* v
    };
    /// All three adjoint propagators from one transform.
    AdjointParts adjoint_split(const Field& v) const;

private:
    const SpectralBasis* basis_;
    int components_;
    int points_;
    double dt_;
    // Per component, per mode.
    std::vector<std::vector<std::complex<double>>> exp_;
    std::vector<std::vector<std::complex<double>>> phi_;
    std::vector<std::vector<std::complex<double>>> a_;
    std::vector<std::vector<std::complex<double>>> b_;

    Field multiply(const Field& f,
                   const std::vector<std::vector<std::complex<double>>>& symbol,
                   bool conjugate) const;
};

} // namespace instanton
