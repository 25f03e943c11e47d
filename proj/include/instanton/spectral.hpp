#pragma once

#include "instanton/grid.hpp"

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace instanton {

/// One Laplacian eigenmode. `wavenumber` is the signed-derivative symbol used
/// for first-order terms; it is zero for the periodic Nyquist mode so that odd
/// derivatives keep real fields real.
struct Mode {
    double eigenvalue;
    double wavenumber;
};

/// Eigenbasis of the second-derivative operator on a periodic (Fourier) or
/// homogeneous-Neumann (cosine, both endpoints on the grid) domain.
///
/// Coefficients are normalised so that a grid field is the plain sum of its
/// modes: f(x) = sum_k c_k e^{i k x 2pi/L} over the full spectrum (periodic),
/// or f(x) = sum_k c_k cos(k pi x / L) (neumann). Transforms are const and
/// safe to call concurrently.
class SpectralBasis {
public:
    using Coefficients = std::vector<std::complex<double>>;

    explicit SpectralBasis(const SpatialDomain& domain);

    const SpatialDomain& domain() const noexcept { return domain_; }
    int modes() const noexcept { return static_cast<int>(modes_.size()); }
    const std::vector<Mode>& mode_table() const noexcept { return modes_; }

    void forward(std::span<const double> grid, std::span<std::complex<double>> coeffs) const;
    void inverse(std::span<const std::complex<double>> coeffs, std::span<double> grid) const;
    Coefficients forward(std::span<const double> grid) const;
    std::vector<double> inverse(std::span<const std::complex<double>> coeffs) const;

    /// L2 inner product evaluated from coefficients; equals the grid
    /// quadrature inner product of the corresponding fields.
    double coefficient_inner_product(std::span<const std::complex<double>> a,
                                     std::span<const std::complex<double>> b) const;

    /// Periodic only: returns f(x - distance), exact for band-limited fields.
    std::vector<double> rotate(std::span<const double> grid, double distance) const;

private:
    struct Plans;

    SpatialDomain domain_;
    std::vector<Mode> modes_;
    std::vector<double> parseval_weights_;
    std::shared_ptr<const Plans> plans_;
};

} // namespace instanton
