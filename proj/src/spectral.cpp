#include "instanton/spectral.hpp"

#include "instanton/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace instanton {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr unsigned plan_flags = FFTW_ESTIMATE | FFTW_UNALIGNED;

} // namespace

struct SpectralBasis::Plans {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    Plans() = default;
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }
};

SpectralBasis::SpectralBasis(const SpatialDomain& domain) : domain_(domain) {
    domain_.validate();
    if (domain_.is_point()) throw Error("no spectral basis for 0D systems");

    const int n = domain_.points;
    const double length = domain_.length;
    auto plans = std::make_shared<Plans>();
    std::vector<double> real_buf(static_cast<std::size_t>(n));

    if (domain_.bc == Boundary::periodic) {
        const int m = n / 2 + 1;
        modes_.reserve(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            const double kappa = 2.0 * std::numbers::pi * k / length;
            const bool nyquist = (n % 2 == 0) && k == n / 2;
            modes_.push_back({-kappa * kappa, nyquist ? 0.0 : kappa});
            parseval_weights_.push_back((k == 0 || nyquist) ? length : 2.0 * length);
        }
        std::vector<fftw_complex> cbuf(static_cast<std::size_t>(m));
        std::lock_guard lock(planner_mutex());
        plans->forward = fftw_plan_dft_r2c_1d(n, real_buf.data(), cbuf.data(), plan_flags);
        plans->inverse = fftw_plan_dft_c2r_1d(n, cbuf.data(), real_buf.data(), plan_flags);
    } else {
        modes_.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const double kappa = std::numbers::pi * k / length;
            modes_.push_back({-kappa * kappa, kappa});
            parseval_weights_.push_back((k == 0 || k == n - 1) ? length : 0.5 * length);
        }
        std::vector<double> out(static_cast<std::size_t>(n));
        std::lock_guard lock(planner_mutex());
        plans->forward =
            fftw_plan_r2r_1d(n, real_buf.data(), out.data(), FFTW_REDFT00, plan_flags);
        // DCT-I is its own inverse up to scaling; one plan serves both ways.
    }
    if (!plans->forward) throw Error("FFTW planning failed");
    plans_ = std::move(plans);
}

void SpectralBasis::forward(std::span<const double> grid,
                            std::span<std::complex<double>> coeffs) const {
    const int n = domain_.points;
    if (grid.size() != static_cast<std::size_t>(n) || coeffs.size() != modes_.size())
        throw ShapeError("SpectralBasis::forward: size mismatch");
    std::vector<double> in(grid.begin(), grid.end());
    if (domain_.bc == Boundary::periodic) {
        fftw_execute_dft_r2c(plans_->forward, in.data(),
                             reinterpret_cast<fftw_complex*>(coeffs.data()));
        const double scale = 1.0 / n;
        for (auto& c : coeffs) c *= scale;
    } else {
        std::vector<double> out(static_cast<std::size_t>(n));
        fftw_execute_r2r(plans_->forward, in.data(), out.data());
        const double scale = 1.0 / (n - 1);
        for (int k = 0; k < n; ++k) {
            const double edge = (k == 0 || k == n - 1) ? 0.5 : 1.0;
            coeffs[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k)] * scale * edge;
        }
    }
}

void SpectralBasis::inverse(std::span<const std::complex<double>> coeffs,
                            std::span<double> grid) const {
    const int n = domain_.points;
    if (grid.size() != static_cast<std::size_t>(n) || coeffs.size() != modes_.size())
        throw ShapeError("SpectralBasis::inverse: size mismatch");
    if (domain_.bc == Boundary::periodic) {
        std::vector<std::complex<double>> in(coeffs.begin(), coeffs.end());
        if (n % 2 == 0) in.back() = in.back().real();
        in.front() = in.front().real();
        fftw_execute_dft_c2r(plans_->inverse,
                             reinterpret_cast<fftw_complex*>(in.data()), grid.data());
    } else {
        std::vector<double> in(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const double edge = (k == 0 || k == n - 1) ? 1.0 : 0.5;
            in[static_cast<std::size_t>(k)] = coeffs[static_cast<std::size_t>(k)].real() * edge;
        }
        fftw_execute_r2r(plans_->forward, in.data(), grid.data());
    }
}

SpectralBasis::Coefficients SpectralBasis::forward(std::span<const double> grid) const {
    Coefficients c(modes_.size());
    forward(grid, c);
    return c;
}

std::vector<double> SpectralBasis::inverse(std::span<const std::complex<double>> coeffs) const {
    std::vector<double> g(static_cast<std::size_t>(domain_.points));
    inverse(coeffs, g);
    return g;
}

double SpectralBasis::coefficient_inner_product(std::span<const std::complex<double>> a,
                                                std::span<const std::complex<double>> b) const {
    if (a.size() != modes_.size() || b.size() != modes_.size())
        throw ShapeError("coefficient_inner_product: size mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        sum += parseval_weights_[k] * (a[k] * std::conj(b[k])).real();
    return sum;
}

std::vector<double> SpectralBasis::rotate(std::span<const double> grid, double distance) const {
    if (domain_.bc != Boundary::periodic) throw Error("rotation requires a periodic domain");
    auto c = forward(grid);
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double kappa = modes_[k].wavenumber;
        c[k] *= std::polar(1.0, -kappa * distance);
    }
    // The Nyquist mode cannot carry a phase in a real field; project it.
    if (domain_.points % 2 == 0) {
        const double kappa = 2.0 * std::numbers::pi * (domain_.points / 2) / domain_.length;
        c.back() = c.back().real() * std::cos(kappa * distance);
    }
    return inverse(c);
}

} // namespace instanton
