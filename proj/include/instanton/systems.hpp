#pragma once

#include "instanton/model.hpp"

namespace instanton {

/// 2D SDE, double well along x1 = x2, noise (x1 - x2 + offset) on x1 only.
class DoubleWell2D final : public LocalModel {
public:
    explicit DoubleWell2D(ParameterMap params);
    static ParameterMap defaults();

    bool additive_noise() const override { return false; }
    std::vector<bool> forced_components() const override { return {true, false}; }
    std::vector<std::string> equations() const override;

protected:
    void reaction(std::span<const double> u, std::span<double> out) const override;
    void reaction_jacobian(std::span<const double> u, std::span<double> jac) const override;
    void noise_scale(std::span<const double> u, std::span<double> scale) const override;
    void noise_scale_jacobian(std::span<const double> u, std::span<double> jac) const override;

private:
    double offset_;
};

/// du = (u - u^3) dt + sigma dW; gradient system with V(u) = u^4/4 - u^2/2.
class DoubleWell1D final : public LocalModel {
public:
    explicit DoubleWell1D(ParameterMap params);
    static ParameterMap defaults();

    bool additive_noise() const override { return true; }
    std::vector<bool> forced_components() const override { return {true}; }
    std::vector<std::string> equations() const override;

protected:
    void reaction(std::span<const double> u, std::span<double> out) const override;
    void reaction_jacobian(std::span<const double> u, std::span<double> jac) const override;
    void noise_scale(std::span<const double> u, std::span<double> scale) const override;

private:
    double sigma_;
};

/// Allen-Cahn on [0, pi] with homogeneous Neumann conditions and white noise
/// in the Neumann datum at x = 0. The noise enters only through the rank-one
/// covariance a = sigma0^2 (Lap_N + 1) D D^* (Lap_N + 1), where
///   D(c)(x) = -cosh(pi - x) / sinh(pi) c,   D^*(f) = <D(1), f>.
class AllenCahnBoundary final : public LocalModel {
public:
    AllenCahnBoundary(ParameterMap params, int points);
    static ParameterMap defaults();

    std::complex<double> linear_symbol(int component, const Mode& mode) const override;
    bool has_sigma() const override { return false; }
    Field sigma_apply(const Field& u, const Field& w) const override;
    Field covariance_apply(const Field& u, const Field& v) const override;
    Field covariance_variation(const Field& u, const Field& v, const Field& w) const override;
    bool additive_noise() const override { return true; }
    std::vector<bool> forced_components() const override { return {true}; }
    bool projects_momentum() const override { return true; }
    void project_momentum(Field& v) const override;
    std::vector<std::string> equations() const override;

    /// Boundary lifting D(c) on the grid.
    Field lift(double c) const;
    /// D^*(f), by the grid quadrature.
    double lift_adjoint(const Field& f) const;
    /// (Lap_N + 1) f, spectrally.
    Field shifted_laplacian(const Field& f) const;
    /// Covariance without the sigma0^2 prefactor.
    Field boundary_covariance_apply(const Field& v) const;

protected:
    void reaction(std::span<const double> u, std::span<double> out) const override;
    void reaction_jacobian(std::span<const double> u, std::span<double> jac) const override;
    void noise_scale(std::span<const double> u, std::span<double> scale) const override;

private:
    double alpha_;
    double sigma0_;
    Field lift_profile_;
    Field range_;  ///< (Lap_N + 1) D(1), spans the range of a
    double range_norm2_ = 0.0;
};

/// Gierer-Meinhardt activator (A) / inhibitor (H) system on [0, 1], Neumann,
/// with multiplicative noise sigma0 H on the inhibitor only. The division by H
/// uses max(H, h_min).
class GiererMeinhardt final : public LocalModel {
public:
    GiererMeinhardt(ParameterMap params, int points);
    static ParameterMap defaults();

    std::complex<double> linear_symbol(int component, const Mode& mode) const override;
    bool additive_noise() const override { return false; }
    std::vector<bool> forced_components() const override { return {false, true}; }
    void check_state(const Field& u, int time_index) const override;
    std::vector<std::string> equations() const override;

protected:
    void reaction(std::span<const double> u, std::span<double> out) const override;
    void reaction_jacobian(std::span<const double> u, std::span<double> jac) const override;
    void noise_scale(std::span<const double> u, std::span<double> scale) const override;
    void noise_scale_jacobian(std::span<const double> u, std::span<double> jac) const override;

private:
    double d_, big_d_, tau_, sigma0_, h_min_;
};

/// FitzHugh-Nagumo (U, V) on a periodic domain, additive noise on U only.
/// The cubic term is `cubic` * U^3; the default 1/3 is the classical
/// excitable form whose rest state is (-1.19941, -0.62426).
class FitzHughNagumo final : public LocalModel {
public:
    FitzHughNagumo(ParameterMap params, int points);
    static ParameterMap defaults();

    std::complex<double> linear_symbol(int component, const Mode& mode) const override;
    bool additive_noise() const override { return true; }
    std::vector<bool> forced_components() const override { return {true, false}; }
    std::vector<std::string> equations() const override;

    /// Spatially homogeneous rest state (U, V).
    std::pair<double, double> rest_state() const;

protected:
    void reaction(std::span<const double> u, std::span<double> out) const override;
    void reaction_jacobian(std::span<const double> u, std::span<double> jac) const override;
    void noise_scale(std::span<const double> u, std::span<double> scale) const override;

private:
    double nu1_, nu2_, delta_, gamma1_, gamma2_, sigma0_, cubic_;
};

/// Barkley pipe-flow model (q, u) on a periodic domain, multiplicative noise
/// sigma0 q on q only.
class Barkley final : public LocalModel {
public:
    Barkley(ParameterMap params, int points);
    static ParameterMap defaults();

    std::complex<double> linear_symbol(int component, const Mode& mode) const override;
    bool additive_noise() const override { return false; }
    std::vector<bool> forced_components() const override { return {true, false}; }
    std::vector<std::string> equations() const override;

protected:
    void reaction(std::span<const double> u, std::span<double> out) const override;
    void reaction_jacobian(std::span<const double> u, std::span<double> jac) const override;
    void noise_scale(std::span<const double> u, std::span<double> scale) const override;
    void noise_scale_jacobian(std::span<const double> u, std::span<double> jac) const override;

private:
    double diffusion_, r_, delta_, sigma0_, eps1_, eps2_, xi1_, xi2_;
};

} // namespace instanton
