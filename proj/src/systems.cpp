#include "instanton/systems.hpp"

#include "instanton/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace instanton {
namespace {

ParameterMap merged(const ParameterMap& defaults, const ParameterMap& overrides,
                    const std::string& model) {
    ParameterMap out = defaults;
    for (const auto& [key, value] : overrides) {
        auto it = out.find(key);
        if (it == out.end()) throw ConfigError(model + ": unknown parameter '" + key + "'");
        if (!std::isfinite(value)) throw ConfigError(model + ": parameter '" + key + "' not finite");
        it->second = value;
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

// --- DoubleWell2D -----------------------------------------------------------

ParameterMap DoubleWell2D::defaults() { return {{"offset", 0.2}}; }

DoubleWell2D::DoubleWell2D(ParameterMap params)
    : LocalModel("doublewell2d", 2, SpatialDomain::point(),
                 merged(defaults(), params, "doublewell2d")),
      offset_(parameter("offset")) {}

void DoubleWell2D::reaction(std::span<const double> u, std::span<double> out) const {
    const double s = u[0] + u[1];
    const double cube = s * s * s;
    out[0] = 2.0 * u[1] - cube;
    out[1] = 2.0 * u[0] - cube;
}

void DoubleWell2D::reaction_jacobian(std::span<const double> u, std::span<double> jac) const {
    const double s = u[0] + u[1];
    const double c = 3.0 * s * s;
    jac[0] = -c;
    jac[1] = 2.0 - c;
    jac[2] = 2.0 - c;
    jac[3] = -c;
}

void DoubleWell2D::noise_scale(std::span<const double> u, std::span<double> scale) const {
    scale[0] = u[0] - u[1] + offset_;
    scale[1] = 0.0;
}

void DoubleWell2D::noise_scale_jacobian(std::span<const double>, std::span<double> jac) const {
    jac[0] = 1.0;
    jac[1] = -1.0;
    jac[2] = 0.0;
    jac[3] = 0.0;
}

std::vector<std::string> DoubleWell2D::equations() const {
    return {"dx1 = (2 x2 - (x1 + x2)^3) dt + sqrt(eps) (x1 - x2 + " + fmt(offset_) + ") dW",
            "dx2 = (2 x1 - (x1 + x2)^3) dt"};
}

// --- DoubleWell1D -----------------------------------------------------------

ParameterMap DoubleWell1D::defaults() { return {{"sigma", 1.0}}; }

DoubleWell1D::DoubleWell1D(ParameterMap params)
    : LocalModel("doublewell1d_validation", 1, SpatialDomain::point(),
                 merged(defaults(), params, "doublewell1d_validation")),
      sigma_(parameter("sigma")) {}

void DoubleWell1D::reaction(std::span<const double> u, std::span<double> out) const {
    out[0] = u[0] - u[0] * u[0] * u[0];
}

void DoubleWell1D::reaction_jacobian(std::span<const double> u, std::span<double> jac) const {
    jac[0] = 1.0 - 3.0 * u[0] * u[0];
}

void DoubleWell1D::noise_scale(std::span<const double>, std::span<double> scale) const {
    scale[0] = sigma_;
}

std::vector<std::string> DoubleWell1D::equations() const {
    return {"du = (u - u^3) dt + sqrt(eps) " + fmt(sigma_) + " dW"};
}

// --- AllenCahnBoundary ------------------------------------------------------

ParameterMap AllenCahnBoundary::defaults() { return {{"alpha", 1.5}, {"sigma0", 0.5}}; }

AllenCahnBoundary::AllenCahnBoundary(ParameterMap params, int points)
    : LocalModel("allencahn_boundary", 1, SpatialDomain::neumann(std::numbers::pi, points),
                 merged(defaults(), params, "allencahn_boundary")),
      alpha_(parameter("alpha")), sigma0_(parameter("sigma0")) {
    const auto x = domain().coordinates();
    lift_profile_ = Field(1, points);
    const double pi = std::numbers::pi;
    for (int i = 0; i < points; ++i)
        lift_profile_(0, i) = -std::cosh(pi - x[static_cast<std::size_t>(i)]) / std::sinh(pi);
    range_ = shifted_laplacian(lift_profile_);
    range_norm2_ = inner_product(range_, range_, domain());
}

std::complex<double> AllenCahnBoundary::linear_symbol(int, const Mode& mode) const {
    return mode.eigenvalue;
}

void AllenCahnBoundary::reaction(std::span<const double> u, std::span<double> out) const {
    out[0] = alpha_ * u[0] - u[0] * u[0] * u[0];
}

void AllenCahnBoundary::reaction_jacobian(std::span<const double> u, std::span<double> jac) const {
    jac[0] = alpha_ - 3.0 * u[0] * u[0];
}

void AllenCahnBoundary::noise_scale(std::span<const double>, std::span<double>) const {
    throw Error("allencahn_boundary: noise is defined through its covariance only");
}

Field AllenCahnBoundary::sigma_apply(const Field&, const Field&) const {
    throw Error("allencahn_boundary: noise is defined through its covariance only");
}

Field AllenCahnBoundary::lift(double c) const {
    Field out = lift_profile_;
    out *= c;
    return out;
}

double AllenCahnBoundary::lift_adjoint(const Field& f) const {
    return inner_product(lift_profile_, f, domain());
}

Field AllenCahnBoundary::shifted_laplacian(const Field& f) const {
    require_shape(f, "shifted_laplacian");
    Field out = linear_apply(f);
    out += f;
    return out;
}

Field AllenCahnBoundary::boundary_covariance_apply(const Field& v) const {
    return shifted_laplacian(lift(lift_adjoint(shifted_laplacian(v))));
}

Field AllenCahnBoundary::covariance_apply(const Field& u, const Field& v) const {
    require_shape(u, "covariance_apply");
    Field out = boundary_covariance_apply(v);
    out *= sigma0_ * sigma0_;
    return out;
}

void AllenCahnBoundary::project_momentum(Field& v) const {
    require_shape(v, "project_momentum");
    const double c = inner_product(range_, v, domain()) / range_norm2_;
    for (int i = 0; i < v.points(); ++i) v(0, i) = c * range_(0, i);
}

Field AllenCahnBoundary::covariance_variation(const Field& u, const Field& v,
                                              const Field& w) const {
    require_shape(u, "covariance_variation");
    require_shape(v, "covariance_variation");
    require_shape(w, "covariance_variation");
    return zero_field();
}

std::vector<std::string> AllenCahnBoundary::equations() const {
    return {"du = (u_xx + " + fmt(alpha_) + " u - u^3) dt on [0, pi]",
            "u_x(0, t) = sqrt(eps) " + fmt(sigma0_) + " dW/dt,  u_x(pi, t) = 0",
            "a = sigma0^2 (Lap_N + 1) D D* (Lap_N + 1),  D(c)(x) = -cosh(pi - x)/sinh(pi) c"};
}

// --- GiererMeinhardt --------------------------------------------------------

ParameterMap GiererMeinhardt::defaults() {
    return {{"d", 0.06}, {"D", 0.04}, {"tau", 0.5}, {"sigma0", 0.5}, {"h_min", 1e-6}};
}

GiererMeinhardt::GiererMeinhardt(ParameterMap params, int points)
    : LocalModel("gierer_meinhardt", 2, SpatialDomain::neumann(1.0, points),
                 merged(defaults(), params, "gierer_meinhardt")),
      d_(parameter("d")), big_d_(parameter("D")), tau_(parameter("tau")),
      sigma0_(parameter("sigma0")), h_min_(parameter("h_min")) {
    if (!(tau_ > 0.0)) throw ConfigError("gierer_meinhardt: tau must be positive");
}

std::complex<double> GiererMeinhardt::linear_symbol(int component, const Mode& mode) const {
    return component == 0 ? d_ * d_ * mode.eigenvalue : big_d_ / tau_ * mode.eigenvalue;
}

void GiererMeinhardt::reaction(std::span<const double> u, std::span<double> out) const {
    const double a = u[0];
    const double h = std::max(u[1], h_min_);
    out[0] = -a + a * a / h;
    out[1] = (-u[1] + a * a) / tau_;
}

void GiererMeinhardt::reaction_jacobian(std::span<const double> u, std::span<double> jac) const {
    const double a = u[0];
    const bool floored = u[1] < h_min_;
    const double h = floored ? h_min_ : u[1];
    jac[0] = -1.0 + 2.0 * a / h;
    jac[1] = floored ? 0.0 : -a * a / (h * h);
    jac[2] = 2.0 * a / tau_;
    jac[3] = -1.0 / tau_;
}

void GiererMeinhardt::noise_scale(std::span<const double> u, std::span<double> scale) const {
    scale[0] = 0.0;
    scale[1] = sigma0_ * u[1];
}

void GiererMeinhardt::noise_scale_jacobian(std::span<const double>, std::span<double> jac) const {
    jac[0] = 0.0;
    jac[1] = 0.0;
    jac[2] = 0.0;
    jac[3] = sigma0_;
}

void GiererMeinhardt::check_state(const Field& u, int time_index) const {
    for (double h : u.row(1))
        if (!(h >= h_min_))
            throw SolverError("gierer_meinhardt: inhibitor dropped below h_min", time_index);
}

std::vector<std::string> GiererMeinhardt::equations() const {
    return {"dA = (" + fmt(d_) + "^2 A_xx - A + A^2/H) dt",
            "dH = (1/" + fmt(tau_) + ") (" + fmt(big_d_) + " H_xx - H + A^2) dt + sqrt(eps) " +
                fmt(sigma0_) + " H dW",
            "x in [0, 1], homogeneous Neumann"};
}

// --- FitzHughNagumo ---------------------------------------------------------

ParameterMap FitzHughNagumo::defaults() {
    return {{"nu1", 1.0},    {"nu2", 0.1},    {"delta", 0.08}, {"gamma1", 0.8},
            {"gamma2", 0.7}, {"sigma0", 0.5}, {"length", 100.0}, {"cubic", 1.0 / 3.0}};
}

FitzHughNagumo::FitzHughNagumo(ParameterMap params, int points)
    : LocalModel("fitzhugh_nagumo", 2,
                 SpatialDomain::periodic(merged(defaults(), params, "fitzhugh_nagumo").at("length"),
                                         points),
                 merged(defaults(), params, "fitzhugh_nagumo")),
      nu1_(parameter("nu1")), nu2_(parameter("nu2")), delta_(parameter("delta")),
      gamma1_(parameter("gamma1")), gamma2_(parameter("gamma2")), sigma0_(parameter("sigma0")),
      cubic_(parameter("cubic")) {}

std::complex<double> FitzHughNagumo::linear_symbol(int component, const Mode& mode) const {
    return (component == 0 ? nu1_ : nu2_) * mode.eigenvalue;
}

void FitzHughNagumo::reaction(std::span<const double> u, std::span<double> out) const {
    out[0] = u[0] - cubic_ * u[0] * u[0] * u[0] - u[1];
    out[1] = delta_ * (u[0] - gamma1_ * u[1] + gamma2_);
}

void FitzHughNagumo::reaction_jacobian(std::span<const double> u, std::span<double> jac) const {
    jac[0] = 1.0 - 3.0 * cubic_ * u[0] * u[0];
    jac[1] = -1.0;
    jac[2] = delta_;
    jac[3] = -delta_ * gamma1_;
}

void FitzHughNagumo::noise_scale(std::span<const double>, std::span<double> scale) const {
    scale[0] = sigma0_;
    scale[1] = 0.0;
}

std::pair<double, double> FitzHughNagumo::rest_state() const {
    // V = (U + gamma2) / gamma1 on the second nullcline; Newton on the first.
    double x = -1.2;
    for (int it = 0; it < 100; ++it) {
        const double f = x - cubic_ * x * x * x - (x + gamma2_) / gamma1_;
        const double df = 1.0 - 3.0 * cubic_ * x * x - 1.0 / gamma1_;
        const double step = f / df;
        x -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return {x, (x + gamma2_) / gamma1_};
}

std::vector<std::string> FitzHughNagumo::equations() const {
    return {"dU = (" + fmt(nu1_) + " U_xx + U - " + fmt(cubic_) + " U^3 - V) dt + sqrt(eps) " + fmt(sigma0_) + " dW",
            "dV = (" + fmt(nu2_) + " V_xx + " + fmt(delta_) + " (U - " + fmt(gamma1_) + " V + " +
                fmt(gamma2_) + ")) dt",
            "periodic on [0, " + fmt(domain().length) + "]"};
}

// --- Barkley ----------------------------------------------------------------

ParameterMap Barkley::defaults() {
    return {{"D", 0.5},    {"r", 0.6},    {"delta", 0.1}, {"sigma0", 0.5}, {"eps1", 0.1},
            {"eps2", 0.2}, {"xi1", 0.8},  {"xi2", 0.8},   {"length", 150.0}};
}

Barkley::Barkley(ParameterMap params, int points)
    : LocalModel("barkley", 2,
                 SpatialDomain::periodic(merged(defaults(), params, "barkley").at("length"), points),
                 merged(defaults(), params, "barkley")),
      diffusion_(parameter("D")), r_(parameter("r")), delta_(parameter("delta")),
      sigma0_(parameter("sigma0")), eps1_(parameter("eps1")), eps2_(parameter("eps2")),
      xi1_(parameter("xi1")), xi2_(parameter("xi2")) {}

std::complex<double> Barkley::linear_symbol(int component, const Mode& mode) const {
    const std::complex<double> advect(0.0, mode.wavenumber);
    if (component == 0) return diffusion_ * mode.eigenvalue + xi2_ * advect;
    return (xi2_ - xi1_) * advect;
}

void Barkley::reaction(std::span<const double> u, std::span<double> out) const {
    const double q = u[0];
    const double v = u[1];
    const double qm = q - 1.0;
    out[0] = q * (v + r_ - 1.0 - (r_ + delta_) * qm * qm);
    out[1] = eps1_ * (1.0 - v) - eps2_ * v * q;
}

void Barkley::reaction_jacobian(std::span<const double> u, std::span<double> jac) const {
    const double q = u[0];
    const double v = u[1];
    const double qm = q - 1.0;
    jac[0] = v + r_ - 1.0 - (r_ + delta_) * qm * qm - 2.0 * (r_ + delta_) * q * qm;
    jac[1] = q;
    jac[2] = -eps2_ * v;
    jac[3] = -eps1_ - eps2_ * q;
}

void Barkley::noise_scale(std::span<const double> u, std::span<double> scale) const {
    scale[0] = sigma0_ * u[0];
    scale[1] = 0.0;
}

void Barkley::noise_scale_jacobian(std::span<const double>, std::span<double> jac) const {
    jac[0] = sigma0_;
    jac[1] = 0.0;
    jac[2] = 0.0;
    jac[3] = 0.0;
}

std::vector<std::string> Barkley::equations() const {
    return {"dq = (" + fmt(diffusion_) + " q_xx + " + fmt(xi2_) + " q_x + q (u + " + fmt(r_) +
                " - 1 - (" + fmt(r_) + " + " + fmt(delta_) + ") (q - 1)^2)) dt + sqrt(eps) " +
                fmt(sigma0_) + " q dW",
            "du = ((" + fmt(xi2_) + " - " + fmt(xi1_) + ") u_x + " + fmt(eps1_) + " (1 - u) - " +
                fmt(eps2_) + " u q) dt",
            "periodic on [0, " + fmt(domain().length) + "]"};
}

} // namespace instanton
