#pragma once

#include "instanton/field.hpp"
#include "instanton/grid.hpp"
#include "instanton/spectral.hpp"

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace instanton {

using ParameterMap = std::map<std::string, double>;

/// A stochastic system du = b(u) dt + sqrt(eps) sigma(u) dW with drift split as
/// b(u) = L u + N(u). L is diagonal in the Laplacian eigenbasis (given by its
/// per-component symbol); N and the noise act pointwise or through explicit
/// operators supplied by the concrete model.
///
/// All adjoints and gradients are taken with respect to the domain's
/// quadrature inner product. Instances are immutable and re-entrant.
class Model {
public:
    virtual ~Model() = default;

    const std::string& name() const noexcept { return name_; }
    int components() const noexcept { return components_; }
    const SpatialDomain& domain() const noexcept { return domain_; }
    /// Null for point (0D) systems.
    const SpectralBasis* basis() const noexcept { return basis_.get(); }
    const ParameterMap& parameters() const noexcept { return params_; }
    double parameter(const std::string& key) const;

    /// Symbol of L on `component` for one eigenmode. Default: L = 0.
    virtual std::complex<double> linear_symbol(int component, const Mode& mode) const;

    virtual Field nonlinear(const Field& u) const = 0;
    /// (dN/du)^T v
    virtual Field nonlinear_jacobian_adjoint(const Field& u, const Field& v) const = 0;

    /// False for models that only define the covariance a(u) (boundary noise).
    virtual bool has_sigma() const { return true; }
    virtual Field sigma_apply(const Field& u, const Field& w) const = 0;
    virtual Field covariance_apply(const Field& u, const Field& v) const = 0;
    /// Gradient in u of <v, a(u) w>.
    virtual Field covariance_variation(const Field& u, const Field& v, const Field& w) const = 0;
    virtual bool additive_noise() const = 0;
    /// Per component: true when the noise can act on it.
    virtual std::vector<bool> forced_components() const = 0;

    /// True when a(u) has a fixed range that is a proper subspace of the
    /// forced components; `project_momentum` then maps onto that range.
    virtual bool projects_momentum() const { return false; }
    /// Orthogonal projection (quadrature inner product) onto the range of a.
    /// Momentum outside it changes neither the path nor the action.
    virtual void project_momentum(Field&) const {}

    /// Throws SolverError when `u` leaves the admissible state space.
    virtual void check_state(const Field& u, int time_index) const;

    /// Human-readable equations, one line per component.
    virtual std::vector<std::string> equations() const { return {}; }

    Field zero_field() const { return Field(components_, domain_.points); }
    bool matches(const Field& u) const noexcept {
        return u.components() == components_ && u.points() == domain_.points;
    }
    void require_shape(const Field& u, const char* where) const;

    /// L u, or L^* u when `adjoint` is set (conjugate symbol).
    Field linear_apply(const Field& u, bool adjoint = false) const;

protected:
    Model(std::string name, int components, SpatialDomain domain, ParameterMap params);

private:
    std::string name_;
    int components_;
    SpatialDomain domain_;
    ParameterMap params_;
    std::shared_ptr<const SpectralBasis> basis_;
};

/// Model whose reaction term N and noise are local: at each grid point they
/// depend only on the component values there. Noise is diagonal,
/// sigma(u) w = s(u) * w per component, with s = 0 on unforced components.
class LocalModel : public Model {
public:
    Field nonlinear(const Field& u) const override;
    Field nonlinear_jacobian_adjoint(const Field& u, const Field& v) const override;
    Field sigma_apply(const Field& u, const Field& w) const override;
    Field covariance_apply(const Field& u, const Field& v) const override;
    Field covariance_variation(const Field& u, const Field& v, const Field& w) const override;

protected:
    using Model::Model;

    virtual void reaction(std::span<const double> u, std::span<double> out) const = 0;
    /// Row-major jacobian d out_i / d u_j, components x components.
    virtual void reaction_jacobian(std::span<const double> u, std::span<double> jac) const = 0;
    /// s_c(u) for every component c.
    virtual void noise_scale(std::span<const double> u, std::span<double> scale) const = 0;
    /// Row-major d s_i / d u_j. Only called when the noise is multiplicative.
    virtual void noise_scale_jacobian(std::span<const double> u, std::span<double> jac) const;
};

/// b(u) = L u + N(u).
Field drift(const Model& model, const Field& u);

/// H(u, p) = <b(u), p> + 1/2 <p, a(u) p>.
double hamiltonian(const Model& model, const Field& u, const Field& p);

/// Identity, or multiplication by the indicator of [lower, upper].
class EndpointFilter {
public:
    enum class Kind { identity, indicator };

    static EndpointFilter identity() { return EndpointFilter(Kind::identity, 0.0, 0.0); }
    static EndpointFilter indicator(double lower, double upper);

    Kind kind() const noexcept { return kind_; }
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

    Field apply(const Field& v, const SpatialDomain& domain) const;
    std::string describe() const;

private:
    EndpointFilter(Kind kind, double lower, double upper)
        : kind_(kind), lower_(lower), upper_(upper) {}

    Kind kind_;
    double lower_;
    double upper_;
};

/// F(u - uT).
Field filter_residual(const EndpointFilter& filter, const Field& u, const Field& target,
                      const SpatialDomain& domain);

} // namespace instanton
