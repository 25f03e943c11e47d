#include "instanton/model.hpp"

#include "instanton/errors.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace instanton {
namespace {

using Buffer = boost::container::small_vector<double, 16>;

std::span<double> view(Buffer& b) { return {b.data(), b.size()}; }

} // namespace

Model::Model(std::string name, int components, SpatialDomain domain, ParameterMap params)
    : name_(std::move(name)), components_(components), domain_(domain),
      params_(std::move(params)) {
    domain_.validate();
    if (components_ <= 0) throw std::invalid_argument("Model: need at least one component");
    if (!domain_.is_point()) basis_ = std::make_shared<const SpectralBasis>(domain_);
}

double Model::parameter(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end()) throw ConfigError(name_ + ": no parameter '" + key + "'");
    return it->second;
}

std::complex<double> Model::linear_symbol(int, const Mode&) const { return 0.0; }

void Model::check_state(const Field&, int) const {}

void Model::require_shape(const Field& u, const char* where) const {
    if (!matches(u))
        throw ShapeError(std::string(where) + ": field is " + std::to_string(u.components()) +
                         "x" + std::to_string(u.points()) + ", model '" + name_ + "' expects " +
                         std::to_string(components_) + "x" + std::to_string(domain_.points));
}

Field Model::linear_apply(const Field& u, bool adjoint) const {
    require_shape(u, "linear_apply");
    Field out = zero_field();
    if (!basis_) return out;
    const auto& modes = basis_->mode_table();
    SpectralBasis::Coefficients c(modes.size());
    for (int comp = 0; comp < components_; ++comp) {
        basis_->forward(u.row(comp), c);
        for (std::size_t k = 0; k < c.size(); ++k) {
            auto s = linear_symbol(comp, modes[k]);
            c[k] *= adjoint ? std::conj(s) : s;
        }
        basis_->inverse(c, out.row(comp));
    }
    return out;
}

Field LocalModel::nonlinear(const Field& u) const {
    require_shape(u, "nonlinear");
    const int nc = components();
    Field out = zero_field();
    Buffer local(static_cast<std::size_t>(nc)), value(local.size());
    for (int i = 0; i < u.points(); ++i) {
        for (int c = 0; c < nc; ++c) local[static_cast<std::size_t>(c)] = u(c, i);
        reaction(view(local), view(value));
        for (int c = 0; c < nc; ++c) out(c, i) = value[static_cast<std::size_t>(c)];
    }
    return out;
}

Field LocalModel::nonlinear_jacobian_adjoint(const Field& u, const Field& v) const {
    require_shape(u, "nonlinear_jacobian_adjoint");
    require_shape(v, "nonlinear_jacobian_adjoint");
    const int nc = components();
    const auto n = static_cast<std::size_t>(nc);
    Field out = zero_field();
    Buffer local(n), jac(n * n);
    for (int i = 0; i < u.points(); ++i) {
        for (int c = 0; c < nc; ++c) local[static_cast<std::size_t>(c)] = u(c, i);
        reaction_jacobian(view(local), view(jac));
        for (int j = 0; j < nc; ++j) {
            double sum = 0.0;
            for (int r = 0; r < nc; ++r)
                sum += jac[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(j)] * v(r, i);
            out(j, i) = sum;
        }
    }
    return out;
}

Field LocalModel::sigma_apply(const Field& u, const Field& w) const {
    require_shape(u, "sigma_apply");
    require_shape(w, "sigma_apply");
    const int nc = components();
    Field out = zero_field();
    Buffer local(static_cast<std::size_t>(nc)), scale(local.size());
    for (int i = 0; i < u.points(); ++i) {
        for (int c = 0; c < nc; ++c) local[static_cast<std::size_t>(c)] = u(c, i);
        noise_scale(view(local), view(scale));
        for (int c = 0; c < nc; ++c) out(c, i) = scale[static_cast<std::size_t>(c)] * w(c, i);
    }
    return out;
}

Field LocalModel::covariance_apply(const Field& u, const Field& v) const {
    require_shape(u, "covariance_apply");
    require_shape(v, "covariance_apply");
    const int nc = components();
    Field out = zero_field();
    Buffer local(static_cast<std::size_t>(nc)), scale(local.size());
    for (int i = 0; i < u.points(); ++i) {
        for (int c = 0; c < nc; ++c) local[static_cast<std::size_t>(c)] = u(c, i);
        noise_scale(view(local), view(scale));
        for (int c = 0; c < nc; ++c) {
            const double s = scale[static_cast<std::size_t>(c)];
            out(c, i) = s * s * v(c, i);
        }
    }
    return out;
}

Field LocalModel::covariance_variation(const Field& u, const Field& v, const Field& w) const {
    require_shape(u, "covariance_variation");
    require_shape(v, "covariance_variation");
    require_shape(w, "covariance_variation");
    Field out = zero_field();
    if (additive_noise()) return out;
    const int nc = components();
    const auto n = static_cast<std::size_t>(nc);
    Buffer local(n), scale(n), jac(n * n);
    // <v, a(u) w> = sum_i weight_i sum_c s_c(u_i)^2 v_c w_c, so the gradient
    // at site i is sum_c 2 s_c ds_c/du_j v_c w_c.
    for (int i = 0; i < u.points(); ++i) {
        for (int c = 0; c < nc; ++c) local[static_cast<std::size_t>(c)] = u(c, i);
        noise_scale(view(local), view(scale));
        noise_scale_jacobian(view(local), view(jac));
        for (int j = 0; j < nc; ++j) {
            double sum = 0.0;
            for (int c = 0; c < nc; ++c) {
                const auto cc = static_cast<std::size_t>(c);
                sum += 2.0 * scale[cc] * jac[cc * n + static_cast<std::size_t>(j)] * v(c, i) *
                       w(c, i);
            }
            out(j, i) = sum;
        }
    }
    return out;
}

void LocalModel::noise_scale_jacobian(std::span<const double>, std::span<double> jac) const {
    std::fill(jac.begin(), jac.end(), 0.0);
}

Field drift(const Model& model, const Field& u) {
    model.require_shape(u, "drift");
    if (!u.all_finite()) throw Error("drift: non-finite input state");
    Field b = model.nonlinear(u);
    if (model.basis()) b += model.linear_apply(u);
    return b;
}

double hamiltonian(const Model& model, const Field& u, const Field& p) {
    model.require_shape(p, "hamiltonian");
    const auto weights = model.domain().quadrature_weights();
    return inner_product(drift(model, u), p, weights) +
           0.5 * inner_product(p, model.covariance_apply(u, p), weights);
}

EndpointFilter EndpointFilter::indicator(double lower, double upper) {
    if (!(upper > lower)) throw ConfigError("indicator filter needs lower < upper");
    return EndpointFilter(Kind::indicator, lower, upper);
}

Field EndpointFilter::apply(const Field& v, const SpatialDomain& domain) const {
    if (kind_ == Kind::identity) return v;
    if (v.points() != domain.points) throw ShapeError("EndpointFilter: field/domain mismatch");
    const auto x = domain.coordinates();
    Field out = v;
    for (int c = 0; c < v.components(); ++c) {
        auto row = out.row(c);
        for (std::size_t i = 0; i < row.size(); ++i)
            if (x[i] < lower_ || x[i] > upper_) row[i] = 0.0;
    }
    return out;
}

std::string EndpointFilter::describe() const {
    if (kind_ == Kind::identity) return "identity";
    std::ostringstream os;
    os << "indicator[" << lower_ << "," << upper_ << "]";
    return os.str();
}

Field filter_residual(const EndpointFilter& filter, const Field& u, const Field& target,
                      const SpatialDomain& domain) {
    require_same_shape(u, target, "filter_residual");
    return filter.apply(u - target, domain);
}

} // namespace instanton
