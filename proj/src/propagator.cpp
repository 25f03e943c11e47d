#include "instanton/propagator.hpp"

#include <cmath>

namespace instanton {
namespace {

// sum_{n>=0} c_n z^n with c_n = coefficient(n), Horner form, n <= 12.
template <class Coefficient>
std::complex<double> series(std::complex<double> z, Coefficient coefficient) {
    std::complex<double> sum = coefficient(12);
    for (int n = 11; n >= 0; --n) sum = coefficient(n) + sum * z;
    return sum;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

std::complex<double> phi1(std::complex<double> z) {
    if (std::abs(z) < 0.1) return series(z, [](int n) { return 1.0 / factorial(n + 1); });
    if (z.imag() == 0.0) return std::expm1(z.real()) / z.real();
    return (std::exp(z) - 1.0) / z;
}

std::complex<double> phi2(std::complex<double> z) {
    if (std::abs(z) < 0.1) return series(z, [](int n) { return 1.0 / factorial(n + 2); });
    if (z.imag() == 0.0) return (std::expm1(z.real()) - z.real()) / (z.real() * z.real());
    return (std::exp(z) - 1.0 - z) / (z * z);
}

LinearPropagator::LinearPropagator(const Model& model, double dt)
    : basis_(model.basis()), components_(model.components()), points_(model.domain().points),
      dt_(dt) {
    if (!basis_) return;
    const auto& modes = basis_->mode_table();
    const auto nc = static_cast<std::size_t>(components_);
    exp_.resize(nc);
    phi_.resize(nc);
    a_.resize(nc);
    b_.resize(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        for (const Mode& m : modes) {
            const std::complex<double> z = model.linear_symbol(static_cast<int>(c), m) * dt;
            const std::complex<double> p1 = phi1(z);
            const std::complex<double> p2 = phi2(z);
            exp_[c].push_back(std::exp(z));
            phi_[c].push_back(dt * p1);
            a_[c].push_back(2.0 * (p1 - p2));
            b_[c].push_back(2.0 * p2);
        }
    }
}

Field LinearPropagator::step(const Field& x, const Field& y) const {
    if (!basis_) return x;
    Field out(components_, points_);
    SpectralBasis::Coefficients cx(static_cast<std::size_t>(basis_->modes()));
    SpectralBasis::Coefficients cy(cx.size());
    for (int c = 0; c < components_; ++c) {
        const auto& e = exp_[static_cast<std::size_t>(c)];
        const auto& p = phi_[static_cast<std::size_t>(c)];
        basis_->forward(x.row(c), cx);
        basis_->forward(y.row(c), cy);
        for (std::size_t k = 0; k < cx.size(); ++k) cx[k] = e[k] * cx[k] + p[k] * cy[k];
        basis_->inverse(cx, out.row(c));
    }
    return out;
}

Field LinearPropagator::step(const Field& x, const Field& y, const Field& f) const {
    const double half = 0.5 * dt_;
    if (!basis_) {
        Field out = x;
        out.axpy(half, f);
        return out;
    }
    Field out(components_, points_);
    SpectralBasis::Coefficients cx(static_cast<std::size_t>(basis_->modes()));
    SpectralBasis::Coefficients cy(cx.size());
    SpectralBasis::Coefficients cf(cx.size());
    for (int c = 0; c < components_; ++c) {
        const auto& e = exp_[static_cast<std::size_t>(c)];
        const auto& p = phi_[static_cast<std::size_t>(c)];
        const auto& a = a_[static_cast<std::size_t>(c)];
        basis_->forward(x.row(c), cx);
        basis_->forward(y.row(c), cy);
        basis_->forward(f.row(c), cf);
        for (std::size_t k = 0; k < cx.size(); ++k)
            cx[k] = e[k] * cx[k] + p[k] * cy[k] + half * a[k] * cf[k];
        basis_->inverse(cx, out.row(c));
    }
    return out;
}

Field LinearPropagator::multiply(const Field& f,
                                 const std::vector<std::vector<std::complex<double>>>& symbol,
                                 bool conjugate) const {
    if (!basis_) return f;
    Field out(components_, points_);
    SpectralBasis::Coefficients cf(static_cast<std::size_t>(basis_->modes()));
    for (int c = 0; c < components_; ++c) {
        const auto& s = symbol[static_cast<std::size_t>(c)];
        basis_->forward(f.row(c), cf);
        for (std::size_t k = 0; k < cf.size(); ++k) cf[k] *= conjugate ? std::conj(s[k]) : s[k];
        basis_->inverse(cf, out.row(c));
    }
    return out;
}

Field LinearPropagator::exponential(const Field& x) const { return multiply(x, exp_, false); }

Field LinearPropagator::smooth(const Field& f) const { return multiply(f, b_, false); }

Field LinearPropagator::smooth_adjoint(const Field& v) const { return multiply(v, b_, true); }

LinearPropagator::AdjointParts LinearPropagator::adjoint_split(const Field& v) const {
    if (!basis_) return {v, Field(components_, points_), v};
    AdjointParts out{Field(components_, points_), Field(components_, points_),
                     Field(components_, points_)};
    SpectralBasis::Coefficients cv(static_cast<std::size_t>(basis_->modes()));
    SpectralBasis::Coefficients tmp(cv.size());
    for (int c = 0; c < components_; ++c) {
        const auto cs = static_cast<std::size_t>(c);
        basis_->forward(v.row(c), cv);
        const std::pair<const std::vector<std::complex<double>>*, Field*> parts[] = {
            {&exp_[cs], &out.e}, {&phi_[cs], &out.p}, {&a_[cs], &out.a}};
        for (const auto& [symbol, target] : parts) {
            for (std::size_t k = 0; k < cv.size(); ++k) tmp[k] = std::conj((*symbol)[k]) * cv[k];
            basis_->inverse(tmp, target->row(c));
        }
    }
    return out;
}

} // namespace instanton
