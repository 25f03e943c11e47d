#pragma once

#include "instanton/errors.hpp"
#include "instanton/field.hpp"
#include "instanton/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace instanton::detail {

/// M = d/dx [dt N(x) + dt/2 a(x) theta] for a point model, assembled row by
/// row from the Jacobian-adjoint and covariance-variation callbacks.
inline Eigen::MatrixXd point_implicit_jacobian(const Model& model, const Field& x,
                                               const Field& theta, double dt) {
    const int n = static_cast<int>(x.values().size());
    Eigen::MatrixXd m(n, n);
    Field e = model.zero_field();
    for (int i = 0; i < n; ++i) {
        e.values()[static_cast<std::size_t>(i)] = 1.0;
        const Field jn = model.nonlinear_jacobian_adjoint(x, e);
        const Field ja = model.covariance_variation(x, e, theta);
        for (int j = 0; j < n; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            m(i, j) = dt * jn.values()[sj] + 0.5 * dt * ja.values()[sj];
        }
        e.values()[static_cast<std::size_t>(i)] = 0.0;
    }
    return m;
}

inline Eigen::Map<const Eigen::VectorXd> as_vector(const Field& f) {
    return {f.values().data(), static_cast<Eigen::Index>(f.values().size())};
}

/// Solves x - dt N(x) - dt/2 a(x) theta = base by Newton's method with
/// residual backtracking.
inline Field solve_point_step(const Model& model, const Field& base, const Field& theta,
                              double dt, Field x, int time_index, const char* what) {
    auto residual = [&](const Field& y) {
        Field r = y - base;
        r.axpy(-dt, model.nonlinear(y));
        r.axpy(-0.5 * dt, model.covariance_apply(y, theta));
        return r;
    };
    Field r = residual(x);
    double rnorm = max_abs(r);
    for (int it = 0; it < 50; ++it) {
        if (!std::isfinite(rnorm))
            throw SolverError(std::string(what) + ": non-finite state", time_index);
        if (rnorm <= 1e-14 * (1.0 + max_abs(x))) return x;
        const Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(
                                        static_cast<Eigen::Index>(x.values().size()),
                                        static_cast<Eigen::Index>(x.values().size())) -
                                    point_implicit_jacobian(model, x, theta, dt);
        const Eigen::VectorXd step = jac.partialPivLu().solve(as_vector(r));
        double t = 1.0;
        bool improved = false;
        for (int half = 0; half < 30; ++half, t *= 0.5) {
            Field trial = x;
            for (std::size_t i = 0; i < trial.values().size(); ++i)
                trial.values()[i] -= t * step[static_cast<Eigen::Index>(i)];
            Field rt = residual(trial);
            const double n = max_abs(rt);
            if (std::isfinite(n) && n < rnorm) {
                x = std::move(trial);
                r = std::move(rt);
                rnorm = n;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (rnorm < 1e-12) return x;
    throw SolverError(std::string(what) + ": Newton iteration did not converge (residual " +
                          std::to_string(rnorm) + ")",
                      time_index);
}

/// Solves (I - M^T) nu = rhs, the linear implicit part of the point adjoint.
inline Field solve_point_adjoint(const Model& model, const Field& x, const Field& theta,
                                 double dt, const Field& rhs) {
    const auto n = static_cast<Eigen::Index>(x.values().size());
    const Eigen::MatrixXd a =
        Eigen::MatrixXd::Identity(n, n) - point_implicit_jacobian(model, x, theta, dt).transpose();
    const Eigen::VectorXd nu = a.partialPivLu().solve(as_vector(rhs));
    Field out = model.zero_field();
    for (Eigen::Index i = 0; i < n; ++i) out.values()[static_cast<std::size_t>(i)] = nu[i];
    return out;
}

} // namespace instanton::detail
