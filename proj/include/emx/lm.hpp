#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "emx/errors.hpp"

namespace emx {

class rank_deficiency_error : public domain_error {
public:
    rank_deficiency_error(const std::string& what, std::vector<std::string> directions)
        : domain_error("least_squares", what), directions_(std::move(directions)) {}

    const std::vector<std::string>& degenerate_directions() const noexcept { return directions_; }

private:
    std::vector<std::string> directions_;
};

struct FitOptions {
    int max_iterations = 200;
    double relative_residual_tol = 1e-10;
    double relative_step_tol = 1e-10;
    double initial_lambda = 1e-3;
    double max_lambda = 1e14;
    double jacobian_rel_step = 1e-6;   // forward-difference step, relative
    double jacobian_abs_floor = 1e-12;  // absolute step floor
    double rank_tolerance = 1e-12;      // singular-value ratio marking degeneracy
    /// Typical magnitude per parameter; keeps the difference step sensible
    /// when a parameter passes through zero (for instance a charge offset on
    /// a +-49 V axis). Empty: fall back to |p| and the absolute floor.
    std::vector<double> parameter_scales;
};

struct FitResult {
    std::vector<double> parameters;
    std::vector<std::string> names;
    Eigen::MatrixXd covariance;        // (J^T J)^-1 at the solution
    double residual_norm = 0.0;        // sqrt(sum of squared weighted residuals)
    int iterations = 0;
    bool converged = false;
    std::vector<double> cost_history;  // accepted costs, non-increasing
    std::vector<std::string> warnings;

    double sigma(std::size_t i) const { return std::sqrt(std::max(0.0, covariance(i, i))); }
};

/// Residual-vector callback: weighted residuals r(p), minimized as |r|^2.
using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

namespace detail {

inline Eigen::MatrixXd numeric_jacobian(const ResidualFn& fn, const std::vector<double>& p,
                                        const Eigen::VectorXd& r0, const FitOptions& opt) {
    const auto m = static_cast<Eigen::Index>(r0.size());
    const auto n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd jac(m, n);
    std::vector<double> probe = p;
    for (Eigen::Index j = 0; j < n; ++j) {
        double h = std::max(opt.jacobian_rel_step * std::abs(p[j]), opt.jacobian_abs_floor);
        if (static_cast<std::size_t>(j) < opt.parameter_scales.size())
            h = std::max(h, opt.jacobian_rel_step * std::abs(opt.parameter_scales[j]));
        probe[j] = p[j] + h;
        const std::vector<double> r1 = fn(probe);
        probe[j] = p[j];
        for (Eigen::Index i = 0; i < m; ++i) jac(i, j) = (r1[i] - r0(i)) / h;
    }
    return jac;
}

/// Column norms of the Jacobian; parameters live on wildly different scales
/// (hertz next to spectral densities), so rank and covariance work on the
/// column-normalized system.
inline Eigen::VectorXd column_scales(const Eigen::MatrixXd& jac) {
    Eigen::VectorXd s(jac.cols());
    for (Eigen::Index j = 0; j < jac.cols(); ++j) s(j) = jac.col(j).norm();
    return s;
}

inline std::vector<std::string> degenerate_directions(const Eigen::MatrixXd& jac,
                                                      const std::vector<std::string>& names,
                                                      double tol) {
    const Eigen::VectorXd scale = column_scales(jac);
    Eigen::MatrixXd unit = jac;
    std::vector<std::string> out;
    for (Eigen::Index j = 0; j < jac.cols(); ++j) {
        if (scale(j) > 0.0) {
            unit.col(j) /= scale(j);
        } else {
            out.push_back(j < static_cast<Eigen::Index>(names.size())
                              ? names[j]
                              : "p" + std::to_string(j));
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(unit, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (smax > 0.0 && sv(k) > tol * smax) continue;
        std::string dir;
        for (Eigen::Index j = 0; j < svd.matrixV().rows(); ++j) {
            if (std::abs(svd.matrixV()(j, k)) < 0.3) continue;
            if (!dir.empty()) dir += " / ";
            dir += j < static_cast<Eigen::Index>(names.size()) ? names[j]
                                                               : "p" + std::to_string(j);
        }
        out.push_back(dir.empty() ? "unidentified" : dir);
    }
    return out;
}

}  // namespace detail

/// Levenberg-Marquardt with a forward-difference Jacobian. The damping
/// multiplies the normal-equation diagonal and adapts by factors of ten on
/// reject / accept. Hitting the iteration cap returns a non-converged result
/// with diagnostics; a singular Jacobian throws rank_deficiency_error naming
/// the flat parameter combinations.
inline FitResult least_squares(const ResidualFn& fn, std::vector<double> p,
                               std::vector<std::string> names = {}, FitOptions opt = {}) {
    if (p.empty()) throw domain_error("least_squares", "no parameters to fit");
    if (names.empty())
        for (std::size_t i = 0; i < p.size(); ++i) names.push_back("p" + std::to_string(i));

    FitResult res;
    res.names = names;

    auto eval = [&](const std::vector<double>& params) {
        const std::vector<double> rv = fn(params);
        Eigen::VectorXd r(static_cast<Eigen::Index>(rv.size()));
        for (std::size_t i = 0; i < rv.size(); ++i) r(static_cast<Eigen::Index>(i)) = rv[i];
        return r;
    };

    Eigen::VectorXd r = eval(p);
    if (r.size() < static_cast<Eigen::Index>(p.size()))
        throw rank_deficiency_error("fewer residuals than parameters", names);
    double cost = r.squaredNorm();
    if (!std::isfinite(cost))
        throw domain_error("least_squares", "initial parameters give non-finite residuals");
    res.cost_history.push_back(cost);

    double lambda = opt.initial_lambda;
    Eigen::MatrixXd jac = detail::numeric_jacobian(fn, p, r, opt);
    {
        const auto degenerate = detail::degenerate_directions(jac, names, opt.rank_tolerance);
        if (!degenerate.empty()) {
            std::string msg = "singular normal equations; degenerate direction(s):";
            for (const auto& d : degenerate) msg += " [" + d + "]";
            throw rank_deficiency_error(msg, degenerate);
        }
    }

    bool jac_fresh = true;
    for (res.iterations = 1; res.iterations <= opt.max_iterations; ++res.iterations) {
        if (!jac_fresh) jac = detail::numeric_jacobian(fn, p, r, opt);
        jac_fresh = false;

        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;

        bool accepted = false;
        while (lambda <= opt.max_lambda) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index k = 0; k < damped.rows(); ++k)
                damped(k, k) += lambda * std::max(jtj(k, k), 1e-300);
            const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
            std::vector<double> trial = p;
            for (std::size_t i = 0; i < p.size(); ++i)
                trial[i] += step(static_cast<Eigen::Index>(i));
            const Eigen::VectorXd r_trial = eval(trial);
            const double cost_trial = r_trial.squaredNorm();
            if (std::isfinite(cost_trial) && cost_trial <= cost) {
                const double rel_drop = (cost - cost_trial) / std::max(cost, 1e-300);
                double rel_step = 0.0;
                for (std::size_t i = 0; i < p.size(); ++i)
                    rel_step = std::max(rel_step,
                                        std::abs(step(static_cast<Eigen::Index>(i))) /
                                            std::max(std::abs(p[i]), 1e-30));
                p = trial;
                r = r_trial;
                cost = cost_trial;
                res.cost_history.push_back(cost);
                lambda = std::max(lambda / 10.0, 1e-18);
                accepted = true;
                if (rel_drop < opt.relative_residual_tol || rel_step < opt.relative_step_tol)
                    res.converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No downhill step at any damping. After at least one accepted
            // step this is a (local) optimum to within the Jacobian's
            // resolution; straight from the start it is a failure.
            if (res.cost_history.size() > 1)
                res.converged = true;
            else
                res.warnings.push_back("damping exhausted without any downhill step");
            break;
        }
        if (res.converged) break;
    }
    if (!res.converged && res.warnings.empty())
        res.warnings.push_back("maximum iterations reached without meeting tolerances");

    res.parameters = p;
    res.residual_norm = std::sqrt(cost);

    // Covariance from the undamped normal equations via an SVD
    // pseudo-inverse of the column-normalized system.
    jac = detail::numeric_jacobian(fn, p, r, opt);
    const Eigen::VectorXd scale = detail::column_scales(jac);
    Eigen::MatrixXd unit = jac;
    for (Eigen::Index j = 0; j < jac.cols(); ++j)
        if (scale(j) > 0.0) unit.col(j) /= scale(j);
    const Eigen::MatrixXd jtj = unit.transpose() * unit;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    Eigen::VectorXd inv = sv;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        inv(k) = sv(k) > opt.rank_tolerance * smax ? 1.0 / sv(k) : 0.0;
    const Eigen::MatrixXd unit_cov = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    res.covariance = unit_cov;
    for (Eigen::Index i = 0; i < jac.cols(); ++i)
        for (Eigen::Index j = 0; j < jac.cols(); ++j)
            res.covariance(i, j) = scale(i) > 0.0 && scale(j) > 0.0
                                       ? unit_cov(i, j) / (scale(i) * scale(j))
                                       : 0.0;
    return res;
}

}  // namespace emx
