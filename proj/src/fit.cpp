#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "flatreg/errors.hpp"
#include "flatreg/sampler.hpp"

namespace flatreg {

namespace {

double t_quantile(double p, int dof) {
    if (dof <= 0) return std::numeric_limits<double>::infinity();
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, p);
}

struct Wls {
    Eigen::VectorXd beta;
    Eigen::MatrixXd cov;
    double r2;
};

Wls weighted_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
    const Eigen::Index n = X.rows(), p = X.cols();
    const Eigen::MatrixXd Xw = w.cwiseSqrt().asDiagonal() * X;
    const Eigen::VectorXd yw = w.cwiseSqrt().cwiseProduct(y);
    const Eigen::MatrixXd XtX = Xw.transpose() * Xw;
    Wls out;
    out.beta = XtX.ldlt().solve(Xw.transpose() * yw);
    const Eigen::VectorXd res = y - X * out.beta;
    const double sse = (w.array() * res.array().square()).sum();
    const double ybar = (w.array() * y.array()).sum() / w.sum();
    const double sst = (w.array() * (y.array() - ybar).square()).sum();
    out.r2 = sst > 0 ? 1.0 - sse / sst : 1.0;
    const double s2 = n > p ? sse / static_cast<double>(n - p) : 0.0;
    out.cov = XtX.inverse() * s2;
    return out;
}

} // namespace

ScalingFit fit_scaling_exponent(const std::vector<std::pair<std::vector<double>, ConingEstimate>>& results) {
    if (results.empty()) throw ConfigError("no results to fit");
    const size_t k = results.front().first.size();
    for (const auto& [eps, est] : results) {
        if (eps.size() != k) throw ConfigError("mixed epsilon dimensions in fit input");
        if (!(est.value > 0.0))
            throw RuntimeError("degenerate fit: an estimate is zero (no accepted samples)");
    }
    ScalingFit fit;
    for (size_t a = 0; a < k; ++a) {
        std::set<double> distinct;
        for (const auto& r : results) distinct.insert(r.first[a]);
        if (distinct.size() < 4 && results.size() > 1) {
            fit.precondition_ok = false;
            fit.note = "fewer than 4 distinct epsilon values on an axis";
        }
    }
    for (const auto& r : results)
        if (r.second.standard_error > 0.2 * r.second.value) {
            fit.precondition_ok = false;
            fit.note = "an estimate has relative standard error above 20%";
        }

    const Eigen::Index n = static_cast<Eigen::Index>(results.size());
    // an axis whose epsilon never varies cannot be fitted; leave it out
    std::vector<size_t> axes;
    for (size_t a = 0; a < k; ++a) {
        std::set<double> distinct;
        for (const auto& r : results) distinct.insert(r.first[a]);
        if (distinct.size() > 1) axes.push_back(a);
    }
    Eigen::MatrixXd X(n, 1 + axes.size());
    Eigen::MatrixXd Xj(n, 2);
    Eigen::VectorXd y(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& [eps, est] = results[i];
        X(i, 0) = 1.0;
        Xj(i, 0) = 1.0;
        double lp = 0.0;
        for (size_t a = 0; a < axes.size(); ++a) X(i, 1 + a) = std::log(eps[axes[a]]);
        for (double e : eps) lp += std::log(e);
        Xj(i, 1) = lp;
        y[i] = std::log(est.value);
        const double rel = est.standard_error > 0 ? est.standard_error / est.value : 1e-6;
        w[i] = 1.0 / (rel * rel);
    }
    if (n < static_cast<Eigen::Index>(axes.size()) + 1)
        throw RuntimeError("degenerate fit: not enough points for the number of axes");

    const Wls full = weighted_fit(X, y, w);
    const int dof = static_cast<int>(n - X.cols());
    const double tq = t_quantile(0.975, dof);
    fit.intercept = full.beta[0];
    fit.r2 = full.r2;
    fit.slopes.assign(k, std::nan(""));
    fit.slope_se.assign(k, std::nan(""));
    fit.ci_low.assign(k, std::nan(""));
    fit.ci_high.assign(k, std::nan(""));
    for (size_t a = 0; a < axes.size(); ++a) {
        const double s = full.beta[1 + a], se = std::sqrt(std::max(0.0, full.cov(1 + a, 1 + a)));
        fit.slopes[axes[a]] = s;
        fit.slope_se[axes[a]] = se;
        fit.ci_low[axes[a]] = s - tq * se;
        fit.ci_high[axes[a]] = s + tq * se;
    }
    const Wls joint = weighted_fit(Xj, y, w);
    fit.joint_slope = joint.beta[1];
    fit.joint_se = std::sqrt(std::max(0.0, joint.cov(1, 1)));
    return fit;
}

} // namespace flatreg
