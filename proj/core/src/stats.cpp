#include "preflab/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "preflab/errors.hpp"

namespace preflab {

namespace {

void check_series(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty()) throw InputError("statistics: empty series");
    if (x.size() != y.size())
        throw InputError("statistics: series lengths differ (" +
                         std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Average ranks, ties shared.
std::vector<double> ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = shared;
        i = j + 1;
    }
    return r;
}

}  // namespace

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    check_series(x, y);
    const double n = static_cast<double>(x.size());
    const double mx = mean(x), my = mean(y);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinearFit fit;
    if (sxx == 0 || syy == 0 || n < 2) {
        fit.degenerate = true;
        fit.intercept = my;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.pearson_r = sxy / std::sqrt(sxx * syy);
    fit.r_squared = fit.pearson_r * fit.pearson_r;
    return fit;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit f = linear_fit(x, y);
    if (f.degenerate) throw InputError("pearson: constant series");
    return f.pearson_r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    check_series(x, y);
    return pearson(ranks(x), ranks(y));
}

double PreferenceModelFit::predict(const PreferencePoint& p) const {
    const double raw[4] = {p.pixel_count, p.deviation_eps, p.overlap_alpha,
                           p.predictivity};
    double v = intercept;
    for (int j = 0; j < 4; ++j) {
        if (regressor_std[j] == 0) continue;
        v += coefficients[j] * (raw[j] - regressor_mean[j]) / regressor_std[j];
    }
    return v;
}

PreferenceModelFit fit_preference_model(const std::vector<PreferencePoint>& points) {
    const std::size_t n = points.size();
    if (n < 5)
        throw InputError("fit_preference_model: need >= 5 points, got " +
                         std::to_string(n));

    Eigen::MatrixXd raw(n, 4);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw(i, 0) = points[i].pixel_count;
        raw(i, 1) = points[i].deviation_eps;
        raw(i, 2) = points[i].overlap_alpha;
        raw(i, 3) = points[i].predictivity;
        y(i) = points[i].preference;
    }

    PreferenceModelFit fit;
    fit.regressor_mean.resize(4);
    fit.regressor_std.resize(4);
    std::vector<int> active;
    for (int j = 0; j < 4; ++j) {
        fit.regressor_mean[j] = raw.col(j).mean();
        double var =
            (raw.col(j).array() - fit.regressor_mean[j]).square().sum() /
            static_cast<double>(n);
        fit.regressor_std[j] = std::sqrt(var);
        if (fit.regressor_std[j] > 0) active.push_back(j);
    }
    if (active.size() < 2)
        throw InputError("fit_preference_model: need >= 2 varying axes, got " +
                         std::to_string(active.size()));

    const int k = static_cast<int>(active.size());
    Eigen::MatrixXd X(n, k + 1);
    X.col(0).setOnes();
    for (int c = 0; c < k; ++c) {
        int j = active[c];
        X.col(c + 1) =
            (raw.col(j).array() - fit.regressor_mean[j]) / fit.regressor_std[j];
    }

    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
    if (!lu.isInvertible())
        throw SingularityError(
            "fit_preference_model: rank-deficient design; add sweep points "
            "that vary the factors independently");
    Eigen::VectorXd beta = lu.solve(X.transpose() * y);

    fit.intercept = beta(0);
    fit.coefficients.assign(4, 0.0);
    for (int c = 0; c < k; ++c) fit.coefficients[active[c]] = beta(c + 1);

    Eigen::VectorXd resid = y - X * beta;
    fit.residual_rms = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
    double ss_tot = (y.array() - y.mean()).square().sum();
    fit.r_squared = ss_tot == 0 ? 1.0 : 1.0 - resid.squaredNorm() / ss_tot;
    return fit;
}

ShapeTextureBiasResult shape_texture_bias(
    const std::vector<ShapeTexturePrediction>& predictions) {
    if (predictions.empty()) throw InputError("shape_texture_bias: empty input");
    ShapeTextureBiasResult r;
    r.total = static_cast<long long>(predictions.size());
    long long shape_hits = 0;
    for (const auto& p : predictions) {
        if (p.predicted_class == p.shape_class) {
            ++r.decided;
            ++shape_hits;
        } else if (p.predicted_class == p.texture_class) {
            ++r.decided;
        }
    }
    r.accuracy = static_cast<double>(r.decided) / static_cast<double>(r.total);
    if (r.decided > 0) {
        r.shape_bias = static_cast<double>(shape_hits) / static_cast<double>(r.decided);
        r.texture_bias = 1.0 - *r.shape_bias;
    }
    return r;
}

}  // namespace preflab
