#pragma once

#include <optional>
#include <string>
#include <vector>

namespace preflab {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double pearson_r = 0.0;
    double r_squared = 0.0;
    bool degenerate = false;  // constant x or y: r undefined, slope 0
};

// Simple least squares y ~ slope*x + intercept. Throws InputError when the
// series are empty or of mismatched length.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Spearman rank correlation; ties get average ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// One observation for the Signal-Noise diagnostic: a feature's measured
// preference together with the factor settings it was measured under.
struct PreferencePoint {
    double pixel_count = 0.0;
    double deviation_eps = 0.0;
    double overlap_alpha = 0.0;
    double predictivity = 1.0;
    double preference = 0.0;
};

struct PreferenceModelFit {
    // Coefficients over standardized regressors, order:
    // pixel_count, deviation, overlap, predictivity.
    std::vector<double> coefficients;
    double intercept = 0.0;
    double residual_rms = 0.0;
    double r_squared = 0.0;
    // Means/stddevs used for standardization, same order as coefficients.
    std::vector<double> regressor_mean;
    std::vector<double> regressor_std;

    double predict(const PreferencePoint& p) const;
};

// OLS over standardized regressors. Constant regressors are kept with a
// zero coefficient; throws SingularityError when the design is
// rank-deficient beyond that, and InputError on fewer than 5 points or
// fewer than 2 varying axes.
PreferenceModelFit fit_preference_model(const std::vector<PreferencePoint>& points);

struct ShapeTexturePrediction {
    int shape_class = 0;
    int texture_class = 0;
    int predicted_class = 0;
};

struct ShapeTextureBiasResult {
    std::optional<double> shape_bias;    // absent when nothing was decided
    std::optional<double> texture_bias;
    double accuracy = 0.0;  // decided / total
    long long decided = 0;
    long long total = 0;
};

// Geirhos-style cue-conflict scoring: a prediction is "decided" when it
// matches the stimulus's shape class or texture class.
ShapeTextureBiasResult shape_texture_bias(
    const std::vector<ShapeTexturePrediction>& predictions);

}  // namespace preflab
