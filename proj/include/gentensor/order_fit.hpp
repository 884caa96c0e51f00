#pragma once

#include <limits>
#include <string>
#include <vector>

#include "gentensor/chart.hpp"

namespace gentensor {

enum class Verdict { Pass, Fail, Indeterminate };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "indeterminate";
    }
}

struct OrderSample {
    double eps;
    double sup_value;
};

struct OrderFitConfig {
    int tail_window = 6;          // smallest-eps points used for the fit
    double abs_floor = 1e-11;     // below the pairing-quadrature noise
    double osc_residual = 0.03;   // log-residual std flagged as oscillatory
    double superpoly_spread = 3.0;  // windowed-slope spread flagged as
                                    // divergence beyond any power law
};

/// Result of one asymptotic sweep: per-eps sup values and the fitted
/// log-log slope of sup_value against eps.
struct OrderReport {
    std::vector<OrderSample> samples;  // eps strictly decreasing
    double fitted_slope = 0.0;
    double slope_ci = 0.0;
    Verdict verdict = Verdict::Indeterminate;
    bool identically_zero = false;
    bool noise_floor = false;
    bool oscillatory = false;
    bool superpolynomial = false;
    bool eps_truncated = false;  // head of the grid dropped (support escape)
    std::string test_id;
    std::vector<Vec> argmax_points;  // p attaining the sup, per eps

    static constexpr double kZeroSlope = std::numeric_limits<double>::infinity();
};

/// Least-squares log-log slope over the tail window. Values identically zero
/// short-circuit (slope = +inf marker); sub-floor values are truncated and
/// flagged.
void estimate_order(OrderReport& report, const OrderFitConfig& cfg = {});

inline OrderReport estimate_order(const std::vector<OrderSample>& samples,
                                  const OrderFitConfig& cfg = {}) {
    OrderReport r;
    r.samples = samples;
    estimate_order(r, cfg);
    return r;
}

/// Geometric grid 2^-k for k in [k_min, k_max].
std::vector<double> geometric_eps_grid(int k_min = 3, int k_max = 12);

}  // namespace gentensor
