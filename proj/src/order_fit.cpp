#include "gentensor/order_fit.hpp"

#include <algorithm>
#include <cmath>

namespace gentensor {

namespace {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y,
                 double* ci, double* resid_std) {
    const int n = static_cast<int>(x.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    const double icept = my - slope * mx;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        const double r = y[i] - (icept + slope * x[i]);
        ss += r * r;
    }
    const double var = n > 2 ? ss / (n - 2) : 0.0;
    if (ci) *ci = 2.0 * std::sqrt(var / sxx);
    if (resid_std) *resid_std = std::sqrt(n > 0 ? ss / n : 0.0);
    return slope;
}

}  // namespace

void estimate_order(OrderReport& r, const OrderFitConfig& cfg) {
    if (r.samples.size() < 4) throw Error("estimate_order: need at least 4 samples");
    for (size_t i = 1; i < r.samples.size(); ++i)
        if (r.samples[i].eps >= r.samples[i - 1].eps)
            throw Error("estimate_order: eps grid must be strictly decreasing");

    bool all_zero = true;
    for (const auto& s : r.samples)
        if (std::fabs(s.sup_value) > cfg.abs_floor) all_zero = false;
    if (all_zero) {
        r.identically_zero = true;
        r.fitted_slope = OrderReport::kZeroSlope;
        r.slope_ci = 0.0;
        return;
    }

    // truncate at the noise floor: keep the largest-eps contiguous positive run
    std::vector<double> lx, ly;
    for (const auto& s : r.samples) {
        if (s.sup_value <= cfg.abs_floor) {
            r.noise_floor = true;
            break;
        }
        lx.push_back(std::log(s.eps));
        ly.push_back(std::log(s.sup_value));
    }
    if (lx.size() < 4) {
        // effectively zero past the first few samples
        r.identically_zero = true;
        r.fitted_slope = OrderReport::kZeroSlope;
        return;
    }

    const int w = std::min<int>(cfg.tail_window, static_cast<int>(lx.size()));
    std::vector<double> tx(lx.end() - w, lx.end());
    std::vector<double> ty(ly.end() - w, ly.end());
    r.fitted_slope = ols_slope(tx, ty, &r.slope_ci, nullptr);
    // oscillation is judged against the fit over all kept samples, where a
    // modulation cannot hide inside the fitted trend
    double resid_all = 0;
    ols_slope(lx, ly, nullptr, &resid_all);
    if (resid_all > cfg.osc_residual) r.oscillatory = true;

    // windowed slopes over the kept samples; a steadily growing magnitude
    // means no power law bounds the data
    if (lx.size() >= 8) {
        std::vector<double> ws;
        const int win = 4;
        for (size_t i = 0; i + win <= lx.size(); i += 2) {
            std::vector<double> sx(lx.begin() + i, lx.begin() + i + win);
            std::vector<double> sy(ly.begin() + i, ly.begin() + i + win);
            ws.push_back(ols_slope(sx, sy, nullptr, nullptr));
        }
        bool monotone = true;
        for (size_t i = 1; i < ws.size(); ++i)
            if (ws[i] > ws[i - 1] + 0.1) monotone = false;
        const double spread = *std::max_element(ws.begin(), ws.end()) -
                              *std::min_element(ws.begin(), ws.end());
        if (monotone && spread > cfg.superpoly_spread && ws.back() < -1.0)
            r.superpolynomial = true;
    }
}

std::vector<double> geometric_eps_grid(int k_min, int k_max) {
    std::vector<double> g;
    for (int k = k_min; k <= k_max; ++k) g.push_back(std::pow(2.0, -k));
    return g;
}

}  // namespace gentensor
