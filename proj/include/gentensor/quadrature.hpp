#pragma once

#include <functional>
#include <vector>

#include "gentensor/chart.hpp"

namespace gentensor {

/// Gauss-Legendre nodes/weights on [-1,1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    static const GaussRule& get(int order);
};

struct QuadratureSpec {
    int order = 12;       // Gauss points per panel per axis
    int panels = 6;       // panels per axis
};

/// Composite tensor-product Gauss-Legendre integral over a box.
double integrate_box(const std::function<double(const Vec&)>& f, const Box& box,
                     const QuadratureSpec& spec = {});

/// 1-D integral over [a,b].
double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec = {});

struct AdaptiveSpec {
    int order = 10;          // Gauss points per cell per axis
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    int max_depth = 42;
    int max_cells = 200000;
    /// Cells for which this returns true are bisected regardless of the error
    /// estimate; used to force resolution of known kernel-width features that
    /// coarse cells would never see.
    std::function<bool(const Box&)> force_split;
};

/// Adaptive bisection quadrature (widest axis first). Needed where the
/// integrand carries kernel-width spikes that no fixed grid can resolve
/// across the whole eps range.
double integrate_box_adaptive(const std::function<double(const Vec&)>& f,
                              const Box& box, const AdaptiveSpec& spec = {});

struct PrincipalValueResult {
    double value = 0.0;
    bool converged = false;
    int levels_used = 0;
};

/// Cauchy principal value of int f(x)/(x - pole) over [lo, hi] containing the
/// pole. Symmetric excision with radii r0 * 2^-k and Richardson extrapolation;
/// declared converged once successive extrapolants differ by < tol.
PrincipalValueResult principal_value(const std::function<double(double)>& f, double pole,
                                     double lo, double hi, double r0 = 0.25,
                                     double tol = 1e-9, int max_levels = 24,
                                     const QuadratureSpec& spec = {});

}  // namespace gentensor
