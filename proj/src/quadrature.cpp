#include "gentensor/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace gentensor {

namespace {

// Newton iteration on Legendre polynomials; standard construction.
GaussRule make_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

}  // namespace

const GaussRule& GaussRule::get(int order) {
    static std::map<int, GaussRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, make_rule(order)).first;
    return it->second;
}

double integrate_interval(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec) {
    if (b <= a) return 0.0;
    const GaussRule& gr = GaussRule::get(spec.order);
    const double hp = (b - a) / spec.panels;
    double acc = 0.0;
    for (int p = 0; p < spec.panels; ++p) {
        const double c = a + (p + 0.5) * hp;
        for (int i = 0; i < spec.order; ++i)
            acc += gr.weights[i] * f(c + 0.5 * hp * gr.nodes[i]);
    }
    return acc * 0.5 * hp;
}

double integrate_box(const std::function<double(const Vec&)>& f, const Box& box,
                     const QuadratureSpec& spec) {
    const int d = box.dim();
    if ((box.widths().array() <= 0).any()) return 0.0;
    const GaussRule& gr = GaussRule::get(spec.order);
    const int per_axis = spec.order * spec.panels;

    // precompute per-axis nodes and weights
    std::vector<std::vector<double>> xs(d), ws(d);
    for (int ax = 0; ax < d; ++ax) {
        const double hp = (box.hi[ax] - box.lo[ax]) / spec.panels;
        xs[ax].reserve(per_axis);
        ws[ax].reserve(per_axis);
        for (int p = 0; p < spec.panels; ++p) {
            const double c = box.lo[ax] + (p + 0.5) * hp;
            for (int i = 0; i < spec.order; ++i) {
                xs[ax].push_back(c + 0.5 * hp * gr.nodes[i]);
                ws[ax].push_back(0.5 * hp * gr.weights[i]);
            }
        }
    }

    double acc = 0.0;
    std::vector<int> idx(d, 0);
    Vec x(d);
    while (true) {
        double w = 1.0;
        for (int ax = 0; ax < d; ++ax) {
            x[ax] = xs[ax][idx[ax]];
            w *= ws[ax][idx[ax]];
        }
        acc += w * f(x);
        int ax = 0;
        for (; ax < d; ++ax) {
            if (++idx[ax] < per_axis) break;
            idx[ax] = 0;
        }
        if (ax == d) break;
    }
    return acc;
}

namespace {

struct AdaptiveState {
    const std::function<double(const Vec&)>& f;
    const AdaptiveSpec& spec;
    int cells = 0;
    double scale = 0.0;  // running magnitude for the relative tolerance
};

double cell_integral(AdaptiveState& st, const Box& box) {
    ++st.cells;
    return integrate_box(st.f, box, {st.spec.order, 1});
}

double adapt(AdaptiveState& st, const Box& box, double whole, int depth) {
    const int ax = [&] {
        int a = 0;
        Vec w = box.widths();
        for (int i = 1; i < box.dim(); ++i)
            if (w[i] > w[a]) a = i;
        return a;
    }();
    Box left = box, right = box;
    left.hi[ax] = right.lo[ax] = 0.5 * (box.lo[ax] + box.hi[ax]);
    const double il = cell_integral(st, left);
    const double ir = cell_integral(st, right);
    const double split = il + ir;
    const double err = std::fabs(whole - split);
    st.scale = std::max(st.scale, std::fabs(split));
    const bool forced = st.spec.force_split && st.spec.force_split(box);
    if (depth >= st.spec.max_depth || st.cells > st.spec.max_cells ||
        (!forced && err <= st.spec.abs_tol + st.spec.rel_tol * st.scale))
        return split;
    return adapt(st, left, il, depth + 1) + adapt(st, right, ir, depth + 1);
}

}  // namespace

double integrate_box_adaptive(const std::function<double(const Vec&)>& f,
                              const Box& box, const AdaptiveSpec& spec) {
    if ((box.widths().array() <= 0).any()) return 0.0;
    AdaptiveState st{f, spec};
    const double whole = cell_integral(st, box);
    return adapt(st, box, whole, 0);
}

PrincipalValueResult principal_value(const std::function<double(double)>& f, double pole,
                                     double lo, double hi, double r0, double tol,
                                     int max_levels, const QuadratureSpec& spec) {
    PrincipalValueResult res;
    const double reach = std::min(pole - lo, hi - pole);
    if (reach <= 0) throw Error("principal_value: pole outside the interval");
    double r = std::min(r0, 0.5 * reach);

    // symmetric part over [pole-R, pole+R]: int_r^R (f(pole+t)-f(pole-t))/t dt,
    // plus the regular remainder outside the symmetric window
    const double R = reach;
    auto sym = [&](double radius) {
        return integrate_interval(
            [&](double t) { return (f(pole + t) - f(pole - t)) / t; }, radius, R, spec);
    };
    double outer = 0.0;
    if (hi - pole > R)
        outer += integrate_interval([&](double t) { return f(t) / (t - pole); },
                                    pole + R, hi, spec);
    if (pole - lo > R)
        outer += integrate_interval([&](double t) { return f(t) / (t - pole); }, lo,
                                    pole - R, spec);

    double prev = sym(r);
    double prev_extrap = prev;
    for (int k = 1; k <= max_levels; ++k) {
        r *= 0.5;
        const double cur = sym(r);
        // excision defect is O(r): one Richardson level removes it
        const double extrap = 2.0 * cur - prev;
        if (std::fabs(extrap - prev_extrap) < tol) {
            res.value = extrap + outer;
            res.converged = true;
            res.levels_used = k;
            return res;
        }
        prev = cur;
        prev_extrap = extrap;
    }
    res.value = prev_extrap + outer;
    res.converged = false;
    res.levels_used = max_levels;
    return res;
}

}  // namespace gentensor
