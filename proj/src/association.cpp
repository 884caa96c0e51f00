#include "gentensor/association.hpp"

#include <cmath>

namespace gentensor {

void AssociationProbe::validate() const {
    if (omega_list.empty() || t_tilde_list.empty())
        throw Error("AssociationProbe: probe lists must be non-empty");
    for (size_t i = 1; i < eps_grid.size(); ++i)
        if (eps_grid[i] >= eps_grid[i - 1])
            throw Error("AssociationProbe: eps grid must be strictly decreasing");
}

double association_integral(const Representative& u, const AssociationProbe& probe,
                            const NForm& omega, const TensorField& tt, double eps) {
    // evaluation along the kernel net develops width-(eps C) features over the
    // singular supports of embedded distributions; force the quadrature to
    // resolve them
    const double feature_width = eps * probe.kernel.support_constant;
    std::vector<Box> hot;
    for (const auto& b : u.kernel_scale_features())
        hot.push_back(b.inflated(8.0 * feature_width));
    AdaptiveSpec spec;
    spec.order = probe.quadrature.order;
    spec.rel_tol = 1e-10;
    spec.abs_tol = 1e-13;
    spec.force_split = [hot, feature_width](const Box& cell) {
        if (cell.max_width() <= 4.0 * feature_width) return false;
        for (const auto& b : hot)
            if (cell.intersects(b)) return true;
        return false;
    };
    return integrate_box_adaptive(
        [&](const Vec& p) {
            const double w = omega.density->value(p);
            if (w == 0.0) return 0.0;
            NForm phi = probe.kernel.at(eps, p);
            Vec val = u.eval(phi, p, probe.A);
            return dual_contract(val, tt.value(p), u.valence()) * w;
        },
        omega.support, spec);
}

namespace {

AssociationReport run_probe(const Representative& u, const AssociationProbe& probe,
                            const std::function<double(const NForm&, const TensorField&)>&
                                target_fn) {
    probe.validate();
    AssociationReport out;
    out.verdict = Verdict::Pass;
    for (size_t wi = 0; wi < probe.omega_list.size(); ++wi) {
        const NForm& omega = probe.omega_list[wi];
        for (size_t ti = 0; ti < probe.t_tilde_list.size(); ++ti) {
            const TensorField& tt = probe.t_tilde_list[ti];
            ProbeRate rate;
            rate.omega_index = static_cast<int>(wi);
            rate.t_tilde_index = static_cast<int>(ti);
            rate.target = target_fn(omega, tt);
            rate.report.test_id =
                "assoc_w" + std::to_string(wi) + "_t" + std::to_string(ti);
            for (double eps : probe.eps_grid) {
                // the kernel must stay inside the domain over supp omega
                Box reach = omega.support.inflated(eps * probe.kernel.support_constant);
                if (!u.domain().contains(reach)) {
                    rate.report.eps_truncated = true;
                    continue;
                }
                const double I = association_integral(u, probe, omega, tt, eps);
                rate.report.samples.push_back({eps, std::fabs(I - rate.target)});
            }
            if (rate.report.samples.size() < 4)
                throw Error("association: fewer than 4 usable eps");
            estimate_order(rate.report);
            const int tail = std::min<int>(probe.tail_points,
                                            static_cast<int>(rate.report.samples.size()));
            rate.tail_max = 0.0;
            for (int k = 0; k < tail; ++k)
                rate.tail_max = std::max(
                    rate.tail_max,
                    rate.report.samples[rate.report.samples.size() - 1 - k].sup_value);
            const bool converged =
                rate.report.identically_zero ||
                (rate.tail_max < probe.assoc_tol && rate.report.fitted_slope > 0.0);
            rate.verdict = converged ? Verdict::Pass : Verdict::Fail;
            if (!converged) out.verdict = Verdict::Fail;
            out.rates.push_back(std::move(rate));
        }
    }
    return out;
}

}  // namespace

AssociationReport associated_zero(const Representative& u, const AssociationProbe& probe) {
    return run_probe(u, probe, [](const NForm&, const TensorField&) { return 0.0; });
}

AssociationReport shadow_matches(const Representative& u, const TensorDistribution& v,
                                 const AssociationProbe& probe) {
    if (v.r() != u.r() || v.s() != u.s())
        throw Error("shadow_matches: valence mismatch");
    return run_probe(u, probe, [&](const NForm& omega, const TensorField& tt) {
        return v.pair(tt, omega);
    });
}

AssociationReport c0_associated(const Representative& u, const TensorField& t,
                                const AssociationProbe& probe, const C0Config& c0) {
    probe.validate();
    if (c0.K_boxes.empty()) throw Error("c0_associated: need at least one K box");
    AssociationReport out;
    out.verdict = Verdict::Pass;

    const auto features = u.kernel_scale_features();
    for (size_t ki = 0; ki < c0.K_boxes.size(); ++ki) {
        const Box& K = c0.K_boxes[ki];
        auto base_grid = K.lattice(c0.p_per_axis);
        for (size_t ti = 0; ti < probe.t_tilde_list.size(); ++ti) {
            const TensorField& tt = probe.t_tilde_list[ti];
            // pointwise deviation whose locally uniform decay is measured; the
            // C^k variant also drives its coordinate derivative words to zero
            auto g = [&](double eps, const Vec& p) {
                NForm phi = probe.kernel.at(eps, p);
                return dual_contract(u.eval(phi, p, probe.A), tt.value(p),
                                     u.valence()) -
                       dual_contract(t.value(p), tt.value(p), t.shape);
            };
            std::function<double(double, const Vec&, const std::vector<int>&, size_t)>
                g_word = [&](double eps, const Vec& p, const std::vector<int>& w,
                             size_t from) -> double {
                if (from == w.size()) return g(eps, p);
                const double hstep = 0.02 * eps * probe.kernel.support_constant;
                auto at = [&](double off) {
                    Vec ps = p;
                    ps[w[from]] += off;
                    return g_word(eps, ps, w, from + 1);
                };
                return (-at(2 * hstep) + 8.0 * at(hstep) - 8.0 * at(-hstep) +
                        at(-2 * hstep)) /
                       (12.0 * hstep);
            };
            std::vector<std::vector<int>> words{{}};
            for (int l = 1; l <= c0.lie_word_depth; ++l) {
                std::vector<std::vector<int>> next;
                for (const auto& w : words)
                    if (static_cast<int>(w.size()) == l - 1)
                        for (int ax = 0; ax < u.domain().dim; ++ax) {
                            auto e = w;
                            e.push_back(ax);
                            next.push_back(e);
                        }
                words.insert(words.end(), next.begin(), next.end());
            }
            ProbeRate rate;
            rate.omega_index = static_cast<int>(ki);
            rate.t_tilde_index = static_cast<int>(ti);
            rate.report.test_id =
                "c0_K" + std::to_string(ki) + "_t" + std::to_string(ti);
            for (double eps : probe.eps_grid) {
                Box reach = K.inflated(eps * probe.kernel.support_constant * 1.5);
                if (!u.domain().contains(reach)) {
                    rate.report.eps_truncated = true;
                    continue;
                }
                auto grid = base_grid;
                const double hw = eps * probe.kernel.support_constant;
                for (const auto& fb : features) {
                    Box local(fb.lo.array() - 1.25 * hw, fb.hi.array() + 1.25 * hw);
                    for (const auto& p : local.lattice(21))
                        if (K.contains(p)) grid.push_back(p);
                }
                double sup = 0.0;
                for (const auto& p : grid)
                    for (const auto& w : words)
                        sup = std::max(sup, std::fabs(g_word(eps, p, w, 0)));
                rate.report.samples.push_back({eps, sup});
            }
            if (rate.report.samples.size() < 4)
                throw Error("c0_associated: fewer than 4 usable eps");
            estimate_order(rate.report);
            const int tail = std::min<int>(probe.tail_points,
                                            static_cast<int>(rate.report.samples.size()));
            rate.tail_max = 0.0;
            for (int k = 0; k < tail; ++k)
                rate.tail_max = std::max(
                    rate.tail_max,
                    rate.report.samples[rate.report.samples.size() - 1 - k].sup_value);
            const bool converged =
                rate.report.identically_zero ||
                (rate.report.fitted_slope > 0.0 && rate.tail_max < c0.tail_tol);
            rate.verdict = converged ? Verdict::Pass : Verdict::Fail;
            if (!converged) out.verdict = Verdict::Fail;
            out.rates.push_back(std::move(rate));
        }
    }
    return out;
}

}  // namespace gentensor
