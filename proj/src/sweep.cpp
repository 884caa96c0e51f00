#include "gentensor/sweep.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace gentensor {

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, count);
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

void SweepConfig::validate() const {
    for (size_t i = 1; i < eps_grid.size(); ++i)
        if (eps_grid[i] >= eps_grid[i - 1])
            throw Error("SweepConfig: eps grid must be strictly decreasing");
    if (!core_contains(A, K))
        throw Error("SweepConfig: K must be compactly contained in core(A)");
    for (const auto& B : B_list)
        if (!A.core_region || !kernel_covers(B, *A.core_region))
            throw Error("SweepConfig: every B must vanish on the diagonal over core(A)");
}

Vec sweep_point_value(const Representative& u, const SweepConfig& cfg, int j,
                      double eps, const Vec& p) {
    NForm omega = cfg.kernel.at(eps, p);
    std::vector<const TransportOperator*> Bs;
    for (int t = 0; t < j; ++t) Bs.push_back(&cfg.B_list.at(t));
    return u.d3(omega, p, cfg.A, Bs);
}

namespace {

/// Lie word applied by nested central differences in p; the step follows the
/// kernel width so the relative truncation error is uniform in eps.
Vec lie_word_value(const Representative& u, const SweepConfig& cfg, int j, double eps,
                   const Vec& p, const std::vector<int>& word, size_t from) {
    if (from == word.size()) return sweep_point_value(u, cfg, j, eps, p);
    const TensorField& X = cfg.X_list.at(word[from]);
    const int n = p.size();
    const double h = cfg.lie_fd_rel * eps * cfg.kernel.support_constant;
    std::vector<Vec> partials(n);
    for (int k = 0; k < n; ++k) {
        auto at = [&](double off) {
            Vec ps = p;
            ps[k] += off;
            return lie_word_value(u, cfg, j, eps, ps, word, from + 1);
        };
        partials[k] =
            (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
    }
    Vec val = lie_word_value(u, cfg, j, eps, p, word, from + 1);
    return lie_fiber_combine(X, p, u.valence(), val, partials);
}

}  // namespace

OrderReport sweep(const Representative& u, const SweepConfig& cfg, int j,
                  const std::vector<int>& word) {
    if (j > static_cast<int>(cfg.B_list.size()))
        throw Error("sweep: j exceeds the configured B battery");
    OrderReport rep;
    rep.test_id = "j" + std::to_string(j) + "_l" + std::to_string(word.size());

    // drop head eps whose kernel support would escape the domain
    std::vector<double> eps_ok;
    for (double eps : cfg.eps_grid) {
        const double hw = eps * cfg.kernel.support_constant;
        // widest excursion of the Lie-word stencils around K
        const double stencil = 2.0 * cfg.lie_fd_rel * hw * std::max<size_t>(word.size(), 1);
        Box reach = cfg.K.inflated(hw + stencil);
        if (u.domain().contains(reach))
            eps_ok.push_back(eps);
        else
            rep.eps_truncated = true;
    }
    if (eps_ok.size() < 4)
        throw Error("sweep: fewer than 4 usable eps after domain truncation");

    auto base_grid = cfg.K.lattice(cfg.p_per_axis);
    const auto features = u.kernel_scale_features();
    rep.samples.resize(eps_ok.size());
    rep.argmax_points.resize(eps_ok.size());
    parallel_for(
        static_cast<int>(eps_ok.size()), cfg.threads,
        [&](int e) {
            const double eps = eps_ok[e];
            // the sup over K needs sample points that track the kernel-width
            // structure around singular supports; the fixed lattice alone
            // misses it once eps C drops below the lattice spacing
            auto grid = base_grid;
            const double hw = eps * cfg.kernel.support_constant;
            for (const auto& fb : features) {
                Box local(fb.lo.array() - 1.25 * hw, fb.hi.array() + 1.25 * hw);
                for (const auto& p : local.lattice(21))
                    if (cfg.K.contains(p)) grid.push_back(p);
            }
            double sup = 0.0;
            Vec arg = grid.front();
            for (const auto& p : grid) {
                Vec val = word.empty() ? sweep_point_value(u, cfg, j, eps, p)
                                       : lie_word_value(u, cfg, j, eps, p, word, 0);
                const double nv = fiber_norm(cfg.h, p, u.valence(), val);
                if (nv > sup) {
                    sup = nv;
                    arg = p;
                }
            }
            rep.samples[e] = {eps, sup};
            rep.argmax_points[e] = arg;
        });
    estimate_order(rep);
    return rep;
}

namespace {

std::vector<std::vector<int>> words_up_to(int l_max, int n_fields) {
    std::vector<std::vector<int>> out{{}};
    std::vector<std::vector<int>> prev{{}};
    for (int l = 1; l <= l_max; ++l) {
        std::vector<std::vector<int>> next;
        for (const auto& w : prev)
            for (int i = 0; i < n_fields; ++i) {
                auto e = w;
                e.push_back(i);
                next.push_back(e);
            }
        out.insert(out.end(), next.begin(), next.end());
        prev = std::move(next);
    }
    return out;
}

}  // namespace

DynamicsReport is_moderate(const Representative& u, const SweepConfig& cfg_in,
                           const BatteryConfig& battery) {
    SweepConfig cfg = cfg_in;
    if (cfg.kernel.order != 0)  // moderateness tests run at kernel order 0
        cfg.kernel = build_kernel(cfg.kernel.domain, cfg.kernel.profile.base(), 0,
                                  cfg.kernel.support_constant);
    cfg.validate();
    DynamicsReport out;
    out.verdict = Verdict::Pass;
    const int j_cap = std::min<int>(battery.j_max, cfg.B_list.size());
    auto words = words_up_to(battery.l_max, static_cast<int>(cfg.X_list.size()));
    for (int j = 0; j <= j_cap; ++j) {
        for (const auto& w : words) {
            TestRecord rec;
            rec.j = j;
            rec.word = w;
            rec.kernel_order = cfg.kernel.order;
            rec.report = sweep(u, cfg, j, w);
            if (rec.report.identically_zero) {
                rec.N_estimate = 0.0;
            } else {
                // slope_tol buffers fit noise so flat sweeps report N = 0
                rec.N_estimate = std::max(
                    0.0, std::ceil(-rec.report.fitted_slope - battery.slope_tol));
                if (rec.report.superpolynomial ||
                    rec.report.fitted_slope < -battery.N_max)
                    out.verdict = Verdict::Fail;
            }
            out.N_estimate = std::max(out.N_estimate, rec.N_estimate);
            out.tests.push_back(std::move(rec));
        }
    }
    return out;
}

DynamicsReport is_negligible(const Representative& u, const SweepConfig& cfg,
                             const BatteryConfig& battery,
                             const std::function<int(int)>& k_of) {
    cfg.validate();
    DynamicsReport out;
    out.verdict = Verdict::Pass;
    const int j_cap = std::min<int>(battery.j_max, cfg.B_list.size());
    for (int m : battery.m_list) {
        const int k = k_of ? k_of(m) : m;
        SweepConfig c = cfg;
        c.kernel = build_kernel(cfg.kernel.domain, cfg.kernel.profile.base(), k,
                                cfg.kernel.support_constant);
        for (int j = 0; j <= j_cap; ++j) {
            TestRecord rec;
            rec.j = j;
            rec.kernel_order = k;
            rec.target_m = m;
            rec.report = sweep(u, c, j, {});
            if (!rec.report.identically_zero &&
                rec.report.fitted_slope < m - battery.slope_tol)
                out.verdict = Verdict::Fail;
            out.tests.push_back(std::move(rec));
        }
    }
    return out;
}

SaturationReport saturation_check(const RepPtr& u, const std::vector<TensorField>& basis,
                                  const SweepConfig& cfg, const BatteryConfig& battery,
                                  bool negligible_mode) {
    if (basis.empty()) throw Error("saturation_check: empty basis");
    // reject a degenerate basis: fiber values must span the dual fiber on K
    {
        TensorShape dual{u->domain().dim, u->s(), u->r()};
        Mat probe(static_cast<int>(basis.size()), dual.comps());
        Vec c = cfg.K.center();
        for (size_t i = 0; i < basis.size(); ++i) {
            if (basis[i].shape.r != u->s() || basis[i].shape.s != u->r())
                throw Error("saturation_check: basis valence must be dual to u");
            probe.row(i) = basis[i].value(c).transpose();
        }
        Eigen::FullPivLU<Mat> lu(probe);
        if (lu.rank() < dual.comps())
            throw Error("saturation_check: basis degenerate on K");
    }
    SaturationReport rep;
    auto run = [&](const Representative& w) {
        return negligible_mode ? is_negligible(w, cfg, battery)
                               : is_moderate(w, cfg, battery);
    };
    rep.direct = run(*u);
    bool agree = true;
    for (const auto& tt : basis) {
        auto sat = dual_pair(u, tt);
        rep.saturates.push_back(run(*sat));
        if (rep.saturates.back().verdict != rep.direct.verdict) agree = false;
    }
    rep.agree = agree;
    rep.verdict = agree ? Verdict::Pass : Verdict::Fail;
    return rep;
}

ReductionView::ReductionView(RepPtr u, TransportOperator A,
                             std::vector<TransportOperator> Bs)
    : u_(std::move(u)), A_(std::move(A)), Bs_(std::move(Bs)) {
    if (u_->r() != 0 || u_->s() != 0)
        throw Error("ReductionView: representative must be scalar");
}

double ReductionView::operator()(const NForm& omega, const Vec& p) const {
    std::vector<const TransportOperator*> ptrs;
    for (const auto& B : Bs_) ptrs.push_back(&B);
    return u_->d3(omega, p, A_, ptrs)[0];
}

}  // namespace gentensor
