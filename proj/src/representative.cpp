#include "gentensor/representative.hpp"

#include <cmath>

namespace gentensor {

namespace {

double nform_scale(const NForm& w) {
    double s = std::fabs(w.density->value(w.support.center()));
    for (const auto& x : w.support.lattice(3))
        s = std::max(s, std::fabs(w.density->value(x)));
    return std::max(s, 1e-300);
}

// 4th-order central difference along a one-parameter family, one Richardson
// level (error h^4 -> /16)
template <class F>
Vec central4(const F& fam, double h, bool richardson) {
    auto d = [&](double t) -> Vec {
        Vec acc = (-1.0 / 12.0) * fam(2.0 * t) + (8.0 / 12.0) * fam(t) -
                  (8.0 / 12.0) * fam(-t) + (1.0 / 12.0) * fam(-2.0 * t);
        return acc / t;
    };
    if (!richardson) return d(h);
    Vec d1 = d(h);
    Vec d2 = d(0.5 * h);
    return (16.0 * d2 - d1) / 15.0;
}

}  // namespace

Vec Representative::d1(const NForm& omega, const Vec& p, const TransportOperator& A,
                       const NForm& eta) const {
    return fd_d1(omega, p, A, eta);
}

Vec Representative::d3(const NForm& omega, const Vec& p, const TransportOperator& A,
                       const std::vector<const TransportOperator*>& Bs) const {
    return fd_d3(omega, p, A, Bs);
}

Vec Representative::p_partial(const NForm& omega, const Vec& p,
                              const TransportOperator& A, const MultiIndex& a) const {
    return fd_p_partial(omega, p, A, a, 1e-4 * domain_.scale());
}

Vec Representative::fd_d1(const NForm& omega, const Vec& p, const TransportOperator& A,
                          const NForm& eta, const FunctionalDiffConfig& cfg) const {
    const double h = cfg.h_fun * nform_scale(omega) / nform_scale(eta);
    return central4(
        [&](double t) { return eval(add_nform(omega, t, eta), p, A); }, h,
        cfg.richardson);
}

Vec Representative::fd_d3(const NForm& omega, const Vec& p, const TransportOperator& A,
                          const std::vector<const TransportOperator*>& Bs,
                          const FunctionalDiffConfig& cfg) const {
    if (Bs.empty()) return eval(omega, p, A);
    std::vector<const TransportOperator*> rest(Bs.begin(), Bs.end() - 1);
    const TransportOperator& B = *Bs.back();
    const double h =
        cfg.h_fun * std::max(A.sampled_scale(), 1.0) / std::max(B.sampled_scale(), 1e-12);
    return central4(
        [&](double t) {
            TransportOperator At = axpy_transport(A, t, B);
            At.core_region = A.core_region;  // direction vanishes on the diagonal there
            return d3(omega, p, At, rest);
        },
        h, cfg.richardson);
}

Vec Representative::fd_p_partial(const NForm& omega, const Vec& p,
                                 const TransportOperator& A, const MultiIndex& a,
                                 double h) const {
    if (a.is_zero()) return eval(omega, p, A);
    int axis = 0;
    while (a[axis] == 0) ++axis;
    MultiIndex rest = a;
    const int k = std::min(rest[axis], 2);
    rest[axis] -= k;
    Vec acc = Vec::Zero(shape_.comps());
    auto at = [&](double off) {
        Vec ps = p;
        ps[axis] += off;
        return rest.is_zero() ? eval(omega, ps, A) : p_partial(omega, ps, A, rest);
    };
    if (k == 1) {
        acc = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
    } else {
        acc = (-at(2 * h) + 16.0 * at(h) - 30.0 * at(0.0) + 16.0 * at(-h) - at(-2 * h)) /
              (12.0 * h * h);
    }
    return acc;
}

// ---- lie combine helper (shared with the sweep engine) ----

Vec lie_fiber_combine(const TensorField& X, const Vec& p, const TensorShape& sh,
                      const Vec& value, const std::vector<Vec>& partials) {
    const int n = sh.n;
    Vec out = Vec::Zero(sh.comps());
    Vec Xp = X.value(p);
    Mat dX(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            dX(i, j) = X.comps[i]->partial(p, MultiIndex::unit(n, j));
    for (int f = 0; f < sh.comps(); ++f) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += Xp[k] * partials[k][f];
        auto idx = sh.unflatten(f);
        for (int a = 0; a < sh.r; ++a)
            for (int k = 0; k < n; ++k) {
                auto jdx = idx;
                jdx[a] = k;
                acc -= dX(idx[a], k) * value[sh.flatten(jdx)];
            }
        for (int b = 0; b < sh.s; ++b)
            for (int k = 0; k < n; ++k) {
                auto jdx = idx;
                jdx[sh.r + b] = k;
                acc += dX(k, idx[sh.r + b]) * value[sh.flatten(jdx)];
            }
        out[f] = acc;
    }
    return out;
}

Vec fiber_outer_product(const TensorShape& sa, const Vec& va, const TensorShape& sb,
                        const Vec& vb) {
    TensorShape sh{sa.n, sa.r + sb.r, sa.s + sb.s};
    Vec out(sh.comps());
    for (int f = 0; f < sh.comps(); ++f) {
        auto idx = sh.unflatten(f);
        std::vector<int> ia(sa.slots()), ib(sb.slots());
        for (int u = 0; u < sa.r; ++u) ia[u] = idx[u];
        for (int u = 0; u < sb.r; ++u) ib[u] = idx[sa.r + u];
        for (int l = 0; l < sa.s; ++l) ia[sa.r + l] = idx[sh.r + l];
        for (int l = 0; l < sb.s; ++l) ib[sb.r + l] = idx[sh.r + sa.s + l];
        out[f] = va[sa.flatten(ia)] * vb[sb.flatten(ib)];
    }
    return out;
}

TensorField spreading_theta(const TransportOperator& A, const TensorField& tt,
                            const Vec& p) {
    const int n = A.dim();
    const int r = tt.shape.s, s = tt.shape.r;  // tt is an (s,r)-field for (r,s)-valence
    TensorShape fib{n, tt.shape.r, tt.shape.s};
    std::vector<const TransportOperator*> slots(tt.shape.slots(), &A);
    Vec fiber = tt.value(p);
    std::vector<ScalarFn> comps(fib.comps());
    for (int out = 0; out < fib.comps(); ++out) {
        std::vector<std::pair<double, ScalarFn>> terms;
        for (int in = 0; in < fib.comps(); ++in) {
            if (fiber[in] == 0.0) continue;
            terms.emplace_back(fiber[in],
                               freeze_head_fn(asr_component_fn(slots, r, s, out, in), p));
        }
        if (terms.empty()) terms.emplace_back(0.0, constant_fn(n, 0.0));
        comps[out] = sum_fn(std::move(terms), n);
    }
    return TensorField(tt.domain, fib, std::move(comps));
}

namespace {

class SigmaNode final : public Representative {
public:
    explicit SigmaNode(TensorField t)
        : Representative(t.domain, t.shape.r, t.shape.s, "embedded-smooth"),
          t_(std::move(t)) {}

    Vec eval(const NForm&, const Vec& p, const TransportOperator&) const override {
        return t_.value(p);
    }
    Vec d1(const NForm&, const Vec& p, const TransportOperator&,
           const NForm&) const override {
        return Vec::Zero(shape_.comps());
    }
    Vec d3(const NForm&, const Vec& p, const TransportOperator&,
           const std::vector<const TransportOperator*>& Bs) const override {
        return Bs.empty() ? t_.value(p) : Vec::Zero(shape_.comps());
    }
    Vec p_partial(const NForm&, const Vec& p, const TransportOperator&,
                  const MultiIndex& a) const override {
        return t_.partial(p, a);
    }

    const TensorField& field() const { return t_; }

private:
    TensorField t_;
};

class IotaNode final : public Representative {
public:
    explicit IotaNode(DistPtr v)
        : Representative(v->domain(), v->r(), v->s(), "embedded-distribution"),
          v_(std::move(v)),
          one_(TensorField::scalar(domain_, constant_fn(domain_.dim, 1.0))) {}

    Vec eval(const NForm& omega, const Vec& p, const TransportOperator& A) const override {
        std::vector<const TransportOperator*> slots(shape_.slots(), &A);
        return eval_slots(omega, p, slots, MultiIndex(domain_.dim));
    }
    Vec d1(const NForm& omega, const Vec& p, const TransportOperator& A,
           const NForm& eta) const override {
        // the pairing is linear in omega
        return eval(eta, p, A);
    }
    Vec d3(const NForm& omega, const Vec& p, const TransportOperator& A,
           const std::vector<const TransportOperator*>& Bs) const override {
        const int j = static_cast<int>(Bs.size());
        const int d = shape_.slots();
        if (j == 0) return eval(omega, p, A);
        if (j > d) return Vec::Zero(shape_.comps());
        // the fiber map is multilinear of degree d in A: the iterated
        // directional derivative replaces each slot once, over all injective
        // assignments of the directions to slots
        Vec acc = Vec::Zero(shape_.comps());
        std::vector<int> chosen;
        std::vector<bool> used(d, false);
        std::function<void()> rec = [&]() {
            if (static_cast<int>(chosen.size()) == j) {
                std::vector<const TransportOperator*> slots(d, &A);
                for (int t = 0; t < j; ++t) slots[chosen[t]] = Bs[t];
                acc += eval_slots(omega, p, slots, MultiIndex(domain_.dim));
                return;
            }
            for (int sidx = 0; sidx < d; ++sidx) {
                if (used[sidx]) continue;
                used[sidx] = true;
                chosen.push_back(sidx);
                rec();
                chosen.pop_back();
                used[sidx] = false;
            }
        };
        rec();
        return acc;
    }
    Vec p_partial(const NForm& omega, const Vec& p, const TransportOperator& A,
                  const MultiIndex& a) const override {
        std::vector<const TransportOperator*> slots(shape_.slots(), &A);
        return eval_slots(omega, p, slots, a);
    }

    std::vector<Box> kernel_scale_features() const override {
        if (auto b = v_->singular_support()) return {*b};
        return {};
    }

    const DistPtr& distribution() const { return v_; }

private:
    DistPtr v_;
    TensorField one_;

    /// Components via pairing against spread dual-basis fibers, with an
    /// optional partial derivative in the frozen p slot (exact through the
    /// linearity and continuity of v).
    Vec eval_slots(const NForm& omega, const Vec& p,
                   const std::vector<const TransportOperator*>& slots,
                   const MultiIndex& dp) const {
        const int n = domain_.dim;
        Vec out(shape_.comps());
        if (shape_.slots() == 0) {
            if (!v_->support_intersects(omega.support)) {
                out[0] = 0.0;
                return out;
            }
            out[0] = dp.is_zero() ? v_->pair(one_, omega) : 0.0;
            return out;
        }
        TensorShape dual{n, shape_.s, shape_.r};
        const MultiIndex tail0(n);
        for (int f = 0; f < shape_.comps(); ++f) {
            auto idx = shape_.unflatten(f);
            std::vector<int> didx(shape_.slots());
            for (int b = 0; b < shape_.s; ++b) didx[b] = idx[shape_.r + b];
            for (int a = 0; a < shape_.r; ++a) didx[shape_.s + a] = idx[a];
            const int in_flat = dual.flatten(didx);
            std::vector<ScalarFn> comps(dual.comps());
            for (int o = 0; o < dual.comps(); ++o) {
                ScalarFn c = asr_component_fn(slots, shape_.r, shape_.s, o, in_flat);
                if (!dp.is_zero()) c = partial_shift_fn(c, MultiIndex::concat(dp, tail0));
                comps[o] = freeze_head_fn(c, p);
            }
            TensorField spread(domain_, dual, std::move(comps));
            out[f] = v_->pair(spread, omega);
        }
        return out;
    }
};

class SumNode final : public Representative {
public:
    explicit SumNode(std::vector<std::pair<double, RepPtr>> terms)
        : Representative(terms.at(0).second->domain(), terms[0].second->r(),
                         terms[0].second->s(), "composite"),
          terms_(std::move(terms)) {
        for (const auto& [c, u] : terms_)
            if (u->r() != r() || u->s() != s())
                throw Error("linear_combination: valence mismatch");
    }

    Vec eval(const NForm& w, const Vec& p, const TransportOperator& A) const override {
        Vec acc = Vec::Zero(shape_.comps());
        for (const auto& [c, u] : terms_) acc += c * u->eval(w, p, A);
        return acc;
    }
    Vec d1(const NForm& w, const Vec& p, const TransportOperator& A,
           const NForm& eta) const override {
        Vec acc = Vec::Zero(shape_.comps());
        for (const auto& [c, u] : terms_) acc += c * u->d1(w, p, A, eta);
        return acc;
    }
    Vec d3(const NForm& w, const Vec& p, const TransportOperator& A,
           const std::vector<const TransportOperator*>& Bs) const override {
        Vec acc = Vec::Zero(shape_.comps());
        for (const auto& [c, u] : terms_) acc += c * u->d3(w, p, A, Bs);
        return acc;
    }
    Vec p_partial(const NForm& w, const Vec& p, const TransportOperator& A,
                  const MultiIndex& a) const override {
        Vec acc = Vec::Zero(shape_.comps());
        for (const auto& [c, u] : terms_) acc += c * u->p_partial(w, p, A, a);
        return acc;
    }

    std::vector<Box> kernel_scale_features() const override {
        std::vector<Box> out;
        for (const auto& [c, u] : terms_)
            for (const auto& b : u->kernel_scale_features()) out.push_back(b);
        return out;
    }

private:
    std::vector<std::pair<double, RepPtr>> terms_;
};

class TensorProductNode final : public Representative {
public:
    TensorProductNode(RepPtr a, RepPtr b)
        : Representative(a->domain(), a->r() + b->r(), a->s() + b->s(), "composite"),
          a_(std::move(a)),
          b_(std::move(b)) {
        if (a_->domain().dim != b_->domain().dim)
            throw Error("tensor_product: domain mismatch");
    }

    Vec eval(const NForm& w, const Vec& p, const TransportOperator& A) const override {
        return fiber_outer_product(a_->valence(), a_->eval(w, p, A), b_->valence(),
                                   b_->eval(w, p, A));
    }
    Vec d1(const NForm& w, const Vec& p, const TransportOperator& A,
           const NForm& eta) const override {
        return fiber_outer_product(a_->valence(), a_->d1(w, p, A, eta), b_->valence(),
                                   b_->eval(w, p, A)) +
               fiber_outer_product(a_->valence(), a_->eval(w, p, A), b_->valence(),
                                   b_->d1(w, p, A, eta));
    }
    Vec d3(const NForm& w, const Vec& p, const TransportOperator& A,
           const std::vector<const TransportOperator*>& Bs) const override {
        const int j = static_cast<int>(Bs.size());
        Vec acc = Vec::Zero(shape_.comps());
        for (int mask = 0; mask < (1 << j); ++mask) {
            std::vector<const TransportOperator*> left, right;
            for (int t = 0; t < j; ++t)
                (mask >> t & 1 ? left : right).push_back(Bs[t]);
            acc += fiber_outer_product(a_->valence(), a_->d3(w, p, A, left),
                                       b_->valence(), b_->d3(w, p, A, right));
        }
        return acc;
    }
    Vec p_partial(const NForm& w, const Vec& p, const TransportOperator& A,
                  const MultiIndex& al) const override {
        Vec acc = Vec::Zero(shape_.comps());
        detail::for_each_sub_index(al, [&](const MultiIndex& b, double coeff) {
            MultiIndex rest(al.dim());
            for (int i = 0; i < al.dim(); ++i) rest[i] = al[i] - b[i];
            acc += coeff * fiber_outer_product(a_->valence(), a_->p_partial(w, p, A, b),
                                               b_->valence(),
                                               b_->p_partial(w, p, A, rest));
        });
        return acc;
    }

    std::vector<Box> kernel_scale_features() const override {
        auto out = a_->kernel_scale_features();
        for (const auto& b : b_->kernel_scale_features()) out.push_back(b);
        return out;
    }

private:
    RepPtr a_, b_;
};

class ContractNode final : public Representative {
public:
    ContractNode(RepPtr u, int up, int lo)
        : Representative(u->domain(), u->r() - 1, u->s() - 1, "composite"),
          u_(std::move(u)),
          up_(up),
          lo_(lo) {
        if (up < 0 || up >= u_->r() || lo < 0 || lo >= u_->s())
            throw Error("contract: slot out of range");
    }

    Vec eval(const NForm& w, const Vec& p, const TransportOperator& A) const override {
        return trace(u_->eval(w, p, A));
    }
    Vec d1(const NForm& w, const Vec& p, const TransportOperator& A,
           const NForm& eta) const override {
        return trace(u_->d1(w, p, A, eta));
    }
    Vec d3(const NForm& w, const Vec& p, const TransportOperator& A,
           const std::vector<const TransportOperator*>& Bs) const override {
        return trace(u_->d3(w, p, A, Bs));
    }
    Vec p_partial(const NForm& w, const Vec& p, const TransportOperator& A,
                  const MultiIndex& a) const override {
        return trace(u_->p_partial(w, p, A, a));
    }

    std::vector<Box> kernel_scale_features() const override {
        return u_->kernel_scale_features();
    }

private:
    RepPtr u_;
    int up_, lo_;

    Vec trace(const Vec& big) const {
        const auto& bs = u_->valence();
        Vec out = Vec::Zero(shape_.comps());
        for (int f = 0; f < shape_.comps(); ++f) {
            auto idx = shape_.unflatten(f);
            double acc = 0.0;
            for (int k = 0; k < bs.n; ++k) {
                std::vector<int> full(bs.slots());
                int src = 0;
                for (int u = 0; u < bs.r; ++u) full[u] = (u == up_) ? k : idx[src++];
                for (int l = 0; l < bs.s; ++l)
                    full[bs.r + l] = (l == lo_) ? k : idx[src++];
                acc += big[bs.flatten(full)];
            }
            out[f] = acc;
        }
        return out;
    }
};

class DualPairNode final : public Representative {
public:
    DualPairNode(RepPtr u, TensorField tt)
        : Representative(u->domain(), 0, 0, "composite"),
          u_(std::move(u)),
          tt_(std::move(tt)) {
        if (tt_.shape.r != u_->s() || tt_.shape.s != u_->r())
            throw Error("dual_pair: test field valence must be dual");
    }

    Vec eval(const NForm& w, const Vec& p, const TransportOperator& A) const override {
        Vec out(1);
        out[0] = dual_contract(u_->eval(w, p, A), tt_.value(p), u_->valence());
        return out;
    }
    Vec d1(const NForm& w, const Vec& p, const TransportOperator& A,
           const NForm& eta) const override {
        Vec out(1);
        out[0] = dual_contract(u_->d1(w, p, A, eta), tt_.value(p), u_->valence());
        return out;
    }
    Vec d3(const NForm& w, const Vec& p, const TransportOperator& A,
           const std::vector<const TransportOperator*>& Bs) const override {
        Vec out(1);
        out[0] = dual_contract(u_->d3(w, p, A, Bs), tt_.value(p), u_->valence());
        return out;
    }
    Vec p_partial(const NForm& w, const Vec& p, const TransportOperator& A,
                  const MultiIndex& al) const override {
        double acc = 0.0;
        detail::for_each_sub_index(al, [&](const MultiIndex& b, double coeff) {
            MultiIndex rest(al.dim());
            for (int i = 0; i < al.dim(); ++i) rest[i] = al[i] - b[i];
            acc += coeff * dual_contract(u_->p_partial(w, p, A, b),
                                         tt_.partial(p, rest), u_->valence());
        });
        Vec out(1);
        out[0] = acc;
        return out;
    }

    std::vector<Box> kernel_scale_features() const override {
        return u_->kernel_scale_features();
    }

private:
    RepPtr u_;
    TensorField tt_;
};

class PullbackNode final : public Representative {
public:
    PullbackNode(Diffeomorphism mu, RepPtr u)
        : Representative(u->domain(), u->r(), u->s(), "composite"),
          mu_(std::move(mu)),
          inv_(mu_.inverse_map()),
          u_(std::move(u)) {}

    Vec eval(const NForm& w, const Vec& p, const TransportOperator& A) const override {
        return fiber_map(p) * u_->eval(mu_.pushforward_nform(w), mu_.apply(p), push(A));
    }
    Vec d1(const NForm& w, const Vec& p, const TransportOperator& A,
           const NForm& eta) const override {
        return fiber_map(p) * u_->d1(mu_.pushforward_nform(w), mu_.apply(p), push(A),
                                     mu_.pushforward_nform(eta));
    }
    Vec d3(const NForm& w, const Vec& p, const TransportOperator& A,
           const std::vector<const TransportOperator*>& Bs) const override {
        std::vector<TransportOperator> pushed;
        pushed.reserve(Bs.size());
        for (const auto* B : Bs) pushed.push_back(push(*B));
        std::vector<const TransportOperator*> ptrs;
        for (const auto& B : pushed) ptrs.push_back(&B);
        return fiber_map(p) * u_->d3(mu_.pushforward_nform(w), mu_.apply(p), push(A), ptrs);
    }

    std::vector<Box> kernel_scale_features() const override {
        std::vector<Box> out;
        for (const auto& b : u_->kernel_scale_features())
            out.push_back(map_box([&](const Vec& x) { return mu_.apply_inverse(x); },
                                  b.inflated(1e-9)));
        return out;
    }

private:
    Diffeomorphism mu_;
    Diffeomorphism inv_;
    RepPtr u_;

    TransportOperator push(const TransportOperator& A) const {
        // (mu,mu)_* A = (mu^-1, mu^-1)^* A
        return pullback_transport(inv_, inv_, A, true);
    }
    Mat fiber_map(const Vec& p) const {
        Mat J = mu_.jacobian(p);
        Mat Jinv = J.inverse();
        Mat M = Mat::Ones(1, 1);
        for (int a = 0; a < shape_.r; ++a) M = kron(M, Jinv);
        for (int b = 0; b < shape_.s; ++b) M = kron(M, J.transpose());
        return M;
    }
};

class HatLieNode final : public Representative {
public:
    HatLieNode(TensorField X, RepPtr u, LieTerm term, TransportLieConfig cfg)
        : Representative(u->domain(), u->r(), u->s(), "composite"),
          X_(std::move(X)),
          u_(std::move(u)),
          term_(term),
          cfg_(cfg) {}

    Vec eval(const NForm& w, const Vec& p, const TransportOperator& A) const override {
        Vec acc = Vec::Zero(shape_.comps());
        if (term_ == LieTerm::Full || term_ == LieTerm::Base) acc += base_term(w, p, A);
        if (term_ == LieTerm::Full || term_ == LieTerm::OmegaSlot)
            acc -= u_->d1(w, p, A, lie_derivative_nform(X_, w));
        if (term_ == LieTerm::Full || term_ == LieTerm::SlotA) {
            TransportOperator LA = lie_derivative_transport(X_, X_, A, cfg_);
            acc -= u_->d3(w, p, A, {&LA});
        }
        return acc;
    }

    std::vector<Box> kernel_scale_features() const override {
        return u_->kernel_scale_features();
    }

private:
    TensorField X_;
    RepPtr u_;
    LieTerm term_;
    TransportLieConfig cfg_;

    Vec base_term(const NForm& w, const Vec& p, const TransportOperator& A) const {
        const int n = domain_.dim;
        std::vector<Vec> partials(n);
        for (int k = 0; k < n; ++k)
            partials[k] = u_->p_partial(w, p, A, MultiIndex::unit(n, k));
        return lie_fiber_combine(X_, p, shape_, u_->eval(w, p, A), partials);
    }
};

class RestrictNode final : public Representative {
public:
    RestrictNode(RepPtr u, const Box& sub)
        : Representative(ChartDomain(u->domain().dim, sub), u->r(), u->s(),
                         u->provenance()),
          u_(std::move(u)) {}

    Vec eval(const NForm& w, const Vec& p, const TransportOperator& A) const override {
        return u_->eval(w, p, A);
    }
    Vec d1(const NForm& w, const Vec& p, const TransportOperator& A,
           const NForm& eta) const override {
        return u_->d1(w, p, A, eta);
    }
    Vec d3(const NForm& w, const Vec& p, const TransportOperator& A,
           const std::vector<const TransportOperator*>& Bs) const override {
        return u_->d3(w, p, A, Bs);
    }
    Vec p_partial(const NForm& w, const Vec& p, const TransportOperator& A,
                  const MultiIndex& a) const override {
        return u_->p_partial(w, p, A, a);
    }

    std::vector<Box> kernel_scale_features() const override {
        return u_->kernel_scale_features();
    }

private:
    RepPtr u_;
};

}  // namespace

RepPtr restrict_representative(const RepPtr& u, const Box& sub) {
    return std::make_shared<RestrictNode>(u, sub);
}

RepPtr embed_smooth(const TensorField& t) { return std::make_shared<SigmaNode>(t); }
RepPtr embed_distribution(const DistPtr& v) { return std::make_shared<IotaNode>(v); }
RepPtr tensor_product(const RepPtr& a, const RepPtr& b) {
    return std::make_shared<TensorProductNode>(a, b);
}
RepPtr contract(const RepPtr& u, int upper_slot, int lower_slot) {
    return std::make_shared<ContractNode>(u, upper_slot, lower_slot);
}
RepPtr linear_combination(std::vector<std::pair<double, RepPtr>> terms) {
    if (terms.empty()) throw Error("linear_combination: empty term list");
    return std::make_shared<SumNode>(std::move(terms));
}
RepPtr dual_pair(const RepPtr& u, const TensorField& tt) {
    return std::make_shared<DualPairNode>(u, tt);
}
RepPtr hat_pullback(const Diffeomorphism& mu, const RepPtr& u) {
    return std::make_shared<PullbackNode>(mu, u);
}
RepPtr hat_lie(const TensorField& X, const RepPtr& u, LieTerm term,
               const TransportLieConfig& cfg) {
    return std::make_shared<HatLieNode>(X, u, term, cfg);
}

}  // namespace gentensor
