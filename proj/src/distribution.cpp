#include "gentensor/distribution.hpp"

#include <algorithm>
#include <cmath>

namespace gentensor {

void TensorDistribution::check_args(const TensorField& tt, const NForm& omega) const {
    if (tt.shape.r != shape_.s || tt.shape.s != shape_.r)
        throw Error("pair: test field valence must be dual to the distribution");
    if (!domain_.contains(omega.support))
        throw Error("pair: omega support not inside the domain");
}

namespace {

class AdjointLieDistribution final : public TensorDistribution {
public:
    AdjointLieDistribution(TensorField X, DistPtr v)
        : TensorDistribution(v->domain(), v->r(), v->s()),
          X_(std::move(X)),
          v_(std::move(v)) {}

    double pair(const TensorField& tt, const NForm& omega) const override {
        check_args(tt, omega);
        return -v_->pair(lie_derivative_tensor(X_, tt), omega) -
               v_->pair(tt, lie_derivative_nform(X_, omega));
    }
    bool support_intersects(const Box& b) const override {
        return v_->support_intersects(b);
    }

private:
    TensorField X_;
    DistPtr v_;
};

class RegularDistribution final : public TensorDistribution {
public:
    RegularDistribution(TensorField t, QuadratureSpec spec)
        : TensorDistribution(t.domain, t.shape.r, t.shape.s),
          t_(std::move(t)),
          spec_(spec) {}

    double pair(const TensorField& tt, const NForm& omega) const override {
        check_args(tt, omega);
        const auto& t = t_;
        AdaptiveSpec ad;
        ad.order = std::max(spec_.order, 12);
        ad.rel_tol = 1e-12;
        ad.abs_tol = 1e-14;
        return integrate_box_adaptive(
            [&](const Vec& q) {
                const double w = omega.density->value(q);
                if (w == 0.0) return 0.0;
                return dual_contract(t.value(q), tt.value(q), t.shape) * w;
            },
            omega.support, ad);
    }

    const TensorField& field() const { return t_; }

private:
    TensorField t_;
    QuadratureSpec spec_;
};

class DeltaDistribution final : public TensorDistribution {
public:
    DeltaDistribution(const ChartDomain& dom, Vec point, MultiIndex alpha)
        : TensorDistribution(dom, 0, 0), x0_(std::move(point)), alpha_(alpha) {
        if (alpha_.dim() != dom.dim) throw Error("delta: multi-index dim mismatch");
        if (!dom.contains(x0_)) throw Error("delta: point outside the domain");
    }

    double pair(const TensorField& tt, const NForm& omega) const override {
        check_args(tt, omega);
        if (!omega.support.contains(x0_)) return 0.0;
        ScalarFn g = product_fn(tt.comps[0], omega.density);
        const double sign = alpha_.total() % 2 == 0 ? 1.0 : -1.0;
        return sign * g->partial(x0_, alpha_);
    }
    bool support_intersects(const Box& b) const override { return b.contains(x0_); }
    std::optional<Box> singular_support() const override { return Box(x0_, x0_); }

    const Vec& point() const { return x0_; }
    const MultiIndex& derivative() const { return alpha_; }

private:
    Vec x0_;
    MultiIndex alpha_;
};

class HeavisideDistribution final : public TensorDistribution {
public:
    HeavisideDistribution(const ChartDomain& dom, int axis, double offset,
                          QuadratureSpec spec)
        : TensorDistribution(dom, 0, 0), axis_(axis), offset_(offset), spec_(spec) {
        if (dom.dim != 1) throw Error("heaviside: only 1-D charts supported");
    }

    double pair(const TensorField& tt, const NForm& omega) const override {
        check_args(tt, omega);
        const double lo = std::max(omega.support.lo[axis_], offset_);
        const double hi = omega.support.hi[axis_];
        if (hi <= lo) return 0.0;
        AdaptiveSpec ad;
        ad.order = std::max(spec_.order, 12);
        ad.rel_tol = 1e-12;
        ad.abs_tol = 1e-14;
        Vec l(1), h(1);
        l << lo;
        h << hi;
        return integrate_box_adaptive(
            [&](const Vec& q) {
                return tt.comps[0]->value(q) * omega.density->value(q);
            },
            Box(l, h), ad);
    }
    bool support_intersects(const Box& b) const override { return b.hi[axis_] > offset_; }
    std::optional<Box> singular_support() const override {
        Vec c(1);
        c << offset_;
        return Box(c, c);
    }

    int axis() const { return axis_; }
    double offset() const { return offset_; }

private:
    int axis_;
    double offset_;
    QuadratureSpec spec_;
};

class PrincipalValueDistribution final : public TensorDistribution {
public:
    PrincipalValueDistribution(const ChartDomain& dom, double tol)
        : TensorDistribution(dom, 0, 0), tol_(tol) {
        if (dom.dim != 1) throw Error("principal_value: only 1-D charts supported");
    }

    double pair(const TensorField& tt, const NForm& omega) const override {
        check_args(tt, omega);
        auto phi = [&](double x) {
            Vec q(1);
            q << x;
            return tt.comps[0]->value(q) * omega.density->value(q);
        };
        const double lo = omega.support.lo[0], hi = omega.support.hi[0];
        if (lo >= 0.0 || hi <= 0.0) {
            // pole outside: a regular integral
            return integrate_interval([&](double x) { return phi(x) / x; }, lo, hi,
                                      {12, 8});
        }
        auto res = principal_value(phi, 0.0, lo, hi, 0.25, tol_);
        if (!res.converged)
            throw Error("principal_value: excision quadrature did not converge");
        return res.value;
    }
    std::optional<Box> singular_support() const override {
        return Box(Vec::Zero(1), Vec::Zero(1));
    }

private:
    double tol_;
};

class LinearCombinationDistribution final : public TensorDistribution {
public:
    explicit LinearCombinationDistribution(std::vector<std::pair<double, DistPtr>> terms)
        : TensorDistribution(terms.at(0).second->domain(), terms[0].second->r(),
                             terms[0].second->s()),
          terms_(std::move(terms)) {
        for (const auto& [c, v] : terms_)
            if (v->r() != r() || v->s() != s())
                throw Error("linear_combination: valence mismatch");
    }

    double pair(const TensorField& tt, const NForm& omega) const override {
        double acc = 0.0;
        for (const auto& [c, v] : terms_) acc += c * v->pair(tt, omega);
        return acc;
    }
    bool support_intersects(const Box& b) const override {
        for (const auto& [c, v] : terms_)
            if (v->support_intersects(b)) return true;
        return false;
    }
    std::optional<Box> singular_support() const override {
        std::optional<Box> acc;
        for (const auto& [c, v] : terms_)
            if (auto s = v->singular_support()) acc = acc ? acc->hull(*s) : *s;
        return acc;
    }

private:
    std::vector<std::pair<double, DistPtr>> terms_;
};

class SmoothCoeffProductDistribution final : public TensorDistribution {
public:
    SmoothCoeffProductDistribution(TensorField f, DistPtr inner, int r, int s)
        : TensorDistribution(inner->domain(), r, s), f_(std::move(f)), v_(std::move(inner)) {}

    double pair(const TensorField& tt, const NForm& omega) const override {
        check_args(tt, omega);
        if (f_.is_scalar()) {
            // valence of inner; multiply the test field by f
            return v_->pair(scalar_multiply_field(f_.comps[0], tt), omega);
        }
        // inner scalar: contract f against tt into a scalar test field
        return v_->pair(dual_contract_field(f_, tt), omega);
    }
    bool support_intersects(const Box& b) const override {
        return v_->support_intersects(b);
    }
    std::optional<Box> singular_support() const override {
        return v_->singular_support();
    }

private:
    TensorField f_;
    DistPtr v_;
};

class PullbackDistribution final : public TensorDistribution {
public:
    PullbackDistribution(Diffeomorphism mu, DistPtr inner)
        : TensorDistribution(inner->domain(), inner->r(), inner->s()),
          mu_(std::move(mu)),
          inv_(mu_.inverse_map()),
          v_(std::move(inner)) {}

    double pair(const TensorField& tt, const NForm& omega) const override {
        check_args(tt, omega);
        // <mu^* v, tt (x) omega> = <v, mu_* tt (x) mu_* omega>
        return v_->pair(inv_.pullback_tensor(tt), mu_.pushforward_nform(omega));
    }

private:
    Diffeomorphism mu_;
    Diffeomorphism inv_;
    DistPtr v_;
};

}  // namespace

DistPtr regular_distribution(const TensorField& t, QuadratureSpec spec) {
    return std::make_shared<RegularDistribution>(t, spec);
}

DistPtr delta_distribution(const ChartDomain& dom, const Vec& point,
                           const MultiIndex& alpha) {
    return std::make_shared<DeltaDistribution>(dom, point, alpha);
}

DistPtr heaviside_distribution(const ChartDomain& dom, int axis, double offset,
                               QuadratureSpec spec) {
    return std::make_shared<HeavisideDistribution>(dom, axis, offset, spec);
}

DistPtr principal_value_distribution(const ChartDomain& dom, double pv_tol) {
    return std::make_shared<PrincipalValueDistribution>(dom, pv_tol);
}

DistPtr linear_combination(std::vector<std::pair<double, DistPtr>> terms) {
    if (terms.empty()) throw Error("linear_combination: empty term list");
    return std::make_shared<LinearCombinationDistribution>(std::move(terms));
}

DistPtr smooth_coeff_product(const TensorField& f, DistPtr inner) {
    int r, s;
    if (f.is_scalar()) {
        r = inner->r();
        s = inner->s();
    } else if (inner->r() == 0 && inner->s() == 0) {
        r = f.shape.r;
        s = f.shape.s;
    } else {
        throw Error("smooth_coeff_product: either f or inner must be scalar");
    }
    return std::make_shared<SmoothCoeffProductDistribution>(f, std::move(inner), r, s);
}

DistPtr pullback_distribution(const Diffeomorphism& mu, DistPtr inner) {
    return std::make_shared<PullbackDistribution>(mu, std::move(inner));
}

DistPtr lie_derivative_distribution(const TensorField& X, const DistPtr& v) {
    // exact closed forms for translations of point/half-line kinds
    bool constant_X = true;
    int axis = -1;
    const int n = X.domain.dim;
    Vec probe = X.domain.bounds ? X.domain.bounds->center() : Vec::Zero(n);
    Vec xv = X.vec(probe);
    for (int i = 0; i < n; ++i) {
        // require components exactly constant: check a derivative sample
        for (int k = 0; k < n; ++k)
            if (std::fabs(X.comps[i]->partial(probe, MultiIndex::unit(n, k))) > 0.0)
                constant_X = false;
    }
    int nonzero = 0;
    for (int i = 0; i < n; ++i)
        if (xv[i] != 0.0) {
            ++nonzero;
            axis = i;
        }
    if (constant_X && nonzero == 1 && xv[axis] == 1.0) {
        if (auto d = std::dynamic_pointer_cast<const DeltaDistribution>(v))
            return delta_distribution(v->domain(), d->point(),
                                      d->derivative().plus(axis));
        if (auto h = std::dynamic_pointer_cast<const HeavisideDistribution>(v)) {
            if (h->axis() == axis) {
                Vec pt(1);
                pt << h->offset();
                return delta_distribution(v->domain(), pt);
            }
        }
    }
    return std::make_shared<AdjointLieDistribution>(X, v);
}

}  // namespace gentensor
