#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gentensor/chart.hpp"
#include "gentensor/scalar_field.hpp"

namespace gentensor {

/// Smooth (r,s)-tensor field on a chart domain, stored componentwise.
/// Derivative access goes through each component's partial() contract.
struct TensorField {
    ChartDomain domain;
    TensorShape shape;
    std::vector<ScalarFn> comps;  // size shape.comps()
    int deriv_order = 8;

    TensorField() = default;
    TensorField(ChartDomain dom, TensorShape sh, std::vector<ScalarFn> c,
                int dorder = 8)
        : domain(std::move(dom)), shape(sh), comps(std::move(c)), deriv_order(dorder) {
        if (static_cast<int>(comps.size()) != shape.comps())
            throw Error("TensorField: component count mismatch");
    }

    static TensorField zero(const ChartDomain& dom, int r, int s);
    static TensorField constant(const ChartDomain& dom, int r, int s, const Vec& fiber);
    static TensorField from_exprs(const ChartDomain& dom, int r, int s,
                                  const std::vector<std::string>& exprs);
    /// scalar helper
    static TensorField scalar(const ChartDomain& dom, ScalarFn f);

    bool is_scalar() const { return shape.slots() == 0; }
    bool is_vector() const { return shape.r == 1 && shape.s == 0; }

    Vec value(const Vec& p) const {
        Vec out(shape.comps());
        for (int k = 0; k < shape.comps(); ++k) out[k] = comps[k]->value(p);
        return out;
    }
    Vec partial(const Vec& p, const MultiIndex& a) const {
        Vec out(shape.comps());
        for (int k = 0; k < shape.comps(); ++k) out[k] = comps[k]->partial(p, a);
        return out;
    }
    /// For vector fields: value as an n-vector.
    Vec vec(const Vec& p) const {
        if (!is_vector()) throw Error("TensorField::vec: not a vector field");
        return value(p);
    }
};

/// Classical Lie derivative by the coordinate formula
///   (L_X t)^I_J = X^k d_k t^I_J - sum_a d_k X^{i_a} t^{..k..}_J
///                 + sum_b d_{j_b} X^k t^I_{..k..}
TensorField lie_derivative_tensor(const TensorField& X, const TensorField& t);

TensorField tensor_product_field(const TensorField& a, const TensorField& b);
TensorField contract_field(const TensorField& t, int upper_slot, int lower_slot);
TensorField scale_field(double c, const TensorField& t);
TensorField add_fields(const TensorField& a, const TensorField& b);
/// Multiply every component by a scalar field.
TensorField scalar_multiply_field(const ScalarFn& f, const TensorField& t);
/// Full contraction of an (r,s)-field with an (s,r)-field into a scalar field.
TensorField dual_contract_field(const TensorField& t, const TensorField& tt);

/// Compactly supported n-form, stored as its density w.r.t. dx^1...dx^n.
struct NForm {
    ChartDomain domain;
    Box support;
    ScalarFn density;
    std::optional<double> integral_hint;

    NForm() = default;
    NForm(ChartDomain dom, Box supp, ScalarFn dens,
          std::optional<double> hint = std::nullopt)
        : domain(std::move(dom)),
          support(std::move(supp)),
          density(std::move(dens)),
          integral_hint(hint) {
        if (!domain.contains(support))
            throw Error("NForm: support is not contained in the domain");
    }
};

/// L_X omega in a chart: density d_i(X^i rho), support unchanged.
NForm lie_derivative_nform(const TensorField& X, const NForm& omega);
/// omega + c * eta (support hull).
NForm add_nform(const NForm& omega, double c, const NForm& eta);

/// Normalized bump n-form centered at c with per-axis halfwidths w.
NForm bump_nform(const ChartDomain& dom, const Vec& center, const Vec& halfwidth);

/// Riemannian metric on the chart; entries symmetric positive definite.
struct RiemannianMetric {
    ChartDomain domain;
    std::vector<ScalarFn> entries;  // n*n, row-major
    double injectivity_radius = 1e100;  // user-configured proxy

    static RiemannianMetric euclidean(const ChartDomain& dom);
    static RiemannianMetric from_exprs(const ChartDomain& dom,
                                       const std::vector<std::string>& exprs);

    Mat matrix(const Vec& p) const;
    Mat matrix_partial(const Vec& p, int axis) const;
    /// Throws if symmetry or positive definiteness fails at p.
    void validate_at(const Vec& p, double sym_tol = 1e-10) const;
};

/// Norm induced on (r,s)-fibers by a metric h at p.
double fiber_norm(const RiemannianMetric& h, const Vec& p, const TensorShape& sh,
                  const Vec& components);

struct Diffeomorphism {
    ChartDomain domain;
    std::vector<ScalarFn> forward;            // n components
    std::vector<ScalarFn> inverse;            // may be empty: Newton fallback
    double tol_diffeo = 1e-9;

    Vec apply(const Vec& p) const;
    Vec apply_inverse(const Vec& q) const;
    Mat jacobian(const Vec& p) const;
    /// Jacobian of the inverse map at q (= Dmu(mu^-1 q)^-1 when no explicit
    /// inverse expressions are given).
    Mat inverse_jacobian(const Vec& q) const;

    static Diffeomorphism identity(const ChartDomain& dom);
    static Diffeomorphism from_exprs(const ChartDomain& dom,
                                     const std::vector<std::string>& fwd,
                                     const std::vector<std::string>& inv = {});
    Diffeomorphism inverse_map() const;

    /// Pullback mu^* t of an (r,s)-field: upper slots get Dmu^-1, lower Dmu^T.
    TensorField pullback_tensor(const TensorField& t) const;
    /// Push-forward of an n-form (density picks up |det D(mu^-1)|).
    NForm pushforward_nform(const NForm& omega) const;
    /// Pullback of a scalar function given as a combinator field.
    ScalarFn pullback_scalar(const ScalarFn& f) const;
};

/// Bounding box of the image of `box` under a componentwise map, found by
/// sampling a lattice and padding slightly.
Box map_box(const std::function<Vec(const Vec&)>& fn, const Box& box, int samples = 9,
            double pad_rel = 0.02);

}  // namespace gentensor
