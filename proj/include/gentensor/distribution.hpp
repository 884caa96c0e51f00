#pragma once

#include <memory>

#include "gentensor/fields.hpp"
#include "gentensor/quadrature.hpp"

namespace gentensor {

class TensorDistribution;
using DistPtr = std::shared_ptr<const TensorDistribution>;

/// Element of the dual of (s,r)-fields tensored with compactly supported
/// n-forms: pair(tt, omega) realizes <v, tt (x) omega>.
class TensorDistribution {
public:
    TensorDistribution(ChartDomain dom, int r, int s)
        : domain_(std::move(dom)), shape_{domain_.dim, r, s} {}
    virtual ~TensorDistribution() = default;

    const ChartDomain& domain() const { return domain_; }
    const TensorShape& valence() const { return shape_; }
    int r() const { return shape_.r; }
    int s() const { return shape_.s; }

    /// tt must be an (s,r)-field; omega compactly supported in the domain.
    virtual double pair(const TensorField& tt, const NForm& omega) const = 0;

    /// False when supp omega provably misses the support of the distribution
    /// (exact short-circuit for point/half-line kinds).
    virtual bool support_intersects(const Box& omega_support) const { return true; }

    /// Where evaluation along shrinking kernels concentrates (the singular
    /// support): a degenerate box for point/hyperplane kinds, nullopt when the
    /// kind is smooth. Drives forced refinement in outer quadratures.
    virtual std::optional<Box> singular_support() const { return std::nullopt; }

protected:
    void check_args(const TensorField& tt, const NForm& omega) const;

    ChartDomain domain_;
    TensorShape shape_;
};

// --- the finite zoo ---

DistPtr regular_distribution(const TensorField& t, QuadratureSpec spec = {16, 8});
/// Natural embedding of a smooth field (pairing by the displayed integral).
inline DistPtr rho_embed(const TensorField& t, QuadratureSpec spec = {16, 8}) {
    return regular_distribution(t, spec);
}
/// Scalar delta derivative at a point: pair = (-1)^|alpha| d^alpha(tt rho)(x0).
DistPtr delta_distribution(const ChartDomain& dom, const Vec& point,
                           const MultiIndex& alpha);
inline DistPtr delta_distribution(const ChartDomain& dom, const Vec& point) {
    return delta_distribution(dom, point, MultiIndex(dom.dim));
}
/// Scalar Heaviside on a 1-D chart: half-line quadrature from offset.
DistPtr heaviside_distribution(const ChartDomain& dom, int axis = 0, double offset = 0.0,
                               QuadratureSpec spec = {16, 8});
/// vp(1/x) on a 1-D chart (pole at 0); symmetric-excision quadrature with
/// Richardson extrapolation, error when non-convergent.
DistPtr principal_value_distribution(const ChartDomain& dom, double pv_tol = 1e-9);
DistPtr linear_combination(std::vector<std::pair<double, DistPtr>> terms);
/// f (r,s)-field with scalar inner, or scalar field f with any inner:
/// pair(tt,omega) = pair(inner, f . tt, omega).
DistPtr smooth_coeff_product(const TensorField& f, DistPtr inner);
/// mu^* v: pairing through push-forwards of both arguments.
DistPtr pullback_distribution(const Diffeomorphism& mu, DistPtr inner);

/// Distributional Lie derivative (adjoint form, with exact fast paths for
/// delta/heaviside along constant coordinate fields).
DistPtr lie_derivative_distribution(const TensorField& X, const DistPtr& v);

}  // namespace gentensor
