#pragma once

#include <memory>
#include <string>

#include "gentensor/distribution.hpp"
#include "gentensor/kernel.hpp"
#include "gentensor/transport.hpp"

namespace gentensor {

class Representative;
using RepPtr = std::shared_ptr<const Representative>;

struct FunctionalDiffConfig {
    double h_fun = 1e-3;   // step relative to the direction's natural scale
    bool richardson = true;
};

/// Element of the basic space: an evaluator on (omega, p, A) valued in the
/// (r,s)-fiber at p, with directional derivatives in the n-form slot (d1) and
/// the transport slot (d3), and partial derivatives of the frozen map
/// p -> u(omega, p, A).
///
/// Embedded nodes override the derivative hooks with exact paths (linearity
/// in omega, product rule over the transport factors); composite nodes fall
/// back to high-order finite differences in the functional slots.
class Representative {
public:
    Representative(ChartDomain dom, int r, int s, std::string provenance)
        : domain_(std::move(dom)),
          shape_{domain_.dim, r, s},
          provenance_(std::move(provenance)) {}
    virtual ~Representative() = default;

    const ChartDomain& domain() const { return domain_; }
    const TensorShape& valence() const { return shape_; }
    int r() const { return shape_.r; }
    int s() const { return shape_.s; }
    const std::string& provenance() const { return provenance_; }

    virtual Vec eval(const NForm& omega, const Vec& p, const TransportOperator& A) const = 0;

    /// d1 u(omega,p,A)(eta): derivative in the n-form slot.
    virtual Vec d1(const NForm& omega, const Vec& p, const TransportOperator& A,
                   const NForm& eta) const;
    /// d3^j u(omega,p,A)(B_1,...,B_j): iterated derivative in the transport
    /// slot. j = Bs.size(); j = 0 returns eval.
    virtual Vec d3(const NForm& omega, const Vec& p, const TransportOperator& A,
                   const std::vector<const TransportOperator*>& Bs) const;
    /// Partial derivative of the frozen map p -> u(omega,p,A).
    virtual Vec p_partial(const NForm& omega, const Vec& p, const TransportOperator& A,
                          const MultiIndex& a) const;

    /// Regions where evaluation along the kernel net develops kernel-width
    /// features in p (singular supports of embedded distributions); outer
    /// quadratures force refinement there.
    virtual std::vector<Box> kernel_scale_features() const { return {}; }

protected:
    Vec fd_d1(const NForm& omega, const Vec& p, const TransportOperator& A,
              const NForm& eta, const FunctionalDiffConfig& cfg = {}) const;
    Vec fd_d3(const NForm& omega, const Vec& p, const TransportOperator& A,
              const std::vector<const TransportOperator*>& Bs,
              const FunctionalDiffConfig& cfg = {}) const;
    Vec fd_p_partial(const NForm& omega, const Vec& p, const TransportOperator& A,
                     const MultiIndex& a, double h) const;

    ChartDomain domain_;
    TensorShape shape_;
    std::string provenance_;
};

/// sigma: smooth fields enter pointwise; d1 = d3 = 0 exactly.
RepPtr embed_smooth(const TensorField& t);
/// iota: distributions enter through the spreading pairing
///   (u(omega,p,A), e) = <v, A^s_r(p,.) e (x) omega>.
RepPtr embed_distribution(const DistPtr& v);
RepPtr tensor_product(const RepPtr& a, const RepPtr& b);
RepPtr contract(const RepPtr& u, int upper_slot, int lower_slot);
RepPtr linear_combination(std::vector<std::pair<double, RepPtr>> terms);
/// Full dual contraction with a smooth (s,r)-field (the scalar saturate
/// u . tt).
RepPtr dual_pair(const RepPtr& u, const TensorField& tt);
/// mu-hat pullback: (mu^ u)(omega,p,A) = mu^*( u(mu_* omega, (mu,mu)_* A) )(p).
RepPtr hat_pullback(const Diffeomorphism& mu, const RepPtr& u);

enum class LieTerm {
    Full,       // all three contributions
    Base,       // L_X of the frozen p-field           (hat L_{0,X,0})
    OmegaSlot,  // -d1 u (L_X omega)                   (hat L_{X,0,0})
    SlotA,      // -d3 u (L_{X,X} A)                   (hat L_{0,0,X})
};

/// Lie derivative on the basic space.
RepPtr hat_lie(const TensorField& X, const RepPtr& u, LieTerm term = LieTerm::Full,
               const TransportLieConfig& lie_cfg = {});

/// Restriction to an open sub-box (Remark-style domain narrowing; evaluators
/// unchanged).
RepPtr restrict_representative(const RepPtr& u, const Box& sub);

/// The spreading q -> A^s_r(p,q) tt(p): a compactly supported (s,r)-field.
TensorField spreading_theta(const TransportOperator& A, const TensorField& tt,
                            const Vec& p);

/// Coordinate Lie-derivative assembly from a fiber value and its partials
/// (shared by the basic-space Lie derivative and the sweep engine).
Vec lie_fiber_combine(const TensorField& X, const Vec& p, const TensorShape& sh,
                      const Vec& value, const std::vector<Vec>& partials);

/// Outer product of fiber tensors matching the slot layout of
/// tensor_product (uppers of a, uppers of b, lowers of a, lowers of b).
Vec fiber_outer_product(const TensorShape& sa, const Vec& va, const TensorShape& sb,
                        const Vec& vb);

}  // namespace gentensor
