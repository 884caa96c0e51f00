#pragma once

#include <optional>

#include "gentensor/fields.hpp"
#include "gentensor/geometry.hpp"

namespace gentensor {

/// Compactly supported smooth field of linear maps T_pM -> T_qM over a single
/// chart. Entries are stored in chart components dy^i(A d_xj) as scalar
/// functions of the 2n variables (p,q).
struct TransportOperator {
    ChartDomain domain;
    Box support;                       // box in domain x domain (2n-dim)
    std::optional<Box> core_region;    // n-dim box where A(p,p) = id
    std::optional<Box> kernel_region;  // n-dim box where A(p,p) = 0
    std::vector<ScalarFn> entries;     // n*n over 2n vars, row-major

    int dim() const { return domain.dim; }
    const ScalarFn& entry(int i, int j) const { return entries[i * dim() + j]; }

    Mat matrix(const Vec& p, const Vec& q) const;
    /// Entry field of the flipped adjoint A(q,p)^T viewed over (p,q).
    ScalarFn flipped_adjoint_entry(int i, int j) const;

    /// Max |A| entry sampled over the support (scale for FD steps).
    double sampled_scale(int lattice = 4) const;
};

/// Zero operator with empty support.
TransportOperator zero_transport(const ChartDomain& dom);

/// chi(p) * chi(q) * Id with plateau cutoffs: identity on plateau^2, support
/// inside supp^2. core = plateau box.
TransportOperator identity_cutoff_transport(const ChartDomain& dom, const Box& plateau,
                                            double transition_width);

/// A + c * B entrywise; metadata conservative (no core claimed).
TransportOperator axpy_transport(const TransportOperator& A, double c,
                                 const TransportOperator& B);

/// Induced fiber map A^s_r(p,q): (T^s_r)_p -> (T^s_r)_q, i.e. s copies of
/// A(p,q) on contravariant slots tensored with r copies of A(q,p)^T on
/// covariant slots. Matrix size n^{s+r}.
Mat induced_map_asr(const TransportOperator& A, const Vec& p, const Vec& q, int r,
                    int s);

/// Component (out,in) of the induced fiber map, as a scalar function of
/// (p,q), with one operator per slot (slots 0..s-1 contravariant, then r
/// covariant). Used both for A^s_r itself and for its product-rule
/// derivatives with slots replaced by direction operators.
ScalarFn asr_component_fn(const std::vector<const TransportOperator*>& slot_ops, int r,
                          int s, int out_flat, int in_flat);

/// True iff K sits inside core_region with positive margin and a sampled
/// check confirms ||A(p,p) - id|| <= 1e-12 on a grid over K.
bool core_contains(const TransportOperator& A, const Box& K, int grid = 7,
                   double tol = 1e-12);
/// Sampled check that A(p,p) vanishes on a grid over U.
bool kernel_covers(const TransportOperator& A, const Box& U, int grid = 7,
                   double tol = 1e-12);

/// ((mu,nu)^* A)(p,q) = Dnu(q)^-1 A(mu p, nu q) Dmu(p). Core metadata is
/// recomputed only when mu and nu are the same map.
TransportOperator pullback_transport(const Diffeomorphism& mu, const Diffeomorphism& nu,
                                     const TransportOperator& A,
                                     bool same_map = false);

struct TransportLieConfig {
    double tau = 1e-3;    // flow-pullback differencing step
    bool richardson = true;
    OdeConfig ode{};
};

/// L_{X,Y} A by central differencing of the pair-of-flows pullback, with one
/// Richardson level. L_X A (both slots along X) is the X == Y case; it
/// vanishes on the diagonal over core(A), recorded in kernel_region.
TransportOperator lie_derivative_transport(const TensorField& X, const TensorField& Y,
                                           const TransportOperator& A,
                                           const TransportLieConfig& cfg = {});

/// A(p,q) = chi(p,q) * (parallel transport p -> q for g). chi must be 1 on a
/// neighborhood of the diagonal over K (checked by sampling); core is the
/// supplied plateau box.
TransportOperator build_geodesic_transport(const RiemannianMetric& g, ScalarFn chi,
                                           const Box& support2n, const Box& core,
                                           const Box& K, int ode_steps = 48);

/// Finite sum of generic two-point tensors f(p,q) eta(p) (x) xi(q).
struct TwoPointTensor {
    struct Term {
        ScalarFn f;        // over 2n
        TensorField eta;   // one-form (0,1)
        TensorField xi;    // vector field (1,0)
    };
    ChartDomain domain;
    Box support;  // 2n
    std::vector<Term> terms;
};

/// The bullet isomorphism: matrix(p,q) = sum f(p,q) xi(q) eta(p)^T.
TransportOperator two_point_to_transport(const TwoPointTensor& ups);
TwoPointTensor pullback_two_point(const Diffeomorphism& mu, const Diffeomorphism& nu,
                                  const TwoPointTensor& ups);
/// Exact Lie derivative of a two-point tensor via the displayed four-term sum.
TwoPointTensor lie_derivative_two_point(const TensorField& X, const TensorField& Y,
                                        const TwoPointTensor& ups);

}  // namespace gentensor
