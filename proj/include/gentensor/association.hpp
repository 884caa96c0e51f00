#pragma once

#include "gentensor/representative.hpp"
#include "gentensor/sweep.hpp"

namespace gentensor {

/// Test battery for weak-limit checks: pairs (omega, tt) against which
/// I(eps) = int u(Phi(eps,p),p,A) . tt(p) omega(p) dp is driven to its limit.
struct AssociationProbe {
    std::vector<NForm> omega_list;
    TransportOperator A;
    std::vector<TensorField> t_tilde_list;  // (s,r)-fields
    SmoothingKernel kernel;                 // order m of the definition
    std::vector<double> eps_grid = geometric_eps_grid();
    QuadratureSpec quadrature{12, 6};
    double assoc_tol = 1e-5;
    int tail_points = 3;
    int threads = 1;

    void validate() const;
};

struct ProbeRate {
    int omega_index = 0;
    int t_tilde_index = 0;
    double target = 0.0;
    OrderReport report;  // |I(eps) - target| per eps
    double tail_max = 0.0;
    Verdict verdict = Verdict::Indeterminate;
};

struct AssociationReport {
    Verdict verdict = Verdict::Indeterminate;
    std::vector<ProbeRate> rates;
};

/// I(eps) for one probe pair.
double association_integral(const Representative& u, const AssociationProbe& probe,
                            const NForm& omega, const TensorField& tt, double eps);

/// u associated with 0: every probe limit vanishes (tail below assoc_tol and
/// a non-negative fitted rate, or identically zero).
AssociationReport associated_zero(const Representative& u, const AssociationProbe& probe);

/// Weak convergence to a distributional shadow: I(eps) -> <v, tt (x) omega>.
AssociationReport shadow_matches(const Representative& u, const TensorDistribution& v,
                                 const AssociationProbe& probe);

struct C0Config {
    std::vector<Box> K_boxes;
    int p_per_axis = 25;
    int lie_word_depth = 0;   // the C^k variant adds Lie words up to length k
    double tail_tol = 1e-3;   // sup-convergence is only as fast as the modulus
                              // of continuity, so the tail bound is looser
};

/// C^0 (and C^k) association with a continuous field: locally uniform
/// convergence of u(Phi(eps,p),p,A) tt(p) - t(p).tt(p) on each K.
AssociationReport c0_associated(const Representative& u, const TensorField& t,
                                const AssociationProbe& probe, const C0Config& c0);

}  // namespace gentensor
