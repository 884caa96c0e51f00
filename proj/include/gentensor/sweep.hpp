#pragma once

#include "gentensor/order_fit.hpp"
#include "gentensor/representative.hpp"

namespace gentensor {

/// One asymptotic test configuration: the compact set, the transport operator
/// (with K inside its core), admissible d3 directions, Lie-word fields, the
/// kernel net, the eps/p grids and the fiber-norm metric.
struct SweepConfig {
    Box K;
    TransportOperator A;
    std::vector<TransportOperator> B_list;  // diagonal-vanishing on core(A)
    std::vector<TensorField> X_list;
    SmoothingKernel kernel;
    std::vector<double> eps_grid = geometric_eps_grid();
    int p_per_axis = 31;
    RiemannianMetric h;
    int threads = 1;
    double lie_fd_rel = 0.02;  // FD step for Lie words, relative to eps*C

    void validate() const;
};

/// sup_p || L_{X_w1} ... L_{X_wl} d3^j u(Phi_eps_p, p, A)(B_1..B_j) ||_h per
/// eps, with the kernel net moving with p. Head eps whose kernel support
/// escapes the domain are dropped and flagged.
OrderReport sweep(const Representative& u, const SweepConfig& cfg, int j,
                  const std::vector<int>& word = {});

struct BatteryConfig {
    int j_max = 2;
    int l_max = 2;
    double N_max = 20.0;
    double slope_tol = 0.25;
    std::vector<int> m_list = {1, 2, 3};
};

struct TestRecord {
    int j = 0;
    std::vector<int> word;
    int kernel_order = 0;
    int target_m = -1;  // negligibility target, -1 for moderateness tests
    OrderReport report;
    double N_estimate = 0.0;
};

struct DynamicsReport {
    Verdict verdict = Verdict::Indeterminate;
    std::vector<TestRecord> tests;
    double N_estimate = 0.0;  // max over tests (moderateness)
};

/// Battery-relative moderateness: every sweep over j <= j_max, all Lie words
/// up to length l_max, kernel order 0, must have a finite slope bounded below
/// by -N_max with no super-polynomial divergence flag.
DynamicsReport is_moderate(const Representative& u, const SweepConfig& cfg,
                           const BatteryConfig& battery = {});

/// Battery-relative negligibility (derivative-free form): for each target m,
/// kernels of order k_of(m) (default k = m), j <= j_max, l = 0; slopes must
/// reach m - slope_tol (or vanish identically). Moderateness is a recorded
/// prerequisite.
DynamicsReport is_negligible(const Representative& u, const SweepConfig& cfg,
                             const BatteryConfig& battery = {},
                             const std::function<int(int)>& k_of = {});

struct SaturationReport {
    Verdict verdict = Verdict::Indeterminate;
    DynamicsReport direct;
    std::vector<DynamicsReport> saturates;
    bool agree = false;
};

/// Scalar-reduction coherence: the verdict of u must agree with the verdicts
/// of all its scalar saturates u . (chi tt_i) over a fiber-spanning basis.
SaturationReport saturation_check(const RepPtr& u, const std::vector<TensorField>& basis,
                                  const SweepConfig& cfg, const BatteryConfig& battery,
                                  bool negligible_mode = false);

/// Two-slot view (omega,p) -> d3^j u(omega,p,A)(B_1..B_j) with the transport
/// data frozen; the scalar-theory reduction of a (0,0) representative.
class ReductionView {
public:
    ReductionView(RepPtr u, TransportOperator A, std::vector<TransportOperator> Bs);
    double operator()(const NForm& omega, const Vec& p) const;
    int j() const { return static_cast<int>(Bs_.size()); }

private:
    RepPtr u_;
    TransportOperator A_;
    std::vector<TransportOperator> Bs_;
};

/// Evaluate u along the kernel net: p -> d3^j u(Phi(eps,p), p, A)(Bs), the map
/// whose Lie derivatives the sweeps measure.
Vec sweep_point_value(const Representative& u, const SweepConfig& cfg, int j,
                      double eps, const Vec& p);

}  // namespace gentensor
