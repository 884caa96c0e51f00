#include <doctest.h>

#include <cmath>

#include "gentensor/sweep.hpp"

using namespace gentensor;

namespace {

ChartDomain line() { return ChartDomain(1, Box::cube(1, -6.0, 6.0)); }
Vec pt(double x) {
    Vec p(1);
    p << x;
    return p;
}

SweepConfig base_config(const ChartDomain& dom, int kernel_order = 0) {
    SweepConfig cfg;
    cfg.K = Box::cube(1, -1.0, 1.0);
    cfg.A = identity_cutoff_transport(dom, Box::cube(1, -2.0, 2.0), 0.5);
    cfg.kernel = build_kernel(dom, MollifierProfile::bump(), kernel_order, 1.0);
    cfg.h = RiemannianMetric::euclidean(dom);
    cfg.X_list.push_back(TensorField::from_exprs(dom, 1, 0, {"1"}));
    cfg.X_list.push_back(TensorField::from_exprs(dom, 1, 0, {"x1"}));
    cfg.B_list.push_back(
        lie_derivative_transport(cfg.X_list[0], cfg.X_list[0], cfg.A));
    cfg.B_list.push_back(
        lie_derivative_transport(cfg.X_list[1], cfg.X_list[1], cfg.A));
    cfg.eps_grid = geometric_eps_grid(3, 11);
    cfg.p_per_axis = 31;
    return cfg;
}

// synthetic evaluator that grows faster than any power of 1/eps: reads the
// width of the kernel support it is fed
class SuperPolynomialNode final : public Representative {
public:
    explicit SuperPolynomialNode(const ChartDomain& dom)
        : Representative(dom, 0, 0, "synthetic") {}
    Vec eval(const NForm& omega, const Vec&, const TransportOperator&) const override {
        Vec out(1);
        out[0] = std::exp(0.5 / omega.support.max_width());
        return out;
    }
};

}  // namespace

TEST_CASE("sweep of the constant representative") {
    auto dom = line();
    auto cfg = base_config(dom);
    auto u = embed_smooth(TensorField::from_exprs(dom, 0, 0, {"1"}));
    auto rep = sweep(*u, cfg, 0, {});
    for (const auto& s : rep.samples) CHECK(s.sup_value == doctest::Approx(1.0));
    CHECK(std::fabs(rep.fitted_slope) <= 1e-10);
}

TEST_CASE("sweep of embedded delta scales like 1/eps") {
    auto dom = line();
    auto cfg = base_config(dom);
    auto u = embed_distribution(delta_distribution(dom, pt(0.0)));
    auto rep = sweep(*u, cfg, 0, {});
    CHECK(rep.fitted_slope == doctest::Approx(-1.0).epsilon(0.02));
    // the closed form of the sup: profile max over the grid is at p = 0
    const double eps0 = rep.samples.back().eps;
    CHECK(rep.samples.back().sup_value ==
          doctest::Approx(cfg.kernel.profile.value(0.0) / eps0).epsilon(1e-10));
}

TEST_CASE("sweep of the embedding difference of a smooth field") {
    auto dom = line();
    auto cfg = base_config(dom, 1);
    auto t = TensorField::from_exprs(dom, 0, 0, {"x1^2"});
    auto u = linear_combination(
        {{1.0, embed_distribution(rho_embed(t))}, {-1.0, embed_smooth(t)}});
    auto rep = sweep(*u, cfg, 0, {});
    CHECK(rep.fitted_slope == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("head truncation when the kernel escapes the domain") {
    ChartDomain dom(1, Box::cube(1, -1.3, 1.3));
    SweepConfig cfg;
    cfg.K = Box::cube(1, -1.0, 1.0);
    cfg.A = identity_cutoff_transport(dom, Box::cube(1, -1.1, 1.1), 0.15);
    cfg.kernel = build_kernel(dom, MollifierProfile::bump(), 0, 1.0);
    cfg.h = RiemannianMetric::euclidean(dom);
    cfg.eps_grid = geometric_eps_grid(1, 9);  // head eps = 1/2 escapes
    auto u = embed_smooth(TensorField::from_exprs(dom, 0, 0, {"x1"}));
    auto rep = sweep(*u, cfg, 0, {});
    CHECK(rep.eps_truncated);
    CHECK(rep.samples.front().eps < 0.5);
}

TEST_CASE("moderateness of the zoo") {
    auto dom = line();
    auto cfg = base_config(dom);
    BatteryConfig battery;
    battery.l_max = 1;  // words of length 2 run in the acceptance suite

    // third delta derivative: moderate with N about 4 on the plain sweep
    MultiIndex a3(1);
    a3[0] = 3;
    auto d3rep = is_moderate(*embed_distribution(delta_distribution(dom, pt(0.0), a3)),
                             cfg, battery);
    CHECK(d3rep.verdict == Verdict::Pass);
    for (const auto& t : d3rep.tests)
        if (t.j == 0 && t.word.empty())
            CHECK(t.N_estimate == doctest::Approx(4.0).epsilon(0.3));

    // smooth embeddings are moderate with N = 0
    auto srep = is_moderate(
        *embed_smooth(TensorField::from_exprs(dom, 0, 0, {"sin(x1)"})), cfg, battery);
    CHECK(srep.verdict == Verdict::Pass);
    CHECK(srep.N_estimate == doctest::Approx(0.0));

    // the super-polynomial synthetic fails
    auto bad = is_moderate(SuperPolynomialNode(dom), cfg, battery);
    CHECK(bad.verdict == Verdict::Fail);
}

TEST_CASE("negligibility verdicts") {
    auto dom = line();
    auto cfg = base_config(dom);
    BatteryConfig battery;

    // (iota - sigma) of a smooth field is negligible; slopes reach m+1
    auto t = TensorField::from_exprs(dom, 0, 0, {"sin(x1)"});
    auto diff = linear_combination(
        {{1.0, embed_distribution(rho_embed(t))}, {-1.0, embed_smooth(t)}});
    auto neg = is_negligible(*diff, cfg, battery);
    CHECK(neg.verdict == Verdict::Pass);
    for (const auto& rec : neg.tests)
        if (rec.j == 0 && !rec.report.identically_zero)
            CHECK(rec.report.fitted_slope >= rec.target_m + 1 - 0.25);

    // embedded delta is not negligible
    auto dneg = is_negligible(*embed_distribution(delta_distribution(dom, pt(0.0))),
                              cfg, battery);
    CHECK(dneg.verdict == Verdict::Fail);

    // the zero representative is negligible identically
    auto zneg = is_negligible(*embed_smooth(TensorField::zero(dom, 0, 0)), cfg, battery);
    CHECK(zneg.verdict == Verdict::Pass);
    CHECK(zneg.tests.front().report.identically_zero);
}

TEST_CASE("no nonzero zoo member embeds negligibly") {
    auto dom = line();
    auto cfg = base_config(dom);
    BatteryConfig battery;
    battery.m_list = {1};
    std::vector<DistPtr> zoo = {
        delta_distribution(dom, pt(0.0)),
        delta_distribution(dom, pt(0.0), MultiIndex::unit(1, 0)),
        heaviside_distribution(dom),
        principal_value_distribution(dom),
        rho_embed(TensorField::from_exprs(dom, 0, 0, {"1 + x1^2"})),
    };
    for (const auto& v : zoo) {
        auto rep = is_negligible(*embed_distribution(v), cfg, battery);
        CHECK(rep.verdict == Verdict::Fail);
    }
}

TEST_CASE("lie words in the sweep battery") {
    auto dom = line();
    auto cfg = base_config(dom);
    // L_{d_x} applied to the frozen net of iota(delta): slope worsens by one
    auto u = embed_distribution(delta_distribution(dom, pt(0.0)));
    auto rep = sweep(*u, cfg, 0, {0});
    CHECK(rep.fitted_slope == doctest::Approx(-2.0).epsilon(0.05));
}

TEST_CASE("saturation coherence") {
    auto dom = line();
    auto cfg = base_config(dom);
    BatteryConfig battery;
    battery.l_max = 1;
    battery.m_list = {1};

    ScalarFn chi = axis_plateau_fn(1, 0, 0.0, 1.5, 0.5);
    std::vector<TensorField> basis{
        scalar_multiply_field(chi, TensorField::from_exprs(dom, 0, 1, {"1"}))};

    // iota(delta' (x) d_x): moderate, and the scalar saturates agree
    auto u = embed_distribution(smooth_coeff_product(
        TensorField::from_exprs(dom, 1, 0, {"1"}),
        delta_distribution(dom, pt(0.0), MultiIndex::unit(1, 0))));
    auto rep = saturation_check(u, basis, cfg, battery, false);
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(std::fabs(rep.direct.N_estimate - rep.saturates[0].N_estimate) <= 0.5);

    // sigma of a smooth vector field: both moderate with N = 0
    auto s = embed_smooth(TensorField::from_exprs(dom, 1, 0, {"cos(x1)"}));
    auto srep = saturation_check(s, basis, cfg, battery, false);
    CHECK(srep.verdict == Verdict::Pass);
    CHECK(srep.direct.N_estimate == 0.0);

    // embedding difference of a smooth vector field: negligible on both routes
    auto t = TensorField::from_exprs(dom, 1, 0, {"x1 * cos(x1)"});
    auto diff = linear_combination(
        {{1.0, embed_distribution(rho_embed(t))}, {-1.0, embed_smooth(t)}});
    auto nrep = saturation_check(diff, basis, cfg, battery, true);
    CHECK(nrep.verdict == Verdict::Pass);
    CHECK(nrep.direct.verdict == Verdict::Pass);

    // degenerate basis is rejected
    std::vector<TensorField> degenerate{TensorField::zero(dom, 0, 1)};
    CHECK_THROWS_AS(saturation_check(u, degenerate, cfg, battery, false), Error);
}

TEST_CASE("reduction to the two-slot view") {
    auto dom = line();
    auto cfg = base_config(dom);

    // j = 0 on a smooth scalar: the constant-in-omega map
    auto f = embed_smooth(TensorField::from_exprs(dom, 0, 0, {"x1^2"}));
    ReductionView view0(f, cfg.A, {});
    NForm w = cfg.kernel.at(0.1, pt(0.3));
    CHECK(view0(w, pt(0.3)) == doctest::Approx(0.09).epsilon(1e-12));

    // j = 1 on a smooth scalar: the zero map
    ReductionView view1(f, cfg.A, {cfg.B_list[0]});
    CHECK(view1(w, pt(0.3)) == 0.0);

    // j = 1 on a contracted embedded vector: product-rule path vs functional
    // finite differences
    auto uvec = embed_distribution(smooth_coeff_product(
        TensorField::from_exprs(dom, 1, 0, {"1"}), delta_distribution(dom, pt(0.0))));
    auto u = dual_pair(uvec, TensorField::from_exprs(dom, 0, 1, {"1"}));
    ReductionView view(u, cfg.A, {cfg.B_list[0]});
    NForm w0 = cfg.kernel.at(0.1, pt(0.02));
    const double exact = view(w0, pt(0.02));
    const TransportOperator* Bp = &cfg.B_list[0];
    const double fd = u->Representative::d3(w0, pt(0.02), cfg.A, {Bp})[0];
    CHECK(exact == doctest::Approx(fd).epsilon(1e-7));

    CHECK_THROWS_AS(ReductionView(uvec, cfg.A, {}), Error);
}

TEST_CASE("localization: sub-domain sweeps agree value for value") {
    auto dom = line();
    auto cfg = base_config(dom);
    auto u = embed_distribution(delta_distribution(dom, pt(0.0)));
    auto rep_full = sweep(*u, cfg, 0, {});

    auto restricted = restrict_representative(u, Box::cube(1, -3.0, 3.0));
    auto rep_sub = sweep(*restricted, cfg, 0, {});
    REQUIRE(rep_full.samples.size() == rep_sub.samples.size());
    for (size_t i = 0; i < rep_full.samples.size(); ++i)
        CHECK(std::fabs(rep_full.samples[i].sup_value - rep_sub.samples[i].sup_value) <=
              1e-10 * (1 + rep_full.samples[i].sup_value));
}

TEST_CASE("verdict slopes are invariant under metric rescaling") {
    auto dom = line();
    auto cfg = base_config(dom);
    auto u = embed_distribution(delta_distribution(dom, pt(0.0), MultiIndex::unit(1, 0)));
    auto r1 = sweep(*u, cfg, 0, {});
    SweepConfig cfg3 = cfg;
    cfg3.h = RiemannianMetric::from_exprs(dom, {"3"});
    auto r3 = sweep(*u, cfg3, 0, {});
    CHECK(std::fabs(r1.fitted_slope - r3.fitted_slope) <= 1e-9);
}

TEST_CASE("stability of moderateness under the basic-space lie derivative") {
    auto dom = line();
    auto cfg = base_config(dom);
    BatteryConfig battery;
    battery.l_max = 0;  // slopes under extra words are logged, not asserted
    auto X = TensorField::from_exprs(dom, 1, 0, {"x1"});
    auto u = embed_distribution(delta_distribution(dom, pt(0.0)));
    auto before = is_moderate(*u, cfg, battery);
    auto after = is_moderate(*hat_lie(X, u), cfg, battery);
    CHECK(before.verdict == Verdict::Pass);
    CHECK(after.verdict == Verdict::Pass);
    // one derivative costs at most one power of eps on this battery
    CHECK(after.N_estimate <= before.N_estimate + 1 + 0.5);
}

TEST_CASE("sweep config validation") {
    auto dom = line();
    auto cfg = base_config(dom);
    SweepConfig bad = cfg;
    bad.eps_grid = {0.1, 0.1, 0.05, 0.02};
    CHECK_THROWS_AS(bad.validate(), Error);

    SweepConfig badK = cfg;
    badK.K = Box::cube(1, -3.0, 3.0);  // escapes core(A)
    CHECK_THROWS_AS(badK.validate(), Error);

    SweepConfig badB = cfg;
    badB.B_list[0] = identity_cutoff_transport(dom, Box::cube(1, -2.0, 2.0), 0.5);
    CHECK_THROWS_AS(badB.validate(), Error);
}
