#include <doctest.h>

#include <cmath>

#include "gentensor/kernel.hpp"

using namespace gentensor;

namespace {

ChartDomain line() { return ChartDomain(1, Box::cube(1, -6.0, 6.0)); }
Vec pt(double x) {
    Vec p(1);
    p << x;
    return p;
}

}  // namespace

TEST_CASE("profiles normalize to unit integral") {
    for (auto prof : {MollifierProfile::bump(), MollifierProfile::cos2()})
        CHECK(prof->moment(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(MollifierProfile::bump()->value(0.999999) == 0.0);
}

TEST_CASE("symmetric profile needs no correction for m = 1") {
    auto k = build_kernel(line(), MollifierProfile::bump(), 1, 1.0);
    // P_1 == 1: coefficients (1, 0)
    CHECK(k.profile.poly_coeffs()[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(k.profile.poly_coeffs()[1]) <= 1e-12);

    auto k0 = build_kernel(line(), MollifierProfile::bump(), 0, 1.0);
    CHECK(k0.profile.poly_coeffs().size() == 1);
    CHECK(k0.profile.poly_coeffs()[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("moment correction kills the prescribed moments") {
    auto k3 = build_kernel(line(), MollifierProfile::bump(), 3, 1.0);
    for (int j = 1; j <= 3; ++j)
        CHECK(std::fabs(k3.profile.moment(j)) <= 1e-8);
    CHECK(k3.profile.moment(0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("kernel evaluation: support, normalization, center scaling") {
    auto dom = line();
    auto k = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    NForm w = k.at(1.0, pt(0.0));
    CHECK(w.support.lo[0] == doctest::Approx(-1.0));
    CHECK(w.support.hi[0] == doctest::Approx(1.0));

    for (double eps : {1.0, 0.1, 0.01}) {
        const double mass = k.pair_integral(eps, pt(0.2), [](const Vec&) { return 1.0; });
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }

    // density at the center scales as eps^-n rho_m(0) / C^n
    const double C = 1.7;
    auto kc = build_kernel(dom, MollifierProfile::bump(), 0, C);
    for (double eps : {0.5, 0.05})
        CHECK(kc.density(eps, pt(0.0), pt(0.0)) ==
              doctest::Approx(kc.profile.value(0.0) / (eps * C)).epsilon(1e-12));

    CHECK_THROWS_AS(k.at(0.0, pt(0.0)), Error);
    CHECK_THROWS_AS(k.at(1.0, pt(5.5)), Error);  // support escapes the domain
}

TEST_CASE("translation covariance is exact") {
    // dyadic offsets keep the scaled argument bit-identical
    auto k = build_kernel(line(), MollifierProfile::bump(), 2, 1.0);
    for (double q : {-0.25, 0.125, 0.375})
        CHECK(k.density(0.5, pt(0.5), pt(0.5 + q)) ==
              k.density(0.5, pt(0.0), pt(q)));
}

TEST_CASE("moment order verification") {
    auto dom = line();
    Box K = Box::cube(1, -1.0, 1.0);
    auto eps = geometric_eps_grid(3, 11);

    // f == 1: the defect is identically zero by normalization
    auto k1 = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto one = TensorField::from_exprs(dom, 0, 0, {"1"});
    auto r1 = verify_moment_order(k1, one, K, eps);
    double max_sup = 0.0;
    for (const auto& smp : r1.samples) max_sup = std::max(max_sup, smp.sup_value);
    CHECK(max_sup <= 1e-8);
    CHECK(r1.verdict == Verdict::Pass);

    // f = x^2 with a symmetric order-1 kernel: defect = eps^2 C^2 m2(rho),
    // slope exactly 2
    auto fx2 = TensorField::from_exprs(dom, 0, 0, {"x1^2"});
    auto r2 = verify_moment_order(k1, fx2, K, eps);
    CHECK(!r2.identically_zero);
    CHECK(r2.fitted_slope == doctest::Approx(2.0).epsilon(0.025));
    CHECK(r2.verdict == Verdict::Pass);
    // the analytic defect constant: sup_p |f - smoothed| = C^2 int s^2 rho
    const double m2 = k1.profile.moment(2);
    const double eps0 = r2.samples.back().eps;
    CHECK(r2.samples.back().sup_value ==
          doctest::Approx(eps0 * eps0 * m2).epsilon(1e-4));

    // f = x with a symmetric order-0 kernel: the odd moment vanishes, the
    // report flags superconvergence via the identically-zero path
    auto k0 = build_kernel(dom, MollifierProfile::bump(), 0, 1.0);
    auto fx = TensorField::from_exprs(dom, 0, 0, {"x1"});
    auto r3 = verify_moment_order(k0, fx, K, eps);
    CHECK(r3.identically_zero);
    CHECK(r3.verdict == Verdict::Pass);
}

TEST_CASE("moment idempotence for polynomials up to the order") {
    auto dom = line();
    Box K = Box::cube(1, -1.0, 1.0);
    auto eps = geometric_eps_grid(3, 11);
    auto k2 = build_kernel(dom, MollifierProfile::bump(), 2, 1.0);
    for (const char* expr : {"1", "x1", "x1^2", "1 + 3*x1 - 2*x1^2"}) {
        auto f = TensorField::from_exprs(dom, 0, 0, {expr});
        auto r = verify_moment_order(k2, f, K, eps);
        const bool ok = r.identically_zero || r.fitted_slope >= 3.0 - 0.05;
        CHECK(ok);
    }
}

TEST_CASE("derivative scaling law of the kernel density") {
    // sup_q |d^beta Phi(eps,p)(q)| = O(eps^{-n-|beta|}), slope within 0.1
    auto dom = line();
    auto k = build_kernel(dom, MollifierProfile::bump(), 0, 1.0);
    for (int beta = 0; beta <= 2; ++beta) {
        std::vector<OrderSample> samples;
        for (double eps : geometric_eps_grid(3, 11)) {
            double sup = 0.0;
            for (int i = -40; i <= 40; ++i) {
                const double s = i / 40.0;
                Vec q = pt(0.0 + s * eps);
                sup = std::max(sup, std::fabs(k.at(eps, pt(0.0)).density->partial(
                                       q, MultiIndex::unit(1, 0, beta))));
            }
            samples.push_back({eps, sup});
        }
        auto rep = estimate_order(samples);
        CHECK(rep.fitted_slope == doctest::Approx(-1.0 - beta).epsilon(0.1));
    }
}

TEST_CASE("build_kernel validates its inputs") {
    CHECK_THROWS_AS(build_kernel(line(), MollifierProfile::bump(), 9, 1.0), Error);
    CHECK_THROWS_AS(build_kernel(line(), MollifierProfile::bump(), 1, -1.0), Error);
}

TEST_CASE("cos2 profile is usable and flagged by smoothness class") {
    auto prof = MollifierProfile::cos2();
    CHECK(prof->smoothness_class() != "C-infinity");
    auto k = build_kernel(line(), prof, 1, 1.0);
    const double mass = k.pair_integral(0.25, pt(0.1), [](const Vec&) { return 1.0; });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
}
