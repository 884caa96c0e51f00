#include <doctest.h>

#include <cmath>
#include <random>

#include "gentensor/transport.hpp"

using namespace gentensor;

namespace {

ChartDomain line() { return ChartDomain(1, Box::cube(1, -6.0, 6.0)); }
Vec pt(double x) {
    Vec p(1);
    p << x;
    return p;
}

TransportOperator expr_transport_1d(const ChartDomain& dom, const std::string& entry,
                                    const Box& supp1) {
    TransportOperator A;
    A.domain = dom;
    A.support = supp1.product(supp1);
    A.entries.push_back(expr_fn(Expression::parse(entry, {"x1", "y1"})));
    return A;
}

}  // namespace

TEST_CASE("induced fiber maps") {
    auto dom = line();
    auto A = identity_cutoff_transport(dom, Box::cube(1, -2.0, 2.0), 0.5);

    // scalar case: the empty tensor product is the 1x1 identity
    Mat m00 = induced_map_asr(A, pt(0.3), pt(0.5), 0, 0);
    CHECK(m00.rows() == 1);
    CHECK(m00(0, 0) == doctest::Approx(1.0));

    // identity near the diagonal
    Mat m10 = induced_map_asr(A, pt(0.3), pt(0.5), 0, 1);  // s=1, r=0
    CHECK(m10(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    // constant factor 2: the (1,1) fiber map scales by 2*2
    auto A2 = expr_transport_1d(dom, "2", Box::cube(1, -3.0, 3.0));
    Mat m11 = induced_map_asr(A2, pt(0.1), pt(0.4), 1, 1);
    CHECK(m11.rows() == 1);
    CHECK(m11(0, 0) == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("fiber-map multiplicativity under operator composition") {
    // with constant entries the induced map is multiplicative slotwise
    auto dom = line();
    auto A2 = expr_transport_1d(dom, "2", Box::cube(1, -3.0, 3.0));
    auto A3 = expr_transport_1d(dom, "3", Box::cube(1, -3.0, 3.0));
    Vec p = pt(0.0), q = pt(0.5);
    for (int r = 0; r <= 1; ++r)
        for (int s = 0; s <= 1; ++s) {
            Mat lhs = induced_map_asr(A2, p, q, r, s) * induced_map_asr(A3, p, q, r, s);
            auto A6 = expr_transport_1d(dom, "6", Box::cube(1, -3.0, 3.0));
            Mat rhs = induced_map_asr(A6, p, q, r, s);
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
        }

    ChartDomain dom2(2, Box::cube(2, -3.0, 3.0));
    auto B = identity_cutoff_transport(dom2, Box::cube(2, -1.0, 1.0), 0.5);
    Vec p2(2), q2(2);
    p2 << 0.2, -0.1;
    q2 << 0.4, 0.3;
    Mat one = induced_map_asr(B, p2, q2, 1, 1);
    CHECK((one - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("core membership") {
    auto dom = line();
    Box K = Box::cube(1, -1.0, 1.0);
    auto A = identity_cutoff_transport(dom, Box::cube(1, -2.0, 2.0), 0.5);
    CHECK(core_contains(A, K));

    auto Z = zero_transport(dom);
    CHECK(!core_contains(Z, K));

    // L_X A vanishes on the diagonal over core(A): kernel membership holds,
    // core membership does not
    auto X = TensorField::from_exprs(dom, 1, 0, {"1"});
    auto LA = lie_derivative_transport(X, X, A);
    CHECK(!core_contains(LA, K));
    CHECK(LA.kernel_region.has_value());
    CHECK(kernel_covers(LA, K, 7, 1e-9));
}

TEST_CASE("pullback of transport operators") {
    auto dom = line();
    auto A = identity_cutoff_transport(dom, Box::cube(1, -2.0, 2.0), 0.5);
    auto id = Diffeomorphism::identity(dom);
    auto Aid = pullback_transport(id, id, A, true);
    for (double x : {-1.5, 0.0, 0.7})
        CHECK(Aid.matrix(pt(x), pt(x + 0.1))(0, 0) ==
              doctest::Approx(A.matrix(pt(x), pt(x + 0.1))(0, 0)).epsilon(1e-12));

    // n=1, mu(x) = nu(x) = 2x: jacobian factors cancel, values move
    auto mu2 = Diffeomorphism::from_exprs(dom, {"2*x1"}, {"x1/2"});
    auto Aa = expr_transport_1d(dom, "sin(x1) + y1^2", Box::cube(1, -3.0, 3.0));
    auto Ap = pullback_transport(mu2, mu2, Aa, true);
    for (double x : {-0.4, 0.2})
        CHECK(Ap.matrix(pt(x), pt(x + 0.3))(0, 0) ==
              doctest::Approx(std::sin(2 * x) + (2 * x + 0.6) * (2 * x + 0.6))
                  .epsilon(1e-10));
}

TEST_CASE("pullback functoriality") {
    auto dom = line();
    auto mu1 = Diffeomorphism::from_exprs(dom, {"x1 + 0.2 * x1^3"});
    auto nu1 = Diffeomorphism::from_exprs(dom, {"x1 + 0.1 * sin(x1)"});
    auto mu2 = Diffeomorphism::from_exprs(dom, {"1.5 * x1"}, {"x1 / 1.5"});
    auto nu2 = Diffeomorphism::from_exprs(dom, {"x1 + 0.1"}, {"x1 - 0.1"});
    auto A = expr_transport_1d(dom, "exp(0 - x1^2 - y1^2)", Box::cube(1, -3.0, 3.0));

    // ((mu1,nu1)^* ((mu2,nu2)^* A)) = ((mu2 o mu1, nu2 o nu1)^* A)
    auto lhs = pullback_transport(mu1, nu1, pullback_transport(mu2, nu2, A));
    auto comp_mu = Diffeomorphism::from_exprs(dom, {"1.5 * (x1 + 0.2 * x1^3)"});
    auto comp_nu = Diffeomorphism::from_exprs(dom, {"x1 + 0.1 * sin(x1) + 0.1"});
    auto rhs = pullback_transport(comp_mu, comp_nu, A);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    for (int i = 0; i < 50; ++i) {
        Vec p = pt(U(rng)), q = pt(U(rng));
        CHECK(lhs.matrix(p, q)(0, 0) ==
              doctest::Approx(rhs.matrix(p, q)(0, 0)).epsilon(1e-9));
    }
}

TEST_CASE("lie derivative of transport operators") {
    auto dom = line();
    auto zero = TensorField::zero(dom, 1, 0);
    auto A = expr_transport_1d(dom, "exp(0 - x1^2 - y1^2)", Box::cube(1, -3.0, 3.0));
    auto L0 = lie_derivative_transport(zero, zero, A);
    CHECK(std::fabs(L0.matrix(pt(0.2), pt(0.4))(0, 0)) <= 1e-12);

    // translations: L_{d,d} a = (d_p + d_q) a
    auto X = TensorField::from_exprs(dom, 1, 0, {"1"});
    auto LX = lie_derivative_transport(X, X, A);
    for (double x : {-0.3, 0.5}) {
        const double a_p = -2 * x * std::exp(-x * x - 0.36);  // d/dp at (x, 0.6)
        const double a_q = -1.2 * std::exp(-x * x - 0.36);
        CHECK(LX.matrix(pt(x), pt(0.6))(0, 0) ==
              doctest::Approx(a_p + a_q).epsilon(1e-8));
    }

    // on the diagonal over the core of an identity cutoff, a two-step
    // Richardson oracle of the defining quotient agrees
    auto Ac = identity_cutoff_transport(dom, Box::cube(1, -2.0, 2.0), 0.5);
    auto Xs = TensorField::from_exprs(dom, 1, 0, {"sin(x1) + 1.1"});
    auto LAc = lie_derivative_transport(Xs, Xs, Ac);
    for (double x : {-0.5, 0.0, 0.9}) {
        auto quotient = [&](double tau) {
            auto [fp, Jp] = flow_with_jacobian(Xs, tau, pt(x));
            auto [fm, Jm] = flow_with_jacobian(Xs, -tau, pt(x));
            const double plus = (Jp.inverse() * Ac.matrix(fp, fp) * Jp)(0, 0);
            const double minus = (Jm.inverse() * Ac.matrix(fm, fm) * Jm)(0, 0);
            return (plus - minus) / (2 * tau);
        };
        const double d1 = quotient(1e-3), d2 = quotient(5e-4);
        const double oracle = (4 * d2 - d1) / 3;
        CHECK(LAc.matrix(pt(x), pt(x))(0, 0) == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("diagonal vanishing of L_X A over the core, scaled") {
    auto dom = line();
    auto A = identity_cutoff_transport(dom, Box::cube(1, -2.0, 2.0), 0.5);
    for (auto expr : {"1", "x1", "sin(x1)"}) {
        auto X = TensorField::from_exprs(dom, 1, 0, {expr});
        auto LA = lie_derivative_transport(X, X, A);
        const double scale = std::max(1.0, A.sampled_scale());
        for (const auto& p : Box::cube(1, -1.8, 1.8).lattice(13))
            CHECK(std::fabs(LA.matrix(p, p)(0, 0)) <= 1e-6 * scale);
    }
}

TEST_CASE("geodesic-built transport") {
    auto dom = line();
    auto g = RiemannianMetric::euclidean(dom);
    Box plateau = Box::cube(1, -1.5, 1.5);
    ScalarFn chi = product_fn(axis_plateau_fn(2, 0, 0.0, 1.5, 0.5),
                               axis_plateau_fn(2, 1, 0.0, 1.5, 0.5));
    Box supp1 = Box::cube(1, -2.0, 2.0);
    auto A = build_geodesic_transport(g, chi, supp1.product(supp1), plateau,
                                      Box::cube(1, -1.0, 1.0));
    // flat metric: A(p,q) = chi(p,q) * id
    Vec pq(2);
    for (double x : {-1.0, 0.3, 1.9}) {
        pq << x, 0.5 * x;
        const double expect = chi->value(pq);
        CHECK(A.matrix(pt(x), pt(0.5 * x))(0, 0) == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(core_contains(A, Box::cube(1, -1.0, 1.0)));

    // chi == 0 gives the zero operator
    auto Z = zero_transport(dom);
    CHECK(Z.matrix(pt(0.1), pt(0.2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(!core_contains(Z, Box::cube(1, -0.5, 0.5)));
}

TEST_CASE("geodesic transport against the dense-step oracle, conformal metric") {
    ChartDomain dom(2, Box::cube(2, -2.0, 2.0));
    auto g = RiemannianMetric::from_exprs(dom, {"exp(2*x1)", "0", "0", "exp(2*x1)"});
    Box plateau = Box::cube(2, -1.0, 1.0);
    ScalarFn chi = constant_fn(4, 1.0);
    for (int i = 0; i < 2; ++i) {
        chi = product_fn(chi, axis_plateau_fn(4, i, 0.0, 1.0, 0.4));
        chi = product_fn(chi, axis_plateau_fn(4, 2 + i, 0.0, 1.0, 0.4));
    }
    Box supp1 = Box::cube(2, -1.4, 1.4);
    auto A = build_geodesic_transport(g, chi, supp1.product(supp1), plateau,
                                      Box::cube(2, -0.5, 0.5));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-0.45, 0.45);
    for (int i = 0; i < 20; ++i) {
        Vec p(2), q(2), pq(4);
        p << U(rng), U(rng);
        q << U(rng), U(rng);
        pq << p, q;
        Mat oracle = chi->value(pq) * geodesic_parallel_transport(g, p, q, 480);
        CHECK((A.matrix(p, q) - oracle).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("two-point tensors and the bullet isomorphism") {
    auto dom = line();
    TwoPointTensor ups;
    ups.domain = dom;
    ups.support = Box::cube(1, -3.0, 3.0).product(Box::cube(1, -3.0, 3.0));
    ups.terms.push_back({constant_fn(2, 1.0),
                         TensorField::from_exprs(dom, 0, 1, {"1"}),
                         TensorField::from_exprs(dom, 1, 0, {"1"})});
    auto A = two_point_to_transport(ups);
    CHECK(A.matrix(pt(0.2), pt(0.8))(0, 0) == doctest::Approx(1.0));

    TwoPointTensor empty;
    empty.domain = dom;
    empty.support = ups.support;
    auto Z = two_point_to_transport(empty);
    CHECK(Z.matrix(pt(0.2), pt(0.8))(0, 0) == 0.0);

    // pullback commutes with the bullet map
    TwoPointTensor ups2;
    ups2.domain = dom;
    ups2.support = ups.support;
    ups2.terms.push_back({expr_fn(Expression::parse("exp(0 - x1^2 - y1^2)", {"x1", "y1"})),
                          TensorField::from_exprs(dom, 0, 1, {"1 + x1^2 / 4"}),
                          TensorField::from_exprs(dom, 1, 0, {"cos(x1 / 2)"})});
    auto mu = Diffeomorphism::from_exprs(dom, {"x1 + 0.1 * sin(x1)"});
    auto nu = Diffeomorphism::from_exprs(dom, {"0.8 * x1"}, {"x1 / 0.8"});
    auto lhs = two_point_to_transport(pullback_two_point(mu, nu, ups2));
    auto rhs = pullback_transport(mu, nu, two_point_to_transport(ups2));
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(-0.9, 0.9);
    for (int i = 0; i < 25; ++i) {
        Vec p = pt(U(rng)), q = pt(U(rng));
        CHECK(lhs.matrix(p, q)(0, 0) ==
              doctest::Approx(rhs.matrix(p, q)(0, 0)).epsilon(1e-9));
    }
}

TEST_CASE("pair-of-flows lie derivative commutes with the bullet map") {
    auto dom = line();
    TwoPointTensor ups;
    ups.domain = dom;
    ups.support = Box::cube(1, -3.0, 3.0).product(Box::cube(1, -3.0, 3.0));
    ups.terms.push_back({expr_fn(Expression::parse("exp(0 - x1^2 - y1^2 / 2)", {"x1", "y1"})),
                         TensorField::from_exprs(dom, 0, 1, {"1 + x1^2 / 8"}),
                         TensorField::from_exprs(dom, 1, 0, {"cos(x1 / 3)"})});
    auto X = TensorField::from_exprs(dom, 1, 0, {"sin(x1)"});
    auto Y = TensorField::from_exprs(dom, 1, 0, {"x1 / 2"});

    // exact four-term expansion on the TP side
    auto exact = two_point_to_transport(lie_derivative_two_point(X, Y, ups));
    // flow-differencing on the TO side
    auto numeric = lie_derivative_transport(X, Y, two_point_to_transport(ups));
    for (double x : {-0.7, 0.0, 0.4}) {
        Vec p = pt(x), q = pt(0.3 - x);
        CHECK(numeric.matrix(p, q)(0, 0) ==
              doctest::Approx(exact.matrix(p, q)(0, 0)).epsilon(1e-5).scale(1.0));
    }
}
