#include <doctest.h>

#include <cmath>
#include <random>

#include "gentensor/representative.hpp"

using namespace gentensor;

namespace {

ChartDomain line() { return ChartDomain(1, Box::cube(1, -6.0, 6.0)); }
Vec pt(double x) {
    Vec p(1);
    p << x;
    return p;
}
TransportOperator default_A(const ChartDomain& dom) {
    return identity_cutoff_transport(dom, Box::cube(1, -2.0, 2.0), 0.5);
}

}  // namespace

TEST_CASE("sigma embeds pointwise and kills the functional slots") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto one = embed_smooth(TensorField::from_exprs(dom, 0, 0, {"1"}));
    for (double eps : {0.5, 0.01}) {
        for (double x : {-0.8, 0.0, 1.2}) {
            NForm w = kernel.at(eps, pt(x));
            CHECK(one->eval(w, pt(x), A)[0] == 1.0);
            CHECK(one->d1(w, pt(x), A, w)[0] == 0.0);
            TransportOperator B = lie_derivative_transport(
                TensorField::from_exprs(dom, 1, 0, {"1"}),
                TensorField::from_exprs(dom, 1, 0, {"1"}), A);
            CHECK(one->d3(w, pt(x), A, {&B})[0] == 0.0);
        }
    }
}

TEST_CASE("spreading a fiber over the chart") {
    auto dom = line();
    auto A = default_A(dom);
    auto tt = TensorField::from_exprs(dom, 1, 0, {"1 + x1^2"});  // (s,r) = (1,0)

    // near the diagonal the cutoff is one: theta(A,tt,p)(p) = tt(p)
    for (double x : {-0.9, 0.4})
        CHECK(spreading_theta(A, tt, pt(x)).value(pt(x))[0] ==
              doctest::Approx(1 + x * x).epsilon(1e-12));

    // zero operator spreads to the zero field
    auto Z = zero_transport(dom);
    CHECK(spreading_theta(Z, tt, pt(0.2)).value(pt(0.5))[0] == 0.0);

    // scalar constant factor: theta picks up the entry value
    TransportOperator two = A;
    two.entries[0] = sum_fn({{2.0, A.entries[0]}}, 2);
    CHECK(spreading_theta(two, tt, pt(0.3)).value(pt(0.3))[0] ==
          doctest::Approx(2.0 * (1 + 0.09)).epsilon(1e-12));
}

TEST_CASE("iota of a scalar delta ignores p and A") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto u = embed_distribution(delta_distribution(dom, pt(0.0)));
    for (double eps : {0.3, 0.02}) {
        for (double x : {-0.5, 0.0, 0.7}) {
            if (std::fabs(x) >= eps) continue;
            NForm w = kernel.at(eps, pt(x));
            const double expect = w.density->value(pt(0.0));
            CHECK(u->eval(w, pt(x), A)[0] == doctest::Approx(expect).epsilon(1e-13));
        }
    }
    // support: zero exactly once |p| > eps C
    NForm far = kernel.at(0.125, pt(1.0));
    CHECK(u->eval(far, pt(1.0), A)[0] == 0.0);
}

TEST_CASE("iota of delta-prime: closed form of the translated profile") {
    auto dom = line();
    auto A = default_A(dom);
    const double C = 1.3;
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 2, C);
    auto u = embed_distribution(
        delta_distribution(dom, pt(0.0), MultiIndex::unit(1, 0)));
    for (double eps : {0.25, 0.0625, 0.015625}) {
        for (double x : {-0.2, 0.0, 0.1}) {
            if (std::fabs(x) >= eps * C) continue;
            NForm w = kernel.at(eps, pt(x));
            const double h = eps * C;
            const double closed = -kernel.profile.deriv(-x / h, 1) / (h * h);
            CHECK(u->eval(w, pt(x), A)[0] == doctest::Approx(closed).epsilon(1e-10));
            // independent oracle: Richardson finite difference of the density
            // at the pairing point
            auto dq = [&](double step) {
                return (w.density->value(pt(step)) - w.density->value(pt(-step))) /
                       (2 * step);
            };
            const double d1 = dq(1e-3 * h), d2 = dq(5e-4 * h);
            const double oracle = -(4 * d2 - d1) / 3;
            CHECK(u->eval(w, pt(x), A)[0] == doctest::Approx(oracle).epsilon(1e-7));
        }
    }
}

TEST_CASE("iota is linear") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 0, 1.0);
    auto v1 = delta_distribution(dom, pt(0.0));
    auto v2 = heaviside_distribution(dom);
    auto combo = embed_distribution(linear_combination({{2.0, v1}, {-3.0, v2}}));
    auto split = linear_combination(
        {{2.0, embed_distribution(v1)}, {-3.0, embed_distribution(v2)}});
    for (double x : {-0.3, 0.0, 0.4}) {
        NForm w = kernel.at(0.2, pt(x));
        CHECK(combo->eval(w, pt(x), A)[0] ==
              doctest::Approx(split->eval(w, pt(x), A)[0]).epsilon(1e-12));
    }
}

TEST_CASE("tensor products of representatives") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto t1 = TensorField::from_exprs(dom, 1, 0, {"sin(x1) + 2"});
    auto t2 = TensorField::from_exprs(dom, 0, 1, {"x1^2 + 1"});

    // sigma is an algebra morphism for the tensor product, exactly
    auto lhs = tensor_product(embed_smooth(t1), embed_smooth(t2));
    auto rhs = embed_smooth(tensor_product_field(t1, t2));
    NForm w = kernel.at(0.1, pt(0.2));
    CHECK(lhs->eval(w, pt(0.2), A)[0] == rhs->eval(w, pt(0.2), A)[0]);

    // unit
    auto u = embed_distribution(delta_distribution(dom, pt(0.0)));
    auto with_unit =
        tensor_product(u, embed_smooth(TensorField::from_exprs(dom, 0, 0, {"1"})));
    NForm w0 = kernel.at(0.1, pt(0.05));
    CHECK(with_unit->eval(w0, pt(0.05), A)[0] ==
          doctest::Approx(u->eval(w0, pt(0.05), A)[0]).epsilon(1e-13));

    // iota(delta) squared at p = 0: the squared center density
    auto sq = tensor_product(u, u);
    const double h = 0.1 * 1.0;
    NForm wc = kernel.at(0.1, pt(0.0));
    const double dens0 = kernel.profile.value(0.0) / h;
    CHECK(sq->eval(wc, pt(0.0), A)[0] == doctest::Approx(dens0 * dens0).epsilon(1e-12));
}

TEST_CASE("contraction") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    NForm w = kernel.at(0.2, pt(0.3));

    // sigma(d_x (x) dx) contracts to sigma(1)
    auto mixed = embed_smooth(
        tensor_product_field(TensorField::from_exprs(dom, 1, 0, {"1"}),
                             TensorField::from_exprs(dom, 0, 1, {"1"})));
    auto c = contract(mixed, 0, 0);
    CHECK(c->eval(w, pt(0.3), A)[0] == doctest::Approx(1.0));

    // full contraction against sigma(tt) is the dual pairing
    auto u = embed_distribution(smooth_coeff_product(
        TensorField::from_exprs(dom, 1, 0, {"1"}),
        delta_distribution(dom, pt(0.0), MultiIndex::unit(1, 0))));
    auto tt = TensorField::from_exprs(dom, 0, 1, {"cos(x1)"});
    auto via_contract = contract(tensor_product(u, embed_smooth(tt)), 0, 0);
    auto via_pair = dual_pair(u, tt);
    NForm w0 = kernel.at(0.1, pt(0.05));
    CHECK(via_contract->eval(w0, pt(0.05), A)[0] ==
          doctest::Approx(via_pair->eval(w0, pt(0.05), A)[0]).epsilon(1e-12));

    // linearity of contraction
    auto a = contract(linear_combination({{2.0, mixed}, {1.5, mixed}}), 0, 0);
    CHECK(a->eval(w, pt(0.3), A)[0] == doctest::Approx(3.5).epsilon(1e-12));

    CHECK_THROWS_AS(contract(embed_smooth(tt), 0, 0), Error);
}

TEST_CASE("d1 of embedded distributions matches finite differences in omega") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto u = embed_distribution(delta_distribution(dom, pt(0.0), MultiIndex::unit(1, 0)));
    auto X = TensorField::from_exprs(dom, 1, 0, {"sin(x1) + 1.5"});
    for (double eps : {0.25, 0.05}) {
        NForm w = kernel.at(eps, pt(0.02));
        NForm eta = lie_derivative_nform(X, w);
        const double exact = u->d1(w, pt(0.02), A, eta)[0];
        // generic functional-slot differencing on the same node
        const double fd = u->Representative::d1(w, pt(0.02), A, eta)[0];
        CHECK(fd == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("d3 product rule against functional-slot differences") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    // vector-valued embedded distribution so the transport slot matters
    auto v = smooth_coeff_product(TensorField::from_exprs(dom, 1, 0, {"1"}),
                                  delta_distribution(dom, pt(0.0)));
    auto u = embed_distribution(v);
    auto X = TensorField::from_exprs(dom, 1, 0, {"1"});
    TransportOperator B = lie_derivative_transport(X, X, A);
    for (double x : {0.0, 0.05}) {
        NForm w = kernel.at(0.1, pt(x));
        Vec exact = u->d3(w, pt(x), A, {&B});
        Vec fd = u->Representative::d3(w, pt(x), A, {&B});
        CHECK((exact - fd).cwiseAbs().maxCoeff() <=
              1e-7 * (1 + exact.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("hat pullback") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);

    // identity leaves everything unchanged
    auto id = Diffeomorphism::identity(dom);
    auto u = embed_distribution(delta_distribution(dom, pt(0.0)));
    NForm w = kernel.at(0.2, pt(0.1));
    CHECK(hat_pullback(id, u)->eval(w, pt(0.1), A)[0] ==
          doctest::Approx(u->eval(w, pt(0.1), A)[0]).epsilon(1e-11));

    // sigma commutes: mu-hat(sigma t) = sigma(mu^* t)
    auto mu = Diffeomorphism::from_exprs(dom, {"x1 + 0.3 * x1^3"});
    auto t = TensorField::from_exprs(dom, 1, 0, {"cos(x1)"});
    auto lhs = hat_pullback(mu, embed_smooth(t));
    auto rhs = embed_smooth(mu.pullback_tensor(t));
    for (double x : {-0.6, 0.2, 0.9}) {
        NForm wx = kernel.at(0.1, pt(x));
        CHECK(lhs->eval(wx, pt(x), A)[0] ==
              doctest::Approx(rhs->eval(wx, pt(x), A)[0]).epsilon(1e-9));
    }
}

TEST_CASE("pullback commutes with the embedding of delta") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto mu = Diffeomorphism::from_exprs(dom, {"x1 + 0.3 * x1^3"});
    auto v = delta_distribution(dom, pt(0.0));
    auto lhs = hat_pullback(mu, embed_distribution(v));
    auto rhs = embed_distribution(pullback_distribution(mu, v));
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    for (int i = 0; i < 20; ++i) {
        const double eps = 0.02 + 0.2 * std::fabs(U(rng));
        const double x = U(rng);
        NForm w = kernel.at(eps, pt(x));
        const double a = lhs->eval(w, pt(x), A)[0];
        const double b = rhs->eval(w, pt(x), A)[0];
        CHECK(std::fabs(a - b) <= 1e-6 * (1.0 + std::fabs(b)));
    }
}

TEST_CASE("hat lie derivative on smooth embeddings") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto X = TensorField::from_exprs(dom, 1, 0, {"sin(x1) + 1.1"});
    auto t = TensorField::from_exprs(dom, 1, 0, {"x1^2 + 0.5"});
    auto lhs = hat_lie(X, embed_smooth(t));
    auto rhs = embed_smooth(lie_derivative_tensor(X, t));
    for (double x : {-0.7, 0.0, 0.8}) {
        NForm w = kernel.at(0.1, pt(x));
        CHECK(lhs->eval(w, pt(x), A)[0] ==
              doctest::Approx(rhs->eval(w, pt(x), A)[0]).epsilon(1e-7));
    }
}

TEST_CASE("lie derivative commutes with the embedding (scalar delta)") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto X = TensorField::from_exprs(dom, 1, 0, {"1"});
    auto v = delta_distribution(dom, pt(0.0));
    auto lhs = hat_lie(X, embed_distribution(v));
    auto rhs = embed_distribution(lie_derivative_distribution(X, v));
    for (double eps : {0.25, 0.0625, 0.015625})
        for (double x : {-0.4, 0.0, 0.01, 0.5}) {
            NForm w = kernel.at(eps, pt(x));
            const double a = lhs->eval(w, pt(x), A)[0];
            const double b = rhs->eval(w, pt(x), A)[0];
            CHECK(std::fabs(a - b) <= 1e-6 * (1.0 + std::fabs(b)));
        }
}

TEST_CASE("three-term decomposition adds up to the full lie derivative") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto X = TensorField::from_exprs(dom, 1, 0, {"x1"});
    auto u = embed_distribution(smooth_coeff_product(
        TensorField::from_exprs(dom, 1, 0, {"1"}), delta_distribution(dom, pt(0.0))));
    auto full = hat_lie(X, u, LieTerm::Full);
    auto base = hat_lie(X, u, LieTerm::Base);
    auto omega_slot = hat_lie(X, u, LieTerm::OmegaSlot);
    auto slot_a = hat_lie(X, u, LieTerm::SlotA);
    NForm w = kernel.at(0.1, pt(0.03));
    const double sum = base->eval(w, pt(0.03), A)[0] +
                       omega_slot->eval(w, pt(0.03), A)[0] +
                       slot_a->eval(w, pt(0.03), A)[0];
    CHECK(full->eval(w, pt(0.03), A)[0] == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("leibniz rule for hat lie on tensor products") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto X = TensorField::from_exprs(dom, 1, 0, {"sin(x1) + 1.2"});

    auto s1 = embed_smooth(TensorField::from_exprs(dom, 1, 0, {"x1^2 + 1"}));
    auto s2 = embed_smooth(TensorField::from_exprs(dom, 0, 1, {"cos(x1)"}));
    auto i1 = embed_distribution(delta_distribution(dom, pt(0.0)));
    auto i2 = embed_distribution(heaviside_distribution(dom));

    auto check_pair = [&](const RepPtr& a, const RepPtr& b) {
        auto prod = tensor_product(a, b);
        auto lhs = hat_lie(X, prod);
        auto rhs = linear_combination({{1.0, tensor_product(hat_lie(X, a), b)},
                                       {1.0, tensor_product(a, hat_lie(X, b))}});
        for (double eps : {0.2, 0.05})
            for (double x : {-0.3, 0.02, 0.6}) {
                NForm w = kernel.at(eps, pt(x));
                Vec l = lhs->eval(w, pt(x), A);
                Vec r = rhs->eval(w, pt(x), A);
                const double scale = 1.0 + r.cwiseAbs().maxCoeff();
                CHECK((l - r).cwiseAbs().maxCoeff() <= 1e-5 * scale);
            }
    };
    check_pair(s1, s2);  // sigma (x) sigma
    check_pair(s1, i1);  // sigma (x) iota
    check_pair(i1, i2);  // iota (x) iota
}

TEST_CASE("directional A-derivatives interchange with the base lie term") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto X = TensorField::from_exprs(dom, 1, 0, {"sin(x1) + 1.3"});
    auto u = embed_distribution(smooth_coeff_product(
        TensorField::from_exprs(dom, 1, 0, {"1"}), delta_distribution(dom, pt(0.0))));
    auto Xc = TensorField::from_exprs(dom, 1, 0, {"1"});
    TransportOperator B = lie_derivative_transport(Xc, Xc, A);

    // d_B (hat L_{0,X,0} u) = hat L_{0,X,0} (d_B u): the right side assembles
    // the coordinate formula from p-partials of the d_B-differentiated map
    auto lhs_node = hat_lie(X, u, LieTerm::Base);
    for (double x : {0.0, 0.04}) {
        NForm w = kernel.at(0.1, pt(x));
        Vec lhs = lhs_node->d3(w, pt(x), A, {&B});

        std::vector<Vec> partials(1);
        auto shift = [&](double off) { return u->d3(w, pt(x + off), A, {&B}); };
        const double h = 1e-4 * dom.scale();
        partials[0] =
            (-shift(2 * h) + 8.0 * shift(h) - 8.0 * shift(-h) + shift(-2 * h)) /
            (12.0 * h);
        Vec rhs = lie_fiber_combine(X, pt(x), u->valence(), u->d3(w, pt(x), A, {&B}),
                                    partials);
        const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-5 * scale);
    }
}

TEST_CASE("restriction narrows the domain without changing values") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto u = embed_distribution(delta_distribution(dom, pt(0.0)));
    auto r = restrict_representative(u, Box::cube(1, -2.0, 2.0));
    CHECK(r->domain().bounds->hi[0] == 2.0);
    NForm w = kernel.at(0.1, pt(0.05));
    CHECK(r->eval(w, pt(0.05), A)[0] == u->eval(w, pt(0.05), A)[0]);
}

TEST_CASE("smoothness probe of the frozen p-map") {
    auto dom = line();
    auto A = default_A(dom);
    auto kernel = build_kernel(dom, MollifierProfile::bump(), 1, 1.0);
    auto u = embed_distribution(smooth_coeff_product(
        TensorField::from_exprs(dom, 1, 0, {"cos(x1)"}),
        delta_distribution(dom, pt(0.0))));
    NForm w = kernel.at(0.2, pt(0.1));
    // exact p-partial agrees with finite differences at two steps
    Vec exact = u->p_partial(w, pt(0.1), A, MultiIndex::unit(1, 0));
    auto fd = [&](double h) {
        return (u->eval(w, pt(0.1 + h), A) - u->eval(w, pt(0.1 - h), A)) / (2 * h);
    };
    CHECK((exact - fd(1e-5)).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK((exact - fd(5e-6)).cwiseAbs().maxCoeff() <= 1e-5);
}
