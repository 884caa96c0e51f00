#include <doctest.h>

#include "gentensor/expression.hpp"
#include "gentensor/order_fit.hpp"
#include "gentensor/quadrature.hpp"
#include "gentensor/scalar_field.hpp"
#include "gentensor/taylor.hpp"

#include <cmath>

using namespace gentensor;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    auto f = [](double x) { return 3 * x * x - 2 * x + 1; };
    CHECK(integrate_interval(f, -1, 2, {8, 2}) == doctest::Approx(9.0).epsilon(1e-13));
    Box b = Box::cube(2, 0.0, 1.0);
    double v = integrate_box([](const Vec& x) { return x[0] * x[1]; }, b, {6, 2});
    CHECK(v == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("taylor arithmetic reproduces analytic derivatives") {
    // d^3/dx^3 exp(-1/(1-x^2)) at 0.3 against a tight central difference
    auto f = [](double x) { return std::exp(-1.0 / (1.0 - x * x)); };
    TaylorSeries x = TaylorSeries::variable(0.3, 3);
    TaylorSeries one = TaylorSeries::constant(1.0, 3);
    TaylorSeries b = ts_exp(TaylorSeries::constant(-1.0, 3) / (one - x * x));
    const double h = 1e-2;
    double fd3 = (f(0.3 + 2 * h) - 2 * f(0.3 + h) + 2 * f(0.3 - h) - f(0.3 - 2 * h)) /
                 (2 * h * h * h);
    CHECK(b.deriv(3) == doctest::Approx(fd3).epsilon(1e-3));
    CHECK(b.deriv(0) == doctest::Approx(f(0.3)).epsilon(1e-14));
}

TEST_CASE("expression parser and dual-number partials") {
    auto e = Expression::parse("x1^2 * sin(x2) + exp(x1 / 2)", 2);
    std::vector<double> at{0.7, 1.1};
    CHECK(e.eval(at) ==
          doctest::Approx(0.49 * std::sin(1.1) + std::exp(0.35)).epsilon(1e-14));

    auto f = expr_fn("x1^2 * sin(x2) + exp(x1 / 2)", 2);
    Vec x(2);
    x << 0.7, 1.1;
    MultiIndex dxx = MultiIndex::unit(2, 0, 2);
    CHECK(f->partial(x, dxx) ==
          doctest::Approx(2 * std::sin(1.1) + 0.25 * std::exp(0.35)).epsilon(1e-12));
    MultiIndex dxy = MultiIndex::unit(2, 0).plus(1);
    CHECK(f->partial(x, dxy) == doctest::Approx(2 * 0.7 * std::cos(1.1)).epsilon(1e-12));
}

TEST_CASE("expression errors carry positions") {
    CHECK_THROWS_AS(Expression::parse("x1 + unknown(2)", 1), Error);
    CHECK_THROWS_AS(Expression::parse("x1 ^ x1", 1), Error);  // exponent not constant
    CHECK_THROWS_AS(Expression::parse("(x1", 1), Error);
}

TEST_CASE("combinator partials are exact") {
    auto f = expr_fn("sin(x1)", 1);
    auto g = expr_fn("x1^3", 1);
    auto prod = product_fn(f, g);
    Vec x(1);
    x << 0.4;
    // (sin x x^3)'' = -sin x x^3 + 6 cos x x^2 + 6 sin x x
    const double want = -std::sin(0.4) * 0.064 + 6 * std::cos(0.4) * 0.16 +
                        6 * std::sin(0.4) * 0.4;
    CHECK(prod->partial(x, MultiIndex::unit(1, 0, 2)) ==
          doctest::Approx(want).epsilon(1e-12));

    auto shifted = partial_shift_fn(f, MultiIndex::unit(1, 0));
    CHECK(shifted->value(x) == doctest::Approx(std::cos(0.4)).epsilon(1e-14));
}

TEST_CASE("plateau cutoff is exactly one on the flat part and smooth") {
    auto chi = axis_plateau_fn(1, 0, 0.0, 1.0, 0.5);
    Vec x(1);
    x << 0.7;
    CHECK(chi->value(x) == 1.0);
    CHECK(chi->partial(x, MultiIndex::unit(1, 0)) == 0.0);
    x << 1.6;
    CHECK(chi->value(x) == 0.0);
    x << 1.2;
    const double v = chi->value(x);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    // derivative matches a finite difference of the value path
    const double h = 1e-5;
    Vec xp(1), xm(1);
    xp << 1.2 + h;
    xm << 1.2 - h;
    const double fd = (chi->value(xp) - chi->value(xm)) / (2 * h);
    CHECK(chi->partial(x, MultiIndex::unit(1, 0)) ==
          doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("order estimation") {
    // values eps^2 -> slope 2 exactly
    std::vector<OrderSample> s;
    for (int k = 3; k <= 12; ++k) {
        double eps = std::pow(2.0, -k);
        s.push_back({eps, eps * eps});
    }
    auto r = estimate_order(s);
    CHECK(r.fitted_slope == doctest::Approx(2.0).epsilon(1e-12));

    // values 5 eps^-3 -> slope -3 exactly
    std::vector<OrderSample> s2;
    for (int k = 3; k <= 12; ++k) {
        double eps = std::pow(2.0, -k);
        s2.push_back({eps, 5.0 * std::pow(eps, -3.0)});
    }
    auto r2 = estimate_order(s2);
    CHECK(r2.fitted_slope == doctest::Approx(-3.0).epsilon(1e-12));

    // oscillatory modulation is flagged but the slope survives
    std::vector<OrderSample> s3;
    for (int k = 3; k <= 12; ++k) {
        double eps = std::pow(2.0, -k);
        s3.push_back({eps, eps * eps * (1.0 + 0.1 * std::sin(std::log(eps)))});
    }
    auto r3 = estimate_order(s3);
    CHECK(r3.oscillatory);
    CHECK(r3.fitted_slope == doctest::Approx(2.0).epsilon(0.05));

    // identically zero short-circuits
    std::vector<OrderSample> s4;
    for (int k = 3; k <= 12; ++k) s4.push_back({std::pow(2.0, -k), 0.0});
    auto r4 = estimate_order(s4);
    CHECK(r4.identically_zero);
}

TEST_CASE("principal value quadrature") {
    // pv int_{-1}^{1} (x + 2) / x dx = 2 pv int 1/x + int 1 = 2
    auto res = principal_value([](double x) { return x + 2.0; }, 0.0, -1.0, 1.0);
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(2.0).epsilon(1e-9));
}
