#include "gentensor/fields.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "gentensor/quadrature.hpp"

namespace gentensor {

TensorField TensorField::zero(const ChartDomain& dom, int r, int s) {
    TensorShape sh{dom.dim, r, s};
    std::vector<ScalarFn> c(sh.comps(), constant_fn(dom.dim, 0.0));
    return TensorField(dom, sh, std::move(c));
}

TensorField TensorField::constant(const ChartDomain& dom, int r, int s,
                                  const Vec& fiber) {
    TensorShape sh{dom.dim, r, s};
    if (fiber.size() != sh.comps()) throw Error("TensorField::constant: size mismatch");
    std::vector<ScalarFn> c;
    for (int k = 0; k < sh.comps(); ++k) c.push_back(constant_fn(dom.dim, fiber[k]));
    return TensorField(dom, sh, std::move(c));
}

TensorField TensorField::from_exprs(const ChartDomain& dom, int r, int s,
                                    const std::vector<std::string>& exprs) {
    TensorShape sh{dom.dim, r, s};
    if (static_cast<int>(exprs.size()) != sh.comps())
        throw Error("TensorField::from_exprs: expected " + std::to_string(sh.comps()) +
                    " component expressions, got " + std::to_string(exprs.size()));
    std::vector<ScalarFn> c;
    for (const auto& e : exprs) c.push_back(expr_fn(e, dom.dim));
    return TensorField(dom, sh, std::move(c));
}

TensorField TensorField::scalar(const ChartDomain& dom, ScalarFn f) {
    return TensorField(dom, TensorShape{dom.dim, 0, 0}, {std::move(f)});
}

TensorField lie_derivative_tensor(const TensorField& X, const TensorField& t) {
    if (!X.is_vector()) throw Error("lie_derivative_tensor: X must be a vector field");
    if (X.domain.dim != t.domain.dim)
        throw Error("lie_derivative_tensor: domain mismatch");
    if (t.deriv_order < 1)
        throw Error("lie_derivative_tensor: insufficient deriv_order on t");
    const int n = t.shape.n;
    const int r = t.shape.r, s = t.shape.s;

    std::vector<ScalarFn> out;
    out.reserve(t.shape.comps());
    for (int f = 0; f < t.shape.comps(); ++f) {
        auto idx = t.shape.unflatten(f);
        std::vector<std::pair<double, ScalarFn>> terms;
        for (int k = 0; k < n; ++k) {
            // X^k d_k t^I_J
            terms.emplace_back(
                1.0, product_fn(X.comps[k],
                                partial_shift_fn(t.comps[f], MultiIndex::unit(n, k))));
        }
        for (int a = 0; a < r; ++a) {
            for (int k = 0; k < n; ++k) {
                auto jdx = idx;
                jdx[a] = k;
                terms.emplace_back(
                    -1.0,
                    product_fn(partial_shift_fn(X.comps[idx[a]], MultiIndex::unit(n, k)),
                               t.comps[t.shape.flatten(jdx)]));
            }
        }
        for (int b = 0; b < s; ++b) {
            for (int k = 0; k < n; ++k) {
                auto jdx = idx;
                jdx[r + b] = k;
                terms.emplace_back(
                    1.0,
                    product_fn(partial_shift_fn(X.comps[k], MultiIndex::unit(n, idx[r + b])),
                               t.comps[t.shape.flatten(jdx)]));
            }
        }
        out.push_back(sum_fn(std::move(terms), n));
    }
    TensorField res(t.domain, t.shape, std::move(out),
                    std::min(t.deriv_order, X.deriv_order) - 1);
    return res;
}

TensorField tensor_product_field(const TensorField& a, const TensorField& b) {
    if (a.domain.dim != b.domain.dim) throw Error("tensor_product_field: domain mismatch");
    TensorShape sh{a.shape.n, a.shape.r + b.shape.r, a.shape.s + b.shape.s};
    std::vector<ScalarFn> comps(sh.comps());
    for (int f = 0; f < sh.comps(); ++f) {
        auto idx = sh.unflatten(f);
        std::vector<int> ia(a.shape.slots()), ib(b.shape.slots());
        // upper slots of a, then of b; lower slots of a, then of b
        for (int u = 0; u < a.shape.r; ++u) ia[u] = idx[u];
        for (int u = 0; u < b.shape.r; ++u) ib[u] = idx[a.shape.r + u];
        for (int l = 0; l < a.shape.s; ++l) ia[a.shape.r + l] = idx[sh.r + l];
        for (int l = 0; l < b.shape.s; ++l)
            ib[b.shape.r + l] = idx[sh.r + a.shape.s + l];
        comps[f] = product_fn(a.comps[a.shape.flatten(ia)], b.comps[b.shape.flatten(ib)]);
    }
    return TensorField(a.domain, sh, std::move(comps),
                       std::min(a.deriv_order, b.deriv_order));
}

TensorField contract_field(const TensorField& t, int upper_slot, int lower_slot) {
    if (upper_slot < 0 || upper_slot >= t.shape.r || lower_slot < 0 ||
        lower_slot >= t.shape.s)
        throw Error("contract_field: slot out of range");
    const int n = t.shape.n;
    TensorShape sh{n, t.shape.r - 1, t.shape.s - 1};
    std::vector<ScalarFn> comps(sh.comps());
    for (int f = 0; f < sh.comps(); ++f) {
        auto idx = sh.unflatten(f);
        std::vector<std::pair<double, ScalarFn>> terms;
        for (int k = 0; k < n; ++k) {
            std::vector<int> full(t.shape.slots());
            int src = 0;
            for (int u = 0; u < t.shape.r; ++u)
                full[u] = (u == upper_slot) ? k : idx[src++];
            for (int l = 0; l < t.shape.s; ++l)
                full[t.shape.r + l] = (l == lower_slot) ? k : idx[src++];
            terms.emplace_back(1.0, t.comps[t.shape.flatten(full)]);
        }
        comps[f] = sum_fn(std::move(terms), n);
    }
    return TensorField(t.domain, sh, std::move(comps), t.deriv_order);
}

TensorField scale_field(double c, const TensorField& t) {
    std::vector<ScalarFn> comps;
    for (const auto& f : t.comps) comps.push_back(sum_fn({{c, f}}, t.shape.n));
    return TensorField(t.domain, t.shape, std::move(comps), t.deriv_order);
}

TensorField add_fields(const TensorField& a, const TensorField& b) {
    if (a.shape.comps() != b.shape.comps() || a.shape.r != b.shape.r ||
        a.shape.s != b.shape.s)
        throw Error("add_fields: valence mismatch");
    std::vector<ScalarFn> comps;
    for (int k = 0; k < a.shape.comps(); ++k)
        comps.push_back(sum_fn({{1.0, a.comps[k]}, {1.0, b.comps[k]}}, a.shape.n));
    return TensorField(a.domain, a.shape, std::move(comps),
                       std::min(a.deriv_order, b.deriv_order));
}

TensorField scalar_multiply_field(const ScalarFn& f, const TensorField& t) {
    std::vector<ScalarFn> comps;
    for (const auto& c : t.comps) comps.push_back(product_fn(f, c));
    return TensorField(t.domain, t.shape, std::move(comps), t.deriv_order);
}

TensorField dual_contract_field(const TensorField& t, const TensorField& tt) {
    if (t.shape.r != tt.shape.s || t.shape.s != tt.shape.r)
        throw Error("dual_contract_field: valences are not dual");
    const auto& sh = t.shape;
    TensorShape dual{sh.n, sh.s, sh.r};
    std::vector<std::pair<double, ScalarFn>> terms;
    for (int f = 0; f < sh.comps(); ++f) {
        auto idx = sh.unflatten(f);
        std::vector<int> didx(sh.slots());
        for (int b = 0; b < sh.s; ++b) didx[b] = idx[sh.r + b];
        for (int a = 0; a < sh.r; ++a) didx[sh.s + a] = idx[a];
        terms.emplace_back(1.0, product_fn(t.comps[f], tt.comps[dual.flatten(didx)]));
    }
    if (terms.empty()) terms.emplace_back(1.0, product_fn(t.comps[0], tt.comps[0]));
    return TensorField::scalar(t.domain, sum_fn(std::move(terms), sh.n));
}

NForm lie_derivative_nform(const TensorField& X, const NForm& omega) {
    if (!X.is_vector()) throw Error("lie_derivative_nform: X must be a vector field");
    const int n = omega.domain.dim;
    std::vector<std::pair<double, ScalarFn>> terms;
    for (int i = 0; i < n; ++i)
        terms.emplace_back(1.0, partial_shift_fn(product_fn(X.comps[i], omega.density),
                                                 MultiIndex::unit(n, i)));
    return NForm(omega.domain, omega.support, sum_fn(std::move(terms), n), std::nullopt);
}

NForm add_nform(const NForm& omega, double c, const NForm& eta) {
    return NForm(omega.domain, omega.support.hull(eta.support),
                 sum_fn({{1.0, omega.density}, {c, eta.density}}, omega.domain.dim),
                 std::nullopt);
}

NForm bump_nform(const ChartDomain& dom, const Vec& center, const Vec& halfwidth) {
    const int n = dom.dim;
    ScalarFn dens = axis_bump_fn(n, 0, center[0], halfwidth[0]);
    for (int i = 1; i < n; ++i)
        dens = product_fn(dens, axis_bump_fn(n, i, center[i], halfwidth[i]));
    Box supp(center - halfwidth, center + halfwidth);
    if (!dom.contains(supp)) throw Error("bump_nform: support escapes the domain");
    const double mass =
        integrate_box([&](const Vec& x) { return dens->value(x); }, supp, {20, 10});
    return NForm(dom, supp, sum_fn({{1.0 / mass, dens}}, n), 1.0);
}

RiemannianMetric RiemannianMetric::euclidean(const ChartDomain& dom) {
    RiemannianMetric g;
    g.domain = dom;
    const int n = dom.dim;
    g.entries.resize(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.entries[i * n + j] = constant_fn(n, i == j ? 1.0 : 0.0);
    return g;
}

RiemannianMetric RiemannianMetric::from_exprs(const ChartDomain& dom,
                                              const std::vector<std::string>& exprs) {
    RiemannianMetric g;
    g.domain = dom;
    const int n = dom.dim;
    if (static_cast<int>(exprs.size()) != n * n)
        throw Error("RiemannianMetric: expected n*n entries");
    for (const auto& e : exprs) g.entries.push_back(expr_fn(e, n));
    return g;
}

Mat RiemannianMetric::matrix(const Vec& p) const {
    const int n = domain.dim;
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = entries[i * n + j]->value(p);
    return m;
}

Mat RiemannianMetric::matrix_partial(const Vec& p, int axis) const {
    const int n = domain.dim;
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = entries[i * n + j]->partial(p, MultiIndex::unit(n, axis));
    return m;
}

void RiemannianMetric::validate_at(const Vec& p, double sym_tol) const {
    Mat m = matrix(p);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > sym_tol)
        throw Error("RiemannianMetric: not symmetric at sampled point");
    Eigen::LLT<Mat> llt(m);
    if (llt.info() != Eigen::Success)
        throw Error("RiemannianMetric: not positive definite at sampled point");
}

double fiber_norm(const RiemannianMetric& h, const Vec& p, const TensorShape& sh,
                  const Vec& components) {
    if (sh.slots() == 0) return std::fabs(components[0]);
    Mat H = h.matrix(p);
    Mat Hinv = H.inverse();
    Mat G = Mat::Ones(1, 1);
    for (int a = 0; a < sh.r; ++a) G = kron(G, H);
    for (int b = 0; b < sh.s; ++b) G = kron(G, Hinv);
    const double q = components.dot(G * components);
    return std::sqrt(std::max(q, 0.0));
}

Vec Diffeomorphism::apply(const Vec& p) const {
    Vec q(domain.dim);
    for (int i = 0; i < domain.dim; ++i) q[i] = forward[i]->value(p);
    return q;
}

Vec Diffeomorphism::apply_inverse(const Vec& q) const {
    if (!inverse.empty()) {
        Vec p(domain.dim);
        for (int i = 0; i < domain.dim; ++i) p[i] = inverse[i]->value(q);
        return p;
    }
    // Newton iteration on forward(p) = q
    Vec p = q;
    for (int it = 0; it < 60; ++it) {
        Vec f = apply(p) - q;
        if (f.cwiseAbs().maxCoeff() < 1e-14) return p;
        p -= jacobian(p).partialPivLu().solve(f);
    }
    Vec f = apply(p) - q;
    if (f.cwiseAbs().maxCoeff() > tol_diffeo)
        throw Error("Diffeomorphism: inverse Newton iteration did not converge");
    return p;
}

Mat Diffeomorphism::jacobian(const Vec& p) const {
    const int n = domain.dim;
    Mat J(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            J(i, j) = forward[i]->partial(p, MultiIndex::unit(n, j));
    return J;
}

Mat Diffeomorphism::inverse_jacobian(const Vec& q) const {
    if (!inverse.empty()) {
        const int n = domain.dim;
        Mat J(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                J(i, j) = inverse[i]->partial(q, MultiIndex::unit(n, j));
        return J;
    }
    return jacobian(apply_inverse(q)).inverse();
}

Diffeomorphism Diffeomorphism::identity(const ChartDomain& dom) {
    Diffeomorphism mu;
    mu.domain = dom;
    for (int i = 0; i < dom.dim; ++i) {
        mu.forward.push_back(coordinate_fn(dom.dim, i));
        mu.inverse.push_back(coordinate_fn(dom.dim, i));
    }
    return mu;
}

Diffeomorphism Diffeomorphism::from_exprs(const ChartDomain& dom,
                                          const std::vector<std::string>& fwd,
                                          const std::vector<std::string>& inv) {
    Diffeomorphism mu;
    mu.domain = dom;
    for (const auto& e : fwd) mu.forward.push_back(expr_fn(e, dom.dim));
    for (const auto& e : inv) mu.inverse.push_back(expr_fn(e, dom.dim));
    if (static_cast<int>(mu.forward.size()) != dom.dim)
        throw Error("Diffeomorphism: expected n forward components");
    return mu;
}

Diffeomorphism Diffeomorphism::inverse_map() const {
    Diffeomorphism nu;
    nu.domain = domain;
    nu.tol_diffeo = tol_diffeo;
    if (!inverse.empty()) {
        nu.forward = inverse;
        nu.inverse = forward;
        return nu;
    }
    // wrap the Newton inverse componentwise; derivative access is numeric
    for (int i = 0; i < domain.dim; ++i) {
        auto self = *this;
        nu.forward.push_back(lambda_fn(
            domain.dim, [self, i](const Vec& q) { return self.apply_inverse(q)[i]; },
            domain.scale()));
    }
    nu.inverse = forward;
    return nu;
}

ScalarFn Diffeomorphism::pullback_scalar(const ScalarFn& f) const {
    return compose_fn(f, forward);
}

TensorField Diffeomorphism::pullback_tensor(const TensorField& t) const {
    const int n = domain.dim;
    const auto sh = t.shape;
    // (mu^* t)(p) = kron(J^-1 on upper, J^T on lower) t(mu p); entries of J^-1
    // and the composed components are exact through the compose combinator
    Diffeomorphism self = *this;
    std::vector<ScalarFn> comps(sh.comps());
    for (int f = 0; f < sh.comps(); ++f) {
        comps[f] = lambda_fn(
            n,
            [self, t, f, sh, n](const Vec& p) {
                Mat J = self.jacobian(p);
                Mat Jinv = J.inverse();
                Mat M = Mat::Ones(1, 1);
                for (int a = 0; a < sh.r; ++a) M = kron(M, Jinv);
                for (int b = 0; b < sh.s; ++b) M = kron(M, J.transpose());
                Vec v = t.value(self.apply(p));
                return (M * v)[f];
            },
            domain.scale());
    }
    return TensorField(t.domain, sh, std::move(comps), 4);
}

NForm Diffeomorphism::pushforward_nform(const NForm& omega) const {
    // (mu_* omega)(y) = omega_dens(mu^-1 y) |det D(mu^-1)(y)|
    const int n = domain.dim;
    Diffeomorphism inv = inverse_map();
    ScalarFn composed = compose_fn(omega.density, inv.forward);
    Diffeomorphism self = *this;
    ScalarFn jac = lambda_fn(
        n, [self](const Vec& y) { return std::fabs(self.inverse_jacobian(y).determinant()); },
        domain.scale());
    Box supp = map_box([&](const Vec& x) { return self.apply(x); }, omega.support);
    if (omega.domain.bounds) supp = supp.intersection(*omega.domain.bounds);
    return NForm(omega.domain, supp, product_fn(composed, jac), omega.integral_hint);
}

Box map_box(const std::function<Vec(const Vec&)>& fn, const Box& box, int samples,
            double pad_rel) {
    auto pts = box.lattice(samples);
    Vec lo = fn(pts[0]), hi = lo;
    for (const auto& p : pts) {
        Vec q = fn(p);
        lo = lo.cwiseMin(q);
        hi = hi.cwiseMax(q);
    }
    Vec pad = pad_rel * (hi - lo).cwiseMax(1e-12);
    return Box(lo - pad, hi + pad);
}

}  // namespace gentensor
