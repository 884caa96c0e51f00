#include "gentensor/transport.hpp"

#include <cmath>

namespace gentensor {

Mat TransportOperator::matrix(const Vec& p, const Vec& q) const {
    const int n = dim();
    Vec pq(2 * n);
    pq << p, q;
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = entries[i * n + j]->value(pq);
    return m;
}

ScalarFn TransportOperator::flipped_adjoint_entry(int i, int j) const {
    return swap_blocks_fn(entry(j, i), dim());
}

double TransportOperator::sampled_scale(int lattice) const {
    double s = 0.0;
    for (const auto& pq : support.lattice(lattice))
        for (const auto& e : entries) s = std::max(s, std::fabs(e->value(pq)));
    return s;
}

TransportOperator zero_transport(const ChartDomain& dom) {
    TransportOperator A;
    A.domain = dom;
    Vec z = Vec::Zero(dom.dim);
    A.support = Box(z, z);
    A.kernel_region = dom.bounds;
    A.entries.assign(dom.dim * dom.dim, constant_fn(2 * dom.dim, 0.0));
    return A;
}

TransportOperator identity_cutoff_transport(const ChartDomain& dom, const Box& plateau,
                                            double transition_width) {
    const int n = dom.dim;
    TransportOperator A;
    A.domain = dom;
    ScalarFn chi = constant_fn(2 * n, 1.0);
    for (int i = 0; i < n; ++i) {
        const double c = plateau.center()[i];
        const double a = 0.5 * plateau.widths()[i];
        chi = product_fn(chi, axis_plateau_fn(2 * n, i, c, a, transition_width));
        chi = product_fn(chi, axis_plateau_fn(2 * n, n + i, c, a, transition_width));
    }
    Box supp1 = plateau.inflated(transition_width);
    if (!dom.contains(supp1))
        throw Error("identity_cutoff_transport: support escapes the domain");
    A.support = supp1.product(supp1);
    A.core_region = plateau;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            A.entries.push_back(i == j ? chi : constant_fn(2 * n, 0.0));
    return A;
}

TransportOperator axpy_transport(const TransportOperator& A, double c,
                                 const TransportOperator& B) {
    if (A.dim() != B.dim()) throw Error("axpy_transport: dimension mismatch");
    TransportOperator R;
    R.domain = A.domain;
    R.support = A.support.hull(B.support);
    for (size_t k = 0; k < A.entries.size(); ++k)
        R.entries.push_back(
            sum_fn({{1.0, A.entries[k]}, {c, B.entries[k]}}, 2 * A.dim()));
    return R;
}

Mat induced_map_asr(const TransportOperator& A, const Vec& p, const Vec& q, int r,
                    int s) {
    Mat W = A.matrix(p, q);
    Mat V = A.matrix(q, p).transpose();
    Mat M = Mat::Ones(1, 1);
    for (int a = 0; a < s; ++a) M = kron(M, W);
    for (int b = 0; b < r; ++b) M = kron(M, V);
    return M;
}

ScalarFn asr_component_fn(const std::vector<const TransportOperator*>& slot_ops, int r,
                          int s, int out_flat, int in_flat) {
    if (static_cast<int>(slot_ops.size()) != r + s)
        throw Error("asr_component_fn: one operator per slot required");
    const int n = slot_ops.empty() ? 0 : slot_ops[0]->dim();
    TensorShape sh{n, s, r};  // fiber of (s,r)-tensors
    if (r + s == 0) return constant_fn(2 * std::max(n, 1), 1.0);
    auto oidx = sh.unflatten(out_flat);
    auto iidx = sh.unflatten(in_flat);
    ScalarFn acc;
    for (int a = 0; a < s; ++a) {
        ScalarFn w = slot_ops[a]->entry(oidx[a], iidx[a]);
        acc = acc ? product_fn(acc, w) : w;
    }
    for (int b = 0; b < r; ++b) {
        ScalarFn v = slot_ops[s + b]->flipped_adjoint_entry(oidx[s + b], iidx[s + b]);
        acc = acc ? product_fn(acc, v) : v;
    }
    return acc;
}

bool core_contains(const TransportOperator& A, const Box& K, int grid, double tol) {
    if (!A.core_region || !A.core_region->contains(K, 1e-12)) return false;
    const int n = A.dim();
    for (const auto& p : K.lattice(grid)) {
        Mat m = A.matrix(p, p);
        if ((m - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

bool kernel_covers(const TransportOperator& A, const Box& U, int grid, double tol) {
    for (const auto& p : U.lattice(grid))
        if (A.matrix(p, p).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

TransportOperator pullback_transport(const Diffeomorphism& mu, const Diffeomorphism& nu,
                                     const TransportOperator& A, bool same_map) {
    const int n = A.dim();
    TransportOperator R;
    R.domain = A.domain;
    auto [slo, shi] = std::pair{A.support.lo, A.support.hi};
    Box suppP(Vec(slo.head(n)), Vec(shi.head(n)));
    Box suppQ(Vec(slo.tail(n)), Vec(shi.tail(n)));
    Box rp = map_box([&](const Vec& x) { return mu.apply_inverse(x); }, suppP);
    Box rq = map_box([&](const Vec& x) { return nu.apply_inverse(x); }, suppQ);
    if (A.domain.bounds) {
        rp = rp.intersection(*A.domain.bounds);
        rq = rq.intersection(*A.domain.bounds);
    }
    R.support = rp.product(rq);
    if (same_map && A.core_region) {
        Box c = map_box([&](const Vec& x) { return mu.apply_inverse(x); },
                        *A.core_region, 9, -0.02);
        R.core_region = c;
    }
    const double scale = A.domain.scale();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            TransportOperator Acopy = A;  // shared_ptr entries, cheap
            Diffeomorphism m = mu, v = nu;
            R.entries.push_back(lambda_fn(
                2 * n,
                [Acopy, m, v, i, j, n](const Vec& pq) {
                    Vec p = pq.head(n), q = pq.tail(n);
                    Mat Jm = m.jacobian(p);
                    Mat Jv = v.jacobian(q);
                    Mat val = Jv.inverse() * Acopy.matrix(m.apply(p), v.apply(q)) * Jm;
                    return val(i, j);
                },
                scale));
        }
    return R;
}

TransportOperator lie_derivative_transport(const TensorField& X, const TensorField& Y,
                                           const TransportOperator& A,
                                           const TransportLieConfig& cfg) {
    const int n = A.dim();
    if (X.domain.dim != n || Y.domain.dim != n)
        throw Error("lie_derivative_transport: dimension mismatch");

    // pullback under the pair of flows at time tau, evaluated at (p,q)
    auto pulled = [X, Y, A, cfg, n](double tau, const Vec& p, const Vec& q) -> Mat {
        auto [fp, Jp] = flow_with_jacobian(X, tau, p, cfg.ode);
        auto [fq, Jq] = flow_with_jacobian(Y, tau, q, cfg.ode);
        return Jq.inverse() * A.matrix(fp, fq) * Jp;
    };
    auto diff = [pulled](double tau, const Vec& p, const Vec& q) -> Mat {
        return (pulled(tau, p, q) - pulled(-tau, p, q)) / (2.0 * tau);
    };

    TransportOperator R;
    R.domain = A.domain;
    // inflate the support by the distance flows can move in time tau
    double speed = 0.0;
    for (const auto& pq : A.support.lattice(4)) {
        speed = std::max(speed, X.vec(pq.head(n)).cwiseAbs().maxCoeff());
        speed = std::max(speed, Y.vec(pq.tail(n)).cwiseAbs().maxCoeff());
    }
    Box supp = A.support.inflated(2.0 * cfg.tau * speed + 1e-9);
    if (A.domain.bounds) {
        Box d2 = A.domain.bounds->product(*A.domain.bounds);
        supp = supp.intersection(d2);
    }
    R.support = supp;

    bool same_xy = X.comps == Y.comps;
    if (same_xy && A.core_region) R.kernel_region = A.core_region;

    const double scale = A.domain.scale();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto cfgc = cfg;
            R.entries.push_back(lambda_fn(
                2 * n,
                [diff, cfgc, i, j, n](const Vec& pq) {
                    Vec p = pq.head(n), q = pq.tail(n);
                    if (!cfgc.richardson) return diff(cfgc.tau, p, q)(i, j);
                    Mat d1 = diff(cfgc.tau, p, q);
                    Mat d2 = diff(0.5 * cfgc.tau, p, q);
                    return ((4.0 * d2 - d1) / 3.0)(i, j);
                },
                scale));
        }
    return R;
}

TransportOperator build_geodesic_transport(const RiemannianMetric& g, ScalarFn chi,
                                           const Box& support2n, const Box& core,
                                           const Box& K, int ode_steps) {
    const int n = g.domain.dim;
    if (chi->dim() != 2 * n) throw Error("build_geodesic_transport: chi must be over (p,q)");
    if (!core.contains(K))
        throw Error("build_geodesic_transport: K not inside the chi == 1 region");
    for (const auto& p : K.lattice(5)) {
        Vec pp(2 * n);
        pp << p, p;
        if (std::fabs(chi->value(pp) - 1.0) > 1e-12)
            throw Error("build_geodesic_transport: chi(p,p) != 1 near K");
    }
    TransportOperator A;
    A.domain = g.domain;
    A.support = support2n;
    A.core_region = core;
    const double scale = g.domain.scale();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            RiemannianMetric gc = g;
            ScalarFn chic = chi;
            A.entries.push_back(lambda_fn(
                2 * n,
                [gc, chic, i, j, n, ode_steps](const Vec& pq) {
                    const double c = chic->value(pq);
                    if (c == 0.0) return 0.0;
                    Vec p = pq.head(n), q = pq.tail(n);
                    Mat T = geodesic_parallel_transport(gc, p, q, ode_steps);
                    return c * T(i, j);
                },
                scale));
        }
    return A;
}

TransportOperator two_point_to_transport(const TwoPointTensor& ups) {
    const int n = ups.domain.dim;
    TransportOperator A;
    A.domain = ups.domain;
    A.support = ups.support;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // sum_terms f(p,q) xi^i(q) eta_j(p)
            std::vector<std::pair<double, ScalarFn>> parts;
            for (const auto& t : ups.terms)
                parts.emplace_back(
                    1.0, product_fn(t.f, product_fn(block_embed(t.xi.comps[i], n, true),
                                                    block_embed(t.eta.comps[j], n, false))));
            if (parts.empty()) parts.emplace_back(1.0, constant_fn(2 * n, 0.0));
            A.entries.push_back(sum_fn(std::move(parts), 2 * n));
        }
    if (ups.terms.empty()) {
        Vec z = Vec::Zero(n);
        A.support = Box(z, z);
        A.kernel_region = ups.domain.bounds;
    }
    return A;
}

TwoPointTensor pullback_two_point(const Diffeomorphism& mu, const Diffeomorphism& nu,
                                  const TwoPointTensor& ups) {
    const int n = ups.domain.dim;
    TwoPointTensor R;
    R.domain = ups.domain;
    auto [slo, shi] = std::pair{ups.support.lo, ups.support.hi};
    Box suppP = map_box([&](const Vec& x) { return mu.apply_inverse(x); },
                        Box(Vec(slo.head(n)), Vec(shi.head(n))));
    Box suppQ = map_box([&](const Vec& x) { return nu.apply_inverse(x); },
                        Box(Vec(slo.tail(n)), Vec(shi.tail(n))));
    if (ups.domain.bounds) {
        suppP = suppP.intersection(*ups.domain.bounds);
        suppQ = suppQ.intersection(*ups.domain.bounds);
    }
    R.support = suppP.product(suppQ);
    for (const auto& t : ups.terms) {
        TwoPointTensor::Term rt;
        // f(mu p, nu q) through the compose combinator over 2n variables
        std::vector<ScalarFn> comps;
        for (int i = 0; i < n; ++i) comps.push_back(block_embed(mu.forward[i], n, false));
        for (int i = 0; i < n; ++i) comps.push_back(block_embed(nu.forward[i], n, true));
        rt.f = compose_fn(t.f, comps);
        rt.eta = mu.pullback_tensor(t.eta);
        rt.xi = nu.pullback_tensor(t.xi);
        R.terms.push_back(std::move(rt));
    }
    return R;
}

TwoPointTensor lie_derivative_two_point(const TensorField& X, const TensorField& Y,
                                        const TwoPointTensor& ups) {
    const int n = ups.domain.dim;
    TwoPointTensor R;
    R.domain = ups.domain;
    R.support = ups.support;
    for (const auto& t : ups.terms) {
        // (L_{X,0} f + L_{0,Y} f) eta (x) xi
        std::vector<std::pair<double, ScalarFn>> df;
        for (int i = 0; i < n; ++i) {
            df.emplace_back(1.0, product_fn(block_embed(X.comps[i], n, false),
                                            partial_shift_fn(t.f, MultiIndex::unit(2 * n, i))));
            df.emplace_back(1.0, product_fn(block_embed(Y.comps[i], n, true),
                                            partial_shift_fn(t.f, MultiIndex::unit(2 * n, n + i))));
        }
        R.terms.push_back({sum_fn(std::move(df), 2 * n), t.eta, t.xi});
        // f (L_X eta (x) xi + eta (x) L_Y xi)
        R.terms.push_back({t.f, lie_derivative_tensor(X, t.eta), t.xi});
        R.terms.push_back({t.f, t.eta, lie_derivative_tensor(Y, t.xi)});
    }
    return R;
}

}  // namespace gentensor
