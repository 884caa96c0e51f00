#include "gentensor/geometry.hpp"

#include <cmath>

namespace gentensor {

namespace {

void check_inside(const ChartDomain& dom, const Vec& p) {
    if (!dom.contains(p))
        throw FlowEscapeError("flow: trajectory left the chart domain");
}

}  // namespace

Vec flow(const TensorField& X, double tau, const Vec& p, const OdeConfig& cfg) {
    if (!X.is_vector()) throw Error("flow: X must be a vector field");
    check_inside(X.domain, p);
    if (tau == 0.0) return p;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::fabs(tau) / cfg.h_ode)));
    const double h = tau / steps;
    Vec y = p;
    for (int s = 0; s < steps; ++s) {
        Vec k1 = X.vec(y);
        Vec k2 = X.vec(y + 0.5 * h * k1);
        Vec k3 = X.vec(y + 0.5 * h * k2);
        Vec k4 = X.vec(y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_inside(X.domain, y);
    }
    return y;
}

std::pair<Vec, Mat> flow_with_jacobian(const TensorField& X, double tau, const Vec& p,
                                       const OdeConfig& cfg) {
    if (!X.is_vector()) throw Error("flow: X must be a vector field");
    const int n = X.domain.dim;
    check_inside(X.domain, p);
    Mat J = Mat::Identity(n, n);
    if (tau == 0.0) return {p, J};

    auto dX = [&](const Vec& y) {
        Mat D(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                D(i, j) = X.comps[i]->partial(y, MultiIndex::unit(n, j));
        return D;
    };

    const int steps = std::max(1, static_cast<int>(std::ceil(std::fabs(tau) / cfg.h_ode)));
    const double h = tau / steps;
    Vec y = p;
    for (int s = 0; s < steps; ++s) {
        // coupled RK4 on (y, J): ydot = X(y), Jdot = DX(y) J
        Vec k1 = X.vec(y);
        Mat K1 = dX(y) * J;
        Vec y2 = y + 0.5 * h * k1;
        Vec k2 = X.vec(y2);
        Mat K2 = dX(y2) * (J + 0.5 * h * K1);
        Vec y3 = y + 0.5 * h * k2;
        Vec k3 = X.vec(y3);
        Mat K3 = dX(y3) * (J + 0.5 * h * K2);
        Vec y4 = y + h * k3;
        Vec k4 = X.vec(y4);
        Mat K4 = dX(y4) * (J + h * K3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        J += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
        check_inside(X.domain, y);
    }
    return {y, J};
}

std::vector<Mat> christoffel(const RiemannianMetric& g, const Vec& p) {
    const int n = g.domain.dim;
    Mat G = g.matrix(p);
    Mat Ginv = G.inverse();
    std::vector<Mat> dG(n);
    for (int a = 0; a < n; ++a) dG[a] = g.matrix_partial(p, a);
    std::vector<Mat> Gam(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += Ginv(k, l) * (dG[i](l, j) + dG[j](l, i) - dG[l](i, j));
                Gam[k](i, j) = 0.5 * s;
            }
    return Gam;
}

namespace {

// one RK4 step of the combined geodesic + transport system
// state: (x, v, A) with xdot = v, vdot^k = -Gam^k_ij v^i v^j,
// Adot^k_m = -Gam^k_ij v^i A^j_m
struct GeoState {
    Vec x, v;
    Mat A;
};

GeoState geo_rhs(const RiemannianMetric& g, const GeoState& s) {
    const int n = s.x.size();
    auto Gam = christoffel(g, s.x);
    GeoState d;
    d.x = s.v;
    d.v = Vec::Zero(n);
    d.A = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        d.v[k] = -s.v.dot(Gam[k] * s.v);
        for (int m = 0; m < n; ++m) d.A(k, m) = -s.v.dot(Gam[k] * s.A.col(m));
    }
    return d;
}

GeoState geo_step(const RiemannianMetric& g, const GeoState& s, double h) {
    auto add = [](const GeoState& a, double c, const GeoState& b) {
        return GeoState{a.x + c * b.x, a.v + c * b.v, a.A + c * b.A};
    };
    GeoState k1 = geo_rhs(g, s);
    GeoState k2 = geo_rhs(g, add(s, 0.5 * h, k1));
    GeoState k3 = geo_rhs(g, add(s, 0.5 * h, k2));
    GeoState k4 = geo_rhs(g, add(s, h, k3));
    GeoState out = s;
    out.x += (h / 6.0) * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    out.v += (h / 6.0) * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
    out.A += (h / 6.0) * (k1.A + 2 * k2.A + 2 * k3.A + k4.A);
    return out;
}

// integrate unit-time geodesic with initial velocity v0; returns final state
GeoState geo_shoot(const RiemannianMetric& g, const Vec& p, const Vec& v0, int steps) {
    GeoState s{p, v0, Mat::Identity(p.size(), p.size())};
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) s = geo_step(g, s, h);
    return s;
}

}  // namespace

Mat geodesic_parallel_transport(const RiemannianMetric& g, const Vec& p, const Vec& q,
                                int steps, double shoot_tol, double tol_pt) {
    const int n = g.domain.dim;
    if ((q - p).norm() > g.injectivity_radius)
        throw Error("geodesic_parallel_transport: q beyond the configured radius of p");
    if ((q - p).norm() == 0.0) return Mat::Identity(n, n);

    // Newton on the endpoint map F(v0) = x(1; p, v0) - q
    Vec v0 = q - p;
    const double fd = 1e-6 * std::max(1.0, (q - p).norm());
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        GeoState end = geo_shoot(g, p, v0, steps);
        Vec F = end.x - q;
        if (F.norm() < shoot_tol) {
            converged = true;
            break;
        }
        Mat J(n, n);
        for (int j = 0; j < n; ++j) {
            Vec vp = v0;
            vp[j] += fd;
            J.col(j) = (geo_shoot(g, p, vp, steps).x - end.x) / fd;
        }
        Vec dv = J.partialPivLu().solve(F);
        v0 -= dv;
        if (!v0.allFinite())
            throw Error("geodesic_parallel_transport: shooting diverged");
    }
    GeoState end = geo_shoot(g, p, v0, steps);
    if (!converged && (end.x - q).norm() > 1e3 * shoot_tol)
        throw Error("geodesic_parallel_transport: shooting failed to converge");

    // transport must be a g-isometry; verify on the standard basis
    Mat Gp = g.matrix(p), Gq = g.matrix(q);
    Mat defect = end.A.transpose() * Gq * end.A - Gp;
    if (defect.cwiseAbs().maxCoeff() > tol_pt)
        throw Error("geodesic_parallel_transport: transport is not g-isometric");
    return end.A;
}

}  // namespace gentensor
