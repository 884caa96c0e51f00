#pragma once

#include "gentensor/fields.hpp"

namespace gentensor {

class FlowEscapeError : public Error {
public:
    using Error::Error;
};

struct OdeConfig {
    double h_ode = 1e-3;  // fixed RK4 step
};

/// Flow of a vector field at time tau from p; fixed-step RK4 with
/// ceil(|tau|/h) steps. Throws FlowEscapeError when the trajectory leaves the
/// chart domain (flows here are only locally defined).
Vec flow(const TensorField& X, double tau, const Vec& p, const OdeConfig& cfg = {});

/// Flow together with its derivative D Fl^X_tau(p), from the variational
/// equation integrated alongside.
std::pair<Vec, Mat> flow_with_jacobian(const TensorField& X, double tau, const Vec& p,
                                       const OdeConfig& cfg = {});

/// Christoffel symbols Gamma^k_{ij} of a metric at p.
std::vector<Mat> christoffel(const RiemannianMetric& g, const Vec& p);

struct GeodesicResult {
    std::vector<Vec> points;      // trajectory samples including endpoints
    Vec initial_velocity;
    Mat transport;                // parallel transport matrix T_pM -> T_qM
};

/// Parallel transport along the radial geodesic from p to q: shooting on the
/// initial velocity, then the transport ODE column by column.
/// tol_pt bounds the allowed g-isometry defect of the result.
Mat geodesic_parallel_transport(const RiemannianMetric& g, const Vec& p, const Vec& q,
                                int steps = 64, double shoot_tol = 1e-10,
                                double tol_pt = 1e-6);

}  // namespace gentensor
