#pragma once

#include <memory>
#include <string>

#include "gentensor/fields.hpp"
#include "gentensor/order_fit.hpp"
#include "gentensor/quadrature.hpp"
#include "gentensor/taylor.hpp"

namespace gentensor {

/// 1-D mollifier profile: smooth, supported in [-1,1], unit integral after
/// normalization. Derivatives of every order come from Taylor arithmetic.
class MollifierProfile {
public:
    virtual ~MollifierProfile() = default;

    const std::string& smoothness_class() const { return class_; }
    double normalization() const { return norm_; }

    double value(double x) const { return deriv(x, 0); }
    double deriv(double x, int k) const {
        if (std::fabs(x) >= 1.0 - 1e-12) return 0.0;
        return raw_series(x, k).deriv(k) / norm_;
    }
    TaylorSeries series(double x, int order) const {
        if (std::fabs(x) >= 1.0 - 1e-12) return TaylorSeries(order);
        return (1.0 / norm_) * raw_series(x, order);
    }

    /// int x^j rho(x) dx by quadrature over [-1,1].
    double moment(int j, const QuadratureSpec& spec = {16, 8}) const;

    static std::shared_ptr<MollifierProfile> bump();
    static std::shared_ptr<MollifierProfile> cos2();
    /// User expression in x1 on (-1,1); clamped to zero outside. The caller is
    /// responsible for choosing an expression that actually vanishes at +-1.
    static std::shared_ptr<MollifierProfile> from_expr(const std::string& expr);

protected:
    MollifierProfile(std::string cls) : class_(std::move(cls)) {}
    virtual TaylorSeries raw_series(double x, int order) const = 0;
    /// Call once at the end of construction.
    void normalize();

private:
    std::string class_;
    double norm_ = 1.0;
};

using ProfilePtr = std::shared_ptr<MollifierProfile>;

/// Moment-corrected profile rho_m = P_m * rho with
/// int rho_m = 1, int x^k rho_m = 0 for 1 <= k <= m.
class CorrectedProfile {
public:
    CorrectedProfile() = default;
    CorrectedProfile(ProfilePtr base, int m, const QuadratureSpec& spec = {24, 16});

    int order() const { return m_; }
    const Vec& poly_coeffs() const { return poly_; }
    const ProfilePtr& base() const { return base_; }

    double value(double x) const { return deriv(x, 0); }
    double deriv(double x, int k) const;
    TaylorSeries series(double x, int order) const;
    double moment(int j, const QuadratureSpec& spec = {16, 8}) const;

private:
    ProfilePtr base_;
    int m_ = 0;
    Vec poly_;  // coefficients of P_m, degree m
};

/// Scaled-mollifier smoothing kernel net: Phi(eps,p) has density
/// (eps C)^-n prod_i rho_m((q_i - p_i)/(eps C)), support B-box of radius
/// eps C around p.
struct SmoothingKernel {
    ChartDomain domain;
    CorrectedProfile profile;
    int order = 0;              // m: vanishing moments 1..m
    double support_constant = 1.0;  // C

    /// Compactly supported unit-integral n-form centered at p.
    NForm at(double eps, const Vec& p) const;
    /// Density and its q-derivatives of Phi(eps,p) at q (exact).
    double density(double eps, const Vec& p, const Vec& q) const;

    /// int f(q) Phi(eps,p)(q) dq in scaled coordinates (accuracy independent
    /// of eps).
    double pair_integral(double eps, const Vec& p,
                         const std::function<double(const Vec&)>& f,
                         const QuadratureSpec& spec = {16, 8}) const;
};

struct KernelConfig {
    int m_max = 6;
    // the correction polynomial feeds every downstream pairing, so the moment
    // matrix is integrated well past the target tolerances
    QuadratureSpec moment_quadrature{24, 16};
};

/// Moment correction by polynomial multiplication; keeps support compact.
SmoothingKernel build_kernel(const ChartDomain& domain, const ProfilePtr& profile, int m,
                             double C, const KernelConfig& cfg = {});

ProfilePtr profile_by_name(const std::string& name);

struct MomentCheckConfig {
    int p_per_axis = 21;
    double slope_tol = 0.25;
    QuadratureSpec quadrature{16, 8};
    double defect_floor = 1e-8;  // sup below this counts as superconvergent
};

/// Def-style moment-order verification: per-eps sup over a p-grid on K of
/// |f(p) - int f Phi(eps,p)|, with the fitted slope compared to m+1.
/// Flags "superconvergent" (identically-zero defect) via the report.
OrderReport verify_moment_order(const SmoothingKernel& kernel, const TensorField& f,
                                const Box& K, const std::vector<double>& eps_grid,
                                const MomentCheckConfig& cfg = {});

}  // namespace gentensor
