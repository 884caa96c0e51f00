#pragma once

#include <cmath>
#include <vector>

#include "gentensor/chart.hpp"

namespace gentensor {

/// Truncated univariate Taylor series: coefficient k holds f^(k)(x0)/k!.
/// Arithmetic on these propagates derivatives of any order exactly, which is
/// what the 1-D mollifier profiles need (nested duals would fix the order at
/// compile time).
class TaylorSeries {
public:
    TaylorSeries() : c_(1, 0.0) {}
    explicit TaylorSeries(int order) : c_(order + 1, 0.0) {}
    static TaylorSeries constant(double v, int order) {
        TaylorSeries t(order);
        t.c_[0] = v;
        return t;
    }
    static TaylorSeries variable(double x0, int order) {
        TaylorSeries t(order);
        t.c_[0] = x0;
        if (order >= 1) t.c_[1] = 1.0;
        return t;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double coeff(int k) const { return c_[k]; }
    double& coeff(int k) { return c_[k]; }
    double value() const { return c_[0]; }
    /// k-th derivative: k! * coeff(k).
    double deriv(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c_[k] * f;
    }

    friend TaylorSeries operator+(const TaylorSeries& a, const TaylorSeries& b) {
        TaylorSeries r(a.order());
        for (int k = 0; k <= a.order(); ++k) r.c_[k] = a.c_[k] + b.c_[k];
        return r;
    }
    friend TaylorSeries operator-(const TaylorSeries& a, const TaylorSeries& b) {
        TaylorSeries r(a.order());
        for (int k = 0; k <= a.order(); ++k) r.c_[k] = a.c_[k] - b.c_[k];
        return r;
    }
    friend TaylorSeries operator*(const TaylorSeries& a, const TaylorSeries& b) {
        TaylorSeries r(a.order());
        for (int k = 0; k <= a.order(); ++k) {
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
            r.c_[k] = s;
        }
        return r;
    }
    friend TaylorSeries operator*(double s, const TaylorSeries& a) {
        TaylorSeries r(a.order());
        for (int k = 0; k <= a.order(); ++k) r.c_[k] = s * a.c_[k];
        return r;
    }
    friend TaylorSeries operator/(const TaylorSeries& a, const TaylorSeries& b) {
        if (b.c_[0] == 0.0) throw Error("TaylorSeries: division by zero value");
        TaylorSeries r(a.order());
        for (int k = 0; k <= a.order(); ++k) {
            double s = a.c_[k];
            for (int j = 0; j < k; ++j) s -= r.c_[j] * b.c_[k - j];
            r.c_[k] = s / b.c_[0];
        }
        return r;
    }

private:
    std::vector<double> c_;
};

/// exp(a), via the ODE recurrence e' = e * a'.
inline TaylorSeries ts_exp(const TaylorSeries& a) {
    const int n = a.order();
    TaylorSeries e(n);
    e.coeff(0) = std::exp(a.value());
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * a.coeff(j) * e.coeff(k - j);
        e.coeff(k) = s / k;
    }
    return e;
}

inline void ts_sincos(const TaylorSeries& a, TaylorSeries& s, TaylorSeries& c) {
    const int n = a.order();
    s = TaylorSeries(n);
    c = TaylorSeries(n);
    s.coeff(0) = std::sin(a.value());
    c.coeff(0) = std::cos(a.value());
    for (int k = 1; k <= n; ++k) {
        double ss = 0.0, cc = 0.0;
        for (int j = 1; j <= k; ++j) {
            ss += j * a.coeff(j) * c.coeff(k - j);
            cc += j * a.coeff(j) * s.coeff(k - j);
        }
        s.coeff(k) = ss / k;
        c.coeff(k) = -cc / k;
    }
}

inline TaylorSeries ts_sin(const TaylorSeries& a) {
    TaylorSeries s, c;
    ts_sincos(a, s, c);
    return s;
}
inline TaylorSeries ts_cos(const TaylorSeries& a) {
    TaylorSeries s, c;
    ts_sincos(a, s, c);
    return c;
}

inline TaylorSeries ts_tanh(const TaylorSeries& a) {
    // t' = (1 - t^2) a'; u_m = [1 - t^2]_m only needs t_0..t_m, so computing
    // t_k uses u_0..u_{k-1}, all available
    const int n = a.order();
    TaylorSeries t(n);
    t.coeff(0) = std::tanh(a.value());
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) {
            const int m = k - j;
            double tt = 0.0;
            for (int i = 0; i <= m; ++i) tt += t.coeff(i) * t.coeff(m - i);
            const double u_m = (m == 0 ? 1.0 : 0.0) - tt;
            s += j * a.coeff(j) * u_m;
        }
        t.coeff(k) = s / k;
    }
    return t;
}

inline TaylorSeries ts_log(const TaylorSeries& a) {
    if (a.value() <= 0.0) throw Error("ts_log: non-positive value");
    const int n = a.order();
    TaylorSeries l(n);
    l.coeff(0) = std::log(a.value());
    for (int k = 1; k <= n; ++k) {
        double s = k * a.coeff(k);
        for (int j = 1; j < k; ++j) s -= j * l.coeff(j) * a.coeff(k - j);
        l.coeff(k) = s / (k * a.value());
    }
    return l;
}

/// a^e for constant exponent; integer exponents handled by multiplication.
inline TaylorSeries ts_pow(const TaylorSeries& a, double e) {
    long long ei = static_cast<long long>(e);
    if (static_cast<double>(ei) == e && ei >= 0 && ei <= 64) {
        TaylorSeries r = TaylorSeries::constant(1.0, a.order());
        for (long long i = 0; i < ei; ++i) r = r * a;
        return r;
    }
    if (a.value() <= 0.0) throw Error("ts_pow: non-integer power of non-positive value");
    // p = a^e solves a p' = e p a'
    const int n = a.order();
    TaylorSeries p(n);
    p.coeff(0) = std::pow(a.value(), e);
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j)
            s += (e * j - (k - j)) * a.coeff(j) * p.coeff(k - j);
        p.coeff(k) = s / (k * a.value());
    }
    return p;
}

// Unqualified-call aliases so Expression::eval can run in Taylor arithmetic.
inline TaylorSeries exp(const TaylorSeries& a) { return ts_exp(a); }
inline TaylorSeries sin(const TaylorSeries& a) { return ts_sin(a); }
inline TaylorSeries cos(const TaylorSeries& a) { return ts_cos(a); }
inline TaylorSeries tanh(const TaylorSeries& a) { return ts_tanh(a); }
inline TaylorSeries log(const TaylorSeries& a) { return ts_log(a); }
inline TaylorSeries sqrt(const TaylorSeries& a) { return ts_pow(a, 0.5); }
inline TaylorSeries pow_scalar(const TaylorSeries& a, double e) { return ts_pow(a, e); }
inline TaylorSeries abs_smooth(const TaylorSeries& a) {
    // valid away from zeros of the value
    return (a.value() >= 0 ? 1.0 : -1.0) * a;
}
inline TaylorSeries operator*(const TaylorSeries& a, double s) { return s * a; }
inline TaylorSeries operator+(const TaylorSeries& a, double s) {
    return a + TaylorSeries::constant(s, a.order());
}

}  // namespace gentensor
