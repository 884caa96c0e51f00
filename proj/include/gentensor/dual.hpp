#pragma once

#include <cmath>
#include <type_traits>

namespace gentensor {

/// Forward-mode dual number. Nesting Dual<Dual<...>> yields exact mixed
/// partial derivatives up to the nesting depth.
template <class T>
struct Dual {
    T re{};  // value
    T du{};  // derivative part

    Dual() = default;
    Dual(double v) : re(v), du(T{}) {}  // NOLINT: implicit from constants
    Dual(T v, T d) : re(std::move(v)), du(std::move(d)) {}

    Dual operator-() const { return {-re, -du}; }
    Dual& operator+=(const Dual& o) {
        re += o.re;
        du += o.du;
        return *this;
    }
};

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
    return {a.re + b.re, a.du + b.du};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
    return {a.re - b.re, a.du - b.du};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return {a.re * b.re, a.re * b.du + a.du * b.re};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    T q = a.re / b.re;
    return {q, (a.du - q * b.du) / b.re};
}

using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tanh;

template <class T>
Dual<T> exp(const Dual<T>& a) {
    T e = exp(a.re);
    return {e, e * a.du};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
    return {log(a.re), a.du / a.re};
}
template <class T>
Dual<T> sin(const Dual<T>& a) {
    return {sin(a.re), cos(a.re) * a.du};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
    return {cos(a.re), T(-1.0) * sin(a.re) * a.du};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
    T t = tanh(a.re);
    return {t, (T(1.0) - t * t) * a.du};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
    T s = sqrt(a.re);
    return {s, a.du / (T(2.0) * s)};
}

inline double pow_scalar(double x, double e) { return std::pow(x, e); }

/// x^e for constant exponent e; integer exponents stay valid for x <= 0.
template <class T>
Dual<T> pow_scalar(const Dual<T>& a, double e) {
    if (e == 0.0) return {T(1.0), T(0.0) * a.du};
    long long ei = static_cast<long long>(e);
    if (static_cast<double>(ei) == e && ei >= 0 && ei <= 64) {
        // repeated multiplication keeps negative bases exact
        Dual<T> acc{T(1.0), T(0.0) * a.du};
        Dual<T> base = a;
        long long k = ei;
        while (k > 0) {
            if (k & 1) acc = acc * base;
            base = base * base;
            k >>= 1;
        }
        return acc;
    }
    T v = pow_scalar(a.re, e);
    T d = pow_scalar(a.re, e - 1.0);
    return {v, T(e) * d * a.du};
}

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& a) {
    return value_of(a.re);
}

inline double abs_smooth(double x) { return std::fabs(x); }
template <class T>
Dual<T> abs_smooth(const Dual<T>& a) {
    // derivative of |x| away from 0; sign(0) treated as 0
    double s = value_of(a.re) > 0 ? 1.0 : (value_of(a.re) < 0 ? -1.0 : 0.0);
    return {abs_smooth(a.re), T(s) * a.du};
}

}  // namespace gentensor
