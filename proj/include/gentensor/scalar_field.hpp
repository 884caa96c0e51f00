#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "gentensor/chart.hpp"
#include "gentensor/dual.hpp"
#include "gentensor/expression.hpp"
#include "gentensor/taylor.hpp"

namespace gentensor {

/// A scalar function of d real variables with a partial-derivative contract.
/// Subclasses override partial() when exact derivatives are available;
/// the base class falls back to high-order central finite differences with
/// steps proportional to fd_scale().
class ScalarFunction {
public:
    explicit ScalarFunction(int dim, double fd_scale = 1.0)
        : dim_(dim), fd_scale_(fd_scale) {}
    virtual ~ScalarFunction() = default;

    int dim() const { return dim_; }
    double fd_scale() const { return fd_scale_; }
    void set_fd_scale(double s) { fd_scale_ = s; }

    virtual double value(const Vec& x) const = 0;
    virtual double partial(const Vec& x, const MultiIndex& a) const {
        return fd_partial(x, a);
    }

protected:
    /// Central difference stencils, 4th-order accurate, per-axis order <= 4;
    /// mixed indices recurse axis by axis.
    double fd_partial(const Vec& x, const MultiIndex& a) const;

private:
    int dim_;
    double fd_scale_;
};

using ScalarFn = std::shared_ptr<const ScalarFunction>;

namespace detail {

template <class T>
struct is_dual : std::false_type {};
template <class U>
struct is_dual<Dual<U>> : std::true_type {};

template <class T>
T seed_var(double xv, int var, const std::vector<int>& axes, size_t depth) {
    if constexpr (is_dual<T>::value) {
        using U = decltype(T{}.re);
        return T{seed_var<U>(xv, var, axes, depth + 1),
                 axes[depth] == var ? U(1.0) : U(0.0)};
    } else {
        (void)axes;
        (void)depth;
        return xv;
    }
}

template <class T>
double top_deriv(const T& v) {
    if constexpr (is_dual<T>::value)
        return top_deriv(v.du);
    else
        return v;
}

template <int K>
struct nested_dual {
    using type = Dual<typename nested_dual<K - 1>::type>;
};
template <>
struct nested_dual<0> {
    using type = double;
};

inline double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Visit all beta <= alpha componentwise; cb(beta, multinomial coefficient).
void for_each_sub_index(const MultiIndex& alpha,
                        const std::function<void(const MultiIndex&, double)>& cb);

}  // namespace detail

// ---- constructors for the combinator algebra ----

ScalarFn constant_fn(int dim, double v);
ScalarFn coordinate_fn(int dim, int axis);
ScalarFn lambda_fn(int dim, std::function<double(const Vec&)> f, double fd_scale = 1.0);
/// Expression-backed function; partials exact through order 4 via nested
/// forward-mode dual numbers.
ScalarFn expr_fn(Expression e);
ScalarFn expr_fn(const std::string& text, int dim);
/// sum_i c_i f_i
ScalarFn sum_fn(std::vector<std::pair<double, ScalarFn>> terms, int dim);
ScalarFn product_fn(ScalarFn f, ScalarFn g);
/// x -> f^(gamma)(x)
ScalarFn partial_shift_fn(ScalarFn f, MultiIndex gamma);
/// (tail) -> F(head, tail) with the leading block of variables frozen.
ScalarFn freeze_head_fn(ScalarFn F, Vec head);
/// (head) -> F(head, tail)
ScalarFn freeze_tail_fn(ScalarFn F, Vec tail);
/// (p,q) -> F(q,p) for F over a product of two equal-size blocks.
ScalarFn swap_blocks_fn(ScalarFn F, int block_dim);
/// Lift an n-variable function to 2n variables, reading only the head block
/// (tail = false) or tail block (tail = true).
ScalarFn block_embed(ScalarFn f, int block_dim, bool tail);
/// x -> F(x, x): restriction of a two-block function to the diagonal.
ScalarFn diagonal_fn(ScalarFn F, int block_dim);
/// f(phi_1(x),...,phi_m(x)); chain rule exact to order 2, FD above.
ScalarFn compose_fn(ScalarFn f, std::vector<ScalarFn> components);
/// Smooth cutoff in one coordinate: 1 on |x_axis - c| <= a, 0 for
/// |x_axis - c| >= a + w, bump-smooth in between.
ScalarFn axis_plateau_fn(int dim, int axis, double c, double a, double w);
/// Standard compact bump in one coordinate: exp(-1/(1-u^2)) for
/// u = (x_axis - c)/w inside (-1,1), zero outside; exact derivatives of all
/// orders.
ScalarFn axis_bump_fn(int dim, int axis, double c, double w);

/// Convenience: evaluate f restricted so that only value/first partials of a
/// vector of fields are needed.
inline double partial1(const ScalarFunction& f, const Vec& x, int axis) {
    return f.partial(x, MultiIndex::unit(f.dim(), axis));
}

}  // namespace gentensor
