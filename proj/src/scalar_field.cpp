#include "gentensor/scalar_field.hpp"

#include <cmath>

namespace gentensor {

namespace {

// step sizes per derivative order, relative to fd_scale
constexpr double kStep[5] = {0.0, 1e-4, 1e-3, 3e-3, 1e-2};

struct Stencil {
    int halfwidth;
    double denom_pow;  // h exponent
    const double* coeffs;
};

// 4th-order accurate central stencils (Fornberg weights), offsets -hw..hw
const double kC1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
const double kC2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
const double kC3[7] = {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8};
const double kC4[7] = {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6};

Stencil stencil_for(int k) {
    switch (k) {
        case 1: return {2, 1, kC1};
        case 2: return {2, 2, kC2};
        case 3: return {3, 3, kC3};
        case 4: return {3, 4, kC4};
        default: throw Error("fd stencil: unsupported order");
    }
}

}  // namespace

double ScalarFunction::fd_partial(const Vec& x, const MultiIndex& a) const {
    if (a.dim() != dim_) throw Error("partial: multi-index dimension mismatch");
    if (a.is_zero()) return value(x);
    int axis = 0;
    while (a[axis] == 0) ++axis;
    int k = a[axis];
    MultiIndex rest = a;
    // consume up to 4 orders of this axis in one stencil application
    const int kk = std::min(k, 4);
    rest[axis] -= kk;
    const Stencil st = stencil_for(kk);
    const double h = kStep[kk] * std::max(fd_scale_, 1e-12);
    double acc = 0.0;
    Vec xs = x;
    for (int off = -st.halfwidth; off <= st.halfwidth; ++off) {
        const double c = st.coeffs[off + st.halfwidth];
        if (c == 0.0) continue;
        xs[axis] = x[axis] + off * h;
        acc += c * (rest.is_zero() ? value(xs) : partial(xs, rest));
    }
    return acc / std::pow(h, st.denom_pow);
}

namespace detail {

void for_each_sub_index(const MultiIndex& alpha,
                        const std::function<void(const MultiIndex&, double)>& cb) {
    const int d = alpha.dim();
    MultiIndex beta(d);
    std::function<void(int, double)> rec = [&](int axis, double coeff) {
        if (axis == d) {
            cb(beta, coeff);
            return;
        }
        for (int k = 0; k <= alpha[axis]; ++k) {
            beta[axis] = k;
            rec(axis + 1, coeff * binom(alpha[axis], k));
        }
        beta[axis] = 0;
    };
    rec(0, 1.0);
}

}  // namespace detail

namespace {

class ConstantFn final : public ScalarFunction {
public:
    ConstantFn(int dim, double v) : ScalarFunction(dim), v_(v) {}
    double value(const Vec&) const override { return v_; }
    double partial(const Vec&, const MultiIndex& a) const override {
        return a.is_zero() ? v_ : 0.0;
    }

private:
    double v_;
};

class CoordinateFn final : public ScalarFunction {
public:
    CoordinateFn(int dim, int axis) : ScalarFunction(dim), axis_(axis) {}
    double value(const Vec& x) const override { return x[axis_]; }
    double partial(const Vec& x, const MultiIndex& a) const override {
        if (a.is_zero()) return x[axis_];
        if (a.total() == 1 && a[axis_] == 1) return 1.0;
        return 0.0;
    }

private:
    int axis_;
};

class LambdaFn final : public ScalarFunction {
public:
    LambdaFn(int dim, std::function<double(const Vec&)> f, double s)
        : ScalarFunction(dim, s), f_(std::move(f)) {}
    double value(const Vec& x) const override { return f_(x); }

private:
    std::function<double(const Vec&)> f_;
};

class ExprFn final : public ScalarFunction {
public:
    explicit ExprFn(Expression e) : ScalarFunction(e.nvars()), e_(std::move(e)) {}
    double value(const Vec& x) const override { return e_(x); }
    double partial(const Vec& x, const MultiIndex& a) const override {
        const int k = a.total();
        if (k == 0) return e_(x);
        if (k > 4) return fd_partial(x, a);
        std::vector<int> axes;
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a[i]; ++j) axes.push_back(i);
        switch (k) {
            case 1: return eval_nested<1>(x, axes);
            case 2: return eval_nested<2>(x, axes);
            case 3: return eval_nested<3>(x, axes);
            default: return eval_nested<4>(x, axes);
        }
    }

private:
    Expression e_;

    template <int K>
    double eval_nested(const Vec& x, const std::vector<int>& axes) const {
        using T = typename detail::nested_dual<K>::type;
        std::vector<T> vars(dim());
        for (int i = 0; i < dim(); ++i)
            vars[i] = detail::seed_var<T>(x[i], i, axes, 0);
        return detail::top_deriv(e_.eval(vars));
    }
};

class SumFn final : public ScalarFunction {
public:
    SumFn(std::vector<std::pair<double, ScalarFn>> terms, int dim)
        : ScalarFunction(dim), terms_(std::move(terms)) {
        double s = 1.0;
        for (auto& [c, f] : terms_) {
            if (f->dim() != dim) throw Error("sum_fn: dimension mismatch");
            s = std::max(s, f->fd_scale());
        }
        set_fd_scale(s);
    }
    double value(const Vec& x) const override {
        double acc = 0.0;
        for (const auto& [c, f] : terms_) acc += c * f->value(x);
        return acc;
    }
    double partial(const Vec& x, const MultiIndex& a) const override {
        double acc = 0.0;
        for (const auto& [c, f] : terms_) acc += c * f->partial(x, a);
        return acc;
    }

private:
    std::vector<std::pair<double, ScalarFn>> terms_;
};

class ProductFn final : public ScalarFunction {
public:
    ProductFn(ScalarFn f, ScalarFn g)
        : ScalarFunction(f->dim(), std::max(f->fd_scale(), g->fd_scale())),
          f_(std::move(f)),
          g_(std::move(g)) {
        if (f_->dim() != g_->dim()) throw Error("product_fn: dimension mismatch");
    }
    double value(const Vec& x) const override { return f_->value(x) * g_->value(x); }
    double partial(const Vec& x, const MultiIndex& a) const override {
        if (a.is_zero()) return value(x);
        double acc = 0.0;
        detail::for_each_sub_index(a, [&](const MultiIndex& b, double coeff) {
            MultiIndex rest(a.dim());
            for (int i = 0; i < a.dim(); ++i) rest[i] = a[i] - b[i];
            acc += coeff * f_->partial(x, b) * g_->partial(x, rest);
        });
        return acc;
    }

private:
    ScalarFn f_, g_;
};

class PartialShiftFn final : public ScalarFunction {
public:
    PartialShiftFn(ScalarFn f, MultiIndex gamma)
        : ScalarFunction(f->dim(), f->fd_scale()), f_(std::move(f)), g_(std::move(gamma)) {}
    double value(const Vec& x) const override { return f_->partial(x, g_); }
    double partial(const Vec& x, const MultiIndex& a) const override {
        return f_->partial(x, a.plus(g_));
    }

private:
    ScalarFn f_;
    MultiIndex g_;
};

class FreezeHeadFn final : public ScalarFunction {
public:
    FreezeHeadFn(ScalarFn F, Vec head)
        : ScalarFunction(F->dim() - static_cast<int>(head.size()), F->fd_scale()),
          F_(std::move(F)),
          head_(std::move(head)) {}
    double value(const Vec& x) const override { return F_->value(join(x)); }
    double partial(const Vec& x, const MultiIndex& a) const override {
        MultiIndex full = MultiIndex::concat(MultiIndex(static_cast<int>(head_.size())), a);
        return F_->partial(join(x), full);
    }

private:
    ScalarFn F_;
    Vec head_;
    Vec join(const Vec& x) const {
        Vec y(head_.size() + x.size());
        y << head_, x;
        return y;
    }
};

class FreezeTailFn final : public ScalarFunction {
public:
    FreezeTailFn(ScalarFn F, Vec tail)
        : ScalarFunction(F->dim() - static_cast<int>(tail.size()), F->fd_scale()),
          F_(std::move(F)),
          tail_(std::move(tail)) {}
    double value(const Vec& x) const override { return F_->value(join(x)); }
    double partial(const Vec& x, const MultiIndex& a) const override {
        MultiIndex full = MultiIndex::concat(a, MultiIndex(static_cast<int>(tail_.size())));
        return F_->partial(join(x), full);
    }

private:
    ScalarFn F_;
    Vec tail_;
    Vec join(const Vec& x) const {
        Vec y(x.size() + tail_.size());
        y << x, tail_;
        return y;
    }
};

class SwapBlocksFn final : public ScalarFunction {
public:
    SwapBlocksFn(ScalarFn F, int block)
        : ScalarFunction(F->dim(), F->fd_scale()), F_(std::move(F)), b_(block) {
        if (F_->dim() != 2 * b_) throw Error("swap_blocks_fn: dim must be 2*block");
    }
    double value(const Vec& x) const override { return F_->value(swap(x)); }
    double partial(const Vec& x, const MultiIndex& a) const override {
        auto [h, t] = a.split(b_);
        return F_->partial(swap(x), MultiIndex::concat(t, h));
    }

private:
    ScalarFn F_;
    int b_;
    Vec swap(const Vec& x) const {
        Vec y(2 * b_);
        y << x.tail(b_), x.head(b_);
        return y;
    }
};

class BlockEmbedFn final : public ScalarFunction {
public:
    BlockEmbedFn(ScalarFn f, int block, bool tail)
        : ScalarFunction(2 * block, f->fd_scale()), f_(std::move(f)), b_(block), tail_(tail) {
        if (f_->dim() != b_) throw Error("block_embed: inner function dim mismatch");
    }
    double value(const Vec& x) const override {
        return f_->value(tail_ ? Vec(x.tail(b_)) : Vec(x.head(b_)));
    }
    double partial(const Vec& x, const MultiIndex& a) const override {
        auto [h, t] = a.split(b_);
        const MultiIndex& other = tail_ ? h : t;
        if (other.total() > 0) return 0.0;
        return f_->partial(tail_ ? Vec(x.tail(b_)) : Vec(x.head(b_)), tail_ ? t : h);
    }

private:
    ScalarFn f_;
    int b_;
    bool tail_;
};

class DiagonalFn final : public ScalarFunction {
public:
    DiagonalFn(ScalarFn F, int block)
        : ScalarFunction(block, F->fd_scale()), F_(std::move(F)), b_(block) {
        if (F_->dim() != 2 * b_) throw Error("diagonal_fn: dim must be 2*block");
    }
    double value(const Vec& x) const override {
        Vec y(2 * b_);
        y << x, x;
        return F_->value(y);
    }
    double partial(const Vec& x, const MultiIndex& a) const override {
        // d/dx = d/dp + d/dq on the diagonal; expand over block splittings
        Vec y(2 * b_);
        y << x, x;
        double acc = 0.0;
        detail::for_each_sub_index(a, [&](const MultiIndex& b, double coeff) {
            MultiIndex rest(a.dim());
            for (int i = 0; i < a.dim(); ++i) rest[i] = a[i] - b[i];
            acc += coeff * F_->partial(y, MultiIndex::concat(b, rest));
        });
        return acc;
    }

private:
    ScalarFn F_;
    int b_;
};

class ComposeFn final : public ScalarFunction {
public:
    ComposeFn(ScalarFn f, std::vector<ScalarFn> comps)
        : ScalarFunction(comps.empty() ? 0 : comps[0]->dim()),
          f_(std::move(f)),
          comps_(std::move(comps)) {
        if (static_cast<int>(comps_.size()) != f_->dim())
            throw Error("compose_fn: inner map arity mismatch");
        double s = 1.0;
        for (const auto& c : comps_) s = std::max(s, c->fd_scale());
        set_fd_scale(s);
    }
    double value(const Vec& x) const override { return f_->value(inner(x)); }
    double partial(const Vec& x, const MultiIndex& a) const override {
        const int k = a.total();
        if (k == 0) return value(x);
        const int m = f_->dim();
        const Vec y = inner(x);
        if (k == 1) {
            int i = 0;
            while (a[i] == 0) ++i;
            double acc = 0.0;
            for (int c = 0; c < m; ++c)
                acc += f_->partial(y, MultiIndex::unit(m, c)) *
                       comps_[c]->partial(x, MultiIndex::unit(dim(), i));
            return acc;
        }
        if (k == 2) {
            int i = -1, j = -1;
            for (int t = 0; t < a.dim(); ++t) {
                for (int rep = 0; rep < a[t]; ++rep) {
                    if (i < 0) i = t;
                    else j = t;
                }
            }
            const MultiIndex ei = MultiIndex::unit(dim(), i);
            const MultiIndex ej = MultiIndex::unit(dim(), j);
            double acc = 0.0;
            for (int c = 0; c < m; ++c) {
                for (int d = 0; d < m; ++d)
                    acc += f_->partial(y, MultiIndex::unit(m, c).plus(d)) *
                           comps_[c]->partial(x, ei) * comps_[d]->partial(x, ej);
                acc += f_->partial(y, MultiIndex::unit(m, c)) *
                       comps_[c]->partial(x, ei.plus(ej));
            }
            return acc;
        }
        return fd_partial(x, a);
    }

private:
    ScalarFn f_;
    std::vector<ScalarFn> comps_;
    Vec inner(const Vec& x) const {
        Vec y(f_->dim());
        for (int c = 0; c < f_->dim(); ++c) y[c] = comps_[c]->value(x);
        return y;
    }
};

// Smooth drop from 1 to 0 on [0,1] built from the standard bump:
// g(t) = (int_t^1 b) / (int_0^1 b), b(u) = exp(-1/(u(1-u))).
class PlateauFn final : public ScalarFunction {
public:
    PlateauFn(int dim, int axis, double c, double a, double w)
        : ScalarFunction(dim), axis_(axis), c_(c), a_(a), w_(w) {
        if (a_ < 0 || w_ <= 0) throw Error("axis_plateau_fn: need a >= 0, w > 0");
    }
    double value(const Vec& x) const override { return eval_deriv(x, 0); }
    double partial(const Vec& x, const MultiIndex& al) const override {
        for (int i = 0; i < al.dim(); ++i)
            if (i != axis_ && al[i] > 0) return 0.0;
        return eval_deriv(x, al[axis_]);
    }

private:
    int axis_;
    double c_, a_, w_;

    static double bump01(double u) {
        if (u <= 0.0 || u >= 1.0) return 0.0;
        return std::exp(-1.0 / (u * (1.0 - u)));
    }
    // composite Simpson over [0,t]; the same rule at t=1 defines the norm so
    // that g(0) = 1 holds exactly at the plateau seam
    static double bump01_cum(double t) {
        const int N = 2048;
        const double h = t / N;
        double s = bump01(0.0) + bump01(t);
        for (int i = 1; i < N; ++i) s += (i % 2 ? 4.0 : 2.0) * bump01(i * h);
        return s * h / 3.0;
    }
    static double bump01_norm() {
        static const double n = bump01_cum(1.0);
        return n;
    }
    double eval_deriv(const Vec& x, int k) const {
        const double u = std::fabs(x[axis_] - c_);
        if (u <= a_) return k == 0 ? 1.0 : 0.0;
        if (u >= a_ + w_) return 0.0;
        const double t = (u - a_) / w_;
        const double sign = (x[axis_] - c_) >= 0 ? 1.0 : -1.0;
        if (k == 0) return 1.0 - bump01_cum(t) / bump01_norm();
        // k-th derivative: g^(k)(t) = -b^(k-1)(t)/norm, then the chain factor
        TaylorSeries tv = TaylorSeries::variable(t, k - 1);
        TaylorSeries b = ts_exp(TaylorSeries::constant(-1.0, k - 1) /
                                (tv * (TaylorSeries::constant(1.0, k - 1) - tv)));
        const double gk = -b.deriv(k - 1) / bump01_norm();
        return gk * std::pow(sign / w_, k);
    }
};

class AxisBumpFn final : public ScalarFunction {
public:
    AxisBumpFn(int dim, int axis, double c, double w)
        : ScalarFunction(dim), axis_(axis), c_(c), w_(w) {
        if (w_ <= 0) throw Error("axis_bump_fn: halfwidth must be positive");
    }
    double value(const Vec& x) const override { return eval_deriv(x, 0); }
    double partial(const Vec& x, const MultiIndex& al) const override {
        for (int i = 0; i < al.dim(); ++i)
            if (i != axis_ && al[i] > 0) return 0.0;
        return eval_deriv(x, al[axis_]);
    }

private:
    int axis_;
    double c_, w_;

    double eval_deriv(const Vec& x, int k) const {
        const double u = (x[axis_] - c_) / w_;
        if (std::fabs(u) >= 1.0 - 1e-12) return 0.0;
        TaylorSeries uv = TaylorSeries::variable(u, k);
        TaylorSeries one = TaylorSeries::constant(1.0, k);
        TaylorSeries b = ts_exp(TaylorSeries::constant(-1.0, k) / (one - uv * uv));
        return b.deriv(k) / std::pow(w_, k);
    }
};

}  // namespace

ScalarFn constant_fn(int dim, double v) { return std::make_shared<ConstantFn>(dim, v); }
ScalarFn coordinate_fn(int dim, int axis) {
    return std::make_shared<CoordinateFn>(dim, axis);
}
ScalarFn lambda_fn(int dim, std::function<double(const Vec&)> f, double fd_scale) {
    return std::make_shared<LambdaFn>(dim, std::move(f), fd_scale);
}
ScalarFn expr_fn(Expression e) { return std::make_shared<ExprFn>(std::move(e)); }
ScalarFn expr_fn(const std::string& text, int dim) {
    return std::make_shared<ExprFn>(Expression::parse(text, dim));
}
ScalarFn sum_fn(std::vector<std::pair<double, ScalarFn>> terms, int dim) {
    return std::make_shared<SumFn>(std::move(terms), dim);
}
ScalarFn product_fn(ScalarFn f, ScalarFn g) {
    return std::make_shared<ProductFn>(std::move(f), std::move(g));
}
ScalarFn partial_shift_fn(ScalarFn f, MultiIndex gamma) {
    return std::make_shared<PartialShiftFn>(std::move(f), std::move(gamma));
}
ScalarFn freeze_head_fn(ScalarFn F, Vec head) {
    return std::make_shared<FreezeHeadFn>(std::move(F), std::move(head));
}
ScalarFn freeze_tail_fn(ScalarFn F, Vec tail) {
    return std::make_shared<FreezeTailFn>(std::move(F), std::move(tail));
}
ScalarFn swap_blocks_fn(ScalarFn F, int block_dim) {
    return std::make_shared<SwapBlocksFn>(std::move(F), block_dim);
}
ScalarFn block_embed(ScalarFn f, int block_dim, bool tail) {
    return std::make_shared<BlockEmbedFn>(std::move(f), block_dim, tail);
}
ScalarFn diagonal_fn(ScalarFn F, int block_dim) {
    return std::make_shared<DiagonalFn>(std::move(F), block_dim);
}
ScalarFn compose_fn(ScalarFn f, std::vector<ScalarFn> components) {
    return std::make_shared<ComposeFn>(std::move(f), std::move(components));
}
ScalarFn axis_plateau_fn(int dim, int axis, double c, double a, double w) {
    return std::make_shared<PlateauFn>(dim, axis, c, a, w);
}
ScalarFn axis_bump_fn(int dim, int axis, double c, double w) {
    return std::make_shared<AxisBumpFn>(dim, axis, c, w);
}

}  // namespace gentensor
