#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gentensor {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Axis-aligned box in R^d.
struct Box {
    Vec lo, hi;

    Box() = default;
    Box(Vec l, Vec h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo.size() != hi.size()) throw Error("Box: lo/hi size mismatch");
    }
    static Box cube(int d, double l, double h) {
        return Box(Vec::Constant(d, l), Vec::Constant(d, h));
    }

    int dim() const { return static_cast<int>(lo.size()); }
    Vec center() const { return 0.5 * (lo + hi); }
    Vec widths() const { return hi - lo; }
    double volume() const { return (hi - lo).prod(); }
    double max_width() const { return (hi - lo).maxCoeff(); }

    bool contains(const Vec& x, double margin = 0.0) const {
        for (int i = 0; i < dim(); ++i)
            if (x[i] < lo[i] + margin || x[i] > hi[i] - margin) return false;
        return true;
    }
    bool contains(const Box& inner, double margin = 0.0) const {
        return contains(inner.lo, margin) && contains(inner.hi, margin);
    }
    bool intersects(const Box& other) const {
        for (int i = 0; i < dim(); ++i)
            if (other.hi[i] < lo[i] || other.lo[i] > hi[i]) return false;
        return true;
    }
    Box inflated(double r) const {
        return Box(lo.array() - r, hi.array() + r);
    }
    Box intersection(const Box& other) const {
        return Box(lo.cwiseMax(other.lo), hi.cwiseMin(other.hi));
    }
    Box hull(const Box& other) const {
        return Box(lo.cwiseMin(other.lo), hi.cwiseMax(other.hi));
    }
    /// Cartesian product box (this) x (other).
    Box product(const Box& other) const {
        Vec l(dim() + other.dim()), h(dim() + other.dim());
        l << lo, other.lo;
        h << hi, other.hi;
        return Box(l, h);
    }
    /// Uniform lattice with k points per axis (k >= 1; k == 1 gives the center).
    std::vector<Vec> lattice(int k) const {
        std::vector<Vec> pts;
        const int d = dim();
        std::vector<int> idx(d, 0);
        while (true) {
            Vec x(d);
            for (int i = 0; i < d; ++i)
                x[i] = (k == 1) ? center()[i]
                                : lo[i] + (hi[i] - lo[i]) * idx[i] / double(k - 1);
            pts.push_back(x);
            int i = 0;
            for (; i < d; ++i) {
                if (++idx[i] < k) break;
                idx[i] = 0;
            }
            if (i == d) break;
        }
        return pts;
    }
};

/// A single chart domain: an open box in R^n, or all of R^n.
struct ChartDomain {
    int dim = 1;
    std::optional<Box> bounds;  // nullopt means all of R^n

    ChartDomain() = default;
    explicit ChartDomain(int n) : dim(n) { check(); }
    ChartDomain(int n, Box b) : dim(n), bounds(std::move(b)) {
        check();
        if (bounds->dim() != dim) throw Error("ChartDomain: bounds dimension mismatch");
        if ((bounds->widths().array() <= 0).any())
            throw Error("ChartDomain: degenerate bounds");
    }

    bool contains(const Vec& x, double margin = 0.0) const {
        return !bounds || bounds->contains(x, margin);
    }
    bool contains(const Box& b, double margin = 0.0) const {
        return !bounds || bounds->contains(b, margin);
    }
    /// Characteristic length used to scale finite-difference steps.
    double scale() const { return bounds ? bounds->max_width() : 1.0; }

private:
    void check() const {
        if (dim < 1) throw Error("ChartDomain: dim must be >= 1");
    }
};

/// Multi-index of partial-derivative orders, one entry per variable.
struct MultiIndex {
    std::vector<int> orders;

    MultiIndex() = default;
    explicit MultiIndex(int d) : orders(d, 0) {}
    static MultiIndex unit(int d, int axis, int k = 1) {
        MultiIndex a(d);
        a.orders[axis] = k;
        return a;
    }

    int dim() const { return static_cast<int>(orders.size()); }
    int total() const {
        int s = 0;
        for (int o : orders) s += o;
        return s;
    }
    bool is_zero() const { return total() == 0; }
    int operator[](int i) const { return orders[i]; }
    int& operator[](int i) { return orders[i]; }

    MultiIndex plus(int axis, int k = 1) const {
        MultiIndex a = *this;
        a.orders[axis] += k;
        return a;
    }
    MultiIndex plus(const MultiIndex& b) const {
        MultiIndex a = *this;
        for (int i = 0; i < dim(); ++i) a.orders[i] += b.orders[i];
        return a;
    }
    /// Concatenate two multi-indices (for product domains).
    static MultiIndex concat(const MultiIndex& a, const MultiIndex& b) {
        MultiIndex c;
        c.orders = a.orders;
        c.orders.insert(c.orders.end(), b.orders.begin(), b.orders.end());
        return c;
    }
    /// Split into (first d, rest).
    std::pair<MultiIndex, MultiIndex> split(int d) const {
        MultiIndex a, b;
        a.orders.assign(orders.begin(), orders.begin() + d);
        b.orders.assign(orders.begin() + d, orders.end());
        return {a, b};
    }
};

/// Valence and component indexing of (r,s)-tensors over an n-dimensional
/// chart. Components are flattened row-major, contravariant slots first.
struct TensorShape {
    int n = 1;
    int r = 0;
    int s = 0;

    int slots() const { return r + s; }
    int comps() const {
        int c = 1;
        for (int i = 0; i < slots(); ++i) c *= n;
        return c;
    }
    /// Flat index from per-slot indices (size r+s).
    int flatten(const std::vector<int>& idx) const {
        int f = 0;
        for (int i = 0; i < slots(); ++i) f = f * n + idx[i];
        return f;
    }
    std::vector<int> unflatten(int flat) const {
        std::vector<int> idx(slots());
        for (int i = slots() - 1; i >= 0; --i) {
            idx[i] = flat % n;
            flat /= n;
        }
        return idx;
    }
};

/// Full contraction of an (r,s)-tensor with an (s,r)-tensor
/// (upper indices of one pair with lower indices of the other).
inline double dual_contract(const Vec& t, const Vec& tt, const TensorShape& sh) {
    TensorShape dual{sh.n, sh.s, sh.r};
    if (t.size() != sh.comps() || tt.size() != dual.comps())
        throw Error("dual_contract: component count mismatch");
    if (sh.slots() == 0) return t[0] * tt[0];
    double acc = 0.0;
    for (int f = 0; f < sh.comps(); ++f) {
        auto idx = sh.unflatten(f);
        // tensor index (I,J) pairs with (J,I) on the dual side
        std::vector<int> didx(sh.slots());
        for (int b = 0; b < sh.s; ++b) didx[b] = idx[sh.r + b];
        for (int a = 0; a < sh.r; ++a) didx[sh.s + a] = idx[a];
        acc += t[f] * tt[dual.flatten(didx)];
    }
    return acc;
}

/// Kronecker product, row-major convention matching TensorShape::flatten.
inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace gentensor
