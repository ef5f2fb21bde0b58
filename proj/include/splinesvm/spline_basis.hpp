// Uniform B-spline bases, coefficient difference matrices, and the
// inverse-transpose / L transforms that turn a difference-penalized
// spline objective into a plain L2-regularized linear one.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "splinesvm/sparse_vec.hpp"

namespace splinesvm {

inline constexpr int kMaxSplineDegree = 3;
inline constexpr int kMaxRegOrder = 2;

/// One dimension's uniform B-spline embedding: degree r in {1,2,3},
/// N bins over [lo, hi), difference-penalty order d in {0,1,2}.
/// The basis has n = N + r functions so every in-range point is covered
/// by exactly r+1 of them.
struct BSplineSpec {
    int degree = 1;     ///< spline degree r
    int bins = 10;      ///< interval count N
    double lo = 0.0;
    double hi = 1.0;
    int reg_order = 1;  ///< coefficient-difference order d

    std::size_t basis_count() const noexcept {
        return static_cast<std::size_t>(bins + degree);
    }

    double bin_width() const noexcept { return (hi - lo) / bins; }

    void validate() const {
        if (degree < 1 || degree > kMaxSplineDegree)
            throw std::invalid_argument("BSplineSpec: degree must be 1, 2 or 3");
        if (bins < 1) throw std::invalid_argument("BSplineSpec: bins must be >= 1");
        if (!(hi > lo)) throw std::invalid_argument("BSplineSpec: hi must exceed lo");
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("BSplineSpec: range must be finite");
        if (reg_order < 0 || reg_order > kMaxRegOrder)
            throw std::invalid_argument("BSplineSpec: reg_order must be 0, 1 or 2");
    }

    bool operator==(const BSplineSpec&) const = default;
};

/// Weights of the r+1 uniform B-spline basis functions covering local
/// parameter t in [0,1]; out[j] belongs to basis (span - r + j).
/// Cox-de Boor recursion specialized to unit knot spacing; the linear
/// case short-circuits to the closed-form hat.
inline void bspline_weights(int degree, double t, std::span<double> out) {
    assert(degree >= 1 && degree <= kMaxSplineDegree);
    assert(out.size() >= static_cast<std::size_t>(degree) + 1);
    if (degree == 1) {
        out[0] = 1.0 - t;
        out[1] = t;
        return;
    }
    out[0] = 1.0;
    for (int p = 1; p <= degree; ++p) {
        out[p] = 0.0;
        for (int j = p; j >= 0; --j) {
            const double lower = (j > 0) ? out[j - 1] : 0.0;
            out[j] = ((t + p - j) * lower + (j + 1 - t) * out[j]) / p;
        }
    }
}

/// Appends phi(x) shifted by `base` onto an existing sparse vector;
/// allocation-free building block for the concatenating encoder.
inline void eval_basis_append(const BSplineSpec& spec, double x, std::size_t base,
                              SparseVec& out) {
    const double h = spec.bin_width();
    const double x_max = spec.hi - h * 1e-9;
    const double xc = std::clamp(x, spec.lo, x_max);

    const double u = (xc - spec.lo) / h + spec.degree;
    const std::size_t n = spec.basis_count();
    auto span = static_cast<long>(std::floor(u));
    span = std::clamp<long>(span, spec.degree, static_cast<long>(n) - 1);
    const double t = std::clamp(u - static_cast<double>(span), 0.0, 1.0);

    double w[kMaxSplineDegree + 1];
    bspline_weights(spec.degree, t, w);

    for (int j = 0; j <= spec.degree; ++j) {
        out.push_back(base + static_cast<std::size_t>(span) - spec.degree + j, w[j]);
    }
}

/// Evaluates the sparse basis vector phi(x). Out-of-range x is clamped to
/// [lo, hi - h*1e-9]; the result has at most r+1 consecutive nonzeros that
/// sum to one.
inline SparseVec eval_basis(const BSplineSpec& spec, double x) {
    SparseVec phi;
    eval_basis_append(spec, x, 0, phi);
    return phi;
}

/// Dense square difference matrix; testing and objective-evaluation
/// representation. Row 0 regularizes the first coefficient directly,
/// which is what makes the matrix invertible.
struct DiffMatrix {
    int order = 1;
    std::size_t size = 0;
    std::vector<double> data;  // row-major size x size

    double at(std::size_t i, std::size_t j) const { return data[i * size + j]; }
    double& at(std::size_t i, std::size_t j) { return data[i * size + j]; }

    std::vector<double> multiply(std::span<const double> v) const {
        assert(v.size() == size);
        std::vector<double> out(size, 0.0);
        for (std::size_t i = 0; i < size; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < size; ++j) acc += at(i, j) * v[j];
            out[i] = acc;
        }
        return out;
    }

    bool operator==(const DiffMatrix&) const = default;
};

/// Builds the order-d coefficient difference matrix of size n.
/// D1 is lower bidiagonal (1 on the diagonal, -1 below); D2 = D1^2.
inline DiffMatrix diff_matrix(int order, std::size_t n) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("diff_matrix: order must be 1 or 2");
    if (n < 2) throw std::invalid_argument("diff_matrix: n must be >= 2");

    DiffMatrix m{order, n, std::vector<double>(n * n, 0.0)};
    if (order == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            m.at(i, i) = 1.0;
            if (i > 0) m.at(i, i - 1) = -1.0;
        }
    } else {
        m.at(0, 0) = 1.0;
        m.at(1, 0) = -2.0;
        m.at(1, 1) = 1.0;
        for (std::size_t i = 2; i < n; ++i) {
            m.at(i, i - 2) = 1.0;
            m.at(i, i - 1) = -2.0;
            m.at(i, i) = 1.0;
        }
    }
    return m;
}

/// Applies D_d to a dense coefficient vector without materializing the
/// matrix: d rounds of adjacent differencing from the top down.
inline std::vector<double> apply_diff(int order, std::span<const double> v) {
    if (order < 0 || order > kMaxRegOrder)
        throw std::invalid_argument("apply_diff: order must be 0, 1 or 2");
    std::vector<double> out(v.begin(), v.end());
    for (int pass = 0; pass < order; ++pass) {
        for (std::size_t i = out.size(); i-- > 1;) out[i] -= out[i - 1];
    }
    return out;
}

namespace detail {

inline void check_transform_args(int order, const SparseVec& phi, std::size_t n) {
    if (order < 0 || order > kMaxRegOrder)
        throw std::invalid_argument("transform order must be 0, 1 or 2");
    if (!phi.empty() && phi.max_index() >= n)
        throw std::invalid_argument("sparse index out of range for basis size");
}

// Core of L_d phi on a caller-provided dense buffer of local indices:
// d suffix-accumulation passes (step A) then d prefix-accumulation
// passes (step B), 2*d*n additions total.
inline void apply_L_spans(int order, std::span<const std::size_t> idx,
                          std::span<const double> val, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = val[k];
    const std::size_t n = out.size();
    for (int pass = 0; pass < order; ++pass) {
        for (std::size_t i = n - 1; i-- > 0;) out[i] += out[i + 1];
    }
    for (int pass = 0; pass < order; ++pass) {
        for (std::size_t i = 1; i < n; ++i) out[i] += out[i - 1];
    }
}

}  // namespace detail

/// phi^d = D_d^{-T} phi via d suffix-summation passes. The result is dense
/// from index 0 up to phi's largest index (suffix sums fill everything
/// below the top of the support); exact zeros are not stored.
inline SparseVec apply_inv_transpose(int order, const SparseVec& phi, std::size_t n) {
    detail::check_transform_args(order, phi, n);
    if (order == 0 || phi.empty()) return phi;

    const std::size_t top = phi.max_index();
    std::vector<double> acc(top + 1, 0.0);
    for (std::size_t k = 0; k < phi.nnz(); ++k) acc[phi.indices[k]] = phi.values[k];
    for (int pass = 0; pass < order; ++pass) {
        for (std::size_t i = top; i-- > 0;) acc[i] += acc[i + 1];
    }
    return SparseVec::from_dense(acc);
}

/// L_d phi = D_d^{-1} D_d^{-T} phi written into a dense length-n buffer.
inline void apply_L_into(int order, const SparseVec& phi, std::span<double> out) {
    detail::check_transform_args(order, phi, out.size());
    detail::apply_L_spans(order, phi.indices, phi.values, out);
}

inline std::vector<double> apply_L(int order, const SparseVec& phi, std::size_t n) {
    std::vector<double> out(n, 0.0);
    apply_L_into(order, phi, out);
    return out;
}

}  // namespace splinesvm
