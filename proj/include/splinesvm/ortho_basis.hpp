// Fourier and Hermite per-dimension embeddings whose derivative systems
// stay orthogonal, so an L2 penalty on the linear weights equals a
// derivative-smoothness penalty on the fitted function. Also the
// per-dimension midrange/half-range normalization they rely on.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "splinesvm/dataset.hpp"

namespace splinesvm {

enum class OrthoFamily { fourier, hermite };

inline constexpr int kMaxOrthoTerms = 120;

/// Fourier embeds 2M values per dimension (cos/sin pairs), Hermite M.
struct OrthoSpec {
    OrthoFamily family = OrthoFamily::fourier;
    int terms = 4;      ///< M, highest basis index
    int reg_order = 1;  ///< derivative order d in {1,2}

    std::size_t width() const noexcept {
        return family == OrthoFamily::fourier ? 2 * static_cast<std::size_t>(terms)
                                              : static_cast<std::size_t>(terms);
    }

    void validate() const {
        if (terms < 1) throw std::invalid_argument("OrthoSpec: terms must be >= 1");
        if (terms > kMaxOrthoTerms)
            throw std::invalid_argument("OrthoSpec: terms exceeds supported maximum");
        if (reg_order < 1 || reg_order > 2)
            throw std::invalid_argument("OrthoSpec: reg_order must be 1 or 2");
    }

    bool operator==(const OrthoSpec&) const = default;
};

/// Per-dimension midrange mu and half-range delta; (x - mu) / delta maps
/// the training range onto [-1, 1].
struct RangeNorm {
    std::vector<double> mu;
    std::vector<double> delta;

    std::size_t dims() const noexcept { return mu.size(); }

    void validate() const {
        if (mu.size() != delta.size())
            throw std::invalid_argument("RangeNorm: mu/delta length mismatch");
        for (double d : delta)
            if (!(d > 0.0)) throw std::invalid_argument("RangeNorm: delta must be positive");
    }

    /// Unclamped standardized coordinate.
    double standardize(std::size_t dim, double x) const {
        return (x - mu[dim]) / delta[dim];
    }

    bool operator==(const RangeNorm&) const = default;
};

/// mu = (max+min)/2 and delta = (max-min)/2 per dimension; a dimension
/// with no spread gets delta = 1 so the map stays defined.
inline RangeNorm fit_range_norm(const LabeledDataset& data) {
    if (data.size() == 0) throw std::invalid_argument("fit_range_norm: empty dataset");
    const std::size_t dims = data.dims;
    std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
    std::vector<double> dense(dims);
    for (std::size_t i = 0; i < data.size(); ++i) {
        data.densify_row(i, dense);
        for (std::size_t d = 0; d < dims; ++d) {
            lo[d] = std::min(lo[d], dense[d]);
            hi[d] = std::max(hi[d], dense[d]);
        }
    }
    RangeNorm norm;
    norm.mu.resize(dims);
    norm.delta.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        norm.mu[d] = (hi[d] + lo[d]) / 2.0;
        norm.delta[d] = hi[d] > lo[d] ? (hi[d] - lo[d]) / 2.0 : 1.0;
    }
    return norm;
}

/// Standardizes every coordinate and clamps it into [-1, 1].
inline std::vector<double> normalize(const RangeNorm& norm, std::span<const double> x) {
    if (x.size() != norm.dims())
        throw std::invalid_argument("normalize: dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t d = 0; d < x.size(); ++d)
        out[d] = std::clamp(norm.standardize(d, x[d]), -1.0, 1.0);
    return out;
}

/// cos(n pi x)/n^d, sin(n pi x)/n^d for n = 1..M, interleaved cos,sin.
inline void fourier_embed_into(const OrthoSpec& spec, double x, std::span<double> out) {
    assert(out.size() >= spec.width());
    for (int n = 1; n <= spec.terms; ++n) {
        const double angle = static_cast<double>(n) * std::numbers::pi * x;
        double scale = 1.0 / n;
        if (spec.reg_order == 2) scale /= n;
        out[2 * (n - 1)] = std::cos(angle) * scale;
        out[2 * n - 1] = std::sin(angle) * scale;
    }
}

inline std::vector<double> fourier_embed(const OrthoSpec& spec, double x) {
    std::vector<double> out(spec.width());
    fourier_embed_into(spec, x, out);
    return out;
}

/// Probabilists' Hermite polynomials He_n(x) for n = 1..M, scaled so the
/// weighted Gram of the reg_order-th derivatives is the identity:
/// He_n / sqrt(n * n!) for d=1; the n=1 entry unchanged and
/// He_n / sqrt(n (n-1) n!) for n > 1 when d=2.
inline void hermite_embed_into(const OrthoSpec& spec, double x, std::span<double> out) {
    assert(out.size() >= spec.width());
    double he_prev = 1.0;  // He_0
    double he = x;         // He_1
    double factorial = 1.0;
    for (int n = 1; n <= spec.terms; ++n) {
        factorial *= n;
        double norm_sq = static_cast<double>(n) * factorial;
        if (spec.reg_order == 2 && n > 1) norm_sq *= n - 1;
        out[n - 1] = he / std::sqrt(norm_sq);
        const double he_next = x * he - static_cast<double>(n) * he_prev;
        he_prev = he;
        he = he_next;
    }
}

inline std::vector<double> hermite_embed(const OrthoSpec& spec, double x) {
    std::vector<double> out(spec.width());
    hermite_embed_into(spec, x, out);
    return out;
}

}  // namespace splinesvm
