// Concatenates per-dimension embeddings into one sparse feature vector,
// with offset bookkeeping, an optional constant bias feature, and a
// streaming row encoder so training never has to materialize the
// encoded dataset.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "splinesvm/dataset.hpp"
#include "splinesvm/ortho_basis.hpp"
#include "splinesvm/spline_basis.hpp"
#include "splinesvm/sparse_vec.hpp"

namespace splinesvm {

enum class EmbedFamily { spline, fourier, hermite };

inline const char* family_name(EmbedFamily f) {
    switch (f) {
        case EmbedFamily::spline: return "spline";
        case EmbedFamily::fourier: return "fourier";
        case EmbedFamily::hermite: return "hermite";
    }
    return "?";
}

/// Embedding plan for a whole feature vector. One family for all
/// dimensions; spline dimensions may differ in range but share degree,
/// bin count and regularization order, so every dimension has the same
/// embedded width. The bias feature, when enabled, sits at the final
/// index with constant value bias_value.
struct EmbeddingSpec {
    EmbedFamily family = EmbedFamily::spline;
    std::size_t dims = 0;
    bool include_bias = true;
    double bias_value = 1.0;

    std::vector<BSplineSpec> spline;  ///< per-dimension, size == dims (spline family)
    OrthoSpec ortho{};                ///< fourier/hermite parameters
    RangeNorm norm{};                 ///< fourier/hermite standardization stats

    bool is_spline() const noexcept { return family == EmbedFamily::spline; }

    std::size_t dim_width() const noexcept {
        return is_spline() ? spline.front().basis_count() : ortho.width();
    }

    std::size_t dim_offset(std::size_t d) const noexcept { return d * dim_width(); }

    /// Width of the concatenated per-dimension embeddings, bias excluded.
    std::size_t feature_width() const noexcept { return dims * dim_width(); }

    std::size_t bias_index() const noexcept { return feature_width(); }

    /// Total embedded width including the bias slot.
    std::size_t width() const noexcept { return feature_width() + (include_bias ? 1 : 0); }

    void validate() const {
        if (dims < 1) throw std::invalid_argument("EmbeddingSpec: dims must be >= 1");
        if (!std::isfinite(bias_value))
            throw std::invalid_argument("EmbeddingSpec: bias_value must be finite");
        if (is_spline()) {
            if (spline.size() != dims)
                throw std::invalid_argument("EmbeddingSpec: need one BSplineSpec per dimension");
            const BSplineSpec& first = spline.front();
            for (const BSplineSpec& s : spline) {
                s.validate();
                if (s.degree != first.degree || s.bins != first.bins ||
                    s.reg_order != first.reg_order)
                    throw std::invalid_argument(
                        "EmbeddingSpec: spline dimensions must share degree/bins/reg_order");
            }
        } else {
            ortho.validate();
            norm.validate();
            if (norm.dims() != dims)
                throw std::invalid_argument("EmbeddingSpec: RangeNorm dimension mismatch");
        }
    }

    /// Spline plan with per-dimension ranges taken from the data; a
    /// dimension with no spread covers [lo, lo+1).
    static EmbeddingSpec spline_from_data(const LabeledDataset& data, int degree, int bins,
                                          int reg_order, double bias_value = 1.0) {
        if (data.size() == 0) throw std::invalid_argument("spline_from_data: empty dataset");
        RangeNorm stats = fit_range_norm(data);
        EmbeddingSpec spec;
        spec.family = EmbedFamily::spline;
        spec.dims = data.dims;
        spec.include_bias = bias_value != 0.0;
        spec.bias_value = bias_value;
        spec.spline.reserve(data.dims);
        for (std::size_t d = 0; d < data.dims; ++d) {
            const double lo = stats.mu[d] - stats.delta[d];
            double hi = stats.mu[d] + stats.delta[d];
            if (!(hi > lo)) hi = lo + 1.0;
            spec.spline.push_back({degree, bins, lo, hi, reg_order});
        }
        spec.validate();
        return spec;
    }

    static EmbeddingSpec ortho_from_data(const LabeledDataset& data, OrthoFamily family,
                                         int terms, int reg_order, double bias_value = 1.0) {
        EmbeddingSpec spec;
        spec.family = family == OrthoFamily::fourier ? EmbedFamily::fourier : EmbedFamily::hermite;
        spec.dims = data.dims;
        spec.include_bias = bias_value != 0.0;
        spec.bias_value = bias_value;
        spec.ortho = OrthoSpec{family, terms, reg_order};
        spec.norm = fit_range_norm(data);
        spec.validate();
        return spec;
    }

    bool operator==(const EmbeddingSpec&) const = default;
};

namespace detail {

// Appends dimension d's embedding of coordinate x at its offset.
inline void encode_dim(const EmbeddingSpec& spec, std::size_t d, double x, SparseVec& out) {
    const std::size_t offset = spec.dim_offset(d);
    switch (spec.family) {
        case EmbedFamily::spline:
            eval_basis_append(spec.spline[d], x, offset, out);
            break;
        case EmbedFamily::fourier: {
            const double z = std::clamp(spec.norm.standardize(d, x), -1.0, 1.0);
            double buf[2 * kMaxOrthoTerms];
            fourier_embed_into(spec.ortho, z, buf);
            for (std::size_t k = 0; k < spec.ortho.width(); ++k)
                out.push_back(offset + k, buf[k]);
            break;
        }
        case EmbedFamily::hermite: {
            const double z = spec.norm.standardize(d, x);  // full support, no clamp
            double buf[kMaxOrthoTerms];
            hermite_embed_into(spec.ortho, z, buf);
            for (std::size_t k = 0; k < spec.ortho.width(); ++k)
                out.push_back(offset + k, buf[k]);
            break;
        }
    }
}

}  // namespace detail

/// Encodes one dense example into out (cleared first). Deterministic;
/// per-dimension blocks never overlap.
inline void encode_into(const EmbeddingSpec& spec, std::span<const double> x, SparseVec& out) {
    if (x.size() != spec.dims)
        throw std::invalid_argument("encode: example has wrong dimension count");
    out.clear();
    for (std::size_t d = 0; d < spec.dims; ++d) detail::encode_dim(spec, d, x[d], out);
    if (spec.include_bias) out.push_back(spec.bias_index(), spec.bias_value);
}

inline SparseVec encode(const EmbeddingSpec& spec, std::span<const double> x) {
    SparseVec out;
    encode_into(spec, x, out);
    return out;
}

/// Encodes dataset row i. With skip_zeros the coordinates that are absent
/// or exactly zero contribute nothing (an approximation that trades
/// fidelity for speed on histogram-style data); otherwise zeros are
/// encoded like any other value, which matters because a spline basis is
/// nonzero at zero. scratch must have at least spec.dims entries.
inline void encode_row_into(const EmbeddingSpec& spec, const LabeledDataset& data,
                            std::size_t i, bool skip_zeros, std::span<double> scratch,
                            SparseVec& out) {
    if (data.dims != spec.dims)
        throw std::invalid_argument("encode: dataset dimension count mismatch");
    if (skip_zeros) {
        out.clear();
        auto idx = data.row_indices(i);
        auto val = data.row_values(i);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (val[k] == 0.0) continue;
            detail::encode_dim(spec, idx[k], val[k], out);
        }
        if (spec.include_bias) out.push_back(spec.bias_index(), spec.bias_value);
        return;
    }
    data.densify_row(i, scratch);
    encode_into(spec, scratch.subspan(0, spec.dims), out);
}

/// Batch encoding: one sparse row per example, identical to repeated
/// encode_row_into calls.
inline std::vector<SparseVec> encode_dataset(const EmbeddingSpec& spec,
                                             const LabeledDataset& data,
                                             bool skip_zeros = false) {
    spec.validate();
    std::vector<SparseVec> rows(data.size());
    std::vector<double> scratch(spec.dims);
    for (std::size_t i = 0; i < data.size(); ++i)
        encode_row_into(spec, data, i, skip_zeros, scratch, rows[i]);
    return rows;
}

}  // namespace splinesvm
