// Sparse index/value vector used as the carrier for embedded feature slices.

#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace splinesvm {

/// Sorted index/value pairs. Indices are strictly increasing and exact
/// zeros are never stored; absent indices read as zero.
struct SparseVec {
    std::vector<std::size_t> indices;
    std::vector<double> values;

    std::size_t nnz() const noexcept { return indices.size(); }
    bool empty() const noexcept { return indices.empty(); }

    void clear() noexcept {
        indices.clear();
        values.clear();
    }

    /// Appends one entry. Index must exceed the current last index;
    /// zero values are silently dropped.
    void push_back(std::size_t index, double value) {
        assert(indices.empty() || index > indices.back());
        if (value == 0.0) return;
        indices.push_back(index);
        values.push_back(value);
    }

    /// Largest stored index; vector must be non-empty.
    std::size_t max_index() const {
        assert(!indices.empty());
        return indices.back();
    }

    /// Dot product against a dense weight vector. Entries at or beyond
    /// dense.size() are ignored by assertion, not by branch.
    double dot(std::span<const double> dense) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < indices.size(); ++k) {
            assert(indices[k] < dense.size());
            acc += values[k] * dense[indices[k]];
        }
        return acc;
    }

    /// Merge-walk dot product with another sparse vector.
    double dot(const SparseVec& other) const {
        double acc = 0.0;
        std::size_t a = 0, b = 0;
        while (a < indices.size() && b < other.indices.size()) {
            if (indices[a] < other.indices[b]) {
                ++a;
            } else if (indices[a] > other.indices[b]) {
                ++b;
            } else {
                acc += values[a] * other.values[b];
                ++a;
                ++b;
            }
        }
        return acc;
    }

    double sum() const noexcept {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }

    std::vector<double> to_dense(std::size_t n) const {
        std::vector<double> out(n, 0.0);
        for (std::size_t k = 0; k < indices.size(); ++k) {
            assert(indices[k] < n);
            out[indices[k]] = values[k];
        }
        return out;
    }

    static SparseVec from_dense(std::span<const double> dense) {
        SparseVec out;
        for (std::size_t i = 0; i < dense.size(); ++i) {
            if (dense[i] != 0.0) out.push_back(i, dense[i]);
        }
        return out;
    }

    bool operator==(const SparseVec& other) const = default;
};

}  // namespace splinesvm
