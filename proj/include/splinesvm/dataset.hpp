// Labeled sparse datasets with dense semantics, svmlight text I/O, and
// the synthetic circle generator.

#pragma once

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace splinesvm {

/// Malformed input file; carries the 1-based offending line (0 when the
/// problem is the file as a whole).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                      : std::move(message)),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Content-level problem in otherwise well-formed data (single-class
/// training set, non-finite feature, ...).
class DataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sparse row storage with dense semantics: an absent coordinate means
/// value zero, not missing data. Labels are +-1 for binary problems or
/// arbitrary integer class ids; 0 marks an unlabeled example.
struct LabeledDataset {
    std::size_t dims = 0;
    std::vector<int> labels;
    std::vector<std::size_t> offsets{0};
    std::vector<std::size_t> index;
    std::vector<double> value;

    std::size_t size() const noexcept { return labels.size(); }

    std::span<const std::size_t> row_indices(std::size_t i) const {
        return {index.data() + offsets[i], offsets[i + 1] - offsets[i]};
    }

    std::span<const double> row_values(std::size_t i) const {
        return {value.data() + offsets[i], offsets[i + 1] - offsets[i]};
    }

    void add_row(int label, std::span<const std::size_t> idx, std::span<const double> val) {
        assert(idx.size() == val.size());
        labels.push_back(label);
        index.insert(index.end(), idx.begin(), idx.end());
        value.insert(value.end(), val.begin(), val.end());
        offsets.push_back(index.size());
        for (std::size_t j : idx) dims = std::max(dims, j + 1);
    }

    /// Expands row i into a caller-sized dense buffer (length dims).
    void densify_row(std::size_t i, std::span<double> out) const {
        assert(out.size() >= dims);
        std::fill(out.begin(), out.begin() + dims, 0.0);
        auto idx = row_indices(i);
        auto val = row_values(i);
        for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = val[k];
    }

    std::vector<double> dense_row(std::size_t i) const {
        std::vector<double> out(dims, 0.0);
        densify_row(i, out);
        return out;
    }

    /// Sorted distinct labels, unlabeled (0) rows excluded.
    std::vector<int> distinct_labels() const {
        std::set<int> seen;
        for (int y : labels)
            if (y != 0) seen.insert(y);
        return {seen.begin(), seen.end()};
    }
};

namespace detail {

inline bool parse_double(std::string_view tok, double& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    if (!tok.empty() && tok.front() == '+') ++begin;  // from_chars rejects leading '+'
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

inline bool parse_long(std::string_view tok, long& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    if (!tok.empty() && tok.front() == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Reads an svmlight text file: one `label idx:val ...` line per example,
/// indices 1-based and strictly increasing. Lines that are blank or start
/// with '#' are skipped. The dimension count is the largest index seen,
/// or min_dims if that is larger.
inline LabeledDataset read_svmlight(const std::string& path, std::size_t min_dims = 0) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);

    LabeledDataset data;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::size_t> idx;
    std::vector<double> val;

    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);

        // tokenise on whitespace
        idx.clear();
        val.clear();
        std::size_t pos = 0;
        bool have_label = false;
        long label = 0;
        long prev_index = 0;
        while (pos < view.size()) {
            while (pos < view.size() && (view[pos] == ' ' || view[pos] == '\t' || view[pos] == '\r'))
                ++pos;
            if (pos >= view.size()) break;
            std::size_t start = pos;
            while (pos < view.size() && view[pos] != ' ' && view[pos] != '\t' && view[pos] != '\r')
                ++pos;
            std::string_view tok = view.substr(start, pos - start);

            if (!have_label) {
                if (!detail::parse_long(tok, label))
                    throw ParseError("expected integer label, got '" + std::string(tok) + "'", lineno);
                have_label = true;
                continue;
            }
            auto colon = tok.find(':');
            if (colon == std::string_view::npos)
                throw ParseError("expected idx:val pair, got '" + std::string(tok) + "'", lineno);
            long fidx = 0;
            double fval = 0.0;
            if (!detail::parse_long(tok.substr(0, colon), fidx))
                throw ParseError("bad feature index in '" + std::string(tok) + "'", lineno);
            if (fidx < 1)
                throw ParseError("feature indices are 1-based; got " + std::to_string(fidx), lineno);
            if (fidx <= prev_index)
                throw ParseError("feature indices must be strictly increasing", lineno);
            if (!detail::parse_double(tok.substr(colon + 1), fval))
                throw ParseError("bad feature value in '" + std::string(tok) + "'", lineno);
            if (!std::isfinite(fval))
                throw ParseError("non-finite feature value", lineno);
            prev_index = fidx;
            idx.push_back(static_cast<std::size_t>(fidx - 1));
            val.push_back(fval);
        }
        if (!have_label) continue;  // blank or comment-only line
        data.add_row(static_cast<int>(label), idx, val);
    }
    if (data.size() == 0) throw ParseError("no examples in '" + path + "'", 0);
    data.dims = std::max(data.dims, min_dims);
    return data;
}

/// Writes svmlight text, 1-based indices, 17 significant digits.
inline void write_svmlight(const LabeledDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << data.labels[i];
        auto idx = data.row_indices(i);
        auto val = data.row_values(i);
        for (std::size_t k = 0; k < idx.size(); ++k)
            out << ' ' << (idx[k] + 1) << ':' << detail::format_double(val[k]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

namespace detail {

// 53-bit mantissa draw in [0,1); keeps the generator portable across
// standard library implementations.
inline double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// m points uniform in [-1,1]^2, labeled +1 inside the unit circle.
inline LabeledDataset gen_toy_circle(std::size_t m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("gen_toy_circle: need at least one point");
    std::mt19937_64 rng(seed);
    LabeledDataset data;
    data.dims = 2;
    const std::size_t idx[2] = {0, 1};
    for (std::size_t i = 0; i < m; ++i) {
        double x = 2.0 * detail::unit_double(rng) - 1.0;
        double y = 2.0 * detail::unit_double(rng) - 1.0;
        const double val[2] = {x, y};
        data.add_row(x * x + y * y <= 1.0 ? +1 : -1, idx, val);
    }
    return data;
}

}  // namespace splinesvm
