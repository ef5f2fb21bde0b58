// Dual coordinate descent for L2-regularized L1-loss (hinge) linear SVMs
// over the embedded feature space. For spline embeddings the weight
// vector is kept in the w_d = D_d^{-1} w parameterization: scores are
// then plain sparse dots against the raw basis vector, and each update
// applies the O(d n) L_d transform per dimension instead of a dense
// matrix product.

#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "splinesvm/dataset.hpp"
#include "splinesvm/encoder.hpp"
#include "splinesvm/spline_basis.hpp"
#include "splinesvm/sparse_vec.hpp"

namespace splinesvm {

/// Solver failed to produce finite numbers.
class NumericError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TrainMode { online, batch };

/// C plays the usual role in 0.5*||w||^2 + C * sum hinge; a
/// regularization weight lambda on a dataset of m examples corresponds
/// to C = 1 / (lambda * m).
struct TrainConfig {
    double C = 1.0;
    double tol = 0.1;            ///< stop when the worst projected gradient of a pass is below this
    int max_outer_iters = 1000;
    std::uint64_t seed = 1;
    TrainMode mode = TrainMode::online;
    bool skip_zeros = false;     ///< skip absent/zero coordinates while encoding
    bool record_objective = true;
    bool verbose = false;        ///< per-pass progress lines on stderr
    int jobs = 1;                ///< parallel one-vs-all trainings

    void validate() const {
        if (!(C > 0.0)) throw std::invalid_argument("TrainConfig: C must be > 0");
        if (!(tol > 0.0)) throw std::invalid_argument("TrainConfig: tol must be > 0");
        if (max_outer_iters < 1)
            throw std::invalid_argument("TrainConfig: max_outer_iters must be >= 1");
        if (jobs < 1) throw std::invalid_argument("TrainConfig: jobs must be >= 1");
    }
};

/// Per-training diagnostics. encoded_doubles_peak counts doubles held in
/// encoded-feature storage: the full batch matrix when encodings are
/// materialized, otherwise just the single-example scratch buffers.
struct TrainReport {
    int passes = 0;
    double final_violation = 0.0;
    double final_objective = 0.0;
    std::vector<double> objective_per_pass;
    std::vector<double> alpha;
    std::size_t encoded_doubles_peak = 0;
    bool materialized_encodings = false;
    double seconds = 0.0;
};

/// A trained additive classifier. weights has length spec.width(); for
/// spline embeddings it stores w_d (so scoring dots against raw phi),
/// for Fourier/Hermite it is the plain weight vector. The last slot is
/// the bias weight when the spec carries a bias feature.
struct AdditiveModel {
    EmbeddingSpec spec;
    std::vector<double> weights;
    int positive_label = +1;

    double bias_weight() const noexcept {
        return spec.include_bias ? weights.back() : 0.0;
    }
};

/// Decision score w'phi^d(x) + bias, evaluated as a sparse dot against
/// the stored parameterization.
inline double predict(const AdditiveModel& model, std::span<const double> x) {
    if (x.size() != model.spec.dims)
        throw std::invalid_argument("predict: dimension mismatch");
    SparseVec phi;
    encode_into(model.spec, x, phi);
    return phi.dot(model.weights);
}

namespace detail {

// ||embedded(phi)||^2 in the linearized space. For spline blocks this is
// phi' L_d phi, evaluated with one O(d n) transform and a short sparse
// dot; ortho blocks and the bias slot contribute their plain squares.
inline double embedded_norm_sq(const EmbeddingSpec& spec, const SparseVec& phi,
                               std::vector<double>& lbuf) {
    const int d = spec.is_spline() ? spec.spline.front().reg_order : 0;
    if (!spec.is_spline() || d == 0) {
        double q = 0.0;
        for (double v : phi.values) q += v * v;
        return q;
    }
    const std::size_t dw = spec.dim_width();
    const std::size_t fw = spec.feature_width();
    lbuf.resize(dw);
    double q = 0.0;
    std::size_t k = 0;
    const std::size_t nnz = phi.nnz();
    while (k < nnz) {
        const std::size_t idx = phi.indices[k];
        if (idx >= fw) {  // bias slot
            q += phi.values[k] * phi.values[k];
            ++k;
            continue;
        }
        const std::size_t off = (idx / dw) * dw;
        const std::size_t k0 = k;
        while (k < nnz && phi.indices[k] < off + dw) ++k;
        // local slice of this dimension
        std::size_t local_idx[kMaxSplineDegree + 1];
        for (std::size_t j = k0; j < k; ++j) local_idx[j - k0] = phi.indices[j] - off;
        apply_L_spans(d, {local_idx, k - k0}, {phi.values.data() + k0, k - k0}, lbuf);
        for (std::size_t j = k0; j < k; ++j) q += phi.values[j] * lbuf[phi.indices[j] - off];
    }
    return q;
}

// w += step * (linearized embedding of phi). Spline blocks densify via
// L_d within their own dimension only.
inline void add_scaled_embedded(const EmbeddingSpec& spec, const SparseVec& phi, double step,
                                std::span<double> w, std::vector<double>& lbuf) {
    const int d = spec.is_spline() ? spec.spline.front().reg_order : 0;
    if (!spec.is_spline() || d == 0) {
        for (std::size_t k = 0; k < phi.nnz(); ++k) w[phi.indices[k]] += step * phi.values[k];
        return;
    }
    const std::size_t dw = spec.dim_width();
    const std::size_t fw = spec.feature_width();
    lbuf.resize(dw);
    std::size_t k = 0;
    const std::size_t nnz = phi.nnz();
    while (k < nnz) {
        const std::size_t idx = phi.indices[k];
        if (idx >= fw) {
            w[idx] += step * phi.values[k];
            ++k;
            continue;
        }
        const std::size_t off = (idx / dw) * dw;
        const std::size_t k0 = k;
        while (k < nnz && phi.indices[k] < off + dw) ++k;
        std::size_t local_idx[kMaxSplineDegree + 1];
        for (std::size_t j = k0; j < k; ++j) local_idx[j - k0] = phi.indices[j] - off;
        apply_L_spans(d, {local_idx, k - k0}, {phi.values.data() + k0, k - k0}, lbuf);
        for (std::size_t j = 0; j < dw; ++j) w[off + j] += step * lbuf[j];
    }
}

// Seeded Fisher-Yates; the modulo draw keeps permutations identical
// across standard libraries.
inline void shuffle_perm(std::vector<std::size_t>& perm, std::mt19937_64& rng) {
    const std::size_t m = perm.size();
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (m - i));
        std::swap(perm[i], perm[j]);
    }
}

inline void check_finite_features(const LabeledDataset& data) {
    for (double v : data.value)
        if (!std::isfinite(v)) throw DataError("dataset contains a non-finite feature value");
}

}  // namespace detail

namespace detail {

inline double primal_objective_impl(const AdditiveModel& model, const LabeledDataset& data,
                                    std::span<const int> labels, const TrainConfig& cfg) {
    const EmbeddingSpec& spec = model.spec;
    double norm_sq = 0.0;
    if (spec.is_spline() && spec.spline.front().reg_order > 0) {
        const int d = spec.spline.front().reg_order;
        const std::size_t dw = spec.dim_width();
        const DiffMatrix D = diff_matrix(d, dw);
        for (std::size_t dim = 0; dim < spec.dims; ++dim) {
            std::span<const double> block{model.weights.data() + spec.dim_offset(dim), dw};
            const std::vector<double> diffd = D.multiply(block);
            for (double v : diffd) norm_sq += v * v;
        }
        if (spec.include_bias) norm_sq += model.weights.back() * model.weights.back();
    } else {
        for (double v : model.weights) norm_sq += v * v;
    }

    double hinge_sum = 0.0;
    SparseVec phi;
    std::vector<double> scratch(spec.dims);
    for (std::size_t i = 0; i < data.size(); ++i) {
        encode_row_into(spec, data, i, cfg.skip_zeros, scratch, phi);
        const double margin = labels[i] * phi.dot(model.weights);
        hinge_sum += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * norm_sq + cfg.C * hinge_sum;
}

}  // namespace detail

/// 0.5*||w||^2 + C * sum of hinge losses. For spline embeddings the
/// stored weights are w_d, so the squared norm is recovered per
/// dimension as ||D_d w_d||^2 via the difference matrix.
inline double primal_objective(const AdditiveModel& model, const LabeledDataset& data,
                               const TrainConfig& cfg) {
    return detail::primal_objective_impl(model, data, data.labels, cfg);
}

struct BinaryTrainResult {
    AdditiveModel model;
    TrainReport report;
};

namespace detail {

inline BinaryTrainResult train_binary_impl(const LabeledDataset& data,
                                           std::span<const int> labels,
                                           const EmbeddingSpec& spec, const TrainConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    spec.validate();
    cfg.validate();
    if (data.dims != spec.dims)
        throw std::invalid_argument("train_binary: dataset/spec dimension mismatch");

    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == +1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw std::invalid_argument("train_binary: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg)
        throw std::invalid_argument("train_binary: need at least one example of each class");
    detail::check_finite_features(data);

    const std::size_t m = data.size();
    const std::size_t width = spec.width();
    const bool batch = cfg.mode == TrainMode::batch;

    AdditiveModel model{spec, std::vector<double>(width, 0.0)};
    TrainReport rep;
    rep.materialized_encodings = batch;

    std::vector<SparseVec> rows;
    SparseVec scratch_phi;
    std::vector<double> scratch_x(spec.dims);
    std::vector<double> lbuf;

    std::vector<double> qdiag(m, 0.0);
    if (batch) {
        rows = encode_dataset(spec, data, cfg.skip_zeros);
        for (std::size_t i = 0; i < m; ++i) {
            qdiag[i] = detail::embedded_norm_sq(spec, rows[i], lbuf);
            rep.encoded_doubles_peak += rows[i].values.size();
        }
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            encode_row_into(spec, data, i, cfg.skip_zeros, scratch_x, scratch_phi);
            qdiag[i] = detail::embedded_norm_sq(spec, scratch_phi, lbuf);
        }
    }

    std::vector<double> alpha(m, 0.0);
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    std::mt19937_64 rng(cfg.seed);

    int pass = 0;
    double max_violation = 0.0;
    while (pass < cfg.max_outer_iters) {
        ++pass;
        detail::shuffle_perm(perm, rng);
        max_violation = 0.0;

        for (std::size_t s = 0; s < m; ++s) {
            const std::size_t i = perm[s];
            const SparseVec* phi;
            if (batch) {
                phi = &rows[i];
            } else {
                encode_row_into(spec, data, i, cfg.skip_zeros, scratch_x, scratch_phi);
                phi = &scratch_phi;
            }
            const double y = labels[i];
            const double G = y * phi->dot(model.weights) - 1.0;

            double pg = G;
            if (alpha[i] == 0.0) {
                pg = std::min(G, 0.0);
            } else if (alpha[i] == cfg.C) {
                pg = std::max(G, 0.0);
            }
            max_violation = std::max(max_violation, std::abs(pg));

            if (std::abs(pg) > 1e-12) {
                const double alpha_old = alpha[i];
                double alpha_new;
                if (qdiag[i] > 0.0) {
                    alpha_new = std::min(std::max(alpha_old - G / qdiag[i], 0.0), cfg.C);
                } else {
                    alpha_new = G < 0.0 ? cfg.C : 0.0;  // zero feature vector
                }
                alpha[i] = alpha_new;
                const double delta = (alpha_new - alpha_old) * y;
                if (delta != 0.0)
                    detail::add_scaled_embedded(spec, *phi, delta, model.weights, lbuf);
            }
        }

        if (cfg.record_objective)
            rep.objective_per_pass.push_back(
                detail::primal_objective_impl(model, data, labels, cfg));
        if (cfg.verbose) {
            std::fprintf(stderr, "pass %d violation %.6g", pass, max_violation);
            if (cfg.record_objective)
                std::fprintf(stderr, " objective %.10g", rep.objective_per_pass.back());
            std::fprintf(stderr, "\n");
        }
        if (max_violation <= cfg.tol) break;
    }

    for (double w : model.weights)
        if (!std::isfinite(w)) throw NumericError("train_binary: non-finite weight");

    if (!batch) {
        rep.encoded_doubles_peak = scratch_phi.values.capacity() + lbuf.size();
    }
    rep.passes = pass;
    rep.final_violation = max_violation;
    rep.final_objective = cfg.record_objective && !rep.objective_per_pass.empty()
                              ? rep.objective_per_pass.back()
                              : detail::primal_objective_impl(model, data, labels, cfg);
    rep.alpha = std::move(alpha);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(model), std::move(rep)};
}

}  // namespace detail

/// Trains a binary hinge-loss classifier on +-1 labels by dual coordinate
/// descent. Deterministic for a fixed seed; online mode re-encodes each
/// example on touch instead of materializing the encoded dataset.
inline BinaryTrainResult train_binary(const LabeledDataset& data, const EmbeddingSpec& spec,
                                      const TrainConfig& cfg) {
    return detail::train_binary_impl(data, data.labels, spec, cfg);
}

struct OvaModel {
    std::vector<int> class_ids;         ///< ascending
    std::vector<AdditiveModel> models;  ///< one per class id
};

struct OvaTrainResult {
    OvaModel model;
    std::vector<TrainReport> reports;
};

/// One-vs-all reduction: one binary model per class in ascending class-id
/// order. Classes train independently (optionally in cfg.jobs threads);
/// each uses the same seed, so results do not depend on scheduling.
inline OvaTrainResult train_ova(const LabeledDataset& data, const EmbeddingSpec& spec,
                                const TrainConfig& cfg) {
    cfg.validate();
    const std::vector<int> classes = data.distinct_labels();
    if (classes.size() < 2)
        throw std::invalid_argument("train_ova: need at least two classes");

    OvaTrainResult result;
    result.model.class_ids = classes;
    result.model.models.resize(classes.size());
    result.reports.resize(classes.size());

    auto train_class = [&](std::size_t c) {
        LabeledDataset relabeled = data;
        for (std::size_t i = 0; i < relabeled.size(); ++i)
            relabeled.labels[i] = data.labels[i] == classes[c] ? +1 : -1;
        BinaryTrainResult r = train_binary(relabeled, spec, cfg);
        r.model.positive_label = classes[c];
        result.model.models[c] = std::move(r.model);
        result.reports[c] = std::move(r.report);
    };

    const int jobs = std::min<int>(cfg.jobs, static_cast<int>(classes.size()));
    if (jobs <= 1) {
        for (std::size_t c = 0; c < classes.size(); ++c) train_class(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&] {
                for (std::size_t c = next.fetch_add(1); c < classes.size();
                     c = next.fetch_add(1))
                    train_class(c);
            });
        }
        for (auto& th : pool) th.join();
    }
    return result;
}

inline double logistic(double s) { return 1.0 / (1.0 + std::exp(-s)); }

/// Class id with the highest logistic-normalized response; ties go to the
/// lowest class id. The logistic is monotone, so the argmax agrees with
/// the raw scores.
inline int classify(const OvaModel& ova, std::span<const double> x) {
    if (ova.models.empty()) throw std::invalid_argument("classify: no models");
    SparseVec phi;
    encode_into(ova.models.front().spec, x, phi);
    double best = -1.0;
    int best_id = 0;
    for (std::size_t c = 0; c < ova.models.size(); ++c) {
        const double p = logistic(phi.dot(ova.models[c].weights));
        const int id = ova.class_ids[c];
        if (p > best || (p == best && id < best_id)) {
            best = p;
            best_id = id;
        }
    }
    return best_id;
}

}  // namespace splinesvm
