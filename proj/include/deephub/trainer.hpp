#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "random.hpp"
#include "sampler.hpp"
#include "temporal_graph.hpp"

namespace deephub {

struct TrainerConfig {
    int dimension = 100;
    int window = 5;
    int negative_samples = 5;
    int epochs = 5;
    double initial_learning_rate = 0.025;
    double min_learning_rate = 0.0001;
    std::uint64_t seed = 1;

    void validate() const {
        if (dimension < 1 || window < 1 || negative_samples < 1 || epochs < 0)
            throw std::invalid_argument("trainer config: dimension, window, negatives must be >= 1, epochs >= 0");
        if (initial_learning_rate <= 0 || min_learning_rate < 0)
            throw std::invalid_argument("trainer config: learning rates must be positive");
    }
};

/// One embedding snapshot: sorted node ids with their vectors.
struct SnapshotEmbedding {
    int snapshot_index = 0;
    std::vector<NodeId> nodes;                // sorted
    std::vector<std::vector<double>> vectors; // aligned with nodes

    const std::vector<double>* find(NodeId v) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
        if (it == nodes.end() || *it != v)
            return nullptr;
        return &vectors[static_cast<std::size_t>(it - nodes.begin())];
    }
};

using EmbeddingSequence = std::vector<SnapshotEmbedding>;

/// Skip-gram with negative sampling over walk corpora, with incremental
/// vocabulary growth for dynamic snapshots. Single-threaded training is
/// bit-deterministic for a given seed; the multi-threaded mode applies
/// unsynchronized (hogwild) updates and trades determinism for speed.
class EmbeddingModel {
public:
    explicit EmbeddingModel(const TrainerConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        cfg_.validate();
    }

    const TrainerConfig& config() const { return cfg_; }
    std::size_t vocab_size() const { return vocab_nodes_.size(); }
    bool contains(NodeId v) const { return index_.count(v) != 0; }
    std::span<const NodeId> vocab_nodes() const { return vocab_nodes_; }

    std::uint32_t index_of(NodeId v) const {
        auto it = index_.find(v);
        if (it == index_.end())
            throw std::invalid_argument("node " + std::to_string(v) + " not in vocabulary");
        return it->second;
    }

    std::span<const double> input_vector(std::uint32_t idx) const {
        return {input_.data() + static_cast<std::size_t>(idx) * cfg_.dimension,
                static_cast<std::size_t>(cfg_.dimension)};
    }

    std::span<const double> output_vector(std::uint32_t idx) const {
        return {output_.data() + static_cast<std::size_t>(idx) * cfg_.dimension,
                static_cast<std::size_t>(cfg_.dimension)};
    }

    std::span<double> mutable_input_vector(std::uint32_t idx) {
        return {input_.data() + static_cast<std::size_t>(idx) * cfg_.dimension,
                static_cast<std::size_t>(cfg_.dimension)};
    }

    std::span<double> mutable_output_vector(std::uint32_t idx) {
        return {output_.data() + static_cast<std::size_t>(idx) * cfg_.dimension,
                static_cast<std::size_t>(cfg_.dimension)};
    }

    bool trained() const { return trained_; }

    /// Initial training pass over a corpus. The vocabulary is built in token
    /// order of first appearance; input vectors start uniform in
    /// [-0.5/dim, +0.5/dim], output vectors at zero.
    void train(const WalkCorpus& corpus, int threads = 1) {
        if (corpus.empty())
            throw std::invalid_argument("train: empty corpus");
        absorb_vocabulary(corpus);
        run_epochs(corpus, threads);
        trained_ = true;
    }

    /// Incremental update on a delta-node corpus: new nodes get fresh random
    /// vectors, existing ones warm-start, and the learning-rate schedule
    /// restarts. An empty corpus leaves the model bitwise unchanged.
    void update(const WalkCorpus& corpus, int threads = 1) {
        if (!trained_)
            throw std::logic_error("update: model has not been trained yet");
        if (corpus.empty())
            return;
        absorb_vocabulary(corpus);
        run_epochs(corpus, threads);
    }

    /// One SGNS step at learning rate lr for (input word, target word,
    /// negatives): gradient ascent on
    ///   log sigmoid(v_in . u_tgt) + sum_neg log sigmoid(-v_in . u_neg).
    /// All deltas are computed from the pre-update parameters.
    void apply_sgns_update(std::uint32_t input_idx, std::uint32_t target_idx,
                           std::span<const std::uint32_t> negatives, double lr) {
        const int dim = cfg_.dimension;
        double* v_in = input_.data() + static_cast<std::size_t>(input_idx) * dim;
        std::vector<double> grad_in(dim, 0.0);

        auto push_target = [&](std::uint32_t idx, double label) {
            double* u = output_.data() + static_cast<std::size_t>(idx) * dim;
            double dot = 0.0;
            for (int j = 0; j < dim; ++j)
                dot += v_in[j] * u[j];
            double g = (label - sigmoid(dot)) * lr;
            for (int j = 0; j < dim; ++j)
                grad_in[j] += g * u[j];
            for (int j = 0; j < dim; ++j)
                u[j] += g * v_in[j];
        };

        push_target(target_idx, 1.0);
        for (std::uint32_t neg : negatives)
            push_target(neg, 0.0);
        for (int j = 0; j < dim; ++j)
            v_in[j] += grad_in[j];
    }

    /// Input vectors restricted to `nodes`, as the snapshot embedding.
    SnapshotEmbedding extract(std::span<const NodeId> nodes, int snapshot_index = 0) const {
        SnapshotEmbedding emb;
        emb.snapshot_index = snapshot_index;
        emb.nodes.assign(nodes.begin(), nodes.end());
        std::sort(emb.nodes.begin(), emb.nodes.end());
        emb.vectors.reserve(emb.nodes.size());
        for (NodeId v : emb.nodes) {
            auto it = index_.find(v);
            if (it == index_.end())
                throw std::invalid_argument("extract: node " + std::to_string(v) + " missing from vocabulary");
            auto row = input_vector(it->second);
            emb.vectors.emplace_back(row.begin(), row.end());
        }
        return emb;
    }

private:
    static double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

    void absorb_vocabulary(const WalkCorpus& corpus) {
        for (const auto& walk : corpus.walks) {
            for (NodeId v : walk) {
                auto [it, inserted] = index_.try_emplace(v, static_cast<std::uint32_t>(vocab_nodes_.size()));
                if (inserted) {
                    vocab_nodes_.push_back(v);
                    counts_.push_back(0);
                    const int dim = cfg_.dimension;
                    for (int j = 0; j < dim; ++j)
                        input_.push_back((rng_.uniform01() - 0.5) / dim);
                    output_.resize(output_.size() + dim, 0.0);
                }
                ++counts_[it->second];
            }
        }
        rebuild_negative_table();
    }

    /// Cumulative counts^0.75 table; negatives are drawn by binary search.
    void rebuild_negative_table() {
        neg_cdf_.resize(counts_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < counts_.size(); ++i) {
            acc += std::pow(static_cast<double>(counts_[i]), 0.75);
            neg_cdf_[i] = acc;
        }
    }

    std::uint32_t draw_negative(Rng& rng) const {
        double r = rng.uniform01() * neg_cdf_.back();
        auto it = std::upper_bound(neg_cdf_.begin(), neg_cdf_.end(), r);
        if (it == neg_cdf_.end())
            --it;
        return static_cast<std::uint32_t>(it - neg_cdf_.begin());
    }

    void train_window(const std::vector<NodeId>& walk, std::size_t center, double lr, Rng& rng,
                      std::vector<std::uint32_t>& negatives) {
        std::uint32_t target = index_.at(walk[center]);
        std::size_t lo = center >= static_cast<std::size_t>(cfg_.window) ? center - cfg_.window : 0;
        std::size_t hi = std::min(walk.size(), center + cfg_.window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (j == center)
                continue;
            std::uint32_t input = index_.at(walk[j]);
            negatives.clear();
            for (int k = 0; k < cfg_.negative_samples; ++k) {
                std::uint32_t neg = draw_negative(rng);
                if (neg != target)
                    negatives.push_back(neg);
            }
            apply_sgns_update(input, target, negatives, lr);
        }
    }

    void run_epochs(const WalkCorpus& corpus, int threads) {
        if (cfg_.epochs == 0)
            return;
        const std::size_t tokens_per_epoch = corpus.token_count();
        const double total_tokens =
            static_cast<double>(tokens_per_epoch) * static_cast<double>(cfg_.epochs);
        const double lr0 = cfg_.initial_learning_rate;
        const double lr_min = cfg_.min_learning_rate;

        if (threads <= 1) {
            std::vector<std::uint32_t> negatives;
            std::size_t done = 0;
            for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
                for (const auto& walk : corpus.walks) {
                    for (std::size_t c = 0; c < walk.size(); ++c) {
                        double lr = std::max(lr_min, lr0 - (lr0 - lr_min) * (static_cast<double>(done) / total_tokens));
                        train_window(walk, c, lr, rng_, negatives);
                        ++done;
                    }
                }
            }
            return;
        }

        // Hogwild: walks sharded round-robin, updates race on the shared
        // vectors. Results vary run to run; only mode (a) is deterministic.
        std::atomic<std::size_t> done{0};
        const std::uint64_t phase_seed = rng_.next_u64();
        auto shard_worker = [&](int shard, int n_shards) {
            Rng rng(mix_seed(phase_seed, static_cast<std::uint64_t>(shard)));
            std::vector<std::uint32_t> negatives;
            for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
                for (std::size_t w = shard; w < corpus.walks.size(); w += n_shards) {
                    const auto& walk = corpus.walks[w];
                    for (std::size_t c = 0; c < walk.size(); ++c) {
                        std::size_t t = done.fetch_add(1, std::memory_order_relaxed);
                        double lr = std::max(lr_min, lr0 - (lr0 - lr_min) * (static_cast<double>(t) / total_tokens));
                        train_window(walk, c, lr, rng, negatives);
                    }
                }
            }
        };
        int n_shards = std::min<int>(threads, static_cast<int>(corpus.walks.size()));
        std::vector<std::thread> pool;
        for (int s = 0; s < n_shards; ++s)
            pool.emplace_back(shard_worker, s, n_shards);
        for (auto& t : pool)
            t.join();
    }

    TrainerConfig cfg_;
    Rng rng_;
    bool trained_ = false;
    std::vector<NodeId> vocab_nodes_;
    std::unordered_map<NodeId, std::uint32_t> index_;
    std::vector<std::uint64_t> counts_;
    std::vector<double> neg_cdf_;
    std::vector<double> input_;  // |vocab| x dim, row-major
    std::vector<double> output_; // |vocab| x dim, row-major
};

inline EmbeddingModel train_model(const WalkCorpus& corpus, const TrainerConfig& cfg, int threads = 1) {
    EmbeddingModel model(cfg);
    model.train(corpus, threads);
    return model;
}

inline void update_model(EmbeddingModel& model, const WalkCorpus& corpus, int threads = 1) {
    model.update(corpus, threads);
}

inline SnapshotEmbedding extract_embedding(const EmbeddingModel& model, std::span<const NodeId> nodes,
                                           int snapshot_index = 0) {
    return model.extract(nodes, snapshot_index);
}

/// The full dynamic embedding loop: train on walks from every node of the
/// first snapshot, then per subsequent snapshot sample walks from the delta
/// nodes only, update the model, and extract one embedding per snapshot.
inline EmbeddingSequence embed_dynamic(const SnapshotSequence& seq, const SamplingPlan& plan,
                                       const TrainerConfig& cfg, int sampler_threads = 1,
                                       int trainer_threads = 1) {
    if (seq.snapshots.empty())
        throw std::invalid_argument("embed_dynamic: empty snapshot sequence");

    const Snapshot& first = seq.snapshots.front();
    WalkCorpus corpus = sample_walks(first, first.nodes, plan, sampler_threads);
    EmbeddingModel model = train_model(corpus, cfg, trainer_threads);

    EmbeddingSequence embeddings;
    embeddings.push_back(model.extract(first.nodes, first.index));

    for (std::size_t i = 1; i < seq.snapshots.size(); ++i) {
        const Snapshot& current = seq.snapshots[i];
        std::vector<NodeId> delta = delta_nodes(current, seq.snapshots[i - 1]);
        WalkCorpus delta_corpus = sample_walks(current, delta, plan, sampler_threads);
        model.update(delta_corpus, trainer_threads);
        embeddings.push_back(model.extract(current.nodes, current.index));
    }
    return embeddings;
}

/// word2vec text format: "<count> <dimension>" header, then one node per
/// line as "<label> <v1> ... <vd>" with 6 significant digits.
inline void write_embedding(std::ostream& out, const SnapshotEmbedding& emb,
                            std::span<const NodeLabel> labels) {
    out << emb.nodes.size() << ' ' << (emb.vectors.empty() ? 0 : emb.vectors.front().size()) << '\n';
    char buf[64];
    for (std::size_t i = 0; i < emb.nodes.size(); ++i) {
        out << labels[emb.nodes[i]];
        for (double x : emb.vectors[i]) {
            std::snprintf(buf, sizeof(buf), " %.6g", x);
            out << buf;
        }
        out << '\n';
    }
}

/// Reads an embedding dump back, translating labels to dense ids.
inline SnapshotEmbedding read_embedding(std::istream& in, const std::unordered_map<NodeLabel, NodeId>& id_of,
                                        int snapshot_index = 0) {
    std::size_t count = 0, dim = 0;
    if (!(in >> count >> dim))
        throw std::runtime_error("embedding dump: bad header");
    std::vector<std::pair<NodeId, std::vector<double>>> rows;
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        NodeLabel label;
        if (!(in >> label))
            throw std::runtime_error("embedding dump: truncated at row " + std::to_string(i));
        auto it = id_of.find(label);
        if (it == id_of.end())
            throw std::runtime_error("embedding dump: unknown node label " + std::to_string(label));
        std::vector<double> vec(dim);
        for (std::size_t j = 0; j < dim; ++j)
            if (!(in >> vec[j]))
                throw std::runtime_error("embedding dump: truncated vector for label " + std::to_string(label));
        rows.emplace_back(it->second, std::move(vec));
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SnapshotEmbedding emb;
    emb.snapshot_index = snapshot_index;
    for (auto& [id, vec] : rows) {
        emb.nodes.push_back(id);
        emb.vectors.push_back(std::move(vec));
    }
    return emb;
}

} // namespace deephub
