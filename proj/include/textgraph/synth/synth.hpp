#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "textgraph/common/partition.hpp"
#include "textgraph/corpus/corpus.hpp"
#include "textgraph/simgraph/simgraph.hpp"

namespace textgraph::synth {

struct PlantedHierarchy {
    std::size_t groups = 4;             ///< supergroups
    std::size_t cliques_per_group = 4;
    std::size_t clique_size = 4;
    double within_clique = 1.0;
    double within_group = 0.3;          ///< every pair in different cliques of one group
    double across_groups = 0.05;        ///< every pair in different groups
};

struct PlantedGraph {
    simgraph::SparseGraph graph;
    Partition fine;    ///< one cluster per clique
    Partition coarse;  ///< one cluster per supergroup
};

/// Complete weighted graph with two planted levels. Node v belongs to clique
/// v / clique_size and group v / (clique_size * cliques_per_group).
PlantedGraph planted_hierarchy(const PlantedHierarchy& spec = {});

/// Erdos-Renyi graph with uniform(0.5, 1) weights, resampled until connected.
simgraph::SparseGraph random_graph(std::size_t n, double edge_probability, std::uint64_t seed);

/// Spanning tree plus random extra edges, weights uniform in [0.1, 1).
simgraph::SparseGraph random_connected_graph(std::size_t n, double extra_edge_probability, std::uint64_t seed);

struct TopicCorpusSpec {
    std::size_t topics = 2;
    std::size_t documents_per_topic = 100;
    std::size_t words_per_topic = 40;
    std::size_t shared_words = 0;       ///< vocabulary drawn by every topic
    std::size_t min_length = 8;
    std::size_t max_length = 20;
    double shared_rate = 0.0;           ///< probability a token comes from the shared vocabulary
    double leak_rate = 0.0;             ///< probability a token comes from another topic
    double zipf_exponent = 1.0;
    std::size_t categories = 0;         ///< 0: no category attribute
    double category_noise = 0.2;        ///< probability the category ignores the topic
};

struct TopicCorpus {
    std::vector<corpus::DocumentRecord> records;  ///< tokens filled; raw_text joins them
    Partition topics;
};

/// Documents whose tokens are pseudo-words that preprocess to themselves.
TopicCorpus topic_corpus(const TopicCorpusSpec& spec, std::uint64_t seed);

/// Pseudo-word for an index: lowercase letters, no stop-word, stable under stemming.
std::string pseudo_word(std::size_t index);

/// Topic corpus with ordinal harm labels tied to topics (1 + topic mod 5) on
/// a random subset of documents, plus an embedding per document drawn around
/// a per-topic centre. Labels depend on the topic only through this map, so
/// a clustering that recovers the topics carries label information.
struct LabeledTopicSpec {
    TopicCorpusSpec text{.topics = 20,
                         .documents_per_topic = 30,
                         .words_per_topic = 300,
                         .min_length = 8,
                         .max_length = 12,
                         .leak_rate = 0.1,
                         .zipf_exponent = 0.6,
                         .categories = 4};
    double label_noise = 0.05;      ///< probability the label is uniform instead
    double labeled_fraction = 0.4;  ///< documents without a label keep harm empty
    std::size_t embedding_dimension = 32;
    double embedding_noise = 1.0;   ///< per-coordinate sd around unit-variance centres
};

struct LabeledTopicCorpus {
    TopicCorpus corpus;
    Eigen::MatrixXd embeddings;  ///< one row per record
};

LabeledTopicCorpus labeled_topic_corpus(const LabeledTopicSpec& spec, std::uint64_t seed);

struct Blobs {
    Eigen::MatrixXd features;
    std::vector<int> labels;
};

/// Gaussian blobs with unit variance around class centres placed on scaled
/// coordinate axes, so every pair of centres is `separation` apart.
Blobs gaussian_blobs(const std::vector<std::size_t>& class_sizes, std::size_t dimension, double separation,
                     std::uint64_t seed);

}  // namespace textgraph::synth
