#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "textgraph/common/partition.hpp"
#include "textgraph/corpus/cooccurrence.hpp"
#include "textgraph/corpus/corpus.hpp"

namespace textgraph::metrics {

/// H(C) + H(D) - 2 I(C; D) in nats. Throws SizeMismatch.
double variation_of_information(const Partition& c, const Partition& d);

/// I(C; D) / sqrt(H(C) H(D)). Exactly 1 only when the partitions are equal up
/// to relabeling. Throws ZeroEntropy when either partition has one cluster.
double nmi(const Partition& c, const Partition& d);

double entropy(const Partition& p);

/// ln(P(w1 w2) / (P(w1) P(w2))). Throws UndefinedPMI when the pair never
/// co-occurs or either word is absent.
double pmi_pair(const std::string& w1, const std::string& w2, const corpus::CooccurrenceStats& stats);
std::optional<double> try_pmi_pair(const std::string& w1, const std::string& w2,
                                   const corpus::CooccurrenceStats& stats);

struct ClusterTopic {
    std::size_t cluster = 0;
    std::size_t size = 0;
    std::vector<std::string> top_words;
    std::size_t defined_pairs = 0;
    std::optional<double> median_pmi;  ///< empty when no pair co-occurs
};

struct TopicScoreReport {
    std::vector<ClusterTopic> clusters;
    double pmi_hat = 0.0;  ///< sum of size / N times the cluster median (0 where undefined)
};

/// Topic coherence of every cluster from its `top_n_words` most frequent stems.
/// Probabilities are taken over all of `records`.
TopicScoreReport pmi_partition(const Partition& partition, std::span<const corpus::DocumentRecord> records,
                               std::size_t top_n_words = 10);

/// Most frequent tokens over the given documents, ties in lexicographic order.
std::vector<std::string> top_words(std::span<const corpus::DocumentRecord* const> docs, std::size_t n);

struct ContingencyTable {
    std::vector<std::string> categories;           ///< column labels, sorted
    std::vector<std::vector<std::size_t>> counts;  ///< clusters x categories
    std::vector<std::size_t> row_totals;
    std::vector<std::size_t> column_totals;
    std::vector<std::vector<double>> z_scores;     ///< (O - E) / sqrt(E), 0 where E = 0
};

ContingencyTable contingency_zscores(const Partition& partition, std::span<const std::string> categories);

struct SankeyLink {
    std::size_t fine = 0;
    std::size_t coarse = 0;
    std::size_t count = 0;

    friend bool operator==(const SankeyLink&, const SankeyLink&) = default;
};

/// One link per non-empty intersection, ordered by (fine, coarse).
std::vector<SankeyLink> sankey_links(const Partition& fine, const Partition& coarse);

struct ClassScores {
    int label = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

/// Per-class scores for every label seen in either vector, ascending.
std::vector<ClassScores> class_scores(std::span<const int> predicted, std::span<const int> truth);

/// F1 averaged over classes with weights equal to true support / N.
double weighted_f1(std::span<const int> predicted, std::span<const int> truth);

nlohmann::json to_json(const TopicScoreReport& report);
nlohmann::json to_json(const ContingencyTable& table);
nlohmann::json to_json(std::span<const SankeyLink> links);

}  // namespace textgraph::metrics
