#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textgraph/common/partition.hpp"
#include "textgraph/corpus/corpus.hpp"
#include "textgraph/corpus/embedding.hpp"

namespace textgraph::harmclf {

/// Column used for records that lack the category.
inline constexpr std::string_view kUnknownValue = "unknown";

struct OneHotBlock {
    std::vector<std::string> values;  ///< column order = first appearance
    Eigen::MatrixXd columns;          ///< N x values.size(), one 1 per row
};

OneHotBlock one_hot(std::span<const corpus::DocumentRecord> records, const std::string& category);

/// One column per cluster, in cluster-id order.
Eigen::MatrixXd one_hot(const Partition& partition);

enum class BlockKind { Categorical, TextTfidf, TextEmbedding, MsLabels };

std::string_view to_string(BlockKind kind);

struct FeatureBlock {
    BlockKind kind = BlockKind::TextTfidf;
    std::string category;          ///< Categorical only
    std::size_t num_clusters = 0;  ///< MsLabels only; 0 accepts any partition

    static FeatureBlock categorical(std::string name) { return {BlockKind::Categorical, std::move(name), 0}; }
    static FeatureBlock tfidf() { return {BlockKind::TextTfidf, {}, 0}; }
    static FeatureBlock embedding() { return {BlockKind::TextEmbedding, {}, 0}; }
    static FeatureBlock ms_labels(std::size_t clusters = 0) { return {BlockKind::MsLabels, {}, clusters}; }
};

/// Ordered feature blocks. Text form: blocks joined by '+', each one of
/// `tfidf`, `embedding`, `cat:<name>`, `ms` or `ms:<clusters>`.
struct FeatureSpec {
    std::vector<FeatureBlock> blocks;

    static FeatureSpec parse(std::string_view text);
    std::string to_string() const;
};

/// Where the text and cluster blocks come from. Rows must follow the record
/// order.
struct FeatureSources {
    const corpus::EmbeddingMatrix* tfidf = nullptr;
    const corpus::EmbeddingMatrix* embedding = nullptr;
    const Partition* partition = nullptr;
};

struct ColumnRange {
    BlockKind kind;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct FeatureMatrix {
    Eigen::MatrixXd x;
    std::vector<ColumnRange> blocks;

    /// Column ranges that cross-validation standardizes on training folds.
    std::vector<ColumnRange> standardized() const;
};

/// Concatenates the blocks in spec order. Never reads harm labels.
/// Throws MissingPartition for an MS block without a partition, ConfigError
/// for an empty spec, a missing text source or a cluster count mismatch, and
/// SizeMismatch when a source does not have one row per record.
FeatureMatrix assemble_features(std::span<const corpus::DocumentRecord> records, const FeatureSpec& spec,
                                const FeatureSources& sources);

}  // namespace textgraph::harmclf
