#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "textgraph/harmclf/classify.hpp"
#include "textgraph/scaleselect/scaleselect.hpp"

namespace textgraph::pipeline {

struct GridSpec {
    bool logarithmic = true;
    double lo = 0.01;
    double hi = 100.0;
    std::size_t points = 200;  ///< log grid
    double step = 0.01;        ///< linear grid

    std::vector<double> times() const;
};

struct PipelineConfig {
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;
    std::size_t workers = 0;  ///< 0: hardware concurrency

    std::optional<std::filesystem::path> documents;
    std::optional<std::filesystem::path> embeddings;
    std::optional<std::filesystem::path> stopwords;
    std::optional<std::filesystem::path> graph_edges;  ///< a ready graph replaces the text stages
    std::optional<std::filesystem::path> graph_nodes;

    std::vector<std::string> sources;  ///< "tfidf", "external", or "graph"
    std::size_t k = 13;

    GridSpec grid;
    std::size_t runs = 500;
    std::size_t keep = 50;

    scaleselect::SelectionConfig selection;

    std::optional<std::string> category;
    std::size_t top_words = 10;
    std::size_t top_ngrams = 20;
    std::map<std::string, std::filesystem::path> references;  ///< name -> partition file

    bool classify = false;
    std::string classify_source;
    std::vector<std::string> feature_sets;
    std::vector<harmclf::ModelKind> classifiers;
    std::size_t folds = 5;
    std::optional<std::vector<std::size_t>> sample_counts;  ///< per harm class 1..5
    double alpha = 1.0;
    harmclf::SvmOptions svm;

    /// Settings that determine a stage's outputs, as canonical JSON. Worker
    /// counts are left out since they never change results.
    nlohmann::json stage_settings(const std::string& stage) const;
};

/// Relative paths resolve against `base_dir`. Throws ConfigError for unknown
/// keys, bad values, and input files that do not exist.
PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// Partition file contents: {"t", "num_clusters", "partition"}.
Partition read_partition_file(const std::filesystem::path& path);

}  // namespace textgraph::pipeline
