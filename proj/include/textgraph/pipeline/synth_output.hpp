#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace textgraph::pipeline {

/// Writes the synthetic benchmark inputs with ready-to-run configs:
///   planted/  64-node two-level clique hierarchy as an edge list, its two
///             planted partitions, and config.json
///   topics/   labeled topic corpus (documents.jsonl, embeddings.txt), the
///             planted topic partition, and config.json comparing both sources
/// Returns a summary of what was written.
std::string write_synthetic_inputs(const std::filesystem::path& out_dir, std::uint64_t seed);

}  // namespace textgraph::pipeline
