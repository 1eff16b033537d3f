#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "textgraph/pipeline/config.hpp"

namespace textgraph::pipeline {

/// Stages in run order. `all` runs every stage that applies to the config.
inline const std::vector<std::string> kStages{"preprocess", "graph", "scan", "select", "evaluate", "classify"};

/// Environment variable that replaces the configured output directory.
inline constexpr const char* kOutputRootVariable = "TEXTGRAPH_OUTPUT_ROOT";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// manifest.json in the output root: for every stage that has run, the
/// settings it ran with and the SHA-256 of every input and output.
struct StageRecord {
    nlohmann::json settings;
    std::map<std::string, std::string> inputs;   ///< "input:<role>" or output-relative path -> hash
    std::map<std::string, std::string> outputs;  ///< output-relative path -> hash
};

struct Manifest {
    std::uint64_t seed = 0;
    std::map<std::string, StageRecord> stages;

    static Manifest load(const std::filesystem::path& root);
    void save(const std::filesystem::path& root) const;
};

class Pipeline {
public:
    /// `force` skips the staleness checks on upstream artifacts.
    Pipeline(PipelineConfig config, bool force);

    const std::filesystem::path& root() const noexcept { return root_; }
    const PipelineConfig& config() const noexcept { return config_; }
    const Manifest& manifest() const noexcept { return manifest_; }

    /// Runs one stage or `all`. Returns a human-readable summary.
    std::string run(const std::string& stage);

    bool applies(const std::string& stage) const;

private:
    struct StageIo {
        std::map<std::string, std::string> inputs;
        std::map<std::string, std::string> outputs;
    };

    std::string run_stage(const std::string& stage);
    std::string preprocess(StageIo& io);
    std::string graph(StageIo& io);
    std::string scan(StageIo& io);
    std::string select(StageIo& io);
    std::string evaluate(StageIo& io);
    std::string classify(StageIo& io);

    /// Reads an artifact of an earlier stage after checking that it is fresh.
    std::string read_artifact(StageIo& io, const std::string& relative);
    std::string read_input(StageIo& io, const std::string& role, const std::filesystem::path& path);
    void write_artifact(StageIo& io, const std::string& relative, std::string_view contents);
    void check_fresh(const std::string& stage, std::set<std::string>& checked) const;
    std::filesystem::path input_path(const std::string& role) const;

    PipelineConfig config_;
    bool force_ = false;
    std::filesystem::path root_;
    Manifest manifest_;
};

}  // namespace textgraph::pipeline
