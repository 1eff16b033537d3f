#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "textgraph/common/error.hpp"
#include "textgraph/pipeline/pipeline.hpp"
#include "textgraph/pipeline/synth_output.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kStale = 3 };

int report(const std::string& kind, const std::string& message, int code) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace textgraph;

    CLI::App app{"Multiscale document clustering with Markov Stability"};
    app.require_subcommand(1, 1);

    std::string config_path;
    bool force = false;
    std::optional<std::size_t> workers;
    std::optional<std::uint64_t> seed;
    std::string synth_out;

    const std::vector<std::string> stages{"preprocess", "graph", "scan", "select", "evaluate", "classify", "all"};
    const std::map<std::string, std::string> help{
        {"preprocess", "tokenize, filter and stem the documents"},
        {"graph", "build the MST-kNN similarity graph of every source"},
        {"scan", "optimize Markov Stability over the time grid"},
        {"select", "pick robust scales from the VI profile"},
        {"evaluate", "NMI, PMI topics, contingency tables and Sankey flows per scale"},
        {"classify", "cross-validated harm classification"},
        {"all", "every stage that applies to the config, in order"}};
    for (const std::string& stage : stages) {
        CLI::App* sub = app.add_subcommand(stage, help.at(stage));
        sub->add_option("--config", config_path, "pipeline config (JSON)")->required();
        sub->add_flag("--force", force, "use upstream artifacts even if they are stale");
        sub->add_option("--workers", workers, "worker threads (0: all cores, 1: serial)");
        sub->add_option("--seed", seed, "base seed, overrides the config");
    }
    CLI::App* synth = app.add_subcommand("synth", "write the synthetic benchmark inputs and configs");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report("UsageError", e.what(), kUsage);
    }

    try {
        if (synth->parsed()) {
            std::cout << pipeline::write_synthetic_inputs(synth_out, seed.value_or(0));
            return kOk;
        }
        pipeline::PipelineConfig config = pipeline::load_config(config_path);
        if (workers) config.workers = *workers;
        if (seed) config.seed = *seed;
        pipeline::Pipeline run(std::move(config), force);
        std::cout << run.run(app.get_subcommands().front()->get_name());
        return kOk;
    } catch (const ConfigError& e) {
        return report(e.kind(), e.what(), kUsage);
    } catch (const StaleArtifact& e) {
        return report(e.kind(), e.what(), kStale);
    } catch (const Error& e) {
        return report(e.kind(), e.what(), kFailure);
    } catch (const std::exception& e) {
        return report("InternalError", e.what(), kFailure);
    }
}
