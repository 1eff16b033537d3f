#include "textgraph/pipeline/config.hpp"

#include <cmath>
#include <set>

#include "textgraph/common/error.hpp"
#include "textgraph/common/io.hpp"
#include "textgraph/mstability/scan.hpp"

namespace textgraph::pipeline {

std::vector<double> GridSpec::times() const {
    return logarithmic ? mstability::log_time_grid(lo, hi, points) : mstability::linear_time_grid(lo, hi, step);
}

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

const json* find(const json& j, const char* key) {
    const auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + " must be a number");
    return v.get<double>();
}

std::size_t count(const json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError(where + " must be a non-negative integer");
    return v.get<std::size_t>();
}

std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) throw ConfigError(where + " must be a string");
    return v.get<std::string>();
}

fs::path existing_file(const json& v, const std::string& where, const fs::path& base) {
    const fs::path p = base / text(v, where);
    if (!fs::is_regular_file(p)) throw ConfigError(where + ": no such file '" + p.string() + "'");
    return p.lexically_normal();
}

}  // namespace

PipelineConfig parse_config(const json& j, const fs::path& base_dir) {
    allow_keys(j, "config", {"output_dir", "seed", "workers", "input", "graph", "scan", "select", "evaluate", "classify"});
    PipelineConfig c;
    c.output_dir = (base_dir / (find(j, "output_dir") ? text(j["output_dir"], "output_dir") : "output")).lexically_normal();
    if (const json* v = find(j, "seed")) c.seed = count(*v, "seed");
    if (const json* v = find(j, "workers")) c.workers = count(*v, "workers");

    const json input = j.value("input", json::object());
    allow_keys(input, "input", {"documents", "embeddings", "stopwords", "graph"});
    if (const json* v = find(input, "documents")) c.documents = existing_file(*v, "input.documents", base_dir);
    if (const json* v = find(input, "embeddings")) c.embeddings = existing_file(*v, "input.embeddings", base_dir);
    if (const json* v = find(input, "stopwords")) c.stopwords = existing_file(*v, "input.stopwords", base_dir);
    if (const json* g = find(input, "graph")) {
        allow_keys(*g, "input.graph", {"edges", "nodes"});
        if (!find(*g, "edges")) throw ConfigError("input.graph needs 'edges'");
        c.graph_edges = existing_file((*g)["edges"], "input.graph.edges", base_dir);
        if (const json* v = find(*g, "nodes")) c.graph_nodes = existing_file(*v, "input.graph.nodes", base_dir);
    }

    const json graph = j.value("graph", json::object());
    allow_keys(graph, "graph", {"source", "k"});
    if (const json* v = find(graph, "k")) c.k = count(*v, "graph.k");
    if (c.graph_edges) {
        if (find(graph, "source")) throw ConfigError("graph.source does not apply when input.graph is given");
        c.sources = {"graph"};
    } else {
        const std::string source = find(graph, "source") ? text(graph["source"], "graph.source") : "tfidf";
        if (source == "tfidf") c.sources = {"tfidf"};
        else if (source == "external") c.sources = {"external"};
        else if (source == "both") c.sources = {"tfidf", "external"};
        else throw ConfigError("graph.source must be tfidf, external or both");
        if (!c.documents) throw ConfigError("input.documents is required");
        const bool external = source != "tfidf";
        if (external && !c.embeddings) throw ConfigError("graph.source '" + source + "' needs input.embeddings");
    }

    const json scan = j.value("scan", json::object());
    allow_keys(scan, "scan", {"grid", "runs", "keep"});
    if (const json* g = find(scan, "grid")) {
        allow_keys(*g, "scan.grid", {"type", "lo", "hi", "points", "step"});
        const std::string type = find(*g, "type") ? text((*g)["type"], "scan.grid.type") : "log";
        if (type != "log" && type != "linear") throw ConfigError("scan.grid.type must be log or linear");
        c.grid.logarithmic = type == "log";
        if (const json* v = find(*g, "lo")) c.grid.lo = number(*v, "scan.grid.lo");
        if (const json* v = find(*g, "hi")) c.grid.hi = number(*v, "scan.grid.hi");
        if (const json* v = find(*g, "points")) c.grid.points = count(*v, "scan.grid.points");
        if (const json* v = find(*g, "step")) c.grid.step = number(*v, "scan.grid.step");
    }
    if (const json* v = find(scan, "runs")) c.runs = count(*v, "scan.runs");
    if (const json* v = find(scan, "keep")) c.keep = count(*v, "scan.keep");
    if (!(c.grid.lo > 0.0) || !(c.grid.hi > c.grid.lo)) throw ConfigError("scan.grid needs 0 < lo < hi");
    if (c.grid.logarithmic && c.grid.points < 2) throw ConfigError("scan.grid.points must be at least 2");
    if (!c.grid.logarithmic && !(c.grid.step > 0.0)) throw ConfigError("scan.grid.step must be positive");
    if (c.runs == 0) throw ConfigError("scan.runs must be positive");
    if (c.keep == 0 || c.keep > c.runs) throw ConfigError("scan.keep must be in [1, runs]");

    const json select = j.value("select", json::object());
    allow_keys(select, "select", {"dip_threshold", "plateau_threshold", "min_plateau_points", "exclude_trivial"});
    if (const json* v = find(select, "dip_threshold")) c.selection.dip_threshold = number(*v, "select.dip_threshold");
    if (const json* v = find(select, "plateau_threshold"))
        c.selection.plateau_threshold = number(*v, "select.plateau_threshold");
    if (const json* v = find(select, "min_plateau_points"))
        c.selection.min_plateau_points = count(*v, "select.min_plateau_points");
    if (const json* v = find(select, "exclude_trivial")) {
        if (!v->is_boolean()) throw ConfigError("select.exclude_trivial must be true or false");
        c.selection.exclude_trivial = v->get<bool>();
    }
    if (c.selection.dip_threshold.value_or(0.0) < 0.0 || c.selection.plateau_threshold.value_or(0.0) < 0.0)
        throw ConfigError("selection thresholds must be non-negative");
    if (c.selection.min_plateau_points && *c.selection.min_plateau_points == 0)
        throw ConfigError("select.min_plateau_points must be positive");

    const json evaluate = j.value("evaluate", json::object());
    allow_keys(evaluate, "evaluate", {"category", "top_words", "top_ngrams", "references"});
    if (const json* v = find(evaluate, "category")) c.category = text(*v, "evaluate.category");
    if (const json* v = find(evaluate, "top_words")) c.top_words = count(*v, "evaluate.top_words");
    if (const json* v = find(evaluate, "top_ngrams")) c.top_ngrams = count(*v, "evaluate.top_ngrams");
    if (c.top_words < 2) throw ConfigError("evaluate.top_words must be at least 2");
    if (const json* refs = find(evaluate, "references")) {
        if (!refs->is_object()) throw ConfigError("evaluate.references must map names to partition files");
        for (const auto& [name, v] : refs->items())
            c.references[name] = existing_file(v, "evaluate.references." + name, base_dir);
    }

    if (const json* cl = find(j, "classify")) {
        allow_keys(*cl, "classify", {"source", "features", "classifiers", "folds", "sample", "alpha", "svm"});
        c.classify = true;
        if (!c.documents) throw ConfigError("classify needs input.documents");
        c.classify_source = find(*cl, "source") ? text((*cl)["source"], "classify.source") : c.sources.front();
        if (std::find(c.sources.begin(), c.sources.end(), c.classify_source) == c.sources.end())
            throw ConfigError("classify.source '" + c.classify_source + "' is not a graph source of this run");
        const json features = cl->value("features", json::array({"tfidf", "tfidf+ms"}));
        if (!features.is_array() || features.empty()) throw ConfigError("classify.features must be a non-empty list");
        for (const json& f : features) {
            const std::string s = text(f, "classify.features[]");
            const harmclf::FeatureSpec spec = harmclf::FeatureSpec::parse(s);  // validates
            for (const auto& b : spec.blocks)
                if (b.kind == harmclf::BlockKind::TextEmbedding && !c.embeddings)
                    throw ConfigError("feature set '" + s + "' needs input.embeddings");
            c.feature_sets.push_back(s);
        }
        const json classifiers = cl->value("classifiers", json::array({"ridge", "svm"}));
        if (!classifiers.is_array() || classifiers.empty())
            throw ConfigError("classify.classifiers must be a non-empty list");
        for (const json& m : classifiers) c.classifiers.push_back(harmclf::parse_model_kind(text(m, "classify.classifiers[]")));
        if (const json* v = find(*cl, "folds")) c.folds = count(*v, "classify.folds");
        if (c.folds < 2) throw ConfigError("classify.folds must be at least 2");
        if (const json* v = find(*cl, "sample")) {
            if (!v->is_array() || v->size() != harmclf::kHarmClasses.size())
                throw ConfigError("classify.sample must list one count per harm class (5)");
            std::vector<std::size_t> counts;
            for (const json& n : *v) counts.push_back(count(n, "classify.sample[]"));
            c.sample_counts = counts;
        }
        if (const json* v = find(*cl, "alpha")) c.alpha = number(*v, "classify.alpha");
        if (!(c.alpha > 0.0)) throw ConfigError("classify.alpha must be positive");
        if (const json* s = find(*cl, "svm")) {
            allow_keys(*s, "classify.svm", {"c", "tolerance", "max_epochs"});
            if (const json* v = find(*s, "c")) c.svm.c = number(*v, "classify.svm.c");
            if (const json* v = find(*s, "tolerance")) c.svm.tolerance = number(*v, "classify.svm.tolerance");
            if (const json* v = find(*s, "max_epochs")) c.svm.max_epochs = count(*v, "classify.svm.max_epochs");
            if (!(c.svm.c > 0.0) || c.svm.tolerance < 0.0 || c.svm.max_epochs == 0)
                throw ConfigError("classify.svm needs c > 0, tolerance >= 0, max_epochs >= 1");
        }
    }
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw ConfigError("no such config file '" + path.string() + "'");
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

json PipelineConfig::stage_settings(const std::string& stage) const {
    auto optional_number = [](const auto& v) { return v ? json(*v) : json(nullptr); };
    if (stage == "preprocess") return {{"custom_stopwords", stopwords.has_value()}};
    if (stage == "graph") return {{"sources", sources}, {"k", k}};
    if (stage == "scan") {
        json g{{"type", grid.logarithmic ? "log" : "linear"}, {"lo", grid.lo}, {"hi", grid.hi}};
        if (grid.logarithmic) g["points"] = grid.points;
        else g["step"] = grid.step;
        return {{"grid", g}, {"runs", runs}, {"keep", keep}, {"seed", seed}};
    }
    if (stage == "select")
        return {{"dip_threshold", optional_number(selection.dip_threshold)},
                {"plateau_threshold", optional_number(selection.plateau_threshold)},
                {"min_plateau_points", optional_number(selection.min_plateau_points)},
                {"exclude_trivial", selection.exclude_trivial}};
    if (stage == "evaluate") {
        json refs = json::array();
        for (const auto& [name, path] : references) refs.push_back(name);
        return {{"category", category ? json(*category) : json(nullptr)},
                {"top_words", top_words},
                {"top_ngrams", top_ngrams},
                {"references", refs}};
    }
    if (stage == "classify") {
        json models = json::array();
        for (const auto m : classifiers) models.push_back(harmclf::to_string(m));
        return {{"source", classify_source},
                {"features", feature_sets},
                {"classifiers", models},
                {"folds", folds},
                {"sample", sample_counts ? json(*sample_counts) : json(nullptr)},
                {"alpha", alpha},
                {"svm", {{"c", svm.c}, {"tolerance", svm.tolerance}, {"max_epochs", svm.max_epochs}}},
                {"seed", seed}};
    }
    throw InvalidArgument("unknown stage '" + stage + "'");
}

Partition read_partition_file(const fs::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (j.is_object() && !j.contains("partition")) throw ParseError(path.string() + ": missing 'partition'");
    const json& labels = j.is_object() ? j["partition"] : j;
    if (!labels.is_array()) throw ParseError(path.string() + ": expected a list of cluster ids");
    std::vector<std::int64_t> v;
    for (const json& x : labels) {
        if (!x.is_number_integer()) throw ParseError(path.string() + ": cluster ids must be integers");
        v.push_back(x.get<std::int64_t>());
    }
    return Partition::from_labels(std::span<const std::int64_t>(v));
}

}  // namespace textgraph::pipeline
