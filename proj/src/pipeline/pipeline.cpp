#include "textgraph/pipeline/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>

#include "textgraph/common/error.hpp"
#include "textgraph/common/io.hpp"
#include "textgraph/common/random.hpp"
#include "textgraph/corpus/embedding.hpp"
#include "textgraph/corpus/ngrams.hpp"
#include "textgraph/harmclf/classify.hpp"
#include "textgraph/metrics/metrics.hpp"
#include "textgraph/mstability/markov.hpp"
#include "textgraph/mstability/scan.hpp"
#include "textgraph/scaleselect/scaleselect.hpp"
#include "textgraph/simgraph/simgraph.hpp"

namespace textgraph::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

json ordered(const nlohmann::json& j) { return json::parse(j.dump()); }

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1)
        throw IoError("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text_file(path)); }

Manifest Manifest::load(const fs::path& root) {
    Manifest m;
    const fs::path file = root / "manifest.json";
    if (!fs::exists(file)) return m;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(file));
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& [stage, rec] : j.at("stages").items()) {
            StageRecord r;
            r.settings = rec.at("settings");
            r.inputs = rec.at("inputs").get<std::map<std::string, std::string>>();
            r.outputs = rec.at("outputs").get<std::map<std::string, std::string>>();
            m.stages[stage] = std::move(r);
        }
    } catch (const json::exception& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
    return m;
}

void Manifest::save(const fs::path& root) const {
    json stages_json = json::object();
    for (const auto& [stage, r] : stages) {
        stages_json[stage] = {{"settings", ordered(r.settings)},
                              {"settings_sha256", sha256_hex(r.settings.dump())},
                              {"inputs", r.inputs},
                              {"outputs", r.outputs}};
    }
    const json j{{"seed", seed}, {"stages", stages_json}};
    const fs::path tmp = root / "manifest.json.tmp";
    write_text_file(tmp, j.dump(2) + "\n");
    fs::rename(tmp, root / "manifest.json");
}

namespace {

std::string producer_of(const std::string& relative) {
    const auto slash = relative.find('/');
    return relative.substr(0, slash);
}

std::string corpus_jsonl(std::span<const corpus::DocumentRecord> records) {
    std::string out;
    for (const auto& r : records) {
        json o;
        o["id"] = r.doc_id;
        o["text"] = r.raw_text;
        o["tokens"] = r.tokens;
        if (!r.categories.empty()) o["categories"] = r.categories;
        if (r.harm_label) o["harm"] = *r.harm_label;
        out += o.dump();
        out += '\n';
    }
    return out;
}

std::vector<corpus::DocumentRecord> parse_corpus_jsonl(std::string_view text) {
    std::vector<corpus::DocumentRecord> records = corpus::parse_documents(text);
    std::size_t pos = 0;
    std::size_t k = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        records.at(k++).tokens = json::parse(line).at("tokens").get<std::vector<std::string>>();
    }
    return records;
}

std::string partition_json(double t, const Partition& p) {
    json o;
    o["t"] = t;
    o["num_clusters"] = p.num_clusters();
    o["partition"] = p.assignment();
    return o.dump() + "\n";
}

Partition category_partition(std::span<const corpus::DocumentRecord> records, const std::string& category,
                             std::vector<std::string>* values) {
    std::vector<std::string> v;
    for (const auto& r : records) {
        const auto it = r.categories.find(category);
        v.push_back(it == r.categories.end() ? std::string(harmclf::kUnknownValue) : it->second);
    }
    std::vector<std::string> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> labels;
    for (const auto& s : v) labels.push_back(static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), s) - sorted.begin()));
    if (values) *values = std::move(v);
    return Partition::from_labels(std::span<const int>(labels));
}

json nmi_or_null(const Partition& a, const Partition& b) {
    try {
        return metrics::nmi(a, b);
    } catch (const ZeroEntropy&) {
        return nullptr;
    }
}

std::vector<std::string> doc_ids(std::span<const corpus::DocumentRecord> records) {
    std::vector<std::string> ids;
    for (const auto& r : records) ids.push_back(r.doc_id);
    return ids;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

struct SelectedScale {
    double t_star = 0.0;
    Partition partition;
};

}  // namespace

Pipeline::Pipeline(PipelineConfig config, bool force) : config_(std::move(config)), force_(force) {
    const char* env = std::getenv(kOutputRootVariable);
    root_ = env != nullptr && *env != '\0' ? fs::path(env) : config_.output_dir;
    manifest_ = Manifest::load(root_);
}

bool Pipeline::applies(const std::string& stage) const {
    if (stage == "preprocess") return config_.documents.has_value();
    if (stage == "classify") return config_.classify;
    return std::find(kStages.begin(), kStages.end(), stage) != kStages.end();
}

std::string Pipeline::run(const std::string& stage) {
    if (stage == "all") {
        std::string out;
        for (const std::string& s : kStages)
            if (applies(s)) out += run_stage(s);
        return out;
    }
    if (std::find(kStages.begin(), kStages.end(), stage) == kStages.end())
        throw ConfigError("unknown stage '" + stage + "'");
    if (!applies(stage)) {
        if (stage == "classify") throw ConfigError("config has no 'classify' section");
        throw ConfigError("stage '" + stage + "' needs input.documents");
    }
    return run_stage(stage);
}

std::string Pipeline::run_stage(const std::string& stage) {
    fs::create_directories(root_);
    StageIo io;
    std::string summary;
    if (stage == "preprocess") summary = preprocess(io);
    else if (stage == "graph") summary = graph(io);
    else if (stage == "scan") summary = scan(io);
    else if (stage == "select") summary = select(io);
    else if (stage == "evaluate") summary = evaluate(io);
    else summary = classify(io);

    manifest_.seed = config_.seed;
    manifest_.stages[stage] = StageRecord{config_.stage_settings(stage), std::move(io.inputs), std::move(io.outputs)};
    manifest_.save(root_);
    return summary;
}

fs::path Pipeline::input_path(const std::string& role) const {
    auto need = [&](const std::optional<fs::path>& p) -> fs::path {
        if (!p) throw StaleArtifact("input '" + role + "' is no longer configured");
        return *p;
    };
    if (role == "documents") return need(config_.documents);
    if (role == "embeddings") return need(config_.embeddings);
    if (role == "stopwords") return need(config_.stopwords);
    if (role == "graph_edges") return need(config_.graph_edges);
    if (role == "graph_nodes") return need(config_.graph_nodes);
    if (role.starts_with("reference:")) {
        const auto it = config_.references.find(role.substr(10));
        if (it == config_.references.end()) throw StaleArtifact("input '" + role + "' is no longer configured");
        return it->second;
    }
    throw StaleArtifact("unknown input role '" + role + "'");
}

void Pipeline::check_fresh(const std::string& stage, std::set<std::string>& checked) const {
    if (!checked.insert(stage).second) return;
    const auto it = manifest_.stages.find(stage);
    if (it == manifest_.stages.end()) throw StaleArtifact("stage '" + stage + "' has not been run in " + root_.string());
    const StageRecord& rec = it->second;
    if (rec.settings != config_.stage_settings(stage))
        throw StaleArtifact("stage '" + stage + "' ran with different settings; rerun it or pass --force");
    for (const auto& [key, hash] : rec.inputs) {
        if (key.starts_with("input:")) {
            const fs::path p = input_path(key.substr(6));
            if (!fs::exists(p) || sha256_file(p) != hash)
                throw StaleArtifact("input '" + p.string() + "' changed since stage '" + stage + "' ran");
        } else {
            const fs::path p = root_ / key;
            if (!fs::exists(p) || sha256_file(p) != hash)
                throw StaleArtifact("'" + key + "' changed since stage '" + stage + "' read it");
            check_fresh(producer_of(key), checked);
        }
    }
    for (const auto& [key, hash] : rec.outputs) {
        const fs::path p = root_ / key;
        if (!fs::exists(p) || sha256_file(p) != hash)
            throw StaleArtifact("'" + key + "' changed since stage '" + stage + "' wrote it");
    }
}

std::string Pipeline::read_artifact(StageIo& io, const std::string& relative) {
    const std::string producer = producer_of(relative);
    const fs::path path = root_ / relative;
    if (!force_) {
        std::set<std::string> checked;
        check_fresh(producer, checked);
        const auto& outputs = manifest_.stages.at(producer).outputs;
        if (!outputs.contains(relative))
            throw StaleArtifact("'" + relative + "' is not an output of the last '" + producer + "' run");
    }
    if (!fs::exists(path)) throw StaleArtifact("missing '" + relative + "'; run '" + producer + "' first");
    std::string contents = read_text_file(path);
    io.inputs[relative] = sha256_hex(contents);
    return contents;
}

std::string Pipeline::read_input(StageIo& io, const std::string& role, const fs::path& path) {
    std::string contents = read_text_file(path);
    io.inputs["input:" + role] = sha256_hex(contents);
    return contents;
}

void Pipeline::write_artifact(StageIo& io, const std::string& relative, std::string_view contents) {
    const fs::path path = root_ / relative;
    fs::create_directories(path.parent_path());
    write_text_file(path, contents);
    io.outputs[relative] = sha256_hex(contents);
}

std::string Pipeline::preprocess(StageIo& io) {
    std::vector<corpus::DocumentRecord> records = corpus::parse_documents(read_input(io, "documents", *config_.documents));
    const corpus::StopWords stopwords = config_.stopwords
                                            ? corpus::StopWords::parse(read_input(io, "stopwords", *config_.stopwords))
                                            : corpus::StopWords::english();
    corpus::preprocess_records(records, stopwords, config_.workers);
    const corpus::Corpus checked(records);  // rejects duplicate ids
    write_artifact(io, "preprocess/corpus.jsonl", corpus_jsonl(records));
    return "preprocess: " + std::to_string(records.size()) + " documents, " +
           std::to_string(checked.vocabulary().size()) + " terms\n";
}

std::string Pipeline::graph(StageIo& io) {
    std::string summary;
    std::vector<corpus::DocumentRecord> records;
    if (config_.documents) records = parse_corpus_jsonl(read_artifact(io, "preprocess/corpus.jsonl"));
    for (const std::string& source : config_.sources) {
        simgraph::SparseGraph g(0, {});
        if (source == "tfidf") {
            const corpus::Corpus c(records);
            g = simgraph::build_graph(corpus::tfidf_matrix(c), config_.k, config_.workers);
        } else if (source == "external") {
            const std::vector<std::string> ids = doc_ids(records);
            const auto emb = corpus::parse_embeddings(read_input(io, "embeddings", *config_.embeddings), ids);
            g = simgraph::build_graph(emb, config_.k, config_.workers);
        } else {
            std::vector<std::string> ids;
            if (config_.graph_nodes) {
                try {
                    ids = json::parse(read_input(io, "graph_nodes", *config_.graph_nodes)).get<std::vector<std::string>>();
                } catch (const json::exception& e) {
                    throw ParseError(config_.graph_nodes->string() + ": " + e.what());
                }
            }
            g = simgraph::parse_edge_list(read_input(io, "graph_edges", *config_.graph_edges), std::move(ids));
            if (!g.is_connected()) throw Disconnected("input graph is not connected");
        }
        write_artifact(io, "graph/" + source + "/edges.txt", simgraph::format_edge_list(g));
        write_artifact(io, "graph/" + source + "/nodes.json", simgraph::format_node_ids(g));
        summary += "graph " + source + ": " + std::to_string(g.num_nodes()) + " nodes, " +
                   std::to_string(g.edges().size()) + " edges\n";
    }
    return summary;
}

std::string Pipeline::scan(StageIo& io) {
    std::string summary;
    for (const std::string& source : config_.sources) {
        const std::string dir = "graph/" + source + "/";
        const std::string edges = read_artifact(io, dir + "edges.txt");
        const auto ids = json::parse(read_artifact(io, dir + "nodes.json")).get<std::vector<std::string>>();
        const simgraph::SparseGraph g = simgraph::parse_edge_list(edges, ids);
        const mstability::MarkovProcess process(g);
        mstability::ScanConfig cfg;
        cfg.times = config_.grid.times();
        cfg.runs_per_time = config_.runs;
        cfg.keep_top = config_.keep;
        cfg.seed = config_.seed;
        cfg.workers = config_.workers;
        const mstability::ScanResult result = mstability::scan(process, cfg);
        write_artifact(io, "scan/" + source + "/scan.jsonl", mstability::format_scan_jsonl(result));
        write_artifact(io, "scan/" + source + "/vi_matrix.txt", mstability::format_matrix(result.vi_matrix));
        summary += "scan " + source + ": " + std::to_string(result.points.size()) + " times x " +
                   std::to_string(config_.runs) + " runs\n";
    }
    return summary;
}

std::string Pipeline::select(StageIo& io) {
    std::string summary;
    for (const std::string& source : config_.sources) {
        const std::string scan_jsonl = read_artifact(io, "scan/" + source + "/scan.jsonl");
        const std::string matrix = read_artifact(io, "scan/" + source + "/vi_matrix.txt");
        const mstability::ScanResult result = mstability::parse_scan(scan_jsonl, matrix);
        const std::size_t n = result.points.empty() ? 0 : result.points.front().best.size();
        const scaleselect::Thresholds th = scaleselect::resolve(config_.selection, n, result.points.size());
        const auto scales = scaleselect::find_robust_scales(result, th);

        json out;
        out["thresholds"] = {{"dip", th.dip},
                             {"plateau", th.plateau},
                             {"min_plateau_points", th.min_points},
                             {"exclude_trivial", th.exclude_trivial}};
        out["scales"] = json::array();
        const std::string dir = "select/" + source + "/";
        summary += "select " + source + ": " + std::to_string(scales.size()) + " robust scale(s)";
        for (std::size_t k = 0; k < scales.size(); ++k) {
            const std::string file = "partitions/scale_" + std::to_string(k) + ".json";
            write_artifact(io, dir + file, partition_json(scales[k].t_star, scales[k].partition));
            out["scales"].push_back(ordered(scaleselect::to_json(scales[k], file)));
            summary += (k == 0 ? ": " : ", ") + std::to_string(scales[k].partition.num_clusters()) +
                       " clusters at t=" + fixed(scales[k].t_star, 4);
        }
        summary += '\n';
        write_artifact(io, dir + "scales.json", out.dump(2) + "\n");
    }
    return summary;
}

namespace {

std::vector<SelectedScale> parse_scales(const json& scales, const std::function<std::string(const std::string&)>& read) {
    std::vector<SelectedScale> out;
    for (const json& s : scales.at("scales")) {
        const json p = json::parse(read(s.at("partition_file").get<std::string>()));
        std::vector<std::int64_t> labels = p.at("partition").get<std::vector<std::int64_t>>();
        out.push_back({s.at("t_star").get<double>(), Partition::from_labels(std::span<const std::int64_t>(labels))});
    }
    return out;
}

}  // namespace

std::string Pipeline::evaluate(StageIo& io) {
    std::vector<corpus::DocumentRecord> records;
    if (config_.documents) records = parse_corpus_jsonl(read_artifact(io, "preprocess/corpus.jsonl"));
    std::map<std::string, Partition> references;
    for (const auto& [name, path] : config_.references) {
        read_input(io, "reference:" + name, path);
        references.emplace(name, read_partition_file(path));
    }

    std::string summary;
    std::optional<Partition> category;
    std::vector<std::string> category_values;
    // text metrics need one record per node, in node order
    auto text_ready = [&](const std::vector<std::string>& node_ids) { return !records.empty() && node_ids == doc_ids(records); };
    if (config_.category && !records.empty()) category = category_partition(records, *config_.category, &category_values);

    auto partition_metrics = [&](const Partition& p, bool with_text, json& o) {
        json nmi;
        if (category && with_text) nmi[*config_.category] = nmi_or_null(p, *category);
        for (const auto& [name, ref] : references) {
            if (ref.size() != p.size())
                throw SizeMismatch("reference '" + name + "' has " + std::to_string(ref.size()) + " nodes, graph has " +
                                   std::to_string(p.size()));
            nmi[name] = nmi_or_null(p, ref);
        }
        o["nmi"] = nmi.empty() ? json::object() : nmi;
        if (with_text) o["pmi_hat"] = metrics::pmi_partition(p, records, config_.top_words).pmi_hat;
    };

    std::map<std::string, std::vector<std::string>> node_ids_by_source;
    for (const std::string& source : config_.sources) {
        const std::string sel = "select/" + source + "/";
        const json scales_json = json::parse(read_artifact(io, sel + "scales.json"));
        const auto scales = parse_scales(scales_json, [&](const std::string& f) { return read_artifact(io, sel + f); });
        const auto ids = json::parse(read_artifact(io, "graph/" + source + "/nodes.json")).get<std::vector<std::string>>();
        node_ids_by_source[source] = ids;
        const bool with_text = text_ready(ids);

        json out;
        out["source"] = source;
        out["scales"] = json::array();
        for (std::size_t k = 0; k < scales.size(); ++k) {
            const Partition& p = scales[k].partition;
            json s;
            s["index"] = k;
            s["t_star"] = scales[k].t_star;
            s["num_clusters"] = p.num_clusters();
            partition_metrics(p, with_text, s);
            if (with_text) {
                s["topics"] = ordered(metrics::to_json(metrics::pmi_partition(p, records, config_.top_words)));
                if (category) s["contingency"] = ordered(metrics::to_json(metrics::contingency_zscores(p, category_values)));
                json ngrams = json::array();
                const auto clusters = p.members();
                for (std::size_t c = 0; c < clusters.size(); ++c) {
                    std::vector<const corpus::DocumentRecord*> members;
                    for (const std::size_t i : clusters[c]) members.push_back(&records[i]);
                    json entry{{"cluster", c}};
                    for (const std::size_t n : {2u, 3u}) {
                        json list = json::array();
                        for (const auto& g : corpus::ngram_frequencies(members, n, config_.top_ngrams))
                            list.push_back({{"ngram", g.ngram}, {"count", g.count}});
                        entry[n == 2 ? "bigrams" : "trigrams"] = list;
                    }
                    ngrams.push_back(entry);
                }
                s["ngrams"] = ngrams;
            }
            out["scales"].push_back(s);
        }

        // Sankey flows between consecutive scales, finest first
        std::vector<std::size_t> order(scales.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return scales[a].partition.num_clusters() > scales[b].partition.num_clusters();
        });
        json sankey = json::array();
        for (std::size_t k = 1; k < order.size(); ++k) {
            const auto links = metrics::sankey_links(scales[order[k - 1]].partition, scales[order[k]].partition);
            sankey.push_back({{"fine", order[k - 1]}, {"coarse", order[k]}, {"links", ordered(metrics::to_json(links))}});
        }
        write_artifact(io, "evaluate/" + source + "/evaluation.json", out.dump(2) + "\n");
        write_artifact(io, "evaluate/" + source + "/sankey.json", sankey.dump(2) + "\n");
        summary += "evaluate " + source + ": " + std::to_string(scales.size()) + " scale(s)\n";
    }

    if (config_.sources.size() > 1) {
        // paired comparison of the sources at every Markov time of the shared grid
        std::vector<mstability::ScanResult> scans;
        for (const std::string& source : config_.sources) {
            const std::string dir = "scan/" + source + "/";
            const std::string s = read_artifact(io, dir + "scan.jsonl");
            const std::string m = read_artifact(io, dir + "vi_matrix.txt");
            scans.push_back(mstability::parse_scan(s, m));
        }
        const std::size_t points = scans.front().points.size();
        for (const auto& s : scans)
            if (s.points.size() != points) throw SizeMismatch("scans of the compared sources use different grids");

        json cmp;
        cmp["sources"] = config_.sources;
        cmp["category"] = config_.category ? json(*config_.category) : json(nullptr);
        cmp["rows"] = json::array();
        std::string table = "t";
        for (const std::string& source : config_.sources)
            table += "\t" + source + ":clusters\t" + source + ":nmi\t" + source + ":pmi_hat";
        table += '\n';
        for (std::size_t i = 0; i < points; ++i) {
            json row;
            row["t"] = scans.front().points[i].t;
            table += fixed(row["t"].get<double>(), 6);
            for (std::size_t s = 0; s < scans.size(); ++s) {
                const std::string& source = config_.sources[s];
                const Partition& p = scans[s].points[i].best;
                const bool with_text = text_ready(node_ids_by_source[source]);
                json cell;
                cell["num_clusters"] = p.num_clusters();
                cell["nmi"] = category && with_text ? nmi_or_null(p, *category) : json(nullptr);
                cell["pmi_hat"] = with_text ? json(metrics::pmi_partition(p, records, config_.top_words).pmi_hat)
                                            : json(nullptr);
                table += "\t" + std::to_string(p.num_clusters());
                table += "\t" + (cell["nmi"].is_null() ? std::string("-") : fixed(cell["nmi"].get<double>(), 4));
                table += "\t" + (cell["pmi_hat"].is_null() ? std::string("-") : fixed(cell["pmi_hat"].get<double>(), 4));
                row[source] = cell;
            }
            table += '\n';
            cmp["rows"].push_back(row);
        }
        write_artifact(io, "evaluate/comparison.json", cmp.dump(2) + "\n");
        write_artifact(io, "evaluate/comparison.txt", table);
        summary += "evaluate: compared " + std::to_string(config_.sources.size()) + " sources over " +
                   std::to_string(points) + " times\n";
    }
    return summary;
}

std::string Pipeline::classify(StageIo& io) {
    const std::vector<corpus::DocumentRecord> records = parse_corpus_jsonl(read_artifact(io, "preprocess/corpus.jsonl"));
    const std::string& source = config_.classify_source;

    std::vector<harmclf::FeatureSpec> specs;
    bool need_tfidf = false, need_embedding = false, need_ms = false;
    for (const std::string& f : config_.feature_sets) {
        specs.push_back(harmclf::FeatureSpec::parse(f));
        for (const auto& b : specs.back().blocks) {
            need_tfidf |= b.kind == harmclf::BlockKind::TextTfidf;
            need_embedding |= b.kind == harmclf::BlockKind::TextEmbedding;
            need_ms |= b.kind == harmclf::BlockKind::MsLabels;
        }
    }

    std::optional<corpus::EmbeddingMatrix> tfidf, embedding;
    if (need_tfidf) tfidf = corpus::tfidf_matrix(corpus::Corpus(records));
    if (need_embedding)
        embedding = corpus::parse_embeddings(read_input(io, "embeddings", *config_.embeddings), doc_ids(records));

    std::vector<SelectedScale> scales;
    std::optional<mstability::ScanResult> scan_result;
    if (need_ms) {
        const auto ids = json::parse(read_artifact(io, "graph/" + source + "/nodes.json")).get<std::vector<std::string>>();
        if (ids != doc_ids(records)) throw ConfigError("graph nodes of source '" + source + "' are not the documents");
        const std::string sel = "select/" + source + "/";
        scales = parse_scales(json::parse(read_artifact(io, sel + "scales.json")),
                              [&](const std::string& f) { return read_artifact(io, sel + f); });
        const std::string s = read_artifact(io, "scan/" + source + "/scan.jsonl");
        const std::string m = read_artifact(io, "scan/" + source + "/vi_matrix.txt");
        scan_result = mstability::parse_scan(s, m);
    }
    // `ms` is the widest robust scale; `ms:C` a robust scale with C clusters,
    // else the scanned time with C clusters and the lowest ensemble VI
    auto resolve_partition = [&](std::size_t clusters) -> Partition {
        if (clusters == 0) {
            if (scales.empty()) throw MissingPartition("no robust scale was selected for source '" + source + "'");
            return scales.front().partition;
        }
        for (const auto& s : scales)
            if (s.partition.num_clusters() == clusters) return s.partition;
        const mstability::ScanPoint* best = nullptr;
        for (const auto& p : scan_result->points)
            if (p.best.num_clusters() == clusters && (best == nullptr || p.vi_ensemble < best->vi_ensemble)) best = &p;
        if (best == nullptr)
            throw MissingPartition("no scanned partition of source '" + source + "' has " + std::to_string(clusters) +
                                   " clusters");
        return best->best;
    };

    std::vector<std::size_t> labeled;
    std::vector<int> labels;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].harm_label) continue;
        labeled.push_back(i);
        labels.push_back(*records[i].harm_label);
    }
    if (labeled.empty()) throw DegenerateLabels("no document carries a harm label");
    std::vector<std::size_t> rows(labeled.size());
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = k;
    if (config_.sample_counts) {
        const std::vector<int> classes{1, 2, 3, 4, 5};
        rows = harmclf::balanced_sample(labels, classes, *config_.sample_counts, derive_seed(config_.seed, 2));
    }

    harmclf::F1Table table;
    table.feature_sets = config_.feature_sets;
    for (const auto m : config_.classifiers) table.classifiers.push_back(m == harmclf::ModelKind::Ridge ? "Ridge" : "SVM-LK");
    table.mean_f1.assign(config_.classifiers.size(), std::vector<double>(specs.size(), 0.0));

    json report;
    report["source"] = source;
    report["rows"] = rows.size();
    report["class_names"] = harmclf::kHarmClasses;
    report["runs"] = json::array();
    for (std::size_t f = 0; f < specs.size(); ++f) {
        std::optional<Partition> partition;
        for (const auto& b : specs[f].blocks)
            if (b.kind == harmclf::BlockKind::MsLabels) partition = resolve_partition(b.num_clusters);
        harmclf::FeatureSources sources{tfidf ? &*tfidf : nullptr, embedding ? &*embedding : nullptr,
                                        partition ? &*partition : nullptr};
        const harmclf::FeatureMatrix features = harmclf::assemble_features(records, specs[f], sources);
        harmclf::LabeledDataset all;
        all.x = features.x(labeled, Eigen::all);
        all.labels = labels;
        all.standardize = features.standardized();
        const harmclf::LabeledDataset data = all.subset(rows);
        for (std::size_t m = 0; m < config_.classifiers.size(); ++m) {
            harmclf::ModelSpec spec;
            spec.kind = config_.classifiers[m];
            spec.alpha = config_.alpha;
            spec.svm = config_.svm;
            spec.svm.seed = derive_seed(config_.seed, 4);
            const harmclf::CVReport r = harmclf::cross_validate(data, spec, config_.folds, derive_seed(config_.seed, 3),
                                                                config_.workers);
            table.mean_f1[m][f] = r.mean_f1;
            json run;
            run["features"] = config_.feature_sets[f];
            run["classifier"] = harmclf::to_string(config_.classifiers[m]);
            run["dimension"] = data.x.cols();
            run["report"] = ordered(harmclf::to_json(r));
            report["runs"].push_back(run);
        }
    }
    const std::string text = harmclf::format_table(table);
    write_artifact(io, "classify/report.json", report.dump(2) + "\n");
    write_artifact(io, "classify/table.txt", text);
    return "classify: mean weighted F1 over " + std::to_string(config_.folds) + " folds, " + std::to_string(rows.size()) +
           " rows\n" + text;
}

}  // namespace textgraph::pipeline
