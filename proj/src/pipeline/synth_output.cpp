#include "textgraph/pipeline/synth_output.hpp"

#include "json.hpp"
#include "textgraph/common/io.hpp"
#include "textgraph/corpus/embedding.hpp"
#include "textgraph/simgraph/simgraph.hpp"
#include "textgraph/synth/synth.hpp"

namespace textgraph::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string partition_file(const Partition& p) {
    json o;
    o["num_clusters"] = p.num_clusters();
    o["partition"] = p.assignment();
    return o.dump() + "\n";
}

}  // namespace

std::string write_synthetic_inputs(const fs::path& out_dir, std::uint64_t seed) {
    const fs::path planted_dir = out_dir / "planted";
    const fs::path topics_dir = out_dir / "topics";
    fs::create_directories(planted_dir);
    fs::create_directories(topics_dir);

    const synth::PlantedGraph planted = synth::planted_hierarchy({});
    simgraph::write_graph(planted_dir / "edges.txt", planted_dir / "nodes.json", planted.graph);
    write_text_file(planted_dir / "fine.json", partition_file(planted.fine));
    write_text_file(planted_dir / "coarse.json", partition_file(planted.coarse));
    json planted_config;
    planted_config["output_dir"] = "output";
    planted_config["seed"] = seed;
    planted_config["input"] = {{"graph", {{"edges", "edges.txt"}, {"nodes", "nodes.json"}}}};
    planted_config["scan"] = {{"grid", {{"type", "log"}, {"lo", 0.01}, {"hi", 100.0}, {"points", 200}}},
                              {"runs", 500},
                              {"keep", 50}};
    planted_config["evaluate"] = {{"references", {{"fine", "fine.json"}, {"coarse", "coarse.json"}}}};
    write_text_file(planted_dir / "config.json", planted_config.dump(2) + "\n");

    const synth::LabeledTopicCorpus topics = synth::labeled_topic_corpus({}, seed);
    std::string documents;
    std::vector<std::string> ids;
    for (const auto& r : topics.corpus.records) {
        json o;
        o["id"] = r.doc_id;
        o["text"] = r.raw_text;
        o["categories"] = r.categories;
        if (r.harm_label) o["harm"] = *r.harm_label;
        documents += o.dump() + "\n";
        ids.push_back(r.doc_id);
    }
    write_text_file(topics_dir / "documents.jsonl", documents);
    corpus::write_embeddings(topics_dir / "embeddings.txt",
                             corpus::EmbeddingMatrix(topics.embeddings, ids, corpus::EmbeddingSource::External));
    write_text_file(topics_dir / "topics.json", partition_file(topics.corpus.topics));
    json topics_config;
    topics_config["output_dir"] = "output";
    topics_config["seed"] = seed;
    topics_config["input"] = {{"documents", "documents.jsonl"}, {"embeddings", "embeddings.txt"}};
    topics_config["graph"] = {{"source", "both"}, {"k", 13}};
    topics_config["scan"] = {{"grid", {{"type", "log"}, {"lo", 0.01}, {"hi", 100.0}, {"points", 20}}},
                             {"runs", 10},
                             {"keep", 5}};
    topics_config["evaluate"] = {{"category", "category"}, {"references", {{"topic", "topics.json"}}}};
    topics_config["classify"] = {{"source", "tfidf"},
                                 {"features", {"tfidf", "tfidf+ms", "embedding", "embedding+ms"}},
                                 {"classifiers", {"ridge", "svm"}},
                                 {"folds", 5}};
    write_text_file(topics_dir / "config.json", topics_config.dump(2) + "\n");

    std::size_t labeled = 0;
    for (const auto& r : topics.corpus.records) labeled += r.harm_label.has_value();
    return "synth: planted/ (" + std::to_string(planted.graph.num_nodes()) + " nodes, " +
           std::to_string(planted.graph.edges().size()) + " edges), topics/ (" +
           std::to_string(topics.corpus.records.size()) + " documents, " + std::to_string(labeled) + " labeled)\n";
}

}  // namespace textgraph::pipeline
