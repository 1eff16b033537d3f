#include "textgraph/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "textgraph/common/error.hpp"
#include "textgraph/common/random.hpp"
#include "textgraph/corpus/stemmer.hpp"
#include "textgraph/corpus/text.hpp"

namespace textgraph::synth {

PlantedGraph planted_hierarchy(const PlantedHierarchy& spec) {
    const std::size_t per_group = spec.cliques_per_group * spec.clique_size;
    const std::size_t n = spec.groups * per_group;
    std::vector<simgraph::Edge> edges;
    std::vector<int> fine(n), coarse(n);
    for (std::size_t v = 0; v < n; ++v) {
        fine[v] = static_cast<int>(v / spec.clique_size);
        coarse[v] = static_cast<int>(v / per_group);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = fine[i] == fine[j]       ? spec.within_clique
                             : coarse[i] == coarse[j] ? spec.within_group
                                                      : spec.across_groups;
            if (w > 0.0) edges.push_back({i, j, w});
        }
    }
    return {simgraph::SparseGraph(n, std::move(edges)), Partition::from_labels(std::span<const int>(fine)),
            Partition::from_labels(std::span<const int>(coarse))};
}

simgraph::SparseGraph random_graph(std::size_t n, double edge_probability, std::uint64_t seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        Rng rng(derive_seed(seed, attempt));
        std::vector<simgraph::Edge> edges;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (rng.uniform01() < edge_probability) edges.push_back({i, j, 0.5 + 0.5 * rng.uniform01()});
        simgraph::SparseGraph g(n, std::move(edges));
        if (g.is_connected()) return g;
    }
}

simgraph::SparseGraph random_connected_graph(std::size_t n, double extra_edge_probability, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span(order));
    std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
    std::vector<simgraph::Edge> edges;
    auto add = [&](std::size_t a, std::size_t b) {
        if (a > b) std::swap(a, b);
        present[a][b] = true;
        edges.push_back({a, b, 0.1 + 0.9 * rng.uniform01()});
    };
    // random recursive tree over a shuffled order
    for (std::size_t k = 1; k < n; ++k) add(order[k], order[rng.uniform_index(k)]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!present[i][j] && rng.uniform01() < extra_edge_probability) add(i, j);
    return simgraph::SparseGraph(n, std::move(edges));
}

std::string pseudo_word(std::size_t index) {
    static std::mutex mutex;
    static std::vector<std::string> words;
    static std::size_t next_candidate = 0;
    static const corpus::StopWords stopwords = corpus::StopWords::english();
    constexpr std::string_view consonants = "bdfgklmnprtvz";
    constexpr std::string_view vowels = "aiou";
    constexpr std::size_t total = 13 * 4 * 13 * 4 * 13;

    std::lock_guard lock(mutex);
    while (words.size() <= index) {
        if (next_candidate >= total) throw InvalidArgument("pseudo-word index out of range");
        std::size_t k = next_candidate++;
        std::string w(5, ' ');
        w[4] = consonants[k % 13];
        k /= 13;
        w[3] = vowels[k % 4];
        k /= 4;
        w[2] = consonants[k % 13];
        k /= 13;
        w[1] = vowels[k % 4];
        k /= 4;
        w[0] = consonants[k % 13];
        if (!stopwords.contains(w) && corpus::normalize_stem(w) == w) words.push_back(std::move(w));
    }
    return words[index];
}

namespace {

std::vector<double> zipf_cdf(std::size_t n, double exponent) {
    std::vector<double> cdf(n);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        total += 1.0 / std::pow(static_cast<double>(r + 1), exponent);
        cdf[r] = total;
    }
    for (double& c : cdf) c /= total;
    return cdf;
}

std::size_t draw(Rng& rng, const std::vector<double>& cdf) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

}  // namespace

TopicCorpus topic_corpus(const TopicCorpusSpec& spec, std::uint64_t seed) {
    if (spec.topics == 0 || spec.words_per_topic == 0 || spec.min_length == 0 || spec.max_length < spec.min_length)
        throw InvalidArgument("invalid topic corpus specification");
    Rng rng(seed);
    const std::vector<double> topic_cdf = zipf_cdf(spec.words_per_topic, spec.zipf_exponent);
    const std::vector<double> shared_cdf =
        spec.shared_words > 0 ? zipf_cdf(spec.shared_words, spec.zipf_exponent) : std::vector<double>{};
    const std::size_t shared_offset = spec.topics * spec.words_per_topic;

    TopicCorpus out;
    std::vector<int> topic_of;
    for (std::size_t topic = 0; topic < spec.topics; ++topic) {
        for (std::size_t d = 0; d < spec.documents_per_topic; ++d) {
            corpus::DocumentRecord r;
            r.doc_id = "t" + std::to_string(topic) + "-" + std::to_string(d);
            const std::size_t len = spec.min_length + rng.uniform_index(spec.max_length - spec.min_length + 1);
            for (std::size_t k = 0; k < len; ++k) {
                const double u = rng.uniform01();
                std::size_t word = 0;
                if (spec.shared_words > 0 && u < spec.shared_rate) {
                    word = shared_offset + draw(rng, shared_cdf);
                } else {
                    std::size_t source = topic;
                    if (spec.topics > 1 && u < spec.shared_rate + spec.leak_rate) {
                        source = rng.uniform_index(spec.topics - 1);
                        if (source >= topic) ++source;
                    }
                    word = source * spec.words_per_topic + draw(rng, topic_cdf);
                }
                r.tokens.push_back(pseudo_word(word));
            }
            for (std::size_t k = 0; k < r.tokens.size(); ++k) r.raw_text += (k ? " " : "") + r.tokens[k];
            if (spec.categories > 0) {
                const std::size_t c = rng.uniform01() < spec.category_noise ? rng.uniform_index(spec.categories)
                                                                            : topic % spec.categories;
                r.categories.emplace("category", "c" + std::to_string(c));
            }
            out.records.push_back(std::move(r));
            topic_of.push_back(static_cast<int>(topic));
        }
    }
    out.topics = Partition::from_labels(std::span<const int>(topic_of));
    return out;
}

LabeledTopicCorpus labeled_topic_corpus(const LabeledTopicSpec& spec, std::uint64_t seed) {
    LabeledTopicCorpus out{topic_corpus(spec.text, seed), {}};
    Rng rng(derive_seed(seed, 1));
    const auto n = static_cast<Eigen::Index>(out.corpus.records.size());
    const auto dim = static_cast<Eigen::Index>(spec.embedding_dimension);
    Eigen::MatrixXd centres(static_cast<Eigen::Index>(spec.text.topics), dim);
    for (Eigen::Index i = 0; i < centres.rows(); ++i)
        for (Eigen::Index j = 0; j < dim; ++j) centres(i, j) = rng.normal();
    out.embeddings.resize(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& record = out.corpus.records[static_cast<std::size_t>(i)];
        const std::size_t topic = out.corpus.topics[static_cast<std::size_t>(i)];
        int label = 1 + static_cast<int>(topic % 5);
        if (rng.uniform01() < spec.label_noise) label = 1 + static_cast<int>(rng.uniform_index(5));
        if (rng.uniform01() < spec.labeled_fraction) record.harm_label = label;
        for (Eigen::Index j = 0; j < dim; ++j)
            out.embeddings(i, j) = centres(static_cast<Eigen::Index>(topic), j) + spec.embedding_noise * rng.normal();
    }
    return out;
}

Blobs gaussian_blobs(const std::vector<std::size_t>& class_sizes, std::size_t dimension, double separation,
                     std::uint64_t seed) {
    if (dimension < class_sizes.size()) throw InvalidArgument("blob dimension must be at least the class count");
    Rng rng(seed);
    const double offset = separation / std::sqrt(2.0);
    const std::size_t n = std::accumulate(class_sizes.begin(), class_sizes.end(), std::size_t{0});
    Blobs out;
    out.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dimension));
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < class_sizes.size(); ++c) {
        for (std::size_t k = 0; k < class_sizes[c]; ++k, ++row) {
            for (Eigen::Index j = 0; j < out.features.cols(); ++j) out.features(row, j) = rng.normal();
            out.features(row, static_cast<Eigen::Index>(c)) += offset;
            out.labels.push_back(static_cast<int>(c + 1));
        }
    }
    return out;
}

}  // namespace textgraph::synth
