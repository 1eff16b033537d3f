#include "textgraph/metrics/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "textgraph/common/error.hpp"

namespace textgraph::metrics {

namespace {

struct Joint {
    std::vector<std::size_t> a;  // cluster sizes of the first partition
    std::vector<std::size_t> b;
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> cells;  // (i, j, n_ij), n_ij > 0
    std::size_t n = 0;
};

Joint joint(const Partition& c, const Partition& d) {
    if (c.size() != d.size())
        throw SizeMismatch("partitions cover " + std::to_string(c.size()) + " and " + std::to_string(d.size()) +
                           " nodes");
    Joint out;
    out.n = c.size();
    out.a = c.cluster_sizes();
    out.b = d.cluster_sizes();
    std::unordered_map<std::uint64_t, std::size_t> counts;
    const std::uint64_t width = d.num_clusters();
    for (std::size_t v = 0; v < c.size(); ++v) ++counts[c[v] * width + d[v]];
    out.cells.reserve(counts.size());
    for (const auto& [key, count] : counts)
        out.cells.emplace_back(static_cast<std::size_t>(key / width), static_cast<std::size_t>(key % width), count);
    std::sort(out.cells.begin(), out.cells.end());
    return out;
}

// Sum of terms in a fixed order, so that the result does not depend on which
// partition came first.
double ordered_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

double mutual_information(const Joint& j) {
    const auto n = static_cast<double>(j.n);
    std::vector<double> terms;
    terms.reserve(j.cells.size());
    for (const auto& [i, k, nij] : j.cells) {
        const auto x = static_cast<double>(nij);
        terms.push_back(x / n * std::log(n * x / (static_cast<double>(j.a[i]) * static_cast<double>(j.b[k]))));
    }
    return ordered_sum(std::move(terms));
}

double size_entropy(const std::vector<std::size_t>& sizes, std::size_t total) {
    const auto n = static_cast<double>(total);
    std::vector<double> terms;
    for (std::size_t s : sizes) {
        if (s == 0 || s == total) continue;
        const double p = static_cast<double>(s) / n;
        terms.push_back(-p * std::log(p));
    }
    return ordered_sum(std::move(terms));
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

}  // namespace

double entropy(const Partition& p) { return size_entropy(p.cluster_sizes(), p.size()); }

double variation_of_information(const Partition& c, const Partition& d) {
    const Joint j = joint(c, d);
    if (j.n == 0) return 0.0;
    const auto n = static_cast<double>(j.n);
    // Each cell contributes p_ij [ln(a_i / n_ij) + ln(b_j / n_ij)], both logs >= 0.
    std::vector<double> terms;
    terms.reserve(j.cells.size());
    for (const auto& [i, k, nij] : j.cells) {
        const auto x = static_cast<double>(nij);
        const double u = std::log(static_cast<double>(j.a[i]) / x);
        const double w = std::log(static_cast<double>(j.b[k]) / x);
        terms.push_back(x / n * (u + w));
    }
    return ordered_sum(std::move(terms));
}

double nmi(const Partition& c, const Partition& d) {
    const Joint j = joint(c, d);
    const double hc = size_entropy(j.a, j.n);
    const double hd = size_entropy(j.b, j.n);
    if (!(hc > 0.0) || !(hd > 0.0)) throw ZeroEntropy("NMI is undefined for a partition with one cluster");
    if (c == d) return 1.0;
    const double v = mutual_information(j) / std::sqrt(hc * hd);
    return std::clamp(v, 0.0, std::nextafter(1.0, 0.0));
}

std::optional<double> try_pmi_pair(const std::string& w1, const std::string& w2,
                                   const corpus::CooccurrenceStats& stats) {
    if (!stats.contains(w1) || !stats.contains(w2)) return std::nullopt;
    const std::size_t joint_count = stats.joint_document_count(w1, w2);
    const std::size_t c1 = stats.document_count(w1);
    const std::size_t c2 = stats.document_count(w2);
    if (joint_count == 0 || c1 == 0 || c2 == 0) return std::nullopt;
    // ln(P12 / (P1 P2)) = ln(N n12 / (n1 n2)); the product is symmetric in w1, w2.
    const auto n = static_cast<double>(stats.universe_size());
    return std::log(n * static_cast<double>(joint_count) / (static_cast<double>(c1) * static_cast<double>(c2)));
}

double pmi_pair(const std::string& w1, const std::string& w2, const corpus::CooccurrenceStats& stats) {
    if (auto v = try_pmi_pair(w1, w2, stats)) return *v;
    throw UndefinedPMI("'" + w1 + "' and '" + w2 + "' never co-occur");
}

std::vector<std::string> top_words(std::span<const corpus::DocumentRecord* const> docs, std::size_t n) {
    std::map<std::string, std::size_t> freq;
    for (const corpus::DocumentRecord* d : docs)
        for (const std::string& t : d->tokens) ++freq[t];
    std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    if (ranked.size() > n) ranked.resize(n);
    std::vector<std::string> out;
    out.reserve(ranked.size());
    for (auto& [w, c] : ranked) out.push_back(std::move(w));
    return out;
}

TopicScoreReport pmi_partition(const Partition& partition, std::span<const corpus::DocumentRecord> records,
                               std::size_t top_n_words) {
    if (partition.size() != records.size())
        throw SizeMismatch("partition covers " + std::to_string(partition.size()) + " nodes, corpus has " +
                           std::to_string(records.size()) + " documents");
    TopicScoreReport report;
    const auto members = partition.members();
    std::vector<std::string> all_words;
    for (std::size_t c = 0; c < members.size(); ++c) {
        std::vector<const corpus::DocumentRecord*> docs;
        for (std::size_t v : members[c]) docs.push_back(&records[v]);
        ClusterTopic topic;
        topic.cluster = c;
        topic.size = members[c].size();
        topic.top_words = top_words(docs, top_n_words);
        all_words.insert(all_words.end(), topic.top_words.begin(), topic.top_words.end());
        report.clusters.push_back(std::move(topic));
    }
    std::sort(all_words.begin(), all_words.end());
    all_words.erase(std::unique(all_words.begin(), all_words.end()), all_words.end());
    const corpus::CooccurrenceStats stats = corpus::cooccurrence_stats(records, all_words);

    const auto n = static_cast<double>(records.size());
    for (ClusterTopic& topic : report.clusters) {
        std::vector<double> values;
        for (std::size_t a = 0; a < topic.top_words.size(); ++a) {
            for (std::size_t b = a + 1; b < topic.top_words.size(); ++b) {
                if (auto v = try_pmi_pair(topic.top_words[a], topic.top_words[b], stats)) values.push_back(*v);
            }
        }
        topic.defined_pairs = values.size();
        if (!values.empty()) {
            topic.median_pmi = median(std::move(values));
            report.pmi_hat += static_cast<double>(topic.size) / n * *topic.median_pmi;
        }
    }
    return report;
}

ContingencyTable contingency_zscores(const Partition& partition, std::span<const std::string> categories) {
    if (partition.size() != categories.size())
        throw SizeMismatch("partition and category list differ in length");
    ContingencyTable t;
    t.categories.assign(categories.begin(), categories.end());
    std::sort(t.categories.begin(), t.categories.end());
    t.categories.erase(std::unique(t.categories.begin(), t.categories.end()), t.categories.end());
    const std::size_t rows = partition.num_clusters();
    const std::size_t cols = t.categories.size();
    t.counts.assign(rows, std::vector<std::size_t>(cols, 0));
    t.row_totals.assign(rows, 0);
    t.column_totals.assign(cols, 0);
    for (std::size_t v = 0; v < partition.size(); ++v) {
        const auto k = static_cast<std::size_t>(
            std::lower_bound(t.categories.begin(), t.categories.end(), categories[v]) - t.categories.begin());
        ++t.counts[partition[v]][k];
        ++t.row_totals[partition[v]];
        ++t.column_totals[k];
    }
    const auto n = static_cast<double>(partition.size());
    t.z_scores.assign(rows, std::vector<double>(cols, 0.0));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < cols; ++k) {
            const double e = static_cast<double>(t.row_totals[r]) * static_cast<double>(t.column_totals[k]) / n;
            if (e > 0.0) t.z_scores[r][k] = (static_cast<double>(t.counts[r][k]) - e) / std::sqrt(e);
        }
    }
    return t;
}

std::vector<SankeyLink> sankey_links(const Partition& fine, const Partition& coarse) {
    const Joint j = joint(fine, coarse);
    std::vector<SankeyLink> links;
    links.reserve(j.cells.size());
    for (const auto& [i, k, nij] : j.cells) links.push_back({i, k, nij});
    return links;
}

std::vector<ClassScores> class_scores(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) throw SizeMismatch("prediction and label vectors differ in length");
    std::map<int, std::array<std::size_t, 3>> tally;  // true positives, predicted count, support
    for (std::size_t i = 0; i < truth.size(); ++i) {
        auto& p = tally[predicted[i]];
        auto& t = tally[truth[i]];
        ++p[1];
        ++t[2];
        if (predicted[i] == truth[i]) ++t[0];
    }
    std::vector<ClassScores> out;
    for (const auto& [label, c] : tally) {
        ClassScores s;
        s.label = label;
        s.support = c[2];
        s.precision = c[1] > 0 ? static_cast<double>(c[0]) / static_cast<double>(c[1]) : 0.0;
        s.recall = c[2] > 0 ? static_cast<double>(c[0]) / static_cast<double>(c[2]) : 0.0;
        s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
        out.push_back(s);
    }
    return out;
}

double weighted_f1(std::span<const int> predicted, std::span<const int> truth) {
    const auto scores = class_scores(predicted, truth);
    if (truth.empty()) return 0.0;
    double total = 0.0;
    for (const ClassScores& s : scores) total += static_cast<double>(s.support) * s.f1;
    return total / static_cast<double>(truth.size());
}

nlohmann::json to_json(const TopicScoreReport& report) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const ClusterTopic& c : report.clusters) {
        clusters.push_back({{"cluster", c.cluster},
                            {"size", c.size},
                            {"top_words", c.top_words},
                            {"defined_pairs", c.defined_pairs},
                            {"median_pmi", c.median_pmi ? nlohmann::json(*c.median_pmi) : nlohmann::json(nullptr)}});
    }
    return {{"pmi_hat", report.pmi_hat}, {"clusters", clusters}};
}

nlohmann::json to_json(const ContingencyTable& table) {
    return {{"categories", table.categories},     {"counts", table.counts},
            {"row_totals", table.row_totals},     {"column_totals", table.column_totals},
            {"z_scores", table.z_scores}};
}

nlohmann::json to_json(std::span<const SankeyLink> links) {
    nlohmann::json out = nlohmann::json::array();
    for (const SankeyLink& l : links) out.push_back({{"source", l.fine}, {"target", l.coarse}, {"value", l.count}});
    return out;
}

}  // namespace textgraph::metrics
