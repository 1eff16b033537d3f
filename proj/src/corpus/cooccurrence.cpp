#include "textgraph/corpus/cooccurrence.hpp"

#include <algorithm>

#include "textgraph/common/error.hpp"

namespace textgraph::corpus {

CooccurrenceStats::CooccurrenceStats(std::size_t universe_size,
                                     std::map<std::string, std::vector<std::size_t>> postings)
    : universe_size_(universe_size), postings_(std::move(postings)) {}

const std::vector<std::size_t>& CooccurrenceStats::postings(const std::string& term) const {
    const auto it = postings_.find(term);
    if (it == postings_.end()) throw InvalidArgument("term '" + term + "' is not in the co-occurrence subset");
    return it->second;
}

std::size_t CooccurrenceStats::document_count(const std::string& term) const { return postings(term).size(); }

std::size_t CooccurrenceStats::joint_document_count(const std::string& a, const std::string& b) const {
    const auto& pa = postings(a);
    const auto& pb = postings(b);
    std::size_t count = 0;
    auto ia = pa.begin();
    auto ib = pb.begin();
    while (ia != pa.end() && ib != pb.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

double CooccurrenceStats::probability(const std::string& term) const {
    if (universe_size_ == 0) return 0.0;
    return static_cast<double>(document_count(term)) / static_cast<double>(universe_size_);
}

double CooccurrenceStats::joint_probability(const std::string& a, const std::string& b) const {
    if (universe_size_ == 0) return 0.0;
    return static_cast<double>(joint_document_count(a, b)) / static_cast<double>(universe_size_);
}

CooccurrenceStats cooccurrence_stats(std::span<const DocumentRecord> records,
                                     std::span<const std::string> term_subset) {
    std::map<std::string, std::vector<std::size_t>> postings;
    for (const std::string& term : term_subset) postings.try_emplace(term);
    for (std::size_t d = 0; d < records.size(); ++d) {
        for (const std::string& token : records[d].tokens) {
            const auto it = postings.find(token);
            if (it != postings.end() && (it->second.empty() || it->second.back() != d)) it->second.push_back(d);
        }
    }
    return CooccurrenceStats(records.size(), std::move(postings));
}

}  // namespace textgraph::corpus
