#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "textgraph/corpus/corpus.hpp"

namespace textgraph::corpus {

/// Document-level occurrence statistics for a set of terms over a universe of
/// documents. P(w) = |docs containing w| / N, P(w1 w2) = |docs containing both| / N.
class CooccurrenceStats {
public:
    CooccurrenceStats(std::size_t universe_size, std::map<std::string, std::vector<std::size_t>> postings);

    std::size_t universe_size() const noexcept { return universe_size_; }
    bool contains(const std::string& term) const { return postings_.contains(term); }

    std::size_t document_count(const std::string& term) const;
    std::size_t joint_document_count(const std::string& a, const std::string& b) const;

    double probability(const std::string& term) const;
    double joint_probability(const std::string& a, const std::string& b) const;

private:
    const std::vector<std::size_t>& postings(const std::string& term) const;

    std::size_t universe_size_;
    std::map<std::string, std::vector<std::size_t>> postings_;  // ascending document indices
};

/// Statistics for `term_subset` over all of `records`. Terms absent from the
/// records are kept with probability 0.
CooccurrenceStats cooccurrence_stats(std::span<const DocumentRecord> records,
                                     std::span<const std::string> term_subset);

}  // namespace textgraph::corpus
