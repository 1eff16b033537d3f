#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "textgraph/corpus/corpus.hpp"

namespace textgraph::corpus {

struct NgramCount {
    std::string ngram;  ///< stems joined by single spaces
    std::size_t count = 0;

    friend bool operator==(const NgramCount&, const NgramCount&) = default;
};

/// Contiguous n-grams (n = 2 or 3) counted inside each document and summed
/// over `records`; the `top_m` most frequent, ties in lexicographic order.
std::vector<NgramCount> ngram_frequencies(std::span<const DocumentRecord* const> records, std::size_t n,
                                          std::size_t top_m);
std::vector<NgramCount> ngram_frequencies(std::span<const DocumentRecord> records, std::size_t n,
                                          std::size_t top_m);

}  // namespace textgraph::corpus
