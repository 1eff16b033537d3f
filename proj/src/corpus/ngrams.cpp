#include "textgraph/corpus/ngrams.hpp"

#include <algorithm>
#include <map>

#include "textgraph/common/error.hpp"

namespace textgraph::corpus {

std::vector<NgramCount> ngram_frequencies(std::span<const DocumentRecord* const> records, std::size_t n,
                                          std::size_t top_m) {
    if (n != 2 && n != 3) throw InvalidArgument("n-gram order must be 2 or 3");
    std::map<std::string, std::size_t> counts;
    for (const DocumentRecord* record : records) {
        const auto& tokens = record->tokens;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            std::string gram = tokens[i];
            for (std::size_t k = 1; k < n; ++k) gram += ' ' + tokens[i + k];
            ++counts[gram];
        }
    }
    std::vector<NgramCount> out;
    out.reserve(counts.size());
    for (auto& [gram, count] : counts) out.push_back({gram, count});
    // map iteration is already lexicographic, so a stable sort by count keeps ties ordered
    std::stable_sort(out.begin(), out.end(), [](const NgramCount& a, const NgramCount& b) { return a.count > b.count; });
    if (out.size() > top_m) out.resize(top_m);
    return out;
}

std::vector<NgramCount> ngram_frequencies(std::span<const DocumentRecord> records, std::size_t n, std::size_t top_m) {
    std::vector<const DocumentRecord*> ptrs;
    ptrs.reserve(records.size());
    for (const DocumentRecord& r : records) ptrs.push_back(&r);
    return ngram_frequencies(std::span<const DocumentRecord* const>(ptrs), n, top_m);
}

}  // namespace textgraph::corpus
