#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace textgraph::corpus {

class StopWords {
public:
    StopWords() = default;
    explicit StopWords(std::unordered_set<std::string> words) : words_(std::move(words)) {}

    /// The pinned 179-word English list shipped as resources/stopwords_en_v1.txt.
    static StopWords english();
    /// One token per line, UTF-8; blank lines and surrounding whitespace ignored.
    static StopWords load(const std::filesystem::path& path);
    static StopWords parse(std::string_view text);

    bool contains(std::string_view token) const { return words_.contains(std::string(token)); }
    std::size_t size() const noexcept { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

/// Lowercases ASCII letters and splits on every byte that is not an ASCII
/// letter, an ASCII digit, or part of a multi-byte UTF-8 sequence.
/// Digit-only tokens are dropped.
std::vector<std::string> tokenize(std::string_view text);

/// tokenize -> normalize_stem -> stop-word removal. A token is removed when
/// either its surface form or its stem is a stop-word.
std::vector<std::string> preprocess(std::string_view raw_text, const StopWords& stopwords);

}  // namespace textgraph::corpus
