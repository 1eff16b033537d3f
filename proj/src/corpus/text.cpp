#include "textgraph/corpus/text.hpp"

#include <algorithm>

#include "textgraph/common/io.hpp"
#include "textgraph/corpus/stemmer.hpp"

namespace textgraph::corpus {

namespace detail {
extern const char* const kEmbeddedStopwords;
}

namespace {

bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool digits_only(std::string_view token) {
    return std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

StopWords StopWords::english() {
    static const StopWords list = parse(detail::kEmbeddedStopwords);
    return list;
}

StopWords StopWords::load(const std::filesystem::path& path) { return parse(read_text_file(path)); }

StopWords StopWords::parse(std::string_view text) {
    std::unordered_set<std::string> words;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.remove_suffix(1);
        if (!line.empty()) words.emplace(line);
        pos = end + 1;
    }
    return StopWords(std::move(words));
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && !digits_only(current)) tokens.push_back(current);
        current.clear();
    };
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> preprocess(std::string_view raw_text, const StopWords& stopwords) {
    std::vector<std::string> out;
    for (const std::string& token : tokenize(raw_text)) {
        if (stopwords.contains(token)) continue;
        std::string stem = normalize_stem(token);
        if (stopwords.contains(stem)) continue;
        out.push_back(std::move(stem));
    }
    return out;
}

}  // namespace textgraph::corpus
