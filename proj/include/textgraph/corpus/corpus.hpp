#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "textgraph/corpus/text.hpp"

namespace textgraph::corpus {

/// One free-text report.
struct DocumentRecord {
    std::string doc_id;
    std::string raw_text;
    std::vector<std::string> tokens;                 ///< normalized stems, filled by preprocessing
    std::map<std::string, std::string> categories;  ///< named categorical attributes
    std::optional<int> harm_label;                   ///< ordinal 1..5 when present
};

struct VocabularyEntry {
    std::size_t term_id = 0;
    std::size_t document_frequency = 0;
    std::size_t corpus_frequency = 0;
};

/// Term statistics. Term ids follow lexicographic term order, so the id of a
/// term does not depend on document order.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::map<std::string, VocabularyEntry> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    bool contains(const std::string& term) const { return entries_.contains(term); }
    const VocabularyEntry& at(const std::string& term) const { return entries_.at(term); }
    const std::string& term(std::size_t term_id) const { return terms_.at(term_id); }
    const std::map<std::string, VocabularyEntry>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, VocabularyEntry> entries_;
    std::vector<std::string> terms_;
};

Vocabulary build_vocabulary(std::span<const DocumentRecord> records);

/// Ordered records plus their vocabulary. Construction checks id uniqueness.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<DocumentRecord> records);

    const std::vector<DocumentRecord>& records() const noexcept { return records_; }
    const Vocabulary& vocabulary() const noexcept { return vocabulary_; }
    std::size_t size() const noexcept { return records_.size(); }
    std::vector<std::string> doc_ids() const;

private:
    std::vector<DocumentRecord> records_;
    Vocabulary vocabulary_;
};

/// Reads the JSON-lines document format: `id`, `text`, optional `categories`
/// (string -> string) and optional `harm` (1..5). Blank lines are skipped.
std::vector<DocumentRecord> load_documents(const std::filesystem::path& path);
std::vector<DocumentRecord> parse_documents(std::string_view jsonl);

/// Fills `tokens` for every record. Each record is independent, so the work
/// is spread over `workers` threads; the result does not depend on it.
void preprocess_records(std::span<DocumentRecord> records, const StopWords& stopwords,
                        std::size_t workers = 1);

}  // namespace textgraph::corpus
