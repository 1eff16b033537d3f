#include "textgraph/corpus/corpus.hpp"

#include <unordered_set>

#include "json.hpp"
#include "textgraph/common/error.hpp"
#include "textgraph/common/io.hpp"
#include "textgraph/common/parallel.hpp"

namespace textgraph::corpus {

Vocabulary::Vocabulary(std::map<std::string, VocabularyEntry> entries) : entries_(std::move(entries)) {
    terms_.reserve(entries_.size());
    std::size_t id = 0;
    for (auto& [term, entry] : entries_) {
        entry.term_id = id++;
        terms_.push_back(term);
    }
}

Vocabulary build_vocabulary(std::span<const DocumentRecord> records) {
    std::map<std::string, VocabularyEntry> entries;
    std::unordered_set<std::string_view> seen;
    for (const DocumentRecord& record : records) {
        seen.clear();
        for (const std::string& token : record.tokens) {
            VocabularyEntry& entry = entries[token];
            ++entry.corpus_frequency;
            if (seen.insert(token).second) ++entry.document_frequency;
        }
    }
    return Vocabulary(std::move(entries));
}

Corpus::Corpus(std::vector<DocumentRecord> records) : records_(std::move(records)) {
    std::unordered_set<std::string> ids;
    for (const DocumentRecord& r : records_) {
        if (!ids.insert(r.doc_id).second) throw DuplicateDocument("duplicate doc_id '" + r.doc_id + "'");
    }
    vocabulary_ = build_vocabulary(records_);
}

std::vector<std::string> Corpus::doc_ids() const {
    std::vector<std::string> ids;
    ids.reserve(records_.size());
    for (const DocumentRecord& r : records_) ids.push_back(r.doc_id);
    return ids;
}

std::vector<DocumentRecord> parse_documents(std::string_view jsonl) {
    std::vector<DocumentRecord> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < jsonl.size()) {
        std::size_t end = jsonl.find('\n', pos);
        if (end == std::string_view::npos) end = jsonl.size();
        const std::string_view line = jsonl.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        const std::string where = "documents line " + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
        if (!j.contains("id") || !j["id"].is_string()) throw ParseError(where + ": missing string field 'id'");
        if (!j.contains("text") || !j["text"].is_string())
            throw ParseError(where + ": missing string field 'text'");

        DocumentRecord record;
        record.doc_id = j["id"].get<std::string>();
        record.raw_text = j["text"].get<std::string>();
        if (j.contains("categories") && !j["categories"].is_null()) {
            if (!j["categories"].is_object()) throw ParseError(where + ": 'categories' must be an object");
            for (const auto& [name, value] : j["categories"].items()) {
                if (!value.is_string()) throw ParseError(where + ": category '" + name + "' must be a string");
                record.categories.emplace(name, value.get<std::string>());
            }
        }
        if (j.contains("harm") && !j["harm"].is_null()) {
            if (!j["harm"].is_number_integer()) throw ParseError(where + ": 'harm' must be an integer");
            const int harm = j["harm"].get<int>();
            if (harm < 1 || harm > 5) throw ParseError(where + ": 'harm' must be in 1..5");
            record.harm_label = harm;
        }
        out.push_back(std::move(record));
    }
    return out;
}

std::vector<DocumentRecord> load_documents(const std::filesystem::path& path) {
    return parse_documents(read_text_file(path));
}

void preprocess_records(std::span<DocumentRecord> records, const StopWords& stopwords, std::size_t workers) {
    parallel_for(records.size(), workers,
                 [&](std::size_t i) { records[i].tokens = preprocess(records[i].raw_text, stopwords); });
}

}  // namespace textgraph::corpus
