#include "textgraph/corpus/embedding.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "textgraph/common/error.hpp"
#include "textgraph/common/io.hpp"

namespace textgraph::corpus {

std::string_view to_string(EmbeddingSource source) {
    return source == EmbeddingSource::Tfidf ? "tfidf" : "external";
}

EmbeddingMatrix::EmbeddingMatrix(Eigen::MatrixXd rows, std::vector<std::string> row_ids, EmbeddingSource source)
    : rows_(std::move(rows)), row_ids_(std::move(row_ids)), source_(source) {
    if (static_cast<std::size_t>(rows_.rows()) != row_ids_.size()) {
        throw InvalidArgument("embedding matrix has " + std::to_string(rows_.rows()) + " rows but " +
                              std::to_string(row_ids_.size()) + " ids");
    }
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
        if ((rows_.row(i).array() == 0.0).all()) throw ZeroVector("zero vector for document '" + row_ids_[i] + "'");
    }
}

EmbeddingMatrix tfidf_matrix(const Corpus& corpus) {
    if (corpus.size() == 0) throw InvalidArgument("tfidf_matrix needs a non-empty corpus");
    const Vocabulary& vocab = corpus.vocabulary();
    const auto n = static_cast<double>(corpus.size());

    Eigen::VectorXd idf(static_cast<Eigen::Index>(vocab.size()));
    for (const auto& [term, entry] : vocab.entries()) {
        idf[static_cast<Eigen::Index>(entry.term_id)] =
            std::log((1.0 + n) / (1.0 + static_cast<double>(entry.document_frequency))) + 1.0;
    }

    Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(corpus.size()), idf.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const DocumentRecord& record = corpus.records()[i];
        if (record.tokens.empty()) {
            throw DocumentEmptyAfterPreprocessing("document '" + record.doc_id + "' has no tokens after preprocessing");
        }
        const auto row = static_cast<Eigen::Index>(i);
        for (const std::string& token : record.tokens) rows(row, static_cast<Eigen::Index>(vocab.at(token).term_id)) += 1.0;
        rows.row(row).array() *= idf.transpose().array();
        rows.row(row) /= rows.row(row).norm();
    }
    return EmbeddingMatrix(std::move(rows), corpus.doc_ids(), EmbeddingSource::Tfidf);
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename T>
T parse_number(std::string_view s, const std::string& where) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError(where + ": cannot parse number '" + std::string(s) + "'");
    }
    return value;
}

}  // namespace

EmbeddingMatrix parse_embeddings(std::string_view text, std::span<const std::string> expected_doc_ids) {
    std::vector<std::string_view> lines;
    for (std::size_t pos = 0; pos < text.size();) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) lines.push_back(line);
        pos = end + 1;
    }
    if (lines.empty()) throw ParseError("embeddings: empty file");

    const auto header = split_ws(lines.front());
    if (header.size() != 3 || header[0] != "#embeddings") throw ParseError("embeddings: expected header '#embeddings N d'");
    const auto count = parse_number<std::size_t>(header[1], "embeddings header");
    const auto dim = parse_number<std::size_t>(header[2], "embeddings header");
    if (lines.size() - 1 != count) {
        throw ParseError("embeddings: header announces " + std::to_string(count) + " vectors, file has " +
                         std::to_string(lines.size() - 1));
    }

    std::unordered_map<std::string, std::vector<double>> vectors;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto fields = split_ws(lines[l]);
        const std::string where = "embeddings line " + std::to_string(l + 1);
        const std::string doc_id(fields.front());
        if (fields.size() - 1 != dim) {
            throw DimensionMismatch("embedding for '" + doc_id + "': expected dimension " + std::to_string(dim) +
                                    ", found " + std::to_string(fields.size() - 1));
        }
        std::vector<double> values(dim);
        for (std::size_t k = 0; k < dim; ++k) values[k] = parse_number<double>(fields[k + 1], where);
        if (!vectors.emplace(doc_id, std::move(values)).second) {
            throw ParseError(where + ": duplicate vector for '" + doc_id + "'");
        }
    }

    Eigen::MatrixXd rows(static_cast<Eigen::Index>(expected_doc_ids.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < expected_doc_ids.size(); ++i) {
        const auto it = vectors.find(expected_doc_ids[i]);
        if (it == vectors.end()) throw MissingVector("no embedding for document '" + expected_doc_ids[i] + "'");
        for (std::size_t k = 0; k < dim; ++k)
            rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = it->second[k];
    }
    return EmbeddingMatrix(std::move(rows), {expected_doc_ids.begin(), expected_doc_ids.end()},
                           EmbeddingSource::External);
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, std::span<const std::string> expected_doc_ids) {
    return parse_embeddings(read_text_file(path), expected_doc_ids);
}

std::string format_embeddings(const EmbeddingMatrix& embeddings) {
    std::ostringstream out;
    out << "#embeddings " << embeddings.size() << ' ' << embeddings.dimension() << '\n';
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        out << embeddings.row_ids()[i];
        for (Eigen::Index k = 0; k < embeddings.rows().cols(); ++k)
            out << ' ' << format_float(embeddings.rows()(static_cast<Eigen::Index>(i), k));
        out << '\n';
    }
    return out.str();
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& embeddings) {
    write_text_file(path, format_embeddings(embeddings));
}

}  // namespace textgraph::corpus
