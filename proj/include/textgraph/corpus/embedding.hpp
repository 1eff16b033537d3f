#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textgraph/corpus/corpus.hpp"

namespace textgraph::corpus {

enum class EmbeddingSource { Tfidf, External };

std::string_view to_string(EmbeddingSource source);

/// N document vectors of dimension d, one row per document. Construction
/// rejects all-zero rows and a row/id count mismatch.
class EmbeddingMatrix {
public:
    EmbeddingMatrix(Eigen::MatrixXd rows, std::vector<std::string> row_ids, EmbeddingSource source);

    const Eigen::MatrixXd& rows() const noexcept { return rows_; }
    const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
    EmbeddingSource source() const noexcept { return source_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(rows_.cols()); }

private:
    Eigen::MatrixXd rows_;
    std::vector<std::string> row_ids_;
    EmbeddingSource source_;
};

/// tf * idf with raw counts and idf(w) = ln((1 + N) / (1 + df(w))) + 1, then
/// every row scaled to unit L2 norm. Columns follow vocabulary term ids.
/// Throws DocumentEmptyAfterPreprocessing for a document without tokens.
EmbeddingMatrix tfidf_matrix(const Corpus& corpus);

/// Reads `#embeddings N d` followed by N lines `doc_id v1 ... vd`; rows come
/// back in the order of `expected_doc_ids`. Vectors for other ids are ignored.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, std::span<const std::string> expected_doc_ids);
EmbeddingMatrix parse_embeddings(std::string_view text, std::span<const std::string> expected_doc_ids);

std::string format_embeddings(const EmbeddingMatrix& embeddings);
void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& embeddings);

}  // namespace textgraph::corpus
