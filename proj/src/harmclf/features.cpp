#include "textgraph/harmclf/features.hpp"

#include <charconv>
#include <unordered_map>

#include "textgraph/common/error.hpp"

namespace textgraph::harmclf {

OneHotBlock one_hot(std::span<const corpus::DocumentRecord> records, const std::string& category) {
    OneHotBlock out;
    std::unordered_map<std::string, std::size_t> column;
    std::vector<std::size_t> row_column(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto it = records[i].categories.find(category);
        const std::string value = it == records[i].categories.end() ? std::string(kUnknownValue) : it->second;
        const auto [pos, inserted] = column.emplace(value, out.values.size());
        if (inserted) out.values.push_back(value);
        row_column[i] = pos->second;
    }
    out.columns = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(records.size()),
                                        static_cast<Eigen::Index>(out.values.size()));
    for (std::size_t i = 0; i < records.size(); ++i)
        out.columns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(row_column[i])) = 1.0;
    return out;
}

Eigen::MatrixXd one_hot(const Partition& partition) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(partition.size()),
                                              static_cast<Eigen::Index>(partition.num_clusters()));
    for (std::size_t i = 0; i < partition.size(); ++i)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(partition[i])) = 1.0;
    return m;
}

std::string_view to_string(BlockKind kind) {
    switch (kind) {
        case BlockKind::Categorical: return "cat";
        case BlockKind::TextTfidf: return "tfidf";
        case BlockKind::TextEmbedding: return "embedding";
        case BlockKind::MsLabels: return "ms";
    }
    return "?";
}

FeatureSpec FeatureSpec::parse(std::string_view text) {
    FeatureSpec spec;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('+', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view part = text.substr(pos, end - pos);
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        pos = end + 1;

        if (part == "tfidf") {
            spec.blocks.push_back(FeatureBlock::tfidf());
        } else if (part == "embedding") {
            spec.blocks.push_back(FeatureBlock::embedding());
        } else if (part == "ms") {
            spec.blocks.push_back(FeatureBlock::ms_labels());
        } else if (part.starts_with("ms:")) {
            const std::string_view digits = part.substr(3);
            std::size_t clusters = 0;
            const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), clusters);
            if (ec != std::errc() || ptr != digits.data() + digits.size() || clusters == 0)
                throw ConfigError("bad cluster count in feature block '" + std::string(part) + "'");
            spec.blocks.push_back(FeatureBlock::ms_labels(clusters));
        } else if (part.starts_with("cat:") && part.size() > 4) {
            spec.blocks.push_back(FeatureBlock::categorical(std::string(part.substr(4))));
        } else {
            throw ConfigError("unknown feature block '" + std::string(part) + "'");
        }
    }
    return spec;
}

std::string FeatureSpec::to_string() const {
    std::string out;
    for (const FeatureBlock& b : blocks) {
        if (!out.empty()) out += '+';
        out += harmclf::to_string(b.kind);
        if (b.kind == BlockKind::Categorical) out += ':' + b.category;
        if (b.kind == BlockKind::MsLabels && b.num_clusters > 0) out += ':' + std::to_string(b.num_clusters);
    }
    return out;
}

std::vector<ColumnRange> FeatureMatrix::standardized() const {
    std::vector<ColumnRange> out;
    for (const ColumnRange& r : blocks)
        if (r.kind == BlockKind::TextEmbedding) out.push_back(r);
    return out;
}

namespace {

const Eigen::MatrixXd& text_rows(const corpus::EmbeddingMatrix* source, std::string_view what,
                                 std::span<const corpus::DocumentRecord> records) {
    if (source == nullptr) throw ConfigError("feature block '" + std::string(what) + "' needs document vectors");
    if (source->size() != records.size())
        throw SizeMismatch(std::string(what) + " has " + std::to_string(source->size()) + " rows for " +
                           std::to_string(records.size()) + " records");
    for (std::size_t i = 0; i < records.size(); ++i)
        if (source->row_ids()[i] != records[i].doc_id)
            throw SizeMismatch(std::string(what) + " row " + std::to_string(i) + " is '" + source->row_ids()[i] +
                               "', expected '" + records[i].doc_id + "'");
    return source->rows();
}

}  // namespace

FeatureMatrix assemble_features(std::span<const corpus::DocumentRecord> records, const FeatureSpec& spec,
                                const FeatureSources& sources) {
    if (spec.blocks.empty()) throw ConfigError("feature spec has no blocks");
    std::vector<Eigen::MatrixXd> parts;
    FeatureMatrix out;
    std::size_t width = 0;
    for (const FeatureBlock& block : spec.blocks) {
        switch (block.kind) {
            case BlockKind::Categorical:
                parts.push_back(one_hot(records, block.category).columns);
                break;
            case BlockKind::TextTfidf:
                parts.push_back(text_rows(sources.tfidf, "tfidf", records));
                break;
            case BlockKind::TextEmbedding:
                parts.push_back(text_rows(sources.embedding, "embedding", records));
                break;
            case BlockKind::MsLabels: {
                if (sources.partition == nullptr) throw MissingPartition("feature block 'ms' needs a partition");
                const Partition& p = *sources.partition;
                if (p.size() != records.size())
                    throw SizeMismatch("partition covers " + std::to_string(p.size()) + " nodes for " +
                                       std::to_string(records.size()) + " records");
                if (block.num_clusters != 0 && block.num_clusters != p.num_clusters())
                    throw ConfigError("feature block asks for " + std::to_string(block.num_clusters) +
                                      " clusters, partition has " + std::to_string(p.num_clusters()));
                parts.push_back(one_hot(p));
                break;
            }
        }
        const auto cols = static_cast<std::size_t>(parts.back().cols());
        out.blocks.push_back({block.kind, width, width + cols});
        width += cols;
    }

    out.x.resize(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(width));
    for (std::size_t b = 0; b < parts.size(); ++b)
        out.x.middleCols(static_cast<Eigen::Index>(out.blocks[b].begin), parts[b].cols()) = parts[b];
    return out;
}

}  // namespace textgraph::harmclf
