#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "textgraph/corpus/embedding.hpp"

namespace textgraph::simgraph {

/// Cosine similarities between all rows. The diagonal is exactly 1.
Eigen::MatrixXd cosine_similarity_matrix(const corpus::EmbeddingMatrix& embeddings, std::size_t workers = 1);
Eigen::MatrixXd cosine_similarity_matrix(const Eigen::MatrixXd& rows, std::size_t workers = 1);

struct SimilarityMatrix {
    Eigen::MatrixXd s_hat;  ///< 1 - d_hat
    Eigen::MatrixXd d_hat;  ///< (1 - S_cos) / max(1 - S_cos)
};

/// Largest cosine distance treated as zero.
inline constexpr double kDegenerateDistance = 1e-12;

/// Throws DegenerateCorpus when no pairwise distance exceeds kDegenerateDistance.
SimilarityMatrix normalize_similarity(const Eigen::MatrixXd& s_cos);

struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Kruskal over the upper triangle of `distances`. Equal distances are taken
/// in (i, j) order. Edges come back with i < j, sorted by (i, j), weighted by
/// their distance.
std::vector<Edge> minimum_spanning_tree(const Eigen::MatrixXd& distances);

/// For each node, the k nodes at smallest distance (ties to the smaller index).
std::vector<std::vector<std::size_t>> nearest_neighbours(const Eigen::MatrixXd& distances, std::size_t k);

/// Weighted undirected graph with edges stored once, i < j, sorted by (i, j).
class SparseGraph {
public:
    SparseGraph() = default;
    SparseGraph(std::size_t num_nodes, std::vector<Edge> edges, std::vector<std::string> node_ids = {});

    std::size_t num_nodes() const noexcept { return num_nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }
    const std::vector<double>& degrees() const noexcept { return degrees_; }

    Eigen::MatrixXd dense_adjacency() const;
    /// Neighbour lists (index, weight) per node.
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_lists() const;
    bool is_connected() const;

private:
    std::size_t num_nodes_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::string> node_ids_;
    std::vector<double> degrees_;
};

/// Floor applied to MST edges whose similarity is zero.
inline constexpr double kMinEdgeWeight = 1e-12;

/// Union of MST(d_hat) and every node's k nearest neighbours, weighted by s_hat.
SparseGraph mst_knn_graph(const SimilarityMatrix& sim, std::size_t k, std::vector<std::string> node_ids = {});

/// Embeddings to graph in one call: cosine, max-norm, MST-kNN.
SparseGraph build_graph(const corpus::EmbeddingMatrix& embeddings, std::size_t k, std::size_t workers = 1);

/// `i j weight` lines, 0-based, weights with 17 significant digits.
std::string format_edge_list(const SparseGraph& graph);
/// JSON array of node ids in index order.
std::string format_node_ids(const SparseGraph& graph);
void write_graph(const std::filesystem::path& edge_file, const std::filesystem::path& node_file,
                 const SparseGraph& graph);

/// Parses an edge list. Node count comes from `node_ids` when given, else from
/// the largest index. Duplicate edges are summed; self-loops are rejected.
SparseGraph parse_edge_list(std::string_view text, std::vector<std::string> node_ids = {});
SparseGraph read_graph(const std::filesystem::path& edge_file, const std::filesystem::path& node_file);

}  // namespace textgraph::simgraph
