#include "textgraph/simgraph/simgraph.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "textgraph/common/error.hpp"
#include "textgraph/common/io.hpp"
#include "textgraph/common/parallel.hpp"

namespace textgraph::simgraph {

Eigen::MatrixXd cosine_similarity_matrix(const corpus::EmbeddingMatrix& embeddings, std::size_t workers) {
    return cosine_similarity_matrix(embeddings.rows(), workers);
}

Eigen::MatrixXd cosine_similarity_matrix(const Eigen::MatrixXd& rows, std::size_t workers) {
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd unit = rows;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = unit.row(i).norm();
        if (norm == 0.0) throw ZeroVector("row " + std::to_string(i) + " is the zero vector");
        unit.row(i) /= norm;
    }
    // Row i is computed on its own, so the result does not depend on how rows
    // are spread over workers. The upper triangle is mirrored afterwards.
    const Eigen::MatrixXd columns = unit.transpose();  // contiguous vectors
    Eigen::MatrixXd s(n, n);
    parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t r) {
        const auto i = static_cast<Eigen::Index>(r);
        for (Eigen::Index j = i + 1; j < n; ++j) s(i, j) = columns.col(i).dot(columns.col(j));
    });
    for (Eigen::Index i = 0; i < n; ++i) {
        s(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            s(i, j) = std::clamp(s(i, j), -1.0, 1.0);
            s(j, i) = s(i, j);
        }
    }
    return s;
}

SimilarityMatrix normalize_similarity(const Eigen::MatrixXd& s_cos) {
    const Eigen::Index n = s_cos.rows();
    if (s_cos.cols() != n) throw InvalidArgument("similarity matrix must be square");
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, 1.0) - s_cos;
    d.diagonal().setZero();
    const double max_d = n > 0 ? d.maxCoeff() : 0.0;
    // Parallel rows give cosine distances of rounding size, not exact zeros.
    if (!(max_d > kDegenerateDistance)) throw DegenerateCorpus("all documents point in the same direction");
    SimilarityMatrix out;
    out.d_hat = d / max_d;
    out.s_hat = Eigen::MatrixXd::Constant(n, n, 1.0) - out.d_hat;
    return out;
}

std::vector<Edge> minimum_spanning_tree(const Eigen::MatrixXd& distances) {
    // Under the strict order (distance, i, j) the spanning tree of minimum
    // weight is unique, so Prim on the dense matrix returns the same tree as
    // Kruskal with that tie rule, in O(N^2) time and O(N) extra memory.
    const auto n = static_cast<std::size_t>(distances.rows());
    using Key = std::tuple<double, std::size_t, std::size_t>;
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto key = [&](std::size_t a, std::size_t b) -> Key {
        const auto lo = std::min(a, b);
        const auto hi = std::max(a, b);
        return {distances(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi)), lo, hi};
    };

    std::vector<Edge> tree;
    if (n < 2) return tree;
    tree.reserve(n - 1);
    std::vector<bool> in_tree(n, false);
    std::vector<Key> best(n, Key{inf, 0, 0});
    in_tree[0] = true;
    for (std::size_t v = 1; v < n; ++v) best[v] = key(0, v);

    for (std::size_t step = 1; step < n; ++step) {
        std::size_t pick = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!in_tree[v] && (pick == n || best[v] < best[pick])) pick = v;
        }
        const auto& [w, a, b] = best[pick];
        tree.push_back({a, b, w});
        in_tree[pick] = true;
        for (std::size_t v = 0; v < n; ++v) {
            if (in_tree[v]) continue;
            const Key k = key(pick, v);
            if (k < best[v]) best[v] = k;
        }
    }
    std::sort(tree.begin(), tree.end(),
              [](const Edge& x, const Edge& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
    return tree;
}

std::vector<std::vector<std::size_t>> nearest_neighbours(const Eigen::MatrixXd& distances, std::size_t k) {
    const auto n = static_cast<std::size_t>(distances.rows());
    std::vector<std::vector<std::size_t>> out(n);
    if (k == 0) return out;
    k = std::min(k, n > 0 ? n - 1 : 0);
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < n; ++i) {
        others.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) others.push_back(j);
        }
        auto closer = [&](std::size_t a, std::size_t b) {
            const double da = distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
            const double db = distances(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
            return da < db || (da == db && a < b);
        };
        std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k), others.end(), closer);
        out[i].assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

SparseGraph::SparseGraph(std::size_t num_nodes, std::vector<Edge> edges, std::vector<std::string> node_ids)
    : num_nodes_(num_nodes), edges_(std::move(edges)), node_ids_(std::move(node_ids)), degrees_(num_nodes, 0.0) {
    if (node_ids_.empty()) {
        node_ids_.reserve(num_nodes_);
        for (std::size_t i = 0; i < num_nodes_; ++i) node_ids_.push_back(std::to_string(i));
    }
    if (node_ids_.size() != num_nodes_) throw SizeMismatch("node id count differs from node count");
    for (Edge& e : edges_) {
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.j >= num_nodes_) throw InvalidArgument("edge endpoint out of range");
        if (e.i == e.j) throw InvalidArgument("self-loop on node " + std::to_string(e.i));
        if (!(e.weight > 0.0)) throw InvalidArgument("edge weights must be positive");
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& x, const Edge& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
    for (std::size_t e = 1; e < edges_.size(); ++e) {
        if (edges_[e].i == edges_[e - 1].i && edges_[e].j == edges_[e - 1].j)
            throw InvalidArgument("duplicate edge");
    }
    for (const Edge& e : edges_) {
        degrees_[e.i] += e.weight;
        degrees_[e.j] += e.weight;
    }
}

Eigen::MatrixXd SparseGraph::dense_adjacency() const {
    const auto n = static_cast<Eigen::Index>(num_nodes_);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : edges_) {
        a(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = e.weight;
        a(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) = e.weight;
    }
    return a;
}

std::vector<std::vector<std::pair<std::size_t, double>>> SparseGraph::adjacency_lists() const {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(num_nodes_);
    for (const Edge& e : edges_) {
        adj[e.i].emplace_back(e.j, e.weight);
        adj[e.j].emplace_back(e.i, e.weight);
    }
    return adj;
}

bool SparseGraph::is_connected() const {
    if (num_nodes_ == 0) return true;
    const auto adj = adjacency_lists();
    std::vector<bool> seen(num_nodes_, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (const auto& [u, w] : adj[v]) {
            if (!seen[u]) {
                seen[u] = true;
                ++reached;
                stack.push_back(u);
            }
        }
    }
    return reached == num_nodes_;
}

SparseGraph mst_knn_graph(const SimilarityMatrix& sim, std::size_t k, std::vector<std::string> node_ids) {
    const auto n = static_cast<std::size_t>(sim.d_hat.rows());
    if (n < 2) throw InvalidArgument("a graph needs at least two nodes");
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    for (const Edge& e : minimum_spanning_tree(sim.d_hat)) pairs.emplace(e.i, e.j);
    const auto neighbours = nearest_neighbours(sim.d_hat, k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : neighbours[i]) pairs.emplace(std::min(i, j), std::max(i, j));
    }
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        const double s = sim.s_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        edges.push_back({i, j, std::max(s, kMinEdgeWeight)});
    }
    return SparseGraph(n, std::move(edges), std::move(node_ids));
}

SparseGraph build_graph(const corpus::EmbeddingMatrix& embeddings, std::size_t k, std::size_t workers) {
    const SimilarityMatrix sim = normalize_similarity(cosine_similarity_matrix(embeddings, workers));
    return mst_knn_graph(sim, k, embeddings.row_ids());
}

std::string format_edge_list(const SparseGraph& graph) {
    std::string out;
    for (const Edge& e : graph.edges()) {
        out += std::to_string(e.i);
        out += ' ';
        out += std::to_string(e.j);
        out += ' ';
        out += format_float(e.weight);
        out += '\n';
    }
    return out;
}

std::string format_node_ids(const SparseGraph& graph) {
    return nlohmann::json(graph.node_ids()).dump(1) + "\n";
}

void write_graph(const std::filesystem::path& edge_file, const std::filesystem::path& node_file,
                 const SparseGraph& graph) {
    write_text_file(edge_file, format_edge_list(graph));
    write_text_file(node_file, format_node_ids(graph));
}

SparseGraph parse_edge_list(std::string_view text, std::vector<std::string> node_ids) {
    std::map<std::pair<std::size_t, std::size_t>, double> weights;
    std::size_t max_index = 0;
    bool any = false;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        std::istringstream fields(line);
        std::string si, sj, sw;
        if (!(fields >> si >> sj >> sw)) throw ParseError("edge list line " + std::to_string(line_no) + ": expected 'i j weight'");
        std::size_t i = 0, j = 0;
        double w = 0.0;
        auto bad = [&](const std::string& s, auto& v) {
            const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            return ec != std::errc{} || p != s.data() + s.size();
        };
        if (bad(si, i) || bad(sj, j) || bad(sw, w))
            throw ParseError("edge list line " + std::to_string(line_no) + ": malformed number");
        if (i == j) throw ParseError("edge list line " + std::to_string(line_no) + ": self-loop");
        weights[{std::min(i, j), std::max(i, j)}] += w;
        max_index = std::max({max_index, i, j});
        any = true;
    }
    const std::size_t n = node_ids.empty() ? (any ? max_index + 1 : 0) : node_ids.size();
    std::vector<Edge> edges;
    edges.reserve(weights.size());
    for (const auto& [ij, w] : weights) edges.push_back({ij.first, ij.second, w});
    return SparseGraph(n, std::move(edges), std::move(node_ids));
}

SparseGraph read_graph(const std::filesystem::path& edge_file, const std::filesystem::path& node_file) {
    std::vector<std::string> ids;
    try {
        ids = nlohmann::json::parse(read_text_file(node_file)).get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(node_file.string() + ": " + e.what());
    }
    return parse_edge_list(read_text_file(edge_file), std::move(ids));
}

}  // namespace textgraph::simgraph
