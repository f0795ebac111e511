#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace graphlasso {

/// Undirected weighted graph on nodes 0..n-1 stored as a dense similarity
/// matrix W. W is symmetric, non-negative and has a zero diagonal.
class WeightedGraph {
public:
    /// Validates the invariants above; throws InvalidArgument otherwise.
    explicit WeightedGraph(Eigen::MatrixXd weights);

    /// Graph with `node_count` nodes and no edges.
    static WeightedGraph empty(Eigen::Index node_count);

    Eigen::Index node_count() const noexcept { return weights_.rows(); }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    double weight(Eigen::Index i, Eigen::Index j) const { return weights_(i, j); }

    /// Number of undirected edges (strictly positive off-diagonal pairs).
    std::size_t edge_count() const;
    Eigen::VectorXd degrees() const { return weights_.rowwise().sum(); }

    /// True when every node is reachable from node 0.
    bool is_connected() const;

    friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
        return a.weights_.rows() == b.weights_.rows() && a.weights_ == b.weights_;
    }

private:
    Eigen::MatrixXd weights_;
};

/// Unnormalized Laplacian L = D - W.
class LaplacianMatrix {
public:
    explicit LaplacianMatrix(const WeightedGraph& graph);

    Eigen::Index size() const noexcept { return entries_.rows(); }
    const Eigen::MatrixXd& entries() const noexcept { return entries_; }

private:
    Eigen::MatrixXd entries_;
};

LaplacianMatrix build_laplacian(const WeightedGraph& graph);

struct CommunityGraphConfig {
    Eigen::Index node_count = 1000;
    Eigen::Index community_count = 10;
    /// Expected fraction of a node's edges that leave its community.
    double mixing = 0.4;
    double mean_degree = 20.0;
    std::uint64_t seed = 1;

    /// Throws InvalidArgument on violated invariants.
    void validate() const;
};

/// Source of benchmark graphs. The planted-partition generator below is the
/// only implementation; a power-law LFR generator would slot in here.
class GraphGenerator {
public:
    virtual ~GraphGenerator() = default;
    virtual WeightedGraph generate() const = 0;
};

/// Planted-partition graph: nodes split into near-equal contiguous blocks,
/// unweighted edges drawn independently with probabilities chosen so that a
/// node has `mean_degree` expected neighbours, a fraction `mixing` of them
/// outside its block.
class CommunityGraphGenerator final : public GraphGenerator {
public:
    /// Throws InvalidArgument if the config is invalid or an implied edge
    /// probability exceeds 1.
    explicit CommunityGraphGenerator(CommunityGraphConfig config);

    WeightedGraph generate() const override;

    /// Block index of every node.
    std::vector<Eigen::Index> communities() const;
    double intra_probability(Eigen::Index community) const;
    double inter_probability() const noexcept { return inter_probability_; }
    const CommunityGraphConfig& config() const noexcept { return config_; }

private:
    CommunityGraphConfig config_;
    std::vector<Eigen::Index> block_sizes_;
    double inter_probability_ = 0.0;
};

WeightedGraph generate_community_graph(const CommunityGraphConfig& config);

/// Edge-list text format:
///
///     n <node count>
///     i j w
///     ...
///
/// 0-based indices, w > 0, one line per undirected edge. Blank lines and lines
/// starting with '#' are ignored. Throws ParseError / IoError.
WeightedGraph load_edge_list(const std::filesystem::path& path);
WeightedGraph parse_edge_list(std::istream& in);

void save_edge_list(const WeightedGraph& graph, const std::filesystem::path& path);
void write_edge_list(const WeightedGraph& graph, std::ostream& out);

}  // namespace graphlasso
