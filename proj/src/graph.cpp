#include "graphlasso/graph.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "graphlasso/error.hpp"

namespace graphlasso {

WeightedGraph::WeightedGraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols()) {
        throw InvalidArgument("weight matrix must be square");
    }
    if (weights_.rows() == 0) {
        throw InvalidArgument("graph must have at least one node");
    }
    const Eigen::Index n = weights_.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (weights_(j, j) != 0.0) {
            throw InvalidArgument("self-loop at node " + std::to_string(j));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double w = weights_(i, j);
            if (!std::isfinite(w) || w < 0.0) {
                throw InvalidArgument("weights must be finite and non-negative");
            }
            if (w != weights_(j, i)) {
                throw InvalidArgument("weight matrix is not symmetric at (" + std::to_string(i) +
                                      ", " + std::to_string(j) + ")");
            }
        }
    }
}

WeightedGraph WeightedGraph::empty(Eigen::Index node_count) {
    return WeightedGraph(Eigen::MatrixXd::Zero(node_count, node_count));
}

std::size_t WeightedGraph::edge_count() const {
    std::size_t count = 0;
    const Eigen::Index n = node_count();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            if (weights_(i, j) > 0.0) ++count;
        }
    }
    return count;
}

bool WeightedGraph::is_connected() const {
    const Eigen::Index n = node_count();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index reached = 1;
    while (!stack.empty()) {
        const Eigen::Index u = stack.back();
        stack.pop_back();
        for (Eigen::Index v = 0; v < n; ++v) {
            if (weights_(v, u) > 0.0 && !seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == n;
}

LaplacianMatrix::LaplacianMatrix(const WeightedGraph& graph) : entries_(-graph.weights()) {
    entries_.diagonal() = graph.degrees();
}

LaplacianMatrix build_laplacian(const WeightedGraph& graph) { return LaplacianMatrix(graph); }

// ---------------------------------------------------------------------------
// Planted-partition generator

void CommunityGraphConfig::validate() const {
    if (node_count < 1) throw InvalidArgument("node_count must be positive");
    if (community_count < 1) throw InvalidArgument("community_count must be positive");
    if (community_count > node_count) {
        throw InvalidArgument("community_count must not exceed node_count");
    }
    if (!(mixing >= 0.0 && mixing <= 1.0)) throw InvalidArgument("mixing must lie in [0, 1]");
    if (!(mean_degree > 0.0)) throw InvalidArgument("mean_degree must be positive");
    if (!(mean_degree < static_cast<double>(node_count))) {
        throw InvalidArgument("mean_degree must be smaller than node_count");
    }
}

CommunityGraphGenerator::CommunityGraphGenerator(CommunityGraphConfig config)
    : config_(config) {
    config_.validate();
    const Eigen::Index n = config_.node_count;
    const Eigen::Index c = config_.community_count;
    block_sizes_.assign(static_cast<std::size_t>(c), n / c);
    for (Eigen::Index b = 0; b < n % c; ++b) ++block_sizes_[b];

    for (Eigen::Index b = 0; b < c; ++b) {
        if (intra_probability(b) > 1.0) {
            throw InvalidArgument("intra-community edge probability exceeds 1; lower mean_degree "
                                  "or raise mixing");
        }
    }
    if (config_.mixing > 0.0) {
        if (c == 1) throw InvalidArgument("mixing > 0 needs at least two communities");
        const double outside = static_cast<double>(n) - static_cast<double>(n) / c;
        inter_probability_ = config_.mixing * config_.mean_degree / outside;
        if (inter_probability_ > 1.0) {
            throw InvalidArgument("inter-community edge probability exceeds 1");
        }
    }
}

double CommunityGraphGenerator::intra_probability(Eigen::Index community) const {
    const Eigen::Index size = block_sizes_.at(static_cast<std::size_t>(community));
    if (size < 2) return 0.0;
    return (1.0 - config_.mixing) * config_.mean_degree / static_cast<double>(size - 1);
}

std::vector<Eigen::Index> CommunityGraphGenerator::communities() const {
    std::vector<Eigen::Index> labels;
    labels.reserve(static_cast<std::size_t>(config_.node_count));
    for (std::size_t b = 0; b < block_sizes_.size(); ++b) {
        labels.insert(labels.end(), static_cast<std::size_t>(block_sizes_[b]),
                      static_cast<Eigen::Index>(b));
    }
    return labels;
}

WeightedGraph CommunityGraphGenerator::generate() const {
    const Eigen::Index n = config_.node_count;
    const auto labels = communities();
    std::vector<double> intra(block_sizes_.size());
    for (std::size_t b = 0; b < intra.size(); ++b) {
        intra[b] = intra_probability(static_cast<Eigen::Index>(b));
    }

    std::mt19937_64 rng(config_.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 1; j < n; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            const double p = labels[i] == labels[j] ? intra[labels[i]] : inter_probability_;
            if (unit(rng) < p) {
                w(i, j) = 1.0;
                w(j, i) = 1.0;
            }
        }
    }
    return WeightedGraph(std::move(w));
}

WeightedGraph generate_community_graph(const CommunityGraphConfig& config) {
    return CommunityGraphGenerator(config).generate();
}

// ---------------------------------------------------------------------------
// Edge lists

namespace {

bool blank_or_comment(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

template <typename T>
bool read_exact(std::istringstream& in, T& value) {
    return static_cast<bool>(in >> value);
}

bool at_end(std::istringstream& in) {
    in >> std::ws;
    return in.eof();
}

}  // namespace

WeightedGraph parse_edge_list(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    Eigen::Index n = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        std::istringstream fields(line);
        std::string tag;
        long long count = 0;
        if (!read_exact(fields, tag) || tag != "n" || !read_exact(fields, count) ||
            !at_end(fields)) {
            throw ParseError("expected header 'n <count>'", line_no);
        }
        if (count < 1) throw ParseError("node count must be positive", line_no);
        n = static_cast<Eigen::Index>(count);
        break;
    }
    if (n < 0) throw ParseError("missing header 'n <count>'", line_no);

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    while (std::getline(in, line)) {
        ++line_no;
        if (blank_or_comment(line)) continue;
        std::istringstream fields(line);
        long long i = 0;
        long long j = 0;
        double weight = 0.0;
        if (!read_exact(fields, i) || !read_exact(fields, j) || !read_exact(fields, weight) ||
            !at_end(fields)) {
            throw ParseError("expected 'i j w'", line_no);
        }
        if (i < 0 || j < 0 || i >= n || j >= n) {
            throw ParseError("node index out of range [0, " + std::to_string(n) + ")", line_no);
        }
        if (i == j) throw ParseError("self-loops are not allowed", line_no);
        if (!std::isfinite(weight) || weight <= 0.0) {
            throw ParseError("edge weight must be positive", line_no);
        }
        double& slot = w(i, j);
        if (slot != 0.0 && slot != weight) {
            throw ParseError("duplicate edge with conflicting weight", line_no);
        }
        slot = weight;
        w(j, i) = weight;
    }
    return WeightedGraph(std::move(w));
}

WeightedGraph load_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_edge_list(in);
}

void write_edge_list(const WeightedGraph& graph, std::ostream& out) {
    const Eigen::Index n = graph.node_count();
    out << "n " << n << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double w = graph.weight(i, j);
            if (w > 0.0) out << i << ' ' << j << ' ' << w << '\n';
        }
    }
}

void save_edge_list(const WeightedGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_edge_list(graph, out);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace graphlasso
