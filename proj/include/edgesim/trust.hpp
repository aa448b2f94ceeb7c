#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace edgesim {

enum class TrustPathPolicy {
    hop_count,   // fewest edges, ties by lexicographically smallest node sequence
    max_product, // highest product of edge trusts
};

// Directed social trust graph over SBS ids. Effective trust between two
// nodes without a direct edge is the product of edge trusts along a path
// between them; an unreachable pair has effective trust 0.
class TrustNetwork {
public:
    TrustNetwork() = default;
    explicit TrustNetwork(int num_nodes) : num_nodes_(num_nodes) {}

    int num_nodes() const { return num_nodes_; }
    void set_num_nodes(int n) { num_nodes_ = n; }

    void add_edge(int from, int to, double trust);
    bool has_edge(int from, int to) const;
    double edge(int from, int to) const;
    const std::map<std::pair<int, int>, double>& edges() const { return edges_; }

private:
    int num_nodes_ = 0;
    std::map<std::pair<int, int>, double> edges_;
};

// A direct edge short-circuits; otherwise trust is propagated along the
// path chosen by the policy. Unreachable target -> 0.
double effective_trust(const TrustNetwork& net, int from, int to,
                       TrustPathPolicy policy = TrustPathPolicy::hop_count);

// Dense matrix of effective trusts over [0, n); diagonal fixed at 1.
using TrustMatrix = std::vector<std::vector<double>>;
TrustMatrix trust_matrix(const TrustNetwork& net, int num_nodes,
                         TrustPathPolicy policy = TrustPathPolicy::hop_count);

struct TrustGenConfig {
    double edge_prob = 0.25;
    double trust_min = 0.0;
    double trust_max = 0.8;
};

// Random directed trust graph; each ordered pair draws one Bernoulli and,
// if present, one uniform value (fixed draw order: by (from, to)).
TrustNetwork generate_trust(int num_nodes, const TrustGenConfig& config, std::uint64_t seed);

} // namespace edgesim
