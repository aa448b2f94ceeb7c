#include "edgesim/trust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "edgesim/random.hpp"

namespace edgesim {

void TrustNetwork::add_edge(int from, int to, double trust) {
    if (from < 0 || from >= num_nodes_ || to < 0 || to >= num_nodes_)
        throw std::invalid_argument("node not in network");
    if (from == to) throw std::invalid_argument("self trust edges are not allowed");
    if (trust < 0.0 || trust > 1.0) throw std::invalid_argument("trust value must be in [0,1]");
    edges_[{from, to}] = trust;
}

bool TrustNetwork::has_edge(int from, int to) const {
    return edges_.count({from, to}) > 0;
}

double TrustNetwork::edge(int from, int to) const {
    auto it = edges_.find({from, to});
    if (it == edges_.end()) throw std::invalid_argument("no such trust edge");
    return it->second;
}

namespace {

std::vector<std::vector<std::pair<int, double>>> out_adjacency(const TrustNetwork& net) {
    std::vector<std::vector<std::pair<int, double>>> adj(
        static_cast<std::size_t>(net.num_nodes()));
    for (const auto& [key, value] : net.edges())
        adj[static_cast<std::size_t>(key.first)].push_back({key.second, value});
    return adj; // neighbor lists sorted by id via the ordered edge map
}

// Hop-count shortest path, ties broken by the lexicographically smallest
// node sequence: BFS distances from every node to the target, then a greedy
// walk that always steps to the smallest-id neighbor one hop closer.
double hop_count_trust(const TrustNetwork& net, int from, int to) {
    const auto adj = out_adjacency(net);
    const int n = net.num_nodes();
    std::vector<int> dist_to_target(static_cast<std::size_t>(n), -1);
    {
        // BFS on reversed edges
        std::vector<std::vector<int>> radj(static_cast<std::size_t>(n));
        for (const auto& [key, value] : net.edges())
            radj[static_cast<std::size_t>(key.second)].push_back(key.first);
        std::queue<int> q;
        dist_to_target[static_cast<std::size_t>(to)] = 0;
        q.push(to);
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int u : radj[static_cast<std::size_t>(v)]) {
                if (dist_to_target[static_cast<std::size_t>(u)] < 0) {
                    dist_to_target[static_cast<std::size_t>(u)] =
                        dist_to_target[static_cast<std::size_t>(v)] + 1;
                    q.push(u);
                }
            }
        }
    }
    if (dist_to_target[static_cast<std::size_t>(from)] < 0) return 0.0;

    double product = 1.0;
    int cur = from;
    while (cur != to) {
        const int d = dist_to_target[static_cast<std::size_t>(cur)];
        int next = -1;
        double edge_trust = 0.0;
        for (const auto& [nbr, t] : adj[static_cast<std::size_t>(cur)]) {
            if (dist_to_target[static_cast<std::size_t>(nbr)] == d - 1) {
                next = nbr;
                edge_trust = t;
                break; // neighbors visited in ascending id order
            }
        }
        product *= edge_trust;
        cur = next;
    }
    return product;
}

// Max-product propagation: Dijkstra on -log(trust). Ties broken by
// preferring the smaller predecessor id, which pins a deterministic path.
double max_product_trust(const TrustNetwork& net, int from, int to) {
    const auto adj = out_adjacency(net);
    const int n = net.num_nodes();
    std::vector<double> best(static_cast<std::size_t>(n), 0.0);
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    best[static_cast<std::size_t>(from)] = 1.0;
    for (;;) {
        int pick = -1;
        double pick_trust = 0.0;
        for (int v = 0; v < n; ++v) {
            if (!done[static_cast<std::size_t>(v)] && best[static_cast<std::size_t>(v)] > pick_trust) {
                pick = v;
                pick_trust = best[static_cast<std::size_t>(v)];
            }
        }
        if (pick < 0 || pick == to) break;
        done[static_cast<std::size_t>(pick)] = true;
        for (const auto& [nbr, t] : adj[static_cast<std::size_t>(pick)]) {
            const double cand = pick_trust * t;
            if (cand > best[static_cast<std::size_t>(nbr)])
                best[static_cast<std::size_t>(nbr)] = cand;
        }
    }
    return best[static_cast<std::size_t>(to)];
}

} // namespace

double effective_trust(const TrustNetwork& net, int from, int to, TrustPathPolicy policy) {
    if (from < 0 || from >= net.num_nodes() || to < 0 || to >= net.num_nodes())
        throw std::invalid_argument("node not in network");
    if (from == to) return 1.0;
    if (net.has_edge(from, to)) return net.edge(from, to);
    return policy == TrustPathPolicy::hop_count ? hop_count_trust(net, from, to)
                                                : max_product_trust(net, from, to);
}

TrustMatrix trust_matrix(const TrustNetwork& net, int num_nodes, TrustPathPolicy policy) {
    if (num_nodes > net.num_nodes()) throw std::invalid_argument("node not in network");
    TrustMatrix m(static_cast<std::size_t>(num_nodes),
                  std::vector<double>(static_cast<std::size_t>(num_nodes), 1.0));
    for (int i = 0; i < num_nodes; ++i)
        for (int j = 0; j < num_nodes; ++j)
            if (i != j) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                            effective_trust(net, i, j, policy);
    return m;
}

TrustNetwork generate_trust(int num_nodes, const TrustGenConfig& config, std::uint64_t seed) {
    if (config.trust_min < 0.0 || config.trust_max > 1.0 || config.trust_min > config.trust_max)
        throw std::invalid_argument("trust value range must lie in [0,1]");
    TrustNetwork net(num_nodes);
    Rng rng(seed);
    for (int i = 0; i < num_nodes; ++i)
        for (int j = 0; j < num_nodes; ++j) {
            if (i == j) continue;
            if (rng.bernoulli(config.edge_prob))
                net.add_edge(i, j, rng.uniform(config.trust_min, config.trust_max));
        }
    return net;
}

} // namespace edgesim
