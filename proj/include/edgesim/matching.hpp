#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "edgesim/cost.hpp"
#include "edgesim/scenario.hpp"
#include "edgesim/trust.hpp"

namespace edgesim {

struct SearchPolicy {
    // Exhaustive ordering search up to this many buyers; beyond it the
    // descending-deficit heuristic is used and the result is flagged.
    int exhaustive_threshold = 6;
    // Stage 1 of the peer offloading scheme (MUE re-association); the
    // ablation experiment turns it off.
    bool mue_association = true;
};

// Per-pass mutable market quantities. Buyers start with their full deficit,
// sellers with their full surplus; MUE pools hold still-movable normal task
// rates.
struct MarketState {
    std::vector<double> remaining_deficit; // per sbs, 0 for sellers
    std::vector<double> remaining_surplus; // per sbs, 0 for buyers
    std::vector<double> mue_normal_remaining;
    std::vector<double> buyer_normal_pool; // sum of own MUEs' remaining normal rate
    std::vector<double> seller_omega;      // current workload of sellers

    static MarketState init(const std::vector<int>& members, const Scenario& scenario);
};

struct PairTransfer {
    std::vector<Reassociation> reassociated;
    double beta = 0.0;
    bool no_channel = false;

    double total() const {
        double t = beta;
        for (const Reassociation& r : reassociated) t += r.rate;
        return t;
    }
};

// SBS peer offloading scheme for one buyer-seller pair: re-associate
// co-covered MUEs' normal traffic first (largest normal rate first, the
// marginal stream split fractionally), then carry the residual over the
// SBS-SBS link if it is feasible. `tradable` is the quantity the caller
// wants moved; the result may fall short when the SBS link is infeasible.
PairTransfer pair_offload(int buyer, int seller, double tradable, const Scenario& scenario,
                          const std::vector<double>& mue_normal_remaining,
                          const SearchPolicy& policy);

struct SellerScore {
    int seller = 0;
    double marginal_cost = 0.0; // cost delta per unit transferred
    bool feasible = false;      // a positive transfer is possible right now
};

// Sellers sorted by the marginal cost of offloading from `buyer`, cheapest
// first, infeasible last, ties by smaller id. The metric includes the
// association delta, the peer transmission cost, the seller's compute-cost
// increase and the risk surcharge; the buyer's own relief is
// ordering-independent and excluded.
std::vector<SellerScore> seller_rank(int buyer, const std::vector<int>& sellers,
                                     const Scenario& scenario, const TrustMatrix& trust,
                                     const MarketState& state, const SearchPolicy& policy);

struct RunResult {
    Allocation alloc;
    CostReport report;
};

// Sequential buyer acquisition (the coalition's load balancing process):
// buyers act in `ordering`, each walking its ranked seller list greedily;
// the uncovered residual goes to the cloud. Peer transfers are capped by
// the buyer's remaining normal-task pool (private tasks may only run at
// home or in the cloud).
RunResult run_ordering(const std::vector<int>& members, const std::vector<int>& ordering,
                       const Scenario& scenario, const TrustMatrix& trust,
                       const SearchPolicy& policy);

struct CoalitionEval {
    double value = 0.0;         // v(S)
    std::vector<int> ordering;  // best buyer ordering found
    Allocation alloc;
    CostReport report;
    bool heuristic = false;     // ordering search was not exhaustive
};

// v(S): maximum coalition utility over buyer orderings (exhaustive up to
// the policy threshold, heuristic beyond it).
CoalitionEval coalition_value(const std::vector<int>& members, const Scenario& scenario,
                              const TrustMatrix& trust, const SearchPolicy& policy);

std::uint64_t coalition_mask(const std::vector<int>& members);

// Memoizing wrapper around coalition_value for one (scenario, trust, policy)
// session. Owns copies of its inputs so callers may pass temporaries. Not
// thread-safe; formation and the baselines share one instance per run.
class CoalitionEvaluator {
public:
    CoalitionEvaluator(Scenario scenario, TrustMatrix trust, SearchPolicy policy);

    const CoalitionEval& value(const std::vector<int>& members);
    double standalone(int sbs) const { return standalone_[static_cast<std::size_t>(sbs)]; }
    const std::vector<double>& standalone_values() const { return standalone_; }

    const Scenario& scenario() const { return scenario_; }
    const TrustMatrix& trust() const { return trust_; }
    const SearchPolicy& policy() const { return policy_; }
    std::size_t evaluations() const { return cache_.size(); }

private:
    Scenario scenario_;
    TrustMatrix trust_;
    SearchPolicy policy_;
    std::vector<double> standalone_;
    std::map<std::uint64_t, CoalitionEval> cache_;
};

} // namespace edgesim
