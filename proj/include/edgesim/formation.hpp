#pragma once

#include <map>
#include <string>
#include <vector>

#include "edgesim/matching.hpp"
#include "edgesim/payments.hpp"

namespace edgesim {

// One coalition of the current partition with its cached evaluation and
// payoff division. The cached value always matches a fresh coalition_value
// recomputation because the evaluator memoizes by member set.
struct CoalitionState {
    std::vector<int> members; // sorted
    double value = 0.0;       // v(S)
    bool heuristic = false;
    PaymentLedger ledger;
};

struct Partition {
    std::vector<CoalitionState> coalitions; // sorted by smallest member

    double system_utility() const;
    std::map<int, double> phis() const; // sbs -> post-payment utility
    std::string to_string() const;      // "[0 2][1]" style
    const CoalitionState& coalition_of(int sbs) const;
};

struct FormationConfig {
    int split_enumeration_cap = 6; // full partition scan up to this size
    int c_mode_cap = 8;            // exhaustive stability check cap
    int max_operations = 0;        // 0 => 10 * N^2
    double pareto_tol = 1e-9;
    PaymentOptions payments;
};

// Pareto dominance between two payoff vectors over the same SBS set:
// nobody worse than tol, somebody better than tol.
bool pareto_dominates(const std::map<int, double>& phi_a, const std::map<int, double>& phi_b,
                      double tol = 1e-9);

struct TraceEntry {
    int step = 0;
    std::string op; // "merge" or "split"
    std::string before;
    std::string after;
    double system_utility = 0.0;
    std::map<int, double> phis; // post-payment utilities after the step
};

// Builds the evaluated + divided state for one coalition.
CoalitionState make_coalition_state(const std::vector<int>& members, CoalitionEvaluator& eval,
                                    const PaymentOptions& payments);

Partition singleton_partition(CoalitionEvaluator& eval, const FormationConfig& config);

// One scan over coalition pairs (ascending by smallest members, restricted
// to physically reachable pairs); applies the first merge whose payoff
// division Pareto-dominates the pair. Returns whether a merge was applied.
bool try_merge(Partition& partition, CoalitionEvaluator& eval, const FormationConfig& config);

// One scan over coalitions (ascending size); applies the first Pareto-
// dominant split. Coalitions above the enumeration cap fall back to 2-way
// splits and set *split_capped.
bool try_split(Partition& partition, CoalitionEvaluator& eval, const FormationConfig& config,
               bool* split_capped = nullptr);

struct FormationResult {
    Partition partition;
    std::vector<TraceEntry> trace;
    bool split_capped = false;
    int operations = 0;
};

// Merge-and-split from the all-singleton start until neither operation
// applies. Every applied operation strictly improves at least one SBS and
// worsens none, so the loop terminates; the cap guards invariant bugs.
FormationResult form_coalitions(CoalitionEvaluator& eval, const FormationConfig& config = {});

enum class StabilityMode { hp, c };

struct StabilityCertificate {
    StabilityMode mode = StabilityMode::hp;
    bool hp_stable = false;
    bool c_checked = false;
    bool c_exists = false;   // a Pareto-maximal partition exists
    bool c_attained = false; // the final partition matches its total utility
    double c_best_utility = 0.0;
    std::string c_best_partition;
};

// hp: verifies no merge and no split applies to the converged partition.
// c: enumerates every partition of N (N <= c_mode_cap), decides whether a
// partition Pareto-dominating all others exists, and whether the final
// partition attains its utility.
StabilityCertificate certify_stability(const Partition& final_partition, CoalitionEvaluator& eval,
                                       const FormationConfig& config, StabilityMode mode);

} // namespace edgesim
