#include "edgesim/formation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "edgesim/partitions.hpp"

namespace edgesim {

double Partition::system_utility() const {
    double total = 0.0;
    for (const CoalitionState& c : coalitions) total += c.value;
    return total;
}

std::map<int, double> Partition::phis() const {
    std::map<int, double> result;
    for (const CoalitionState& c : coalitions)
        for (const PaymentEntry& e : c.ledger.entries) result[e.sbs] = e.phi;
    return result;
}

std::string Partition::to_string() const {
    std::ostringstream out;
    for (const CoalitionState& c : coalitions) {
        out << '[';
        for (std::size_t i = 0; i < c.members.size(); ++i) {
            if (i) out << ' ';
            out << c.members[i];
        }
        out << ']';
    }
    return out.str();
}

const CoalitionState& Partition::coalition_of(int sbs) const {
    for (const CoalitionState& c : coalitions)
        if (std::binary_search(c.members.begin(), c.members.end(), sbs)) return c;
    throw std::invalid_argument("sbs not in partition");
}

bool pareto_dominates(const std::map<int, double>& phi_a, const std::map<int, double>& phi_b,
                      double tol) {
    if (phi_a.size() != phi_b.size()) throw std::invalid_argument("mismatched SBS sets");
    bool strict = false;
    for (const auto& [sbs, a] : phi_a) {
        auto it = phi_b.find(sbs);
        if (it == phi_b.end()) throw std::invalid_argument("mismatched SBS sets");
        if (a < it->second - tol) return false;
        if (a > it->second + tol) strict = true;
    }
    return strict;
}

CoalitionState make_coalition_state(const std::vector<int>& members, CoalitionEvaluator& eval,
                                    const PaymentOptions& payments) {
    CoalitionState state;
    state.members = members;
    std::sort(state.members.begin(), state.members.end());
    const CoalitionEval& ev = eval.value(state.members);
    state.value = ev.value;
    state.heuristic = ev.heuristic;

    std::map<int, double> standalone;
    std::map<int, double> realized;
    for (int i : state.members) standalone[i] = eval.standalone(i);
    for (const SbsCost& row : ev.report.rows) realized[row.sbs] = row.utility;
    state.ledger = divide_payoff(state.members, state.value, standalone, realized, payments);
    return state;
}

Partition singleton_partition(CoalitionEvaluator& eval, const FormationConfig& config) {
    Partition partition;
    for (int i = 0; i < eval.scenario().num_sbs(); ++i)
        partition.coalitions.push_back(make_coalition_state({i}, eval, config.payments));
    return partition;
}

namespace {

void sort_partition(Partition& partition) {
    std::sort(partition.coalitions.begin(), partition.coalitions.end(),
              [](const CoalitionState& a, const CoalitionState& b) {
                  return a.members.front() < b.members.front();
              });
}

std::map<int, double> ledger_phis(const std::vector<const CoalitionState*>& states) {
    std::map<int, double> result;
    for (const CoalitionState* s : states)
        for (const PaymentEntry& e : s->ledger.entries) result[e.sbs] = e.phi;
    return result;
}

// Two coalitions can negotiate a merge only if some cross pair of SBSs has
// a feasible link in either direction or shares a covered MUE.
bool coalitions_reachable(const std::vector<int>& a, const std::vector<int>& b,
                          const Scenario& scenario) {
    for (int i : a)
        for (int j : b)
            if (scenario.sbs_link(i, j).feasible || scenario.sbs_link(j, i).feasible) return true;
    for (int i : a)
        for (int m : scenario.authorized_mues(i))
            for (int j : b)
                if (scenario.covers(j, m)) return true;
    for (int j : b)
        for (int m : scenario.authorized_mues(j))
            for (int i : a)
                if (scenario.covers(i, m)) return true;
    return false;
}

std::vector<int> merged_members(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> m;
    m.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(m));
    return m;
}

} // namespace

bool try_merge(Partition& partition, CoalitionEvaluator& eval, const FormationConfig& config) {
    const Scenario& scenario = eval.scenario();
    for (std::size_t i = 0; i < partition.coalitions.size(); ++i) {
        for (std::size_t j = i + 1; j < partition.coalitions.size(); ++j) {
            const CoalitionState& a = partition.coalitions[i];
            const CoalitionState& b = partition.coalitions[j];
            if (!coalitions_reachable(a.members, b.members, scenario)) continue;

            const std::vector<int> joint = merged_members(a.members, b.members);
            const CoalitionEval& merged_eval = eval.value(joint);
            // No payoff division for merges that destroy value.
            if (merged_eval.value < a.value + b.value - 1e-12) continue;

            CoalitionState merged = make_coalition_state(joint, eval, config.payments);
            const std::map<int, double> before = ledger_phis({&a, &b});
            const std::map<int, double> after = ledger_phis({&merged});
            if (!pareto_dominates(after, before, config.pareto_tol)) continue;

            partition.coalitions.erase(partition.coalitions.begin() +
                                       static_cast<std::ptrdiff_t>(j));
            partition.coalitions[i] = std::move(merged);
            sort_partition(partition);
            return true;
        }
    }
    return false;
}

bool try_split(Partition& partition, CoalitionEvaluator& eval, const FormationConfig& config,
               bool* split_capped) {
    std::vector<std::size_t> order(partition.coalitions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const auto& a = partition.coalitions[x].members;
        const auto& b = partition.coalitions[y].members;
        if (a.size() != b.size()) return a.size() < b.size();
        return a.front() < b.front();
    });

    for (std::size_t idx : order) {
        const CoalitionState& current = partition.coalitions[idx];
        const std::vector<int>& members = current.members;
        if (members.size() < 2) continue;

        std::vector<std::vector<std::vector<int>>> candidates;
        if (static_cast<int>(members.size()) <= config.split_enumeration_cap) {
            bool first = true;
            for_each_partition(members, [&](const std::vector<std::vector<int>>& blocks) {
                if (first) { // the trivial {S} itself
                    first = false;
                    return true;
                }
                candidates.push_back(blocks);
                return true;
            });
        } else {
            if (split_capped) *split_capped = true;
            // 2-way splits only; the first member stays in the first block
            // so each unordered pair is enumerated once, in mask order.
            const std::size_t rest = members.size() - 1;
            for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t{1} << rest); ++mask) {
                std::vector<int> part_a{members.front()};
                std::vector<int> part_b;
                for (std::size_t k = 0; k < rest; ++k)
                    ((mask >> k) & 1 ? part_a : part_b).push_back(members[k + 1]);
                candidates.push_back({std::move(part_a), std::move(part_b)});
            }
        }

        for (const auto& blocks : candidates) {
            std::vector<CoalitionState> parts;
            bool viable = true;
            for (const auto& block : blocks) {
                const CoalitionEval& ev = eval.value(block);
                double standalone_sum = 0.0;
                for (int s : block) standalone_sum += eval.standalone(s);
                if (ev.value < standalone_sum - 1e-9) { // part worse than going alone
                    viable = false;
                    break;
                }
                parts.push_back(make_coalition_state(block, eval, config.payments));
            }
            if (!viable) continue;

            std::vector<const CoalitionState*> part_ptrs;
            for (const CoalitionState& p : parts) part_ptrs.push_back(&p);
            const std::map<int, double> before = ledger_phis({&current});
            const std::map<int, double> after = ledger_phis(part_ptrs);
            if (!pareto_dominates(after, before, config.pareto_tol)) continue;

            partition.coalitions.erase(partition.coalitions.begin() +
                                       static_cast<std::ptrdiff_t>(idx));
            for (CoalitionState& p : parts) partition.coalitions.push_back(std::move(p));
            sort_partition(partition);
            return true;
        }
    }
    return false;
}

FormationResult form_coalitions(CoalitionEvaluator& eval, const FormationConfig& config) {
    FormationResult result;
    result.partition = singleton_partition(eval, config);

    const int n = eval.scenario().num_sbs();
    const int cap = config.max_operations > 0 ? config.max_operations : 10 * n * n;

    auto record = [&](const char* op, const std::string& before) {
        TraceEntry entry;
        entry.step = ++result.operations;
        entry.op = op;
        entry.before = before;
        entry.after = result.partition.to_string();
        entry.system_utility = result.partition.system_utility();
        entry.phis = result.partition.phis();
        result.trace.push_back(std::move(entry));
        if (result.operations > cap) throw std::runtime_error("non-convergence");
    };

    for (;;) {
        std::string before = result.partition.to_string();
        const bool merged = try_merge(result.partition, eval, config);
        if (merged) record("merge", before);

        before = result.partition.to_string();
        const bool split = try_split(result.partition, eval, config, &result.split_capped);
        if (split) record("split", before);

        if (!merged && !split) break;
    }
    return result;
}

StabilityCertificate certify_stability(const Partition& final_partition, CoalitionEvaluator& eval,
                                       const FormationConfig& config, StabilityMode mode) {
    StabilityCertificate cert;
    cert.mode = mode;

    {
        Partition probe = final_partition;
        bool capped = false;
        const bool merged = try_merge(probe, eval, config);
        const bool split = merged ? true : try_split(probe, eval, config, &capped);
        cert.hp_stable = !merged && !split;
    }
    if (mode == StabilityMode::hp) return cert;

    const int n = eval.scenario().num_sbs();
    if (n > config.c_mode_cap)
        throw std::runtime_error("network too large for exhaustive stability check (cap " +
                                 std::to_string(config.c_mode_cap) + ")");
    cert.c_checked = true;

    PaymentOptions forced = config.payments;
    forced.allow_negative_surplus = true;

    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;

    struct Candidate {
        std::vector<double> phi;
        double utility;
        std::string text;
    };
    std::vector<Candidate> partitions;
    for_each_partition(all, [&](const std::vector<std::vector<int>>& blocks) {
        Partition p;
        for (const auto& block : blocks)
            p.coalitions.push_back(make_coalition_state(block, eval, forced));
        Candidate c;
        c.phi.resize(static_cast<std::size_t>(n));
        for (const auto& [sbs, phi] : p.phis()) c.phi[static_cast<std::size_t>(sbs)] = phi;
        c.utility = p.system_utility();
        c.text = p.to_string();
        partitions.push_back(std::move(c));
        return true;
    });

    // A Pareto-maximal partition must attain the pointwise maximum phi.
    std::vector<double> pointwise(static_cast<std::size_t>(n),
                                  -std::numeric_limits<double>::infinity());
    for (const Candidate& c : partitions)
        for (std::size_t k = 0; k < c.phi.size(); ++k)
            pointwise[k] = std::max(pointwise[k], c.phi[k]);

    const double tol = config.pareto_tol;
    for (std::size_t ci = 0; ci < partitions.size(); ++ci) {
        const Candidate& c = partitions[ci];
        bool attains_max = true;
        for (std::size_t k = 0; k < c.phi.size(); ++k)
            if (c.phi[k] < pointwise[k] - tol) {
                attains_max = false;
                break;
            }
        if (!attains_max) continue;

        bool dominates_all = true;
        for (std::size_t cj = 0; cj < partitions.size() && dominates_all; ++cj) {
            if (cj == ci) continue;
            bool strict = false;
            for (std::size_t k = 0; k < c.phi.size(); ++k)
                if (c.phi[k] > partitions[cj].phi[k] + tol) {
                    strict = true;
                    break;
                }
            if (!strict) dominates_all = false;
        }
        if (dominates_all) {
            cert.c_exists = true;
            cert.c_best_utility = c.utility;
            cert.c_best_partition = c.text;
            break;
        }
    }

    if (cert.c_exists)
        cert.c_attained =
            std::abs(final_partition.system_utility() - cert.c_best_utility) <= 1e-9;
    return cert;
}

} // namespace edgesim
