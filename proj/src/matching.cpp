#include "edgesim/matching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgesim {

namespace {
constexpr double kFlowTol = 1e-12;
}

MarketState MarketState::init(const std::vector<int>& members, const Scenario& scenario) {
    MarketState state;
    const auto n = static_cast<std::size_t>(scenario.num_sbs());
    state.remaining_deficit.assign(n, 0.0);
    state.remaining_surplus.assign(n, 0.0);
    state.mue_normal_remaining.assign(static_cast<std::size_t>(scenario.num_mues()), 0.0);
    state.buyer_normal_pool.assign(n, 0.0);
    state.seller_omega.assign(n, 0.0);
    for (int i : members) {
        const auto si = static_cast<std::size_t>(i);
        const double a = scenario.alpha(i);
        if (a >= 0.0) {
            state.remaining_surplus[si] = a;
            state.seller_omega[si] = scenario.lambda_s(i);
        } else {
            state.remaining_deficit[si] = -a;
            for (int m : scenario.authorized_mues(i)) {
                const Mue& mue = scenario.mues[static_cast<std::size_t>(m)];
                const double normal = (1.0 - mue.private_fraction) * mue.arrival_rate;
                state.mue_normal_remaining[static_cast<std::size_t>(m)] = normal;
                state.buyer_normal_pool[si] += normal;
            }
        }
    }
    return state;
}

PairTransfer pair_offload(int buyer, int seller, double tradable, const Scenario& scenario,
                          const std::vector<double>& mue_normal_remaining,
                          const SearchPolicy& policy) {
    if (tradable <= 0.0) throw std::invalid_argument("tradable quantity must be positive");
    PairTransfer transfer;
    double left = tradable;

    bool any_covered = false;
    if (policy.mue_association) {
        // Stage 1: co-covered MUEs, largest normal stream first.
        std::vector<int> covered;
        for (int m : scenario.authorized_mues(buyer))
            if (scenario.covers(seller, m)) {
                any_covered = true;
                if (mue_normal_remaining[static_cast<std::size_t>(m)] > kFlowTol)
                    covered.push_back(m);
            }
        std::sort(covered.begin(), covered.end(), [&](int a, int b) {
            const Mue& ma = scenario.mues[static_cast<std::size_t>(a)];
            const Mue& mb = scenario.mues[static_cast<std::size_t>(b)];
            const double na = (1.0 - ma.private_fraction) * ma.arrival_rate;
            const double nb = (1.0 - mb.private_fraction) * mb.arrival_rate;
            if (na != nb) return na > nb;
            return a < b;
        });
        for (int m : covered) {
            if (left <= kFlowTol) break;
            const double take = std::min(mue_normal_remaining[static_cast<std::size_t>(m)], left);
            transfer.reassociated.push_back({m, seller, take});
            left -= take;
        }
    }

    // Stage 2: residual over the SBS-SBS link.
    const bool link_ok = scenario.sbs_link(buyer, seller).feasible;
    if (left > kFlowTol && link_ok) {
        transfer.beta = left;
        left = 0.0;
    }

    if (!link_ok && !any_covered) transfer.no_channel = true;
    return transfer;
}

namespace {

// Cost delta of moving `transfer` from buyer to seller: association delta,
// peer transmission, the seller's compute increase and the risk surcharge.
double transfer_cost(int buyer, int seller, const PairTransfer& transfer,
                     const Scenario& scenario, const TrustMatrix& trust,
                     const MarketState& state) {
    const WeightProfile& w = scenario.weights;
    double assoc_delta = 0.0;
    for (const Reassociation& r : transfer.reassociated)
        assoc_delta +=
            r.rate * (scenario.mue_link_cost(r.mue, seller) - scenario.mue_link_cost(r.mue, buyer));
    const double peer_tx =
        transfer.beta > 0.0 ? transfer.beta * scenario.sbs_link_cost(buyer, seller) : 0.0;

    const double total = transfer.total();
    const double f = scenario.sbs[static_cast<std::size_t>(seller)].cpu_speed;
    const double energy = w.kappa * f * f;
    const double omega = state.seller_omega[static_cast<std::size_t>(seller)];
    const double compute_delta =
        compute_cost_at(omega + total, scenario.service_rate(seller), energy, w.gamma) -
        compute_cost_at(omega, scenario.service_rate(seller), energy, w.gamma);

    const double risk =
        w.w_r * total *
        (1.0 - trust[static_cast<std::size_t>(buyer)][static_cast<std::size_t>(seller)]);
    return w.w_c * (assoc_delta + peer_tx + compute_delta) + risk;
}

bool seller_available(int buyer, int seller, const Scenario& scenario, const MarketState& state) {
    if (state.remaining_surplus[static_cast<std::size_t>(seller)] <= kFlowTol) return false;
    if (scenario.sbs_link(buyer, seller).feasible) return true;
    for (int m : scenario.authorized_mues(buyer))
        if (scenario.covers(seller, m) &&
            state.mue_normal_remaining[static_cast<std::size_t>(m)] > kFlowTol)
            return true;
    return false;
}

} // namespace

std::vector<SellerScore> seller_rank(int buyer, const std::vector<int>& sellers,
                                     const Scenario& scenario, const TrustMatrix& trust,
                                     const MarketState& state, const SearchPolicy& policy) {
    if (sellers.empty()) throw std::invalid_argument("seller set must be nonempty");
    std::vector<SellerScore> scores;
    scores.reserve(sellers.size());
    for (int s : sellers) {
        SellerScore score;
        score.seller = s;
        const double tradable =
            std::min({state.remaining_deficit[static_cast<std::size_t>(buyer)],
                      state.remaining_surplus[static_cast<std::size_t>(s)],
                      state.buyer_normal_pool[static_cast<std::size_t>(buyer)]});
        if (tradable > kFlowTol) {
            const PairTransfer probe =
                pair_offload(buyer, s, tradable, scenario, state.mue_normal_remaining, policy);
            const double moved = probe.total();
            if (moved > kFlowTol) {
                score.feasible = true;
                score.marginal_cost = transfer_cost(buyer, s, probe, scenario, trust, state) / moved;
            }
        }
        scores.push_back(score);
    }
    std::sort(scores.begin(), scores.end(), [](const SellerScore& a, const SellerScore& b) {
        if (a.feasible != b.feasible) return a.feasible;
        if (a.feasible && a.marginal_cost != b.marginal_cost)
            return a.marginal_cost < b.marginal_cost;
        return a.seller < b.seller;
    });
    return scores;
}

RunResult run_ordering(const std::vector<int>& members, const std::vector<int>& ordering,
                       const Scenario& scenario, const TrustMatrix& trust,
                       const SearchPolicy& policy) {
    MarketState state = MarketState::init(members, scenario);
    Allocation alloc(scenario.num_sbs());

    std::vector<int> sellers;
    std::vector<int> buyers;
    for (int i : members) {
        if (scenario.is_seller(i))
            sellers.push_back(i);
        else
            buyers.push_back(i);
    }
    std::vector<int> check = ordering;
    std::sort(check.begin(), check.end());
    std::sort(buyers.begin(), buyers.end());
    if (check != buyers)
        throw std::invalid_argument("ordering must permute the coalition's buyers");

    for (int b : ordering) {
        const auto sb = static_cast<std::size_t>(b);
        if (state.remaining_deficit[sb] <= kFlowTol) continue;

        std::vector<int> available;
        for (int s : sellers)
            if (seller_available(b, s, scenario, state)) available.push_back(s);

        if (!available.empty() && state.buyer_normal_pool[sb] > kFlowTol) {
            for (const SellerScore& score :
                 seller_rank(b, available, scenario, trust, state, policy)) {
                if (!score.feasible) break;
                if (state.remaining_deficit[sb] <= kFlowTol) break;
                if (state.buyer_normal_pool[sb] <= kFlowTol) break;
                const auto ss = static_cast<std::size_t>(score.seller);
                const double tradable = std::min({state.remaining_deficit[sb],
                                                  state.remaining_surplus[ss],
                                                  state.buyer_normal_pool[sb]});
                if (tradable <= kFlowTol) continue;
                const PairTransfer transfer = pair_offload(b, score.seller, tradable, scenario,
                                                           state.mue_normal_remaining, policy);
                const double moved = transfer.total();
                if (moved <= kFlowTol) continue;
                for (const Reassociation& r : transfer.reassociated) {
                    alloc.reassoc[sb].push_back(r);
                    state.mue_normal_remaining[static_cast<std::size_t>(r.mue)] -= r.rate;
                    state.buyer_normal_pool[sb] -= r.rate;
                }
                if (transfer.beta > 0.0) {
                    alloc.peer_flows[sb][ss] += transfer.beta;
                    state.buyer_normal_pool[sb] -= transfer.beta;
                }
                state.remaining_surplus[ss] -= moved;
                state.remaining_deficit[sb] -= moved;
                state.seller_omega[ss] += moved;
            }
        }

        // Residual deficit goes to the cloud.
        alloc.cloud_flows[sb] = std::max(state.remaining_deficit[sb], 0.0);
        state.remaining_deficit[sb] = 0.0;
    }

    for (int i : members) {
        const auto si = static_cast<std::size_t>(i);
        if (scenario.is_seller(i)) {
            alloc.local_workloads[si] = state.seller_omega[si];
        } else {
            double out = alloc.reassociated_rate(i) + alloc.cloud_flows[si];
            for (int j = 0; j < alloc.num_sbs(); ++j)
                out += alloc.peer_flows[si][static_cast<std::size_t>(j)];
            alloc.local_workloads[si] = scenario.lambda_s(i) - out;
        }
    }

    CostReport report = evaluate(members, alloc, scenario, trust);
    return {std::move(alloc), std::move(report)};
}

std::uint64_t coalition_mask(const std::vector<int>& members) {
    std::uint64_t mask = 0;
    for (int i : members) {
        if (i < 0 || i >= 64) throw std::invalid_argument("sbs id out of mask range");
        mask |= std::uint64_t{1} << i;
    }
    return mask;
}

CoalitionEval coalition_value(const std::vector<int>& members, const Scenario& scenario,
                              const TrustMatrix& trust, const SearchPolicy& policy) {
    if (members.empty()) throw std::invalid_argument("coalition must be nonempty");

    std::vector<int> buyers;
    for (int i : members)
        if (!scenario.is_seller(i)) buyers.push_back(i);
    std::sort(buyers.begin(), buyers.end());

    CoalitionEval best;
    bool first = true;
    auto consider = [&](const std::vector<int>& ordering) {
        RunResult result = run_ordering(members, ordering, scenario, trust, policy);
        if (first || result.report.total_utility > best.value) {
            best.value = result.report.total_utility;
            best.ordering = ordering;
            best.alloc = std::move(result.alloc);
            best.report = std::move(result.report);
            first = false;
        }
    };

    if (static_cast<int>(buyers.size()) <= policy.exhaustive_threshold) {
        std::vector<int> perm = buyers;
        do {
            consider(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<int> perm = buyers;
        std::sort(perm.begin(), perm.end(), [&](int a, int b) {
            const double da = -scenario.alpha(a);
            const double db = -scenario.alpha(b);
            if (da != db) return da > db;
            return a < b;
        });
        consider(perm);
        best.heuristic = true;
    }
    return best;
}

CoalitionEvaluator::CoalitionEvaluator(Scenario scenario, TrustMatrix trust, SearchPolicy policy)
    : scenario_(std::move(scenario)), trust_(std::move(trust)), policy_(policy) {
    standalone_.reserve(static_cast<std::size_t>(scenario_.num_sbs()));
    for (int i = 0; i < scenario_.num_sbs(); ++i)
        standalone_.push_back(value({i}).value);
}

const CoalitionEval& CoalitionEvaluator::value(const std::vector<int>& members) {
    const std::uint64_t mask = coalition_mask(members);
    auto it = cache_.find(mask);
    if (it == cache_.end())
        it = cache_.emplace(mask, coalition_value(members, scenario_, trust_, policy_)).first;
    return it->second;
}

} // namespace edgesim
