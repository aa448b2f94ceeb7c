#include "edgesim/baselines.hpp"

#include <algorithm>
#include <stdexcept>

#include "edgesim/partitions.hpp"

namespace edgesim {

double total_cloud_tasks(const Allocation& alloc) {
    double total = 0.0;
    for (double b : alloc.cloud_flows) total += b;
    return total;
}

Allocation combine_partition_alloc(const Partition& partition, CoalitionEvaluator& eval) {
    Allocation combined(eval.scenario().num_sbs());
    for (const CoalitionState& c : partition.coalitions) {
        const Allocation& part = eval.value(c.members).alloc;
        for (int i : c.members) {
            const auto si = static_cast<std::size_t>(i);
            combined.reassoc[si] = part.reassoc[si];
            combined.peer_flows[si] = part.peer_flows[si];
            combined.cloud_flows[si] = part.cloud_flows[si];
            combined.local_workloads[si] = part.local_workloads[si];
        }
    }
    return combined;
}

BaselineResult non_cooperative(CoalitionEvaluator& eval, const PaymentOptions& payments) {
    BaselineResult result;
    for (int i = 0; i < eval.scenario().num_sbs(); ++i)
        result.partition.coalitions.push_back(make_coalition_state({i}, eval, payments));
    result.alloc = combine_partition_alloc(result.partition, eval);

    std::vector<int> all(static_cast<std::size_t>(eval.scenario().num_sbs()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    result.report = evaluate(all, result.alloc, eval.scenario(), eval.trust());
    return result;
}

namespace {

// Max-flow view of the market: source -> buyer (deficit) -> MUE (normal
// rate) -> {covering seller, home hub} -> seller (surplus) -> sink. The
// greedy pass below seeds the flow; augmenting paths then reroute anything
// it stranded, so the cloud really receives only what no seller can absorb.
class OffloadFlow {
public:
    OffloadFlow(const Scenario& scenario, const SearchPolicy& policy) : scenario_(scenario) {
        const int n = scenario.num_sbs();
        const int m = scenario.num_mues();
        source_ = 0;
        buyer_base_ = 1;
        mue_base_ = buyer_base_ + n;
        hub_base_ = mue_base_ + m;
        seller_base_ = hub_base_ + n;
        sink_ = seller_base_ + n;
        cap_.assign(static_cast<std::size_t>(sink_ + 1),
                    std::vector<double>(static_cast<std::size_t>(sink_ + 1), 0.0));

        constexpr double kInf = 1e18;
        for (int i = 0; i < n; ++i) {
            if (scenario.is_seller(i)) {
                cap_[seller(i)][static_cast<std::size_t>(sink_)] = scenario.alpha(i);
                continue;
            }
            cap_[static_cast<std::size_t>(source_)][buyer(i)] = -scenario.alpha(i);
            for (int u : scenario.authorized_mues(i)) {
                const Mue& mue = scenario.mues[static_cast<std::size_t>(u)];
                cap_[buyer(i)][this->mue(u)] = (1.0 - mue.private_fraction) * mue.arrival_rate;
                cap_[this->mue(u)][hub(i)] = kInf;
                if (policy.mue_association)
                    for (int s = 0; s < n; ++s)
                        if (scenario.is_seller(s) && scenario.covers(s, u))
                            cap_[this->mue(u)][seller(s)] = kInf;
            }
            for (int s = 0; s < n; ++s)
                if (scenario.is_seller(s) && scenario.sbs_link(i, s).feasible)
                    cap_[hub(i)][seller(s)] = kInf;
        }
    }

    // Route one greedy transfer through the network, attributing beta tasks
    // to MUE normal capacity in ascending id order.
    void seed(int b, int s, const PairTransfer& transfer) {
        for (const Reassociation& r : transfer.reassociated) {
            push(source_, static_cast<int>(buyer(b)), r.rate);
            push(static_cast<int>(buyer(b)), static_cast<int>(mue(r.mue)), r.rate);
            push(static_cast<int>(mue(r.mue)), static_cast<int>(seller(r.seller)), r.rate);
            push(static_cast<int>(seller(r.seller)), sink_, r.rate);
        }
        double beta = transfer.beta;
        for (int u : scenario_.authorized_mues(b)) {
            if (beta <= 1e-12) break;
            const double room = cap_[buyer(b)][mue(u)];
            const double take = std::min(room, beta);
            if (take <= 0.0) continue;
            push(source_, static_cast<int>(buyer(b)), take);
            push(static_cast<int>(buyer(b)), static_cast<int>(mue(u)), take);
            push(static_cast<int>(mue(u)), static_cast<int>(hub(b)), take);
            push(static_cast<int>(hub(b)), static_cast<int>(seller(s)), take);
            push(static_cast<int>(seller(s)), sink_, take);
            beta -= take;
        }
    }

    // Shortest augmenting paths until the residual network disconnects.
    void augment() {
        const int nodes = sink_ + 1;
        for (;;) {
            std::vector<int> parent(static_cast<std::size_t>(nodes), -1);
            parent[static_cast<std::size_t>(source_)] = source_;
            std::vector<int> queue{source_};
            for (std::size_t head = 0; head < queue.size(); ++head) {
                const int v = queue[head];
                for (int w = 0; w < nodes; ++w)
                    if (parent[static_cast<std::size_t>(w)] < 0 &&
                        cap_[static_cast<std::size_t>(v)][static_cast<std::size_t>(w)] > 1e-9) {
                        parent[static_cast<std::size_t>(w)] = v;
                        queue.push_back(w);
                    }
                if (parent[static_cast<std::size_t>(sink_)] >= 0) break;
            }
            if (parent[static_cast<std::size_t>(sink_)] < 0) return;
            double bottleneck = 1e18;
            for (int v = sink_; v != source_; v = parent[static_cast<std::size_t>(v)])
                bottleneck = std::min(
                    bottleneck, cap_[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])]
                                    [static_cast<std::size_t>(v)]);
            for (int v = sink_; v != source_; v = parent[static_cast<std::size_t>(v)])
                push(parent[static_cast<std::size_t>(v)], v, bottleneck);
        }
    }

    double reassociated(int m, int s) const { return flow_at(mue(m), seller(s)); }
    double beta(int b, int s) const { return flow_at(hub(b), seller(s)); }
    double absorbed(int b) const { return flow_at(static_cast<std::size_t>(source_), buyer(b)); }

private:
    std::size_t buyer(int i) const { return static_cast<std::size_t>(buyer_base_ + i); }
    std::size_t mue(int u) const { return static_cast<std::size_t>(mue_base_ + u); }
    std::size_t hub(int i) const { return static_cast<std::size_t>(hub_base_ + i); }
    std::size_t seller(int i) const { return static_cast<std::size_t>(seller_base_ + i); }

    void push(int from, int to, double amount) {
        cap_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)] -= amount;
        cap_[static_cast<std::size_t>(to)][static_cast<std::size_t>(from)] += amount;
    }

    double flow_at(std::size_t from, std::size_t to) const {
        // residual capacity on the reverse edge equals the pushed flow
        return cap_[to][from];
    }

    const Scenario& scenario_;
    std::vector<std::vector<double>> cap_;
    int source_ = 0, buyer_base_ = 0, mue_base_ = 0, hub_base_ = 0, seller_base_ = 0, sink_ = 0;
};

} // namespace

CloudMinResult cloud_min(const Scenario& scenario, const TrustMatrix& trust,
                         const SearchPolicy& policy) {
    std::vector<int> all(static_cast<std::size_t>(scenario.num_sbs()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);

    MarketState state = MarketState::init(all, scenario);
    Allocation alloc(scenario.num_sbs());
    OffloadFlow flow(scenario, policy);

    std::vector<int> buyers;
    std::vector<int> sellers;
    for (int i : all) (scenario.is_seller(i) ? sellers : buyers).push_back(i);
    std::sort(buyers.begin(), buyers.end(), [&](int a, int b) {
        const double da = -scenario.alpha(a);
        const double db = -scenario.alpha(b);
        if (da != db) return da > db;
        return a < b;
    });

    constexpr double tol = 1e-12;
    for (int b : buyers) {
        const auto sb = static_cast<std::size_t>(b);
        std::vector<bool> skipped(static_cast<std::size_t>(scenario.num_sbs()), false);
        while (state.remaining_deficit[sb] > tol && state.buyer_normal_pool[sb] > tol) {
            // largest remaining surplus among sellers this buyer can still use
            int pick = -1;
            for (int s : sellers) {
                const auto ss = static_cast<std::size_t>(s);
                if (skipped[ss] || state.remaining_surplus[ss] <= tol) continue;
                const bool linked = scenario.sbs_link(b, s).feasible;
                bool covered = false;
                if (!linked)
                    for (int m : scenario.authorized_mues(b))
                        if (scenario.covers(s, m) &&
                            state.mue_normal_remaining[static_cast<std::size_t>(m)] > tol) {
                            covered = true;
                            break;
                        }
                if (!linked && !covered) continue;
                if (pick < 0 ||
                    state.remaining_surplus[ss] >
                        state.remaining_surplus[static_cast<std::size_t>(pick)])
                    pick = s;
            }
            if (pick < 0) break;

            const auto sp = static_cast<std::size_t>(pick);
            const double tradable = std::min({state.remaining_deficit[sb],
                                              state.remaining_surplus[sp],
                                              state.buyer_normal_pool[sb]});
            const PairTransfer transfer =
                pair_offload(b, pick, tradable, scenario, state.mue_normal_remaining, policy);
            const double moved = transfer.total();
            if (moved <= tol) {
                skipped[sp] = true;
                continue;
            }
            flow.seed(b, pick, transfer);
            for (const Reassociation& r : transfer.reassociated) {
                state.mue_normal_remaining[static_cast<std::size_t>(r.mue)] -= r.rate;
                state.buyer_normal_pool[sb] -= r.rate;
            }
            if (transfer.beta > 0.0) state.buyer_normal_pool[sb] -= transfer.beta;
            state.remaining_surplus[sp] -= moved;
            state.remaining_deficit[sb] -= moved;
        }
        state.remaining_deficit[sb] = 0.0;
    }

    // reroute anything the greedy order stranded
    flow.augment();

    for (int b : buyers) {
        const auto sb = static_cast<std::size_t>(b);
        double absorbed = 0.0;
        for (int m : scenario.authorized_mues(b))
            for (int s : sellers) {
                const double rate = flow.reassociated(m, s);
                if (rate > tol) {
                    alloc.reassoc[sb].push_back({m, s, rate});
                    absorbed += rate;
                }
            }
        for (int s : sellers) {
            const double beta = flow.beta(b, s);
            if (beta > tol) {
                alloc.peer_flows[sb][static_cast<std::size_t>(s)] = beta;
                absorbed += beta;
            }
        }
        alloc.cloud_flows[sb] = std::max(-scenario.alpha(b) - absorbed, 0.0);
    }

    for (int i : all) {
        const auto si = static_cast<std::size_t>(i);
        if (scenario.is_seller(i)) {
            double inbound = 0.0;
            for (int b : buyers) {
                inbound += alloc.peer_flows[static_cast<std::size_t>(b)][si];
                inbound += alloc.reassociated_rate(b, i);
            }
            alloc.local_workloads[si] = scenario.lambda_s(i) + inbound;
        } else {
            double out = alloc.reassociated_rate(i) + alloc.cloud_flows[si];
            for (int j = 0; j < alloc.num_sbs(); ++j)
                out += alloc.peer_flows[si][static_cast<std::size_t>(j)];
            alloc.local_workloads[si] = scenario.lambda_s(i) - out;
        }
    }

    CloudMinResult result;
    result.report = evaluate(all, alloc, scenario, trust);
    result.alloc = std::move(alloc);
    return result;
}

BaselineResult centralized_opt(CoalitionEvaluator& eval, int cap, const PaymentOptions& payments) {
    const int n = eval.scenario().num_sbs();
    if (n > cap)
        throw std::runtime_error("centralized search capped at " + std::to_string(cap) + " SBSs");

    std::vector<int> all(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);

    std::vector<std::vector<int>> best_blocks;
    double best_utility = 0.0;
    bool first = true;
    for_each_partition(all, [&](const std::vector<std::vector<int>>& blocks) {
        double utility = 0.0;
        for (const auto& block : blocks) utility += eval.value(block).value;
        if (first || utility > best_utility) {
            best_utility = utility;
            best_blocks = blocks;
            first = false;
        }
        return true;
    });

    // Reporting only; stability and incentives are deliberately ignored, so
    // a division for a value-destroying coalition must not throw here.
    PaymentOptions forced = payments;
    forced.allow_negative_surplus = true;

    BaselineResult result;
    for (const auto& block : best_blocks)
        result.partition.coalitions.push_back(make_coalition_state(block, eval, forced));
    std::sort(result.partition.coalitions.begin(), result.partition.coalitions.end(),
              [](const CoalitionState& a, const CoalitionState& b) {
                  return a.members.front() < b.members.front();
              });
    result.alloc = combine_partition_alloc(result.partition, eval);
    result.report = evaluate(all, result.alloc, eval.scenario(), eval.trust());
    return result;
}

} // namespace edgesim
