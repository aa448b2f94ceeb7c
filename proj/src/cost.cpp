#include "edgesim/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgesim {

void Allocation::resize(int num_sbs) {
    reassoc.assign(static_cast<std::size_t>(num_sbs), {});
    peer_flows.assign(static_cast<std::size_t>(num_sbs),
                      std::vector<double>(static_cast<std::size_t>(num_sbs), 0.0));
    cloud_flows.assign(static_cast<std::size_t>(num_sbs), 0.0);
    local_workloads.assign(static_cast<std::size_t>(num_sbs), 0.0);
}

double Allocation::reassociated_rate(int buyer) const {
    double total = 0.0;
    for (const Reassociation& r : reassoc[static_cast<std::size_t>(buyer)]) total += r.rate;
    return total;
}

double Allocation::reassociated_rate(int buyer, int to) const {
    double total = 0.0;
    for (const Reassociation& r : reassoc[static_cast<std::size_t>(buyer)])
        if (r.seller == to) total += r.rate;
    return total;
}

double Allocation::moved_rate_of_mue(int buyer, int mue) const {
    double total = 0.0;
    for (const Reassociation& r : reassoc[static_cast<std::size_t>(buyer)])
        if (r.mue == mue) total += r.rate;
    return total;
}

void validate_allocation(const Allocation& alloc, const std::vector<int>& members,
                         const Scenario& scenario, double tol) {
    for (int i : members) {
        const auto si = static_cast<std::size_t>(i);
        if (alloc.cloud_flows[si] < -tol) throw std::runtime_error("negative cloud flow");
        if (alloc.local_workloads[si] < -tol) throw std::runtime_error("negative local workload");
        for (int j : members)
            if (alloc.peer_flows[si][static_cast<std::size_t>(j)] < -tol)
                throw std::runtime_error("negative peer flow");
        if (alloc.local_workloads[si] >= scenario.service_rate(i))
            throw std::runtime_error("queue unstable");

        if (scenario.is_seller(i)) {
            if (!alloc.reassoc[si].empty())
                throw std::runtime_error("seller re-associates its MUEs");
            if (alloc.cloud_flows[si] > tol)
                throw std::runtime_error("seller offloads to the cloud");
            for (int j = 0; j < alloc.num_sbs(); ++j)
                if (alloc.peer_flows[si][static_cast<std::size_t>(j)] > tol)
                    throw std::runtime_error("seller offloads to a peer");
            double inbound = 0.0;
            for (int b : members) {
                inbound += alloc.peer_flows[static_cast<std::size_t>(b)][si];
                inbound += alloc.reassociated_rate(b, i);
            }
            // accumulation: own arrivals plus everything received
            if (std::abs(alloc.local_workloads[si] - (scenario.lambda_s(i) + inbound)) > tol)
                throw std::runtime_error("seller workload accumulation violated");
            if (alloc.local_workloads[si] > scenario.omega_max(i) + tol)
                throw std::runtime_error("seller oversubscribed");
        } else {
            double outbound = alloc.reassociated_rate(i) + alloc.cloud_flows[si];
            for (int j = 0; j < alloc.num_sbs(); ++j)
                outbound += alloc.peer_flows[si][static_cast<std::size_t>(j)];
            // conservation: arrivals split across local, peers, and cloud
            if (std::abs(scenario.lambda_s(i) - (alloc.local_workloads[si] + outbound)) > tol)
                throw std::runtime_error("buyer workload conservation violated");
        }
        for (const Reassociation& r : alloc.reassoc[si]) {
            if (r.rate < -tol) throw std::runtime_error("negative reassociation rate");
            if (scenario.mues[static_cast<std::size_t>(r.mue)].home_sbs != i)
                throw std::runtime_error("reassociation of a foreign MUE");
        }
    }
}

double association_cost(int i, const Allocation& alloc, const Scenario& scenario) {
    double cost = 0.0;
    for (int m : scenario.authorized_mues(i)) {
        const Mue& mue = scenario.mues[static_cast<std::size_t>(m)];
        const double moved = alloc.moved_rate_of_mue(i, m);
        const double home_rate = mue.arrival_rate - moved;
        if (home_rate > 0.0) {
            if (!scenario.covers(i, m)) throw std::runtime_error("infeasible association");
            cost += home_rate * scenario.mue_link_cost(m, i);
        }
    }
    for (const Reassociation& r : alloc.reassoc[static_cast<std::size_t>(i)]) {
        if (r.rate <= 0.0) continue;
        if (!scenario.covers(r.seller, r.mue)) throw std::runtime_error("infeasible association");
        cost += r.rate * scenario.mue_link_cost(r.mue, r.seller);
    }
    return cost;
}

double peer_tx_cost(int i, const Allocation& alloc, const Scenario& scenario) {
    double cost = 0.0;
    for (int j = 0; j < alloc.num_sbs(); ++j) {
        const double beta = alloc.peer_flows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (beta <= 0.0) continue;
        if (!scenario.sbs_link(i, j).feasible)
            throw std::runtime_error("peer flow on infeasible link");
        cost += beta * scenario.sbs_link_cost(i, j);
    }
    return cost;
}

double compute_cost_at(double omega, double service_rate, double energy_per_task, double gamma) {
    if (omega == 0.0) return 0.0;
    if (omega >= service_rate) throw std::runtime_error("queue unstable");
    return omega * (1.0 / (service_rate - omega) + gamma * energy_per_task);
}

double compute_cost(int i, const Allocation& alloc, const Scenario& scenario) {
    const double f = scenario.sbs[static_cast<std::size_t>(i)].cpu_speed;
    return compute_cost_at(alloc.local_workloads[static_cast<std::size_t>(i)],
                           scenario.service_rate(i), scenario.weights.kappa * f * f,
                           scenario.weights.gamma);
}

std::pair<double, double> cloud_cost(int i, const Allocation& alloc, const WeightProfile& weights) {
    const double beta = alloc.cloud_flows[static_cast<std::size_t>(i)];
    return {beta * (weights.cloud_delay_s + weights.gamma * weights.cloud_energy_j),
            weights.w_0 * beta};
}

double risk_cost(int i, const Allocation& alloc, const TrustMatrix& trust,
                 const WeightProfile& weights) {
    std::vector<double> offloaded(static_cast<std::size_t>(alloc.num_sbs()), 0.0);
    for (const Reassociation& r : alloc.reassoc[static_cast<std::size_t>(i)])
        offloaded[static_cast<std::size_t>(r.seller)] += r.rate;
    for (int j = 0; j < alloc.num_sbs(); ++j)
        offloaded[static_cast<std::size_t>(j)] +=
            alloc.peer_flows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    double cost = 0.0;
    for (int j = 0; j < alloc.num_sbs(); ++j)
        if (offloaded[static_cast<std::size_t>(j)] > 0.0)
            cost += offloaded[static_cast<std::size_t>(j)] *
                    (1.0 - trust[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return weights.w_r * cost;
}

const SbsCost& CostReport::row_for(int sbs) const {
    for (const SbsCost& row : rows)
        if (row.sbs == sbs) return row;
    throw std::invalid_argument("no cost row for sbs");
}

CostReport evaluate(const std::vector<int>& members, const Allocation& alloc,
                    const Scenario& scenario, const TrustMatrix& trust) {
    CostReport report;
    const WeightProfile& w = scenario.weights;
    for (int i : members) {
        SbsCost row;
        row.sbs = i;
        row.association = association_cost(i, alloc, scenario);
        row.peer_tx = peer_tx_cost(i, alloc, scenario);
        row.compute = compute_cost(i, alloc, scenario);
        std::tie(row.cloud_tx, row.cloud_fee) = cloud_cost(i, alloc, w);
        row.risk = risk_cost(i, alloc, trust, w);
        row.operational =
            w.w_c * (row.association + row.peer_tx + row.compute + row.cloud_tx) + row.cloud_fee;
        row.utility = -(row.operational + row.risk);
        report.total_utility += row.utility;
        report.rows.push_back(row);
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const SbsCost& a, const SbsCost& b) { return a.sbs < b.sbs; });
    return report;
}

} // namespace edgesim
