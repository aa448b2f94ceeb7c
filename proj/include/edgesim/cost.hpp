#pragma once

#include <vector>

#include "edgesim/scenario.hpp"
#include "edgesim/trust.hpp"

namespace edgesim {

// One re-associated normal-task stream: `rate` tasks/slot of MUE `mue`
// (authorized at some buyer) are served directly by SBS `seller`.
struct Reassociation {
    int mue = 0;
    int seller = 0;
    double rate = 0.0;
};

// Outcome of intra-coalition matching, sized over the whole SBS index space;
// entries outside the evaluated coalition stay zero.
struct Allocation {
    std::vector<std::vector<Reassociation>> reassoc; // [buyer] -> streams moved out
    std::vector<std::vector<double>> peer_flows;     // beta[i][j], tasks/slot
    std::vector<double> cloud_flows;                 // beta[i][0]
    std::vector<double> local_workloads;             // omega[i]

    explicit Allocation(int num_sbs = 0) { resize(num_sbs); }
    void resize(int num_sbs);
    int num_sbs() const { return static_cast<int>(cloud_flows.size()); }

    double reassociated_rate(int buyer) const;        // total normal rate moved out
    double reassociated_rate(int buyer, int to) const;
    double moved_rate_of_mue(int buyer, int mue) const;
};

// Checks the structural invariants (nonnegative flows, queue stability,
// workload conservation, sellers keep their MUEs) for the SBSs in `members`.
// Throws std::runtime_error naming the violated invariant.
void validate_allocation(const Allocation& alloc, const std::vector<int>& members,
                         const Scenario& scenario, double tol = 1e-6);

struct SbsCost {
    int sbs = 0;
    double association = 0.0; // C^a_i
    double peer_tx = 0.0;     // C^{s,tx}_i
    double compute = 0.0;     // C^{s,c}_i
    double cloud_tx = 0.0;    // C^{c,tx}_i
    double cloud_fee = 0.0;   // M_i
    double risk = 0.0;        // R_i
    double operational = 0.0; // C_i = w_c*(C^a + C^{s,tx} + C^{s,c} + C^{c,tx}) + M_i
    double utility = 0.0;     // u_i = -(C_i + R_i)
};

struct CostReport {
    std::vector<SbsCost> rows; // ascending sbs id
    double total_utility = 0.0;

    double total_cost() const { return -total_utility; }
    const SbsCost& row_for(int sbs) const;
};

// Association cost: own MUEs' full traffic on the home link, moved normal
// traffic on
// the seller link, private traffic of moved MUEs back on the home link.
double association_cost(int i, const Allocation& alloc, const Scenario& scenario);

// Peer offloading transmission cost: sum of beta_ij * (d_ij + gamma e_ij).
double peer_tx_cost(int i, const Allocation& alloc, const Scenario& scenario);

// Computation cost: omega * (M/M/1 sojourn time + gamma kappa f^2).
double compute_cost(int i, const Allocation& alloc, const Scenario& scenario);
double compute_cost_at(double omega, double service_rate, double energy_per_task,
                       double gamma);

// Cloud offloading: (transmission cost, fee w_0 per task).
std::pair<double, double> cloud_cost(int i, const Allocation& alloc, const WeightProfile& weights);

// Risk management cost: w_r * sum_j (beta_u_ij + beta_ij) (1 - T_ij).
double risk_cost(int i, const Allocation& alloc, const TrustMatrix& trust,
                 const WeightProfile& weights);

// Full per-SBS breakdown and coalition utility U = sum of member utilities.
CostReport evaluate(const std::vector<int>& members, const Allocation& alloc,
                    const Scenario& scenario, const TrustMatrix& trust);

} // namespace edgesim
