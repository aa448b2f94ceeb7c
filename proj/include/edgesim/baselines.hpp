#pragma once

#include "edgesim/formation.hpp"
#include "edgesim/matching.hpp"

namespace edgesim {

struct BaselineResult {
    Partition partition; // singletons for non-cooperative, best for centralized
    Allocation alloc;    // combined over all SBSs
    CostReport report;   // over all SBSs
};

// Every SBS alone: processes up to its capacity, residual to the cloud,
// no peer flows and therefore zero risk.
BaselineResult non_cooperative(CoalitionEvaluator& eval, const PaymentOptions& payments = {});

// Greedy cloud-task minimization: buyers (descending deficit) drain the
// largest remaining reachable surpluses regardless of cost; the cloud gets
// only what no seller can absorb. Costs are then evaluated honestly,
// including risk.
struct CloudMinResult {
    Allocation alloc;
    CostReport report;
};
CloudMinResult cloud_min(const Scenario& scenario, const TrustMatrix& trust,
                         const SearchPolicy& policy);

// Brute-force best partition by total utility, ignoring stability and
// incentives. Every coalition is evaluated with the same ordering search
// policy as the proposed scheme. Throws when N exceeds `cap`.
BaselineResult centralized_opt(CoalitionEvaluator& eval, int cap = 10,
                               const PaymentOptions& payments = {});

double total_cloud_tasks(const Allocation& alloc);
Allocation combine_partition_alloc(const Partition& partition, CoalitionEvaluator& eval);

} // namespace edgesim
