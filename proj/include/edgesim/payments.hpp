#pragma once

#include <map>
#include <vector>

namespace edgesim {

enum class PsiWeighting {
    standalone, // weights from normalized standalone utilities v({i})
    realized,   // weights from normalized within-coalition utilities u_i
};

struct PaymentOptions {
    double epsilon = 1.0; // normalization offset, must be > 0
    PsiWeighting weighting = PsiWeighting::standalone;
    // Analysis paths (exhaustive partition scans) divide payoffs for
    // coalitions the formation engine would never form.
    bool allow_negative_surplus = false;
};

struct PaymentEntry {
    int sbs = 0;
    double psi = 0.0;     // proportional weight
    double utility = 0.0; // realized u_i(S, Pi)
    double phi = 0.0;     // post-payment utility
    double payment = 0.0; // g_i: pays if > 0, receives |g_i| if < 0
};

struct PaymentLedger {
    std::vector<PaymentEntry> entries; // ascending sbs id
    double coalition_value = 0.0;
    double surplus = 0.0; // v(S) - sum of standalone values

    const PaymentEntry& entry_for(int sbs) const;
};

// Proportional-fair payoff division: phi_i = psi_i (v(S) - sum_j v({j})) +
// v({i}), g_i = u_i - phi_i. The normalization maps (possibly negative)
// base utilities to a positive interval by shifting past the minimum and
// adding epsilon.
PaymentLedger divide_payoff(const std::vector<int>& members, double coalition_value,
                            const std::map<int, double>& standalone,
                            const std::map<int, double>& realized,
                            const PaymentOptions& options = {});

struct CoalitionSettlement {
    std::vector<int> members;
    double collected = 0.0;   // sum of positive payments
    double distributed = 0.0; // sum of rewards paid out
};

struct Settlement {
    std::vector<CoalitionSettlement> coalitions;
    double total_collected = 0.0;
    double total_distributed = 0.0;
};

// Orchestrator-mediated two-phase clearing: collect every positive payment,
// then distribute the rewards; each ledger must already balance.
Settlement settle(const std::vector<PaymentLedger>& ledgers, double tol = 1e-9);

} // namespace edgesim
