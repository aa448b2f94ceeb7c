#include "edgesim/payments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace edgesim {

const PaymentEntry& PaymentLedger::entry_for(int sbs) const {
    for (const PaymentEntry& e : entries)
        if (e.sbs == sbs) return e;
    throw std::invalid_argument("no ledger entry for sbs");
}

PaymentLedger divide_payoff(const std::vector<int>& members, double coalition_value,
                            const std::map<int, double>& standalone,
                            const std::map<int, double>& realized,
                            const PaymentOptions& options) {
    if (members.empty()) throw std::invalid_argument("coalition must be nonempty");
    if (options.epsilon <= 0.0) throw std::invalid_argument("normalization epsilon must be positive");

    PaymentLedger ledger;
    ledger.coalition_value = coalition_value;

    double standalone_sum = 0.0;
    for (int i : members) {
        auto it = standalone.find(i);
        if (it == standalone.end()) throw std::invalid_argument("missing standalone value");
        standalone_sum += it->second;
    }
    ledger.surplus = coalition_value - standalone_sum;
    if (ledger.surplus < -1e-9 && !options.allow_negative_surplus)
        throw std::runtime_error("coalition should not have formed");

    // Normalized base utilities -> proportional weights.
    const auto& base = options.weighting == PsiWeighting::standalone ? standalone : realized;
    double base_min = std::numeric_limits<double>::infinity();
    for (int i : members) base_min = std::min(base_min, base.at(i));
    double tilde_sum = 0.0;
    for (int i : members) tilde_sum += base.at(i) - base_min + options.epsilon;

    for (int i : members) {
        PaymentEntry e;
        e.sbs = i;
        e.psi = (base.at(i) - base_min + options.epsilon) / tilde_sum;
        e.utility = realized.at(i);
        e.phi = e.psi * ledger.surplus + standalone.at(i);
        e.payment = e.utility - e.phi;
        ledger.entries.push_back(e);
    }
    std::sort(ledger.entries.begin(), ledger.entries.end(),
              [](const PaymentEntry& a, const PaymentEntry& b) { return a.sbs < b.sbs; });
    return ledger;
}

Settlement settle(const std::vector<PaymentLedger>& ledgers, double tol) {
    Settlement result;
    for (const PaymentLedger& ledger : ledgers) {
        double balance = 0.0;
        for (const PaymentEntry& e : ledger.entries) balance += e.payment;
        if (std::abs(balance) > tol) throw std::runtime_error("settlement imbalance");

        CoalitionSettlement cs;
        for (const PaymentEntry& e : ledger.entries) {
            cs.members.push_back(e.sbs);
            if (e.payment > 0.0)
                cs.collected += e.payment;
            else
                cs.distributed += -e.payment;
        }
        if (cs.collected == 0.0 && cs.distributed == 0.0) continue; // nothing to clear
        result.total_collected += cs.collected;
        result.total_distributed += cs.distributed;
        result.coalitions.push_back(std::move(cs));
    }
    return result;
}

} // namespace edgesim
