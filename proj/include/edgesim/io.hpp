#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgesim/baselines.hpp"
#include "edgesim/cost.hpp"
#include "edgesim/formation.hpp"
#include "edgesim/payments.hpp"
#include "edgesim/scenario.hpp"
#include "edgesim/trust.hpp"

namespace edgesim {

inline constexpr int kSchemaVersion = 1;

// Everything a run needs, loadable from one JSON document. Defaults mirror
// the standard indoor setup (Table-style parameter set).
struct SimConfig {
    GenConfig generation;
    TrustGenConfig trust;
    TrustPathPolicy path_policy = TrustPathPolicy::hop_count;
    SearchPolicy policy;
    PaymentOptions payments;
    FormationConfig formation;
    int centralized_cap = 10;
    std::uint64_t seed = 1;
};

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

nlohmann::json trust_to_json(const TrustNetwork& net);
TrustNetwork trust_from_json(const nlohmann::json& doc);

nlohmann::json allocation_to_json(const Allocation& alloc);
Allocation allocation_from_json(const nlohmann::json& doc);

nlohmann::json cost_report_to_json(const CostReport& report);
nlohmann::json settlement_to_json(const Settlement& settlement);

nlohmann::json config_to_json(const SimConfig& config);
SimConfig config_from_json(const nlohmann::json& doc);

// File helpers; load errors carry the offending field path.
void save_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json load_json(const std::string& path);

Scenario load_scenario(const std::string& path);
TrustNetwork load_trust(const std::string& path);
SimConfig load_config(const std::string& path);

// CSV emission. All writers use a fixed numeric format so identical inputs
// produce byte-identical files.
std::string format_double(double v);
void write_cost_csv_header(std::ostream& out);
void write_cost_csv_rows(std::ostream& out, const std::string& scheme, const CostReport& report,
                         const Scenario& scenario);
void write_ledger_csv(std::ostream& out, const Partition& partition);
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);

} // namespace edgesim
