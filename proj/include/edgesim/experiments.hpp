#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/baselines.hpp"
#include "edgesim/io.hpp"

namespace edgesim {

// Scenario + trust world for one cell, with the derived trust matrix.
struct World {
    Scenario scenario;
    TrustNetwork trust;
    TrustMatrix trust_matrix;
    std::uint64_t scenario_seed = 0; // the seed that produced the accepted draw
};

// Generates a world, retrying with derived seeds when a draw is rejected
// (empty deployment / uncovered MUE). Deterministic for a given config+seed.
World make_world(const SimConfig& config, std::uint64_t seed);

struct SlotBundle {
    BaselineResult noncoop;
    CloudMinResult cloudmin;
    FormationResult proposed;
    Allocation proposed_alloc;
    CostReport proposed_report;
    std::optional<BaselineResult> centralized; // absent when N exceeds the cap
    double rel_gain = 0.0; // (cost_nc - cost_prop) / cost_nc
};

// All schemes on one world; deterministic under a fixed seed.
SlotBundle run_single_slot(const World& world, const SimConfig& config);

enum class SweepAxis { weights, mue_count, private_fraction, ablation };

struct SweepSpec {
    std::string name = "sweep";
    SweepAxis axis = SweepAxis::mue_count;
    std::vector<std::array<double, 3>> weight_values; // (w_c, w_r, w_0)
    std::vector<int> mue_counts;
    std::vector<double> private_fractions;
    int replications = 1;
    std::vector<std::uint64_t> seeds; // empty -> 1..replications
    bool include_centralized = false;
    SimConfig base;

    void validate() const;
    std::vector<std::uint64_t> seed_list() const;
    int num_values() const;
    std::string value_label(int index) const;
    SimConfig config_for(int index) const; // base with the axis value applied
};

struct SweepRow {
    std::string value;
    std::uint64_t seed = 0;
    std::string scheme;
    double total_cost = 0.0;
    double total_utility = 0.0;
    int coalitions = 0;
    double mean_coalition_size = 0.0;
    double cloud_tasks = 0.0;
    double rel_gain = 0.0; // vs non-cooperative, same cell
};

struct SweepCellTrace {
    std::string cell;
    std::vector<TraceEntry> trace;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepCellTrace> traces;
};

SweepResult run_sweep(const SweepSpec& spec, int jobs = 1);

// results/<name>/<stamp>/{config.json, table.csv, trace.csv, summary.json};
// cells already listed in manifest.json are skipped when `resume` is set.
void write_sweep_results(const std::string& out_dir, const SweepSpec& spec, bool resume,
                         int jobs = 1);

nlohmann::json sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const nlohmann::json& doc);

struct DynamicSpec {
    int slots = 30;
    int trust_refresh_every = 5;
    double mue_leave_prob = 0.15;
    double mue_arrive_mean = 8.0;        // Poisson arrivals per slot
    double arrival_rate_min = 2.0;       // per-slot lambda redraw range
    double arrival_rate_max = 8.0;
    SimConfig base;
};

struct SlotRecord {
    int slot = 0;
    int trust_snapshot = 0;
    int num_mues = 0;
    std::vector<double> lambda_s;      // per SBS
    std::string partition;
    int coalitions = 0;
    double system_utility = 0.0;
    double noncoop_utility = 0.0;
    std::vector<double> utility_gain;  // phi_i - v({i}) per SBS
};

struct SlotSeries {
    std::vector<SlotRecord> slots;
};

// Multi-slot run with MUE churn and per-slot task arrival redraws; the
// trust network is refreshed every `trust_refresh_every` slots. Coalition
// formation runs independently per slot.
SlotSeries run_dynamic(const DynamicSpec& spec, std::uint64_t seed);

} // namespace edgesim
