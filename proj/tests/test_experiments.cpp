#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "edgesim/experiments.hpp"

using namespace edgesim;
namespace fs = std::filesystem;

namespace {

SimConfig small_config(int sbs = 6, int mues = 18) {
    SimConfig config;
    config.generation.sbs_count = sbs;
    config.generation.mue_count = mues;
    config.centralized_cap = 6;
    return config;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace

TEST_CASE("make_world is deterministic and survives rejected draws") {
    const SimConfig config = small_config();
    const World a = make_world(config, 5);
    const World b = make_world(config, 5);
    CHECK(a.scenario_seed == b.scenario_seed);
    CHECK(scenario_to_json(a.scenario).dump() == scenario_to_json(b.scenario).dump());
    CHECK(trust_to_json(a.trust).dump() == trust_to_json(b.trust).dump());

    // a couple hundred seeds all produce usable worlds (retries included)
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const World w = make_world(config, seed);
        CHECK(w.scenario.num_sbs() == 6);
        for (const Mue& m : w.scenario.mues) CHECK(w.scenario.covers(m.home_sbs, m.id));
    }
}

TEST_CASE("run_single_slot bundles every scheme and a monotone trace") {
    const SimConfig config = small_config();
    const World world = make_world(config, 12);
    const SlotBundle bundle = run_single_slot(world, config);

    CHECK(bundle.noncoop.report.rows.size() == 6);
    CHECK(bundle.cloudmin.report.rows.size() == 6);
    CHECK(bundle.proposed_report.rows.size() == 6);
    REQUIRE(bundle.centralized.has_value()); // N=6 <= cap
    CHECK(bundle.centralized->report.rows.size() == 6);

    double prev = -1e18;
    for (const TraceEntry& t : bundle.proposed.trace) {
        CHECK(t.system_utility >= prev - 1e-9);
        prev = t.system_utility;
    }
    CHECK(bundle.rel_gain ==
          doctest::Approx((bundle.noncoop.report.total_cost() -
                           bundle.proposed_report.total_cost()) /
                          bundle.noncoop.report.total_cost()));
}

TEST_CASE("sweep rows are deterministic and follow the dominance chain") {
    SweepSpec spec;
    spec.axis = SweepAxis::mue_count;
    spec.mue_counts = {10, 20};
    spec.seeds = {3, 4};
    spec.include_centralized = true;
    spec.base = small_config();

    const SweepResult a = run_sweep(spec);
    const SweepResult b = run_sweep(spec);
    REQUIRE(a.rows.size() == b.rows.size());
    CHECK(a.rows.size() == 2 * 2 * 4); // values x seeds x schemes
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].value == b.rows[i].value);
        CHECK(a.rows[i].scheme == b.rows[i].scheme);
        CHECK(a.rows[i].total_cost == b.rows[i].total_cost);
    }

    // per cell: central >= proposed >= noncoop in utility
    for (std::size_t i = 0; i < a.rows.size(); i += 4) {
        const SweepRow& nc = a.rows[i];
        const SweepRow& prop = a.rows[i + 2];
        const SweepRow& central = a.rows[i + 3];
        REQUIRE(nc.scheme == "noncoop");
        REQUIRE(prop.scheme == "proposed");
        REQUIRE(central.scheme == "central");
        CHECK(central.total_utility >= prop.total_utility - 1e-9);
        CHECK(prop.total_utility >= nc.total_utility - 1e-9);
    }
}

TEST_CASE("sweep results land on disk with manifest-driven resume") {
    SweepSpec spec;
    spec.name = "resume-check";
    spec.axis = SweepAxis::private_fraction;
    spec.private_fractions = {0.0, 0.5};
    spec.seeds = {7};
    spec.base = small_config();

    const fs::path dir = fs::temp_directory_path() / "edgesim_sweep_test";
    fs::remove_all(dir);
    write_sweep_results(dir.string(), spec, false);

    CHECK(fs::exists(dir / "config.json"));
    CHECK(fs::exists(dir / "summary.json"));
    const std::string table = slurp(dir / "table.csv");
    const std::string trace = slurp(dir / "trace.csv");

    const nlohmann::json manifest = load_json((dir / "manifest.json").string());
    CHECK(manifest["completed"].size() == 2);

    // headline metrics cover both axis values
    const nlohmann::json summary = load_json((dir / "summary.json").string());
    CHECK(summary["per_value"].size() == 2);
    CHECK(summary.contains("max_mean_rel_gain"));
    CHECK(summary["max_mean_rel_gain"].get<double>() >= 0.0);

    // resuming with a complete manifest appends nothing
    write_sweep_results(dir.string(), spec, true);
    CHECK(slurp(dir / "table.csv") == table);
    CHECK(slurp(dir / "trace.csv") == trace);

    // dropping one cell from the manifest makes resume recompute exactly it
    nlohmann::json pruned = manifest;
    pruned["completed"].erase(1);
    save_json((dir / "manifest.json").string(), pruned);
    std::ofstream(dir / "table.csv", std::ios::trunc) << "";   // table content is appended
    std::ofstream(dir / "trace.csv", std::ios::trunc) << "";
    write_sweep_results(dir.string(), spec, true);
    const std::string recomputed = slurp(dir / "table.csv");
    CHECK(std::count(recomputed.begin(), recomputed.end(), '\n') == 3); // one cell, 3 schemes
    fs::remove_all(dir);
}

TEST_CASE("replications expand to that many seeded rows per value") {
    SweepSpec spec;
    spec.axis = SweepAxis::mue_count;
    spec.mue_counts = {12};
    spec.replications = 10; // no explicit seed list: 1..10
    spec.base = small_config();
    const SweepResult result = run_sweep(spec);
    int proposed_rows = 0;
    for (const SweepRow& r : result.rows)
        if (r.scheme == "proposed") ++proposed_rows;
    CHECK(proposed_rows == 10);
}

TEST_CASE("parallel cells produce the same table as sequential") {
    SweepSpec spec;
    spec.axis = SweepAxis::mue_count;
    spec.mue_counts = {10, 16};
    spec.seeds = {1, 2, 3};
    spec.base = small_config();
    const SweepResult seq = run_sweep(spec, 1);
    const SweepResult par = run_sweep(spec, 3);
    REQUIRE(seq.rows.size() == par.rows.size());
    for (std::size_t i = 0; i < seq.rows.size(); ++i) {
        CHECK(seq.rows[i].value == par.rows[i].value);
        CHECK(seq.rows[i].seed == par.rows[i].seed);
        CHECK(seq.rows[i].scheme == par.rows[i].scheme);
        CHECK(seq.rows[i].total_cost == par.rows[i].total_cost);
    }
}

TEST_CASE("a one-cell sweep matches a direct single-slot run") {
    SweepSpec spec;
    spec.axis = SweepAxis::mue_count;
    spec.mue_counts = {15};
    spec.seeds = {9};
    spec.base = small_config();

    const SweepResult result = run_sweep(spec);
    SimConfig cell = spec.base;
    cell.generation.mue_count = 15;
    const SlotBundle direct = run_single_slot(make_world(cell, 9), cell);
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].total_cost ==
          doctest::Approx(direct.noncoop.report.total_cost()).epsilon(1e-12));
    CHECK(result.rows[2].total_cost ==
          doctest::Approx(direct.proposed_report.total_cost()).epsilon(1e-12));
}

TEST_CASE("dynamic run: stable population repeats partitions between trust refreshes") {
    DynamicSpec spec;
    spec.slots = 6;
    spec.trust_refresh_every = 3;
    spec.mue_leave_prob = 0.0;
    spec.mue_arrive_mean = 0.0;
    spec.arrival_rate_min = 5.0; // degenerate redraw: constant arrivals
    spec.arrival_rate_max = 5.0;
    spec.base = small_config();

    const SlotSeries series = run_dynamic(spec, 21);
    REQUIRE(series.slots.size() == 6);
    // within a trust window everything is identical
    CHECK(series.slots[0].partition == series.slots[1].partition);
    CHECK(series.slots[1].partition == series.slots[2].partition);
    CHECK(series.slots[3].partition == series.slots[4].partition);
    CHECK(series.slots[0].trust_snapshot == 0);
    CHECK(series.slots[3].trust_snapshot == 1);

    for (const SlotRecord& slot : series.slots) {
        CHECK(slot.num_mues == 18);
        // individual rationality of the division: nobody worse than alone
        for (double gain : slot.utility_gain) CHECK(gain >= -1e-9);
        CHECK(slot.system_utility >= slot.noncoop_utility - 1e-9);
    }
}

TEST_CASE("dynamic run: churn changes the population deterministically") {
    DynamicSpec spec;
    spec.slots = 4;
    spec.mue_leave_prob = 0.3;
    spec.mue_arrive_mean = 5.0;
    spec.base = small_config();

    const SlotSeries a = run_dynamic(spec, 33);
    const SlotSeries b = run_dynamic(spec, 33);
    for (std::size_t i = 0; i < a.slots.size(); ++i) {
        CHECK(a.slots[i].num_mues == b.slots[i].num_mues);
        CHECK(a.slots[i].partition == b.slots[i].partition);
        CHECK(a.slots[i].system_utility == b.slots[i].system_utility);
    }
    bool population_changed = false;
    for (std::size_t i = 1; i < a.slots.size(); ++i)
        if (a.slots[i].num_mues != a.slots[0].num_mues) population_changed = true;
    CHECK(population_changed);
}
