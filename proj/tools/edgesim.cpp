// edgesim: collaborative edge computing coalition simulator CLI.
//
// Subcommands: generate (scenario + trust files), run (one scheme on a
// scenario), sweep (parameter sweeps to a results directory), verify
// (stability certificates and allocation invariants), report (aggregate a
// sweep table).

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "edgesim/experiments.hpp"
#include "edgesim/io.hpp"
#include "edgesim/random.hpp"

namespace fs = std::filesystem;
using namespace edgesim;

namespace {

std::uint64_t resolve_seed(std::uint64_t config_seed, bool cli_seed_set, std::uint64_t cli_seed) {
    if (cli_seed_set) return cli_seed;
    if (const char* env = std::getenv("EDGESIM_SEED")) return std::strtoull(env, nullptr, 10);
    return config_seed;
}

SimConfig load_or_default(const std::string& config_path, const std::string& preset) {
    SimConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    if (preset == "paper-fig4") {
        config.generation.sbs_count = 13;
        config.generation.mue_count = 52;
    } else if (!preset.empty()) {
        throw std::runtime_error("unknown preset '" + preset + "' (have: paper-fig4)");
    }
    return config;
}

int cmd_generate(const std::string& config_path, const std::string& preset, bool cli_seed_set,
                 std::uint64_t cli_seed, const std::string& out_dir) {
    SimConfig config = load_or_default(config_path, preset);
    const std::uint64_t seed = resolve_seed(config.seed, cli_seed_set, cli_seed);
    const World world = make_world(config, seed);
    fs::create_directories(out_dir);
    save_json((fs::path(out_dir) / "scenario.json").string(), scenario_to_json(world.scenario));
    save_json((fs::path(out_dir) / "trust.json").string(), trust_to_json(world.trust));
    std::cout << "wrote " << out_dir << "/scenario.json (" << world.scenario.num_sbs() << " SBSs, "
              << world.scenario.num_mues() << " MUEs, seed " << world.scenario_seed << ")\n";
    return 0;
}

int cmd_run(const std::string& scenario_path, const std::string& trust_path,
            const std::string& scheme, const std::string& out_dir, const SimConfig& config) {
    const Scenario scenario = load_scenario(scenario_path);
    TrustNetwork trust = load_trust(trust_path);
    // SBSs absent from the trust file are simply strangers
    trust.set_num_nodes(std::max(trust.num_nodes(), scenario.num_sbs()));
    const TrustMatrix matrix = trust_matrix(trust, scenario.num_sbs(), config.path_policy);
    fs::create_directories(out_dir);

    std::ofstream costs(fs::path(out_dir) / "costs.csv");
    write_cost_csv_header(costs);

    CoalitionEvaluator eval(scenario, matrix, config.policy);
    if (scheme == "noncoop") {
        const BaselineResult r = non_cooperative(eval, config.payments);
        write_cost_csv_rows(costs, scheme, r.report, scenario);
    } else if (scheme == "cloudmin") {
        const CloudMinResult r = cloud_min(scenario, matrix, config.policy);
        write_cost_csv_rows(costs, scheme, r.report, scenario);
    } else if (scheme == "central") {
        const BaselineResult r = centralized_opt(eval, config.centralized_cap, config.payments);
        write_cost_csv_rows(costs, scheme, r.report, scenario);
        std::ofstream ledger(fs::path(out_dir) / "ledger.csv");
        write_ledger_csv(ledger, r.partition);
        std::cout << "best partition: " << r.partition.to_string() << "\n";
    } else if (scheme == "proposed") {
        FormationConfig formation = config.formation;
        formation.payments = config.payments;
        const FormationResult r = form_coalitions(eval, formation);
        const Allocation alloc = combine_partition_alloc(r.partition, eval);
        std::vector<int> all(static_cast<std::size_t>(scenario.num_sbs()));
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        write_cost_csv_rows(costs, scheme, evaluate(all, alloc, scenario, matrix), scenario);
        std::ofstream ledger(fs::path(out_dir) / "ledger.csv");
        write_ledger_csv(ledger, r.partition);
        std::ofstream trace(fs::path(out_dir) / "trace.csv");
        write_trace_csv(trace, r.trace);
        save_json((fs::path(out_dir) / "allocation.json").string(), allocation_to_json(alloc));

        // orchestrator clearing: collect payments, distribute rewards
        std::vector<PaymentLedger> ledgers;
        for (const CoalitionState& c : r.partition.coalitions) ledgers.push_back(c.ledger);
        const Settlement cleared = settle(ledgers);
        save_json((fs::path(out_dir) / "settlement.json").string(), settlement_to_json(cleared));
        std::cout << "final partition: " << r.partition.to_string() << " (" << r.trace.size()
                  << " operations); settlement " << format_double(cleared.total_collected)
                  << " collected = " << format_double(cleared.total_distributed)
                  << " distributed\n";
    } else {
        throw std::runtime_error("unknown scheme '" + scheme +
                                 "' (have: proposed|noncoop|cloudmin|central)");
    }
    std::cout << "wrote " << out_dir << "/costs.csv\n";
    return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, bool resume, int jobs) {
    const SweepSpec spec = sweep_spec_from_json(load_json(spec_path));
    std::string dir = out_dir;
    if (dir.empty()) {
        const auto stamp = std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count();
        dir = (fs::path("results") / spec.name / std::to_string(stamp)).string();
    }
    write_sweep_results(dir, spec, resume, jobs);
    std::cout << "wrote " << dir << "/table.csv\n";
    return 0;
}

int cmd_verify(const std::string& scenario_path, const std::string& trust_path,
               const std::string& mode, const std::string& allocation_path,
               const SimConfig& config) {
    const Scenario scenario = load_scenario(scenario_path);
    TrustNetwork trust = load_trust(trust_path);
    trust.set_num_nodes(std::max(trust.num_nodes(), scenario.num_sbs()));
    const TrustMatrix matrix = trust_matrix(trust, scenario.num_sbs(), config.path_policy);

    bool all_ok = true;
    if (!allocation_path.empty()) {
        const Allocation alloc = allocation_from_json(load_json(allocation_path));
        std::vector<int> all(static_cast<std::size_t>(scenario.num_sbs()));
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        try {
            validate_allocation(alloc, all, scenario);
            std::cout << "PASS allocation invariants\n";
        } catch (const std::exception& e) {
            std::cout << "FAIL allocation invariants: " << e.what() << "\n";
            all_ok = false;
        }
    }

    CoalitionEvaluator eval(scenario, matrix, config.policy);
    FormationConfig formation = config.formation;
    formation.payments = config.payments;
    const FormationResult formed = form_coalitions(eval, formation);
    std::cout << "converged partition: " << formed.partition.to_string() << "\n";

    const StabilityCertificate hp =
        certify_stability(formed.partition, eval, formation, StabilityMode::hp);
    std::cout << (hp.hp_stable ? "PASS" : "FAIL") << " hp-stability (merge-and-split proof)\n";
    all_ok = all_ok && hp.hp_stable;

    if (mode == "c") {
        const StabilityCertificate c =
            certify_stability(formed.partition, eval, formation, StabilityMode::c);
        if (!c.c_exists) {
            std::cout << "INFO no D_c-stable partition exists (no Pareto-maximal partition)\n";
        } else {
            std::cout << (c.c_attained ? "PASS" : "FAIL") << " D_c attainment: best partition "
                      << c.c_best_partition << " utility " << format_double(c.c_best_utility)
                      << "\n";
            all_ok = all_ok && c.c_attained;
        }
    }
    return all_ok ? 0 : 2;
}

int cmd_dynamic(const std::string& config_path, bool cli_seed_set, std::uint64_t cli_seed,
                int slots, int trust_refresh, const std::string& out_dir) {
    SimConfig base = load_or_default(config_path, "");
    if (!base.generation.sbs_count && base.generation.sbs_intensity == 0.0) {
        base.generation.sbs_count = 13;
        base.generation.mue_count = 52;
    }
    DynamicSpec spec;
    spec.base = base;
    spec.slots = slots;
    spec.trust_refresh_every = trust_refresh;
    const std::uint64_t seed = resolve_seed(base.seed, cli_seed_set, cli_seed);
    const SlotSeries series = run_dynamic(spec, seed);

    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "slots.csv");
    out << "slot,trust_snapshot,num_mues,coalitions,partition,system_utility,noncoop_utility,"
           "total_gain\n";
    std::ofstream gains(fs::path(out_dir) / "gains.csv");
    gains << "slot,sbs_id,lambda_s,utility_gain\n";
    for (const SlotRecord& slot : series.slots) {
        double total_gain = 0.0;
        for (double g : slot.utility_gain) total_gain += g;
        out << slot.slot << ',' << slot.trust_snapshot << ',' << slot.num_mues << ','
            << slot.coalitions << ',' << '"' << slot.partition << '"' << ','
            << format_double(slot.system_utility) << ',' << format_double(slot.noncoop_utility)
            << ',' << format_double(total_gain) << '\n';
        for (std::size_t i = 0; i < slot.utility_gain.size(); ++i)
            gains << slot.slot << ',' << i << ',' << format_double(slot.lambda_s[i]) << ','
                  << format_double(slot.utility_gain[i]) << '\n';
    }
    std::cout << "wrote " << out_dir << "/slots.csv (" << series.slots.size() << " slots)\n";
    return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out_path) {
    std::ifstream table(fs::path(in_dir) / "table.csv");
    if (!table) throw std::runtime_error("cannot read " + in_dir + "/table.csv");
    std::string line;
    std::getline(table, line); // header
    struct Acc {
        double cost_sum = 0.0, cost_sq = 0.0, gain_sum = 0.0;
        int n = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc; // (value, scheme)
    while (std::getline(table, line)) {
        std::istringstream row(line);
        std::string value, seed, scheme, field;
        std::getline(row, value, ',');
        std::getline(row, seed, ',');
        std::getline(row, scheme, ',');
        std::getline(row, field, ',');
        const double cost = std::stod(field);
        for (int skip = 0; skip < 4; ++skip) std::getline(row, field, ',');
        std::getline(row, field, ',');
        const double gain = std::stod(field);
        Acc& a = acc[{value, scheme}];
        a.cost_sum += cost;
        a.cost_sq += cost * cost;
        a.gain_sum += gain;
        a.n += 1;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "value,scheme,n,mean_cost,std_cost,mean_rel_gain\n";
    for (const auto& [key, a] : acc) {
        const double mean = a.cost_sum / a.n;
        const double var = a.n > 1 ? (a.cost_sq - a.n * mean * mean) / (a.n - 1) : 0.0;
        out << key.first << ',' << key.second << ',' << a.n << ',' << format_double(mean) << ','
            << format_double(var > 0 ? std::sqrt(var) : 0.0) << ','
            << format_double(a.gain_sum / a.n) << '\n';
    }
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"edgesim: socially trusted collaborative edge computing simulator"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir = "out";
    std::uint64_t cli_seed = 0;
    bool cli_seed_set = false;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    auto* generate = app.add_subcommand("generate", "generate scenario and trust files");
    generate->add_option("--config", config_path, "config JSON");
    generate->add_option("--preset", preset, "named preset (paper-fig4)");
    generate->add_option("--seed", cli_seed, "seed override")->each([&](const std::string&) {
        cli_seed_set = true;
    });
    generate->add_option("--out", out_dir, "output directory");

    std::string scenario_path, trust_path, scheme = "proposed";
    int exhaustive_threshold = -1;
    auto* run = app.add_subcommand("run", "run one scheme on a scenario");
    run->add_option("--scenario", scenario_path, "scenario JSON")->required();
    run->add_option("--trust-file", trust_path, "trust network JSON")->required();
    run->add_option("--scheme", scheme, "proposed|noncoop|cloudmin|central");
    run->add_option("--config", config_path, "config JSON");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--exhaustive-threshold", exhaustive_threshold,
                    "max buyers for exhaustive ordering search");

    std::string spec_path, sweep_out;
    bool resume = false;
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("--spec", spec_path, "sweep spec JSON")->required();
    sweep->add_option("--out", sweep_out, "results directory (default results/<name>/<stamp>)");
    sweep->add_flag("--resume", resume, "skip cells already in the manifest");
    sweep->add_option("--jobs", jobs, "parallel cells");

    std::string verify_mode = "hp", allocation_path;
    auto* verify = app.add_subcommand("verify", "stability certificates and invariants");
    verify->add_option("--scenario", scenario_path, "scenario JSON")->required();
    verify->add_option("--trust-file", trust_path, "trust network JSON")->required();
    verify->add_option("--mode", verify_mode, "hp|c");
    verify->add_option("--allocation", allocation_path, "allocation JSON to validate");
    verify->add_option("--config", config_path, "config JSON");

    int slots = 30, trust_refresh = 5;
    auto* dynamic = app.add_subcommand("dynamic", "multi-slot run with MUE churn");
    dynamic->add_option("--config", config_path, "config JSON");
    dynamic->add_option("--slots", slots, "number of operational slots");
    dynamic->add_option("--trust-refresh", trust_refresh, "slots between trust refreshes");
    dynamic->add_option("--seed", cli_seed, "seed override")->each([&](const std::string&) {
        cli_seed_set = true;
    });
    dynamic->add_option("--out", out_dir, "output directory");

    std::string report_in, report_out = "summary.csv";
    auto* report = app.add_subcommand("report", "aggregate a sweep table");
    report->add_option("--in", report_in, "sweep results directory")->required();
    report->add_option("--out", report_out, "summary CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return cmd_generate(config_path, preset, cli_seed_set, cli_seed, out_dir);
        if (run->parsed()) {
            SimConfig config = load_or_default(config_path, "");
            if (exhaustive_threshold >= 0) config.policy.exhaustive_threshold = exhaustive_threshold;
            return cmd_run(scenario_path, trust_path, scheme, out_dir, config);
        }
        if (sweep->parsed()) return cmd_sweep(spec_path, sweep_out, resume, jobs);
        if (verify->parsed()) {
            const SimConfig config = load_or_default(config_path, "");
            return cmd_verify(scenario_path, trust_path, verify_mode, allocation_path, config);
        }
        if (dynamic->parsed())
            return cmd_dynamic(config_path, cli_seed_set, cli_seed, slots, trust_refresh, out_dir);
        if (report->parsed()) return cmd_report(report_in, report_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
