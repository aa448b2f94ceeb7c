#include "edgesim/experiments.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "edgesim/random.hpp"

namespace edgesim {

namespace fs = std::filesystem;
using nlohmann::json;

World make_world(const SimConfig& config, std::uint64_t seed) {
    constexpr int kMaxAttempts = 128;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const std::uint64_t draw = attempt == 0 ? seed : mix_seed(seed, static_cast<std::uint64_t>(attempt));
        try {
            World world;
            world.scenario = generate_scenario(config.generation, draw);
            world.scenario_seed = draw;
            world.trust = generate_trust(world.scenario.num_sbs(), config.trust,
                                         mix_seed(draw, 0x7472757374ULL));
            world.trust_matrix =
                trust_matrix(world.trust, world.scenario.num_sbs(), config.path_policy);
            return world;
        } catch (const std::runtime_error&) {
            // rejected draw (empty deployment / uncovered mue); derive a new seed
        }
    }
    throw std::runtime_error("could not generate a usable scenario after retries");
}

SlotBundle run_single_slot(const World& world, const SimConfig& config) {
    SlotBundle bundle;
    CoalitionEvaluator eval(world.scenario, world.trust_matrix, config.policy);

    bundle.noncoop = non_cooperative(eval, config.payments);
    bundle.cloudmin = cloud_min(world.scenario, world.trust_matrix, config.policy);

    FormationConfig formation = config.formation;
    formation.payments = config.payments;
    bundle.proposed = form_coalitions(eval, formation);
    bundle.proposed_alloc = combine_partition_alloc(bundle.proposed.partition, eval);
    std::vector<int> all(static_cast<std::size_t>(world.scenario.num_sbs()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    bundle.proposed_report =
        evaluate(all, bundle.proposed_alloc, world.scenario, world.trust_matrix);

    if (world.scenario.num_sbs() <= config.centralized_cap)
        bundle.centralized = centralized_opt(eval, config.centralized_cap, config.payments);

    const double cost_nc = bundle.noncoop.report.total_cost();
    const double cost_prop = bundle.proposed_report.total_cost();
    bundle.rel_gain = cost_nc > 0.0 ? (cost_nc - cost_prop) / cost_nc : 0.0;
    return bundle;
}

void SweepSpec::validate() const {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (num_values() == 0) throw std::invalid_argument("sweep values must be nonempty");
}

std::vector<std::uint64_t> SweepSpec::seed_list() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> list;
    for (int r = 1; r <= replications; ++r) list.push_back(static_cast<std::uint64_t>(r));
    return list;
}

int SweepSpec::num_values() const {
    switch (axis) {
        case SweepAxis::weights: return static_cast<int>(weight_values.size());
        case SweepAxis::mue_count: return static_cast<int>(mue_counts.size());
        case SweepAxis::private_fraction: return static_cast<int>(private_fractions.size());
        case SweepAxis::ablation: return 2;
    }
    return 0;
}

std::string SweepSpec::value_label(int index) const {
    std::ostringstream out;
    switch (axis) {
        case SweepAxis::weights: {
            const auto& w = weight_values[static_cast<std::size_t>(index)];
            out << "wc=" << w[0] << ";wr=" << w[1] << ";w0=" << w[2];
            break;
        }
        case SweepAxis::mue_count:
            out << "mues=" << mue_counts[static_cast<std::size_t>(index)];
            break;
        case SweepAxis::private_fraction:
            out << "tau=" << private_fractions[static_cast<std::size_t>(index)];
            break;
        case SweepAxis::ablation:
            out << "mue_assoc=" << (index == 0 ? "on" : "off");
            break;
    }
    return out.str();
}

SimConfig SweepSpec::config_for(int index) const {
    SimConfig config = base;
    switch (axis) {
        case SweepAxis::weights: {
            const auto& w = weight_values[static_cast<std::size_t>(index)];
            config.generation.weights.w_c = w[0];
            config.generation.weights.w_r = w[1];
            config.generation.weights.w_0 = w[2];
            break;
        }
        case SweepAxis::mue_count:
            config.generation.mue_count = mue_counts[static_cast<std::size_t>(index)];
            break;
        case SweepAxis::private_fraction:
            config.generation.private_fraction = private_fractions[static_cast<std::size_t>(index)];
            break;
        case SweepAxis::ablation:
            config.policy.mue_association = index == 0;
            break;
    }
    return config;
}

namespace {

struct CellOutput {
    std::vector<SweepRow> rows;
    SweepCellTrace trace;
};

double mean_size(const Partition& partition) {
    if (partition.coalitions.empty()) return 0.0;
    double total = 0.0;
    for (const CoalitionState& c : partition.coalitions)
        total += static_cast<double>(c.members.size());
    return total / static_cast<double>(partition.coalitions.size());
}

CellOutput run_cell(const SweepSpec& spec, int value_index, std::uint64_t seed) {
    const SimConfig config = spec.config_for(value_index);
    const World world = make_world(config, seed);
    const SlotBundle bundle = run_single_slot(world, config);
    const std::string label = spec.value_label(value_index);

    CellOutput out;
    const double cost_nc = bundle.noncoop.report.total_cost();
    auto add = [&](const std::string& scheme, const CostReport& report, int coalitions,
                   double mean_coalition, double cloud) {
        SweepRow row;
        row.value = label;
        row.seed = seed;
        row.scheme = scheme;
        row.total_cost = report.total_cost();
        row.total_utility = report.total_utility;
        row.coalitions = coalitions;
        row.mean_coalition_size = mean_coalition;
        row.cloud_tasks = cloud;
        row.rel_gain = cost_nc > 0.0 ? (cost_nc - report.total_cost()) / cost_nc : 0.0;
        out.rows.push_back(std::move(row));
    };

    const int n = world.scenario.num_sbs();
    add("noncoop", bundle.noncoop.report, n, 1.0, total_cloud_tasks(bundle.noncoop.alloc));
    add("cloudmin", bundle.cloudmin.report, 0, 0.0, total_cloud_tasks(bundle.cloudmin.alloc));
    add("proposed", bundle.proposed_report,
        static_cast<int>(bundle.proposed.partition.coalitions.size()),
        mean_size(bundle.proposed.partition), total_cloud_tasks(bundle.proposed_alloc));
    if (spec.include_centralized && bundle.centralized)
        add("central", bundle.centralized->report,
            static_cast<int>(bundle.centralized->partition.coalitions.size()),
            mean_size(bundle.centralized->partition), total_cloud_tasks(bundle.centralized->alloc));

    out.trace.cell = label + ":" + std::to_string(seed);
    out.trace.trace = bundle.proposed.trace;
    return out;
}

// Runs cells in index order; with jobs > 1 a bounded window of cells is
// evaluated concurrently and consumed strictly in order.
void for_each_cell(const SweepSpec& spec, int jobs,
                   const std::function<bool(int)>& want_cell,
                   const std::function<void(int, CellOutput&&)>& consume) {
    const auto seeds = spec.seed_list();
    const int cells = spec.num_values() * static_cast<int>(seeds.size());
    auto cell_args = [&](int index) {
        return std::pair<int, std::uint64_t>{index / static_cast<int>(seeds.size()),
                                             seeds[static_cast<std::size_t>(
                                                 index % static_cast<int>(seeds.size()))]};
    };

    if (jobs <= 1) {
        for (int c = 0; c < cells; ++c) {
            if (!want_cell(c)) continue;
            auto [value_index, seed] = cell_args(c);
            consume(c, run_cell(spec, value_index, seed));
        }
        return;
    }

    for (int base = 0; base < cells; base += jobs) {
        const int window = std::min(jobs, cells - base);
        std::vector<std::optional<CellOutput>> outputs(static_cast<std::size_t>(window));
        std::vector<std::thread> workers;
        for (int k = 0; k < window; ++k) {
            if (!want_cell(base + k)) continue;
            workers.emplace_back([&, k] {
                auto [value_index, seed] = cell_args(base + k);
                outputs[static_cast<std::size_t>(k)] = run_cell(spec, value_index, seed);
            });
        }
        for (std::thread& t : workers) t.join();
        for (int k = 0; k < window; ++k)
            if (outputs[static_cast<std::size_t>(k)])
                consume(base + k, std::move(*outputs[static_cast<std::size_t>(k)]));
    }
}

std::string cell_key(const SweepSpec& spec, int cell_index) {
    const auto seeds = spec.seed_list();
    const int value_index = cell_index / static_cast<int>(seeds.size());
    const std::uint64_t seed =
        seeds[static_cast<std::size_t>(cell_index % static_cast<int>(seeds.size()))];
    return spec.value_label(value_index) + ":" + std::to_string(seed);
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec, int jobs) {
    spec.validate();
    SweepResult result;
    for_each_cell(
        spec, jobs, [](int) { return true; },
        [&](int, CellOutput&& out) {
            for (SweepRow& row : out.rows) result.rows.push_back(std::move(row));
            result.traces.push_back(std::move(out.trace));
        });
    return result;
}

namespace {

void write_table_header(std::ostream& out) {
    out << "value,seed,scheme,total_cost,total_utility,coalitions,mean_coalition_size,"
           "cloud_tasks,rel_gain\n";
}

void write_table_rows(std::ostream& out, const std::vector<SweepRow>& rows) {
    for (const SweepRow& r : rows)
        out << r.value << ',' << r.seed << ',' << r.scheme << ',' << format_double(r.total_cost)
            << ',' << format_double(r.total_utility) << ',' << r.coalitions << ','
            << format_double(r.mean_coalition_size) << ',' << format_double(r.cloud_tasks) << ','
            << format_double(r.rel_gain) << '\n';
}

void write_trace_cell(std::ostream& out, const SweepCellTrace& trace) {
    for (const TraceEntry& t : trace.trace)
        out << trace.cell << ',' << t.step << ',' << t.op << ',' << '"' << t.before << '"' << ','
            << '"' << t.after << '"' << ',' << format_double(t.system_utility) << '\n';
}

} // namespace

void write_sweep_results(const std::string& out_dir, const SweepSpec& spec, bool resume,
                         int jobs) {
    spec.validate();
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    const fs::path table_path = dir / "table.csv";
    const fs::path trace_path = dir / "trace.csv";
    const fs::path manifest_path = dir / "manifest.json";

    save_json((dir / "config.json").string(), sweep_spec_to_json(spec));

    // The manifest is the resume anchor; a table without one is stale.
    std::set<std::string> completed;
    const bool fresh = !resume || !fs::exists(manifest_path);
    if (!fresh) {
        const json manifest = load_json(manifest_path.string());
        for (const auto& key : manifest.value("completed", json::array()))
            completed.insert(key.get<std::string>());
    }

    std::ofstream table(table_path, fresh ? std::ios::trunc : std::ios::app);
    std::ofstream trace(trace_path, fresh ? std::ios::trunc : std::ios::app);
    if (!table || !trace) throw std::runtime_error("cannot write results to " + out_dir);
    if (fresh) {
        write_table_header(table);
        trace << "cell,iteration,op,coalitions_before,coalitions_after,system_utility\n";
    }

    for_each_cell(
        spec, jobs,
        [&](int cell) { return completed.count(cell_key(spec, cell)) == 0; },
        [&](int cell, CellOutput&& out) {
            write_table_rows(table, out.rows);
            write_trace_cell(trace, out.trace);
            table.flush();
            trace.flush();
            completed.insert(cell_key(spec, cell));
            json manifest;
            manifest["completed"] = json::array();
            for (const std::string& key : completed) manifest["completed"].push_back(key);
            save_json(manifest_path.string(), manifest);
        });
    table.close();

    // Headline metrics over the full table (including resumed cells).
    json summary;
    summary["experiment"] = spec.name;
    double max_gain = 0.0;
    std::string max_gain_value;
    std::map<std::string, std::pair<double, int>> gain_by_value;
    std::map<std::string, std::pair<double, int>> size_by_value;
    {
        std::ifstream in(table_path);
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            std::istringstream row(line);
            std::string value, field, scheme;
            std::getline(row, value, ',');
            std::getline(row, field, ','); // seed
            std::getline(row, scheme, ',');
            if (scheme != "proposed") continue;
            for (int skip = 0; skip < 3; ++skip) std::getline(row, field, ',');
            std::getline(row, field, ',');
            const double mean_coalition_size = std::stod(field);
            std::getline(row, field, ','); // cloud tasks
            std::getline(row, field, ',');
            const double rel_gain = std::stod(field);
            auto& g = gain_by_value[value];
            g.first += rel_gain;
            g.second += 1;
            auto& s = size_by_value[value];
            s.first += mean_coalition_size;
            s.second += 1;
        }
    }
    json per_value = json::array();
    for (const auto& [value, acc] : gain_by_value) {
        const double mean_gain = acc.first / acc.second;
        const auto& s = size_by_value[value];
        per_value.push_back({{"value", value},
                             {"mean_rel_gain", mean_gain},
                             {"mean_coalition_size", s.first / s.second}});
        if (mean_gain > max_gain) {
            max_gain = mean_gain;
            max_gain_value = value;
        }
    }
    summary["per_value"] = std::move(per_value);
    summary["max_mean_rel_gain"] = max_gain;
    summary["max_mean_rel_gain_at"] = max_gain_value;
    save_json((dir / "summary.json").string(), summary);
}

json sweep_spec_to_json(const SweepSpec& spec) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["name"] = spec.name;
    switch (spec.axis) {
        case SweepAxis::weights: doc["axis"] = "weights"; break;
        case SweepAxis::mue_count: doc["axis"] = "mue_count"; break;
        case SweepAxis::private_fraction: doc["axis"] = "private_fraction"; break;
        case SweepAxis::ablation: doc["axis"] = "ablation"; break;
    }
    if (!spec.weight_values.empty()) {
        json w = json::array();
        for (const auto& t : spec.weight_values) w.push_back({t[0], t[1], t[2]});
        doc["weight_values"] = std::move(w);
    }
    if (!spec.mue_counts.empty()) doc["mue_counts"] = spec.mue_counts;
    if (!spec.private_fractions.empty()) doc["private_fractions"] = spec.private_fractions;
    doc["replications"] = spec.replications;
    if (!spec.seeds.empty()) doc["seeds"] = spec.seeds;
    doc["include_centralized"] = spec.include_centralized;
    doc["base"] = config_to_json(spec.base);
    return doc;
}

SweepSpec sweep_spec_from_json(const json& doc) {
    SweepSpec spec;
    spec.name = doc.value("name", spec.name);
    const std::string axis = doc.value("axis", "mue_count");
    if (axis == "weights")
        spec.axis = SweepAxis::weights;
    else if (axis == "mue_count")
        spec.axis = SweepAxis::mue_count;
    else if (axis == "private_fraction")
        spec.axis = SweepAxis::private_fraction;
    else if (axis == "ablation")
        spec.axis = SweepAxis::ablation;
    else
        throw std::runtime_error("bad value at axis (want weights|mue_count|private_fraction|ablation)");
    if (doc.contains("weight_values"))
        for (const auto& t : doc["weight_values"]) {
            if (!t.is_array() || t.size() != 3)
                throw std::runtime_error("bad value at weight_values (want [w_c,w_r,w_0] triples)");
            spec.weight_values.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
        }
    if (doc.contains("mue_counts")) spec.mue_counts = doc["mue_counts"].get<std::vector<int>>();
    if (doc.contains("private_fractions"))
        spec.private_fractions = doc["private_fractions"].get<std::vector<double>>();
    spec.replications = doc.value("replications", spec.replications);
    if (doc.contains("seeds")) spec.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
    spec.include_centralized = doc.value("include_centralized", spec.include_centralized);
    if (doc.contains("base")) spec.base = config_from_json(doc["base"]);
    spec.validate();
    return spec;
}

SlotSeries run_dynamic(const DynamicSpec& spec, std::uint64_t seed) {
    if (spec.slots < 1) throw std::invalid_argument("slots must be >= 1");
    if (spec.trust_refresh_every < 1)
        throw std::invalid_argument("trust refresh period must be >= 1");

    // Fixed SBS deployment for the whole horizon; the MUE population churns.
    SimConfig base = spec.base;
    World world0 = make_world(base, seed);
    const Scenario& base_scenario = world0.scenario;

    std::vector<Mue> population = base_scenario.mues;

    SlotSeries series;
    TrustNetwork trust = world0.trust;
    TrustMatrix matrix = world0.trust_matrix;
    int trust_snapshot = 0;

    for (int slot = 0; slot < spec.slots; ++slot) {
        Rng rng(mix_seed(seed, 0x736c6f74ULL + static_cast<std::uint64_t>(slot)));

        if (slot > 0) {
            // churn: departures first, then Poisson arrivals, then rate redraws
            std::vector<Mue> survivors;
            for (const Mue& m : population)
                if (!rng.bernoulli(spec.mue_leave_prob)) survivors.push_back(m);
            const int arrivals = rng.poisson(spec.mue_arrive_mean);
            for (int a = 0; a < arrivals; ++a) {
                Mue m;
                const int floors = base_scenario.geometry.num_floors();
                for (int attempt = 0; attempt < 100; ++attempt) {
                    const int floor = static_cast<int>(
                        rng.uniform_int(static_cast<std::uint64_t>(floors)));
                    m.position.x = rng.uniform(0.0, base_scenario.geometry.width_m);
                    m.position.y = rng.uniform(0.0, base_scenario.geometry.depth_m);
                    m.position.z = floor * base_scenario.geometry.floor_height_m +
                                   base.generation.mue_height_m;
                    m.max_tx_dbm = base.generation.mue_max_tx_dbm;
                    m.private_fraction = base.generation.private_fraction;
                    int nearest = 0;
                    double best = std::numeric_limits<double>::infinity();
                    for (const Sbs& s : base_scenario.sbs) {
                        const double pl = path_loss_db(m.position, s.position, base_scenario.channel);
                        if (pl < best) {
                            best = pl;
                            nearest = s.id;
                        }
                    }
                    m.home_sbs = nearest;
                    const LinkMetrics lm =
                        link_metrics(m.position, base_scenario.sbs[static_cast<std::size_t>(nearest)].position,
                                     base_scenario.channel.target_rate_mue, base_scenario.channel,
                                     m.max_tx_dbm);
                    if (lm.feasible) break; // else redraw the position
                }
                survivors.push_back(m);
            }
            population = std::move(survivors);
            for (std::size_t i = 0; i < population.size(); ++i)
                population[i].id = static_cast<int>(i);
        }
        for (Mue& m : population)
            m.arrival_rate = rng.uniform(spec.arrival_rate_min, spec.arrival_rate_max);

        if (slot % spec.trust_refresh_every == 0 && slot > 0) {
            ++trust_snapshot;
            trust = generate_trust(base_scenario.num_sbs(), base.trust,
                                   mix_seed(seed, 0x74727573ULL + static_cast<std::uint64_t>(trust_snapshot)));
            matrix = trust_matrix(trust, base_scenario.num_sbs(), base.path_policy);
        }

        Scenario slot_scenario = base_scenario;
        slot_scenario.mues = population;
        slot_scenario.build_caches();

        CoalitionEvaluator eval(slot_scenario, matrix, base.policy);
        FormationConfig formation = base.formation;
        formation.payments = base.payments;
        const FormationResult formed = form_coalitions(eval, formation);

        SlotRecord record;
        record.slot = slot;
        record.trust_snapshot = trust_snapshot;
        record.num_mues = static_cast<int>(population.size());
        for (int i = 0; i < slot_scenario.num_sbs(); ++i)
            record.lambda_s.push_back(slot_scenario.lambda_s(i));
        record.partition = formed.partition.to_string();
        record.coalitions = static_cast<int>(formed.partition.coalitions.size());
        record.system_utility = formed.partition.system_utility();
        double noncoop_total = 0.0;
        for (double v : eval.standalone_values()) noncoop_total += v;
        record.noncoop_utility = noncoop_total;
        const auto phis = formed.partition.phis();
        for (int i = 0; i < slot_scenario.num_sbs(); ++i)
            record.utility_gain.push_back(phis.at(i) - eval.standalone(i));
        series.slots.push_back(std::move(record));
    }
    return series;
}

} // namespace edgesim
