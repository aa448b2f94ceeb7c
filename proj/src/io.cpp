#include "edgesim/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace edgesim {

using nlohmann::json;

namespace {

// Json access with field-path diagnostics.
class Cursor {
public:
    Cursor(const json& node, std::string path) : node_(&node), path_(std::move(path)) {}

    Cursor at(const std::string& key) const {
        if (!node_->is_object() || !node_->contains(key))
            throw std::runtime_error("missing field " + join(key));
        return {(*node_)[key], join(key)};
    }

    bool has(const std::string& key) const { return node_->is_object() && node_->contains(key); }

    template <typename T>
    T get() const {
        try {
            return node_->get<T>();
        } catch (const json::exception&) {
            throw std::runtime_error("bad value type at " + path_);
        }
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) const {
        if (!has(key)) return fallback;
        return at(key).get<T>();
    }

    const json& raw() const { return *node_; }
    const std::string& path() const { return path_; }

private:
    std::string join(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    const json* node_;
    std::string path_;
};

json point_to_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

Point3 point_from_json(const Cursor& c) {
    const json& a = c.raw();
    if (!a.is_array() || a.size() != 3)
        throw std::runtime_error("bad value type at " + c.path() + " (want [x,y,z])");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

void check_version(const Cursor& root) {
    const int version = root.get_or<int>("schema_version", kSchemaVersion);
    if (version != kSchemaVersion)
        throw std::runtime_error("unsupported schema_version " + std::to_string(version));
}

json channel_to_json(const ChannelParams& c) {
    return {{"carrier_freq_mhz", c.carrier_freq_mhz},
            {"path_loss_exponent", c.path_loss_exponent},
            {"floor_loss_db", c.floor_loss_db},
            {"floor_loss_step_db", c.floor_loss_step_db},
            {"noise_power_dbw", c.noise_power_dbw},
            {"interference_w", c.interference_w},
            {"bandwidth_hz", c.bandwidth_hz},
            {"target_rate_mue", c.target_rate_mue},
            {"target_rate_sbs", c.target_rate_sbs},
            {"floor_height_m", c.floor_height_m}};
}

ChannelParams channel_from_json(const Cursor& c) {
    ChannelParams params;
    params.carrier_freq_mhz = c.get_or("carrier_freq_mhz", params.carrier_freq_mhz);
    params.path_loss_exponent = c.get_or("path_loss_exponent", params.path_loss_exponent);
    if (c.has("floor_loss_db")) {
        auto v = c.at("floor_loss_db").get<std::vector<double>>();
        if (v.size() != 3) throw std::runtime_error("bad value type at " + c.path() + ".floor_loss_db");
        std::copy(v.begin(), v.end(), params.floor_loss_db.begin());
    }
    params.floor_loss_step_db = c.get_or("floor_loss_step_db", params.floor_loss_step_db);
    params.noise_power_dbw = c.get_or("noise_power_dbw", params.noise_power_dbw);
    params.interference_w = c.get_or("interference_w", params.interference_w);
    params.bandwidth_hz = c.get_or("bandwidth_hz", params.bandwidth_hz);
    params.target_rate_mue = c.get_or("target_rate_mue", params.target_rate_mue);
    params.target_rate_sbs = c.get_or("target_rate_sbs", params.target_rate_sbs);
    params.floor_height_m = c.get_or("floor_height_m", params.floor_height_m);
    return params;
}

json weights_to_json(const WeightProfile& w) {
    return {{"w_c", w.w_c},
            {"w_r", w.w_r},
            {"w_0", w.w_0},
            {"gamma", w.gamma},
            {"kappa", w.kappa},
            {"rho", w.rho},
            {"cloud_delay_s", w.cloud_delay_s},
            {"cloud_energy_j", w.cloud_energy_j}};
}

WeightProfile weights_from_json(const Cursor& c) {
    WeightProfile w;
    w.w_c = c.get_or("w_c", w.w_c);
    w.w_r = c.get_or("w_r", w.w_r);
    w.w_0 = c.get_or("w_0", w.w_0);
    w.gamma = c.get_or("gamma", w.gamma);
    w.kappa = c.get_or("kappa", w.kappa);
    w.rho = c.get_or("rho", w.rho);
    w.cloud_delay_s = c.get_or("cloud_delay_s", w.cloud_delay_s);
    w.cloud_energy_j = c.get_or("cloud_energy_j", w.cloud_energy_j);
    return w;
}

json building_to_json(const BuildingGeometry& g) {
    return {{"width_m", g.width_m},
            {"depth_m", g.depth_m},
            {"height_m", g.height_m},
            {"floor_height_m", g.floor_height_m}};
}

BuildingGeometry building_from_json(const Cursor& c) {
    BuildingGeometry g;
    g.width_m = c.get_or("width_m", g.width_m);
    g.depth_m = c.get_or("depth_m", g.depth_m);
    g.height_m = c.get_or("height_m", g.height_m);
    g.floor_height_m = c.get_or("floor_height_m", g.floor_height_m);
    return g;
}

} // namespace

json scenario_to_json(const Scenario& scenario) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["building"] = building_to_json(scenario.geometry);
    doc["channel"] = channel_to_json(scenario.channel);
    doc["weights"] = weights_to_json(scenario.weights);
    json sbs = json::array();
    for (const Sbs& s : scenario.sbs)
        sbs.push_back({{"id", s.id},
                       {"position", point_to_json(s.position)},
                       {"cpu_speed", s.cpu_speed},
                       {"max_tx_dbm", s.max_tx_dbm},
                       {"utilization_cap", s.utilization_cap}});
    doc["sbs"] = std::move(sbs);
    json mues = json::array();
    for (const Mue& m : scenario.mues)
        mues.push_back({{"id", m.id},
                        {"position", point_to_json(m.position)},
                        {"home_sbs", m.home_sbs},
                        {"arrival_rate", m.arrival_rate},
                        {"private_fraction", m.private_fraction},
                        {"max_tx_dbm", m.max_tx_dbm}});
    doc["mues"] = std::move(mues);
    return doc;
}

Scenario scenario_from_json(const json& doc) {
    Cursor root(doc, "");
    check_version(root);
    Scenario scenario;
    scenario.geometry = building_from_json(root.at("building"));
    scenario.channel = channel_from_json(root.at("channel"));
    scenario.weights = weights_from_json(root.at("weights"));

    const Cursor sbs = root.at("sbs");
    for (std::size_t i = 0; i < sbs.raw().size(); ++i) {
        Cursor c(sbs.raw()[i], "sbs[" + std::to_string(i) + "]");
        Sbs s;
        s.id = c.at("id").get<int>();
        s.position = point_from_json(c.at("position"));
        s.cpu_speed = c.at("cpu_speed").get<double>();
        s.max_tx_dbm = c.get_or("max_tx_dbm", s.max_tx_dbm);
        s.utilization_cap = c.get_or("utilization_cap", s.utilization_cap);
        scenario.sbs.push_back(s);
    }
    if (root.has("mues")) {
        const Cursor mues = root.at("mues");
        for (std::size_t i = 0; i < mues.raw().size(); ++i) {
            Cursor c(mues.raw()[i], "mues[" + std::to_string(i) + "]");
            Mue m;
            m.id = c.at("id").get<int>();
            m.position = point_from_json(c.at("position"));
            m.home_sbs = c.at("home_sbs").get<int>();
            m.arrival_rate = c.at("arrival_rate").get<double>();
            m.private_fraction = c.get_or("private_fraction", m.private_fraction);
            m.max_tx_dbm = c.get_or("max_tx_dbm", m.max_tx_dbm);
            scenario.mues.push_back(m);
        }
    }
    scenario.build_caches();
    return scenario;
}

json trust_to_json(const TrustNetwork& net) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["nodes"] = net.num_nodes();
    json edges = json::array();
    for (const auto& [key, value] : net.edges())
        edges.push_back({{"from", key.first}, {"to", key.second}, {"trust", value}});
    doc["edges"] = std::move(edges);
    return doc;
}

TrustNetwork trust_from_json(const json& doc) {
    Cursor root(doc, "");
    check_version(root);
    const Cursor edges = root.at("edges");
    int nodes = root.get_or<int>("nodes", 0);
    if (!root.has("nodes")) { // bare adjacency list: infer the node count
        for (std::size_t i = 0; i < edges.raw().size(); ++i) {
            Cursor c(edges.raw()[i], "edges[" + std::to_string(i) + "]");
            nodes = std::max({nodes, c.at("from").get<int>() + 1, c.at("to").get<int>() + 1});
        }
    }
    TrustNetwork net(nodes);
    for (std::size_t i = 0; i < edges.raw().size(); ++i) {
        Cursor c(edges.raw()[i], "edges[" + std::to_string(i) + "]");
        net.add_edge(c.at("from").get<int>(), c.at("to").get<int>(), c.at("trust").get<double>());
    }
    return net;
}

json allocation_to_json(const Allocation& alloc) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["num_sbs"] = alloc.num_sbs();
    json reassoc = json::array();
    for (int b = 0; b < alloc.num_sbs(); ++b)
        for (const Reassociation& r : alloc.reassoc[static_cast<std::size_t>(b)])
            reassoc.push_back(
                {{"buyer", b}, {"mue", r.mue}, {"seller", r.seller}, {"rate", r.rate}});
    doc["reassociations"] = std::move(reassoc);
    json flows = json::array();
    for (int i = 0; i < alloc.num_sbs(); ++i)
        for (int j = 0; j < alloc.num_sbs(); ++j) {
            const double beta = alloc.peer_flows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (beta != 0.0) flows.push_back({{"from", i}, {"to", j}, {"rate", beta}});
        }
    doc["peer_flows"] = std::move(flows);
    doc["cloud_flows"] = alloc.cloud_flows;
    doc["local_workloads"] = alloc.local_workloads;
    return doc;
}

Allocation allocation_from_json(const json& doc) {
    Cursor root(doc, "");
    check_version(root);
    Allocation alloc(root.at("num_sbs").get<int>());
    const Cursor reassoc = root.at("reassociations");
    for (std::size_t i = 0; i < reassoc.raw().size(); ++i) {
        Cursor c(reassoc.raw()[i], "reassociations[" + std::to_string(i) + "]");
        const int buyer = c.at("buyer").get<int>();
        alloc.reassoc[static_cast<std::size_t>(buyer)].push_back(
            {c.at("mue").get<int>(), c.at("seller").get<int>(), c.at("rate").get<double>()});
    }
    const Cursor flows = root.at("peer_flows");
    for (std::size_t i = 0; i < flows.raw().size(); ++i) {
        Cursor c(flows.raw()[i], "peer_flows[" + std::to_string(i) + "]");
        alloc.peer_flows[static_cast<std::size_t>(c.at("from").get<int>())]
                        [static_cast<std::size_t>(c.at("to").get<int>())] =
                            c.at("rate").get<double>();
    }
    alloc.cloud_flows = root.at("cloud_flows").get<std::vector<double>>();
    alloc.local_workloads = root.at("local_workloads").get<std::vector<double>>();
    if (alloc.cloud_flows.size() != static_cast<std::size_t>(alloc.num_sbs()) ||
        alloc.local_workloads.size() != static_cast<std::size_t>(alloc.num_sbs()))
        throw std::runtime_error("allocation vectors disagree with num_sbs");
    return alloc;
}

json cost_report_to_json(const CostReport& report) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    json rows = json::array();
    for (const SbsCost& row : report.rows)
        rows.push_back({{"sbs_id", row.sbs},
                        {"association", row.association},
                        {"peer_tx", row.peer_tx},
                        {"compute", row.compute},
                        {"cloud_tx", row.cloud_tx},
                        {"cloud_fee", row.cloud_fee},
                        {"risk", row.risk},
                        {"operational", row.operational},
                        {"utility", row.utility}});
    doc["rows"] = std::move(rows);
    doc["total_utility"] = report.total_utility;
    return doc;
}

json settlement_to_json(const Settlement& settlement) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    json coalitions = json::array();
    for (const CoalitionSettlement& c : settlement.coalitions)
        coalitions.push_back({{"members", c.members},
                              {"collected", c.collected},
                              {"distributed", c.distributed}});
    doc["coalitions"] = std::move(coalitions);
    doc["total_collected"] = settlement.total_collected;
    doc["total_distributed"] = settlement.total_distributed;
    return doc;
}

json config_to_json(const SimConfig& config) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["seed"] = config.seed;
    json gen;
    gen["building"] = building_to_json(config.generation.geometry);
    gen["channel"] = channel_to_json(config.generation.channel);
    gen["weights"] = weights_to_json(config.generation.weights);
    gen["sbs_intensity"] = config.generation.sbs_intensity;
    gen["mue_intensity"] = config.generation.mue_intensity;
    if (config.generation.sbs_count) gen["sbs_count"] = *config.generation.sbs_count;
    if (config.generation.mue_count) gen["mue_count"] = *config.generation.mue_count;
    gen["cpu_speed_min"] = config.generation.cpu_speed_min;
    gen["cpu_speed_max"] = config.generation.cpu_speed_max;
    gen["sbs_max_tx_dbm"] = config.generation.sbs_max_tx_dbm;
    gen["mue_max_tx_dbm"] = config.generation.mue_max_tx_dbm;
    gen["sbs_mount_height_m"] = config.generation.sbs_mount_height_m;
    gen["mue_height_m"] = config.generation.mue_height_m;
    gen["arrival_rate"] = config.generation.arrival_rate;
    gen["private_fraction"] = config.generation.private_fraction;
    gen["utilization_cap"] = config.generation.utilization_cap;
    doc["generation"] = std::move(gen);
    doc["trust"] = {{"edge_prob", config.trust.edge_prob},
                    {"trust_min", config.trust.trust_min},
                    {"trust_max", config.trust.trust_max},
                    {"path_policy", config.path_policy == TrustPathPolicy::hop_count
                                        ? "hop_count"
                                        : "max_product"}};
    doc["policy"] = {{"exhaustive_threshold", config.policy.exhaustive_threshold},
                     {"mue_association", config.policy.mue_association}};
    doc["payments"] = {{"epsilon", config.payments.epsilon},
                       {"weighting", config.payments.weighting == PsiWeighting::standalone
                                         ? "standalone"
                                         : "realized"}};
    doc["formation"] = {{"split_enumeration_cap", config.formation.split_enumeration_cap},
                        {"c_mode_cap", config.formation.c_mode_cap},
                        {"max_operations", config.formation.max_operations},
                        {"pareto_tol", config.formation.pareto_tol}};
    doc["centralized_cap"] = config.centralized_cap;
    return doc;
}

SimConfig config_from_json(const json& doc) {
    Cursor root(doc, "");
    check_version(root);
    SimConfig config;
    config.seed = root.get_or<std::uint64_t>("seed", config.seed);
    if (root.has("generation")) {
        const Cursor gen = root.at("generation");
        if (gen.has("building")) config.generation.geometry = building_from_json(gen.at("building"));
        if (gen.has("channel")) config.generation.channel = channel_from_json(gen.at("channel"));
        if (gen.has("weights")) config.generation.weights = weights_from_json(gen.at("weights"));
        config.generation.sbs_intensity = gen.get_or("sbs_intensity", config.generation.sbs_intensity);
        config.generation.mue_intensity = gen.get_or("mue_intensity", config.generation.mue_intensity);
        if (gen.has("sbs_count")) config.generation.sbs_count = gen.at("sbs_count").get<int>();
        if (gen.has("mue_count")) config.generation.mue_count = gen.at("mue_count").get<int>();
        config.generation.cpu_speed_min = gen.get_or("cpu_speed_min", config.generation.cpu_speed_min);
        config.generation.cpu_speed_max = gen.get_or("cpu_speed_max", config.generation.cpu_speed_max);
        config.generation.sbs_max_tx_dbm = gen.get_or("sbs_max_tx_dbm", config.generation.sbs_max_tx_dbm);
        config.generation.mue_max_tx_dbm = gen.get_or("mue_max_tx_dbm", config.generation.mue_max_tx_dbm);
        config.generation.sbs_mount_height_m =
            gen.get_or("sbs_mount_height_m", config.generation.sbs_mount_height_m);
        config.generation.mue_height_m = gen.get_or("mue_height_m", config.generation.mue_height_m);
        config.generation.arrival_rate = gen.get_or("arrival_rate", config.generation.arrival_rate);
        config.generation.private_fraction =
            gen.get_or("private_fraction", config.generation.private_fraction);
        config.generation.utilization_cap =
            gen.get_or("utilization_cap", config.generation.utilization_cap);
    }
    if (root.has("trust")) {
        const Cursor trust = root.at("trust");
        config.trust.edge_prob = trust.get_or("edge_prob", config.trust.edge_prob);
        config.trust.trust_min = trust.get_or("trust_min", config.trust.trust_min);
        config.trust.trust_max = trust.get_or("trust_max", config.trust.trust_max);
        const std::string policy = trust.get_or<std::string>("path_policy", "hop_count");
        if (policy == "hop_count")
            config.path_policy = TrustPathPolicy::hop_count;
        else if (policy == "max_product")
            config.path_policy = TrustPathPolicy::max_product;
        else
            throw std::runtime_error("bad value at trust.path_policy (want hop_count|max_product)");
    }
    if (root.has("policy")) {
        const Cursor policy = root.at("policy");
        config.policy.exhaustive_threshold =
            policy.get_or("exhaustive_threshold", config.policy.exhaustive_threshold);
        config.policy.mue_association = policy.get_or("mue_association", config.policy.mue_association);
    }
    if (root.has("payments")) {
        const Cursor payments = root.at("payments");
        config.payments.epsilon = payments.get_or("epsilon", config.payments.epsilon);
        if (config.payments.epsilon <= 0.0)
            throw std::runtime_error("bad value at payments.epsilon (must be > 0)");
        const std::string weighting = payments.get_or<std::string>("weighting", "standalone");
        if (weighting == "standalone")
            config.payments.weighting = PsiWeighting::standalone;
        else if (weighting == "realized")
            config.payments.weighting = PsiWeighting::realized;
        else
            throw std::runtime_error("bad value at payments.weighting (want standalone|realized)");
    }
    if (root.has("formation")) {
        const Cursor formation = root.at("formation");
        config.formation.split_enumeration_cap =
            formation.get_or("split_enumeration_cap", config.formation.split_enumeration_cap);
        config.formation.c_mode_cap = formation.get_or("c_mode_cap", config.formation.c_mode_cap);
        config.formation.max_operations =
            formation.get_or("max_operations", config.formation.max_operations);
        config.formation.pareto_tol = formation.get_or("pareto_tol", config.formation.pareto_tol);
    }
    config.formation.payments = config.payments;
    config.centralized_cap = root.get_or("centralized_cap", config.centralized_cap);
    return config;
}

void save_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << '\n';
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return doc;
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(load_json(path)); }
TrustNetwork load_trust(const std::string& path) { return trust_from_json(load_json(path)); }
SimConfig load_config(const std::string& path) { return config_from_json(load_json(path)); }

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_cost_csv_header(std::ostream& out) {
    out << "scheme,sbs_id,role,association,peer_tx,compute,cloud_tx,cloud_fee,risk,operational,"
           "utility\n";
}

void write_cost_csv_rows(std::ostream& out, const std::string& scheme, const CostReport& report,
                         const Scenario& scenario) {
    for (const SbsCost& row : report.rows)
        out << scheme << ',' << row.sbs << ',' << (scenario.is_seller(row.sbs) ? "seller" : "buyer")
            << ',' << format_double(row.association) << ',' << format_double(row.peer_tx) << ','
            << format_double(row.compute) << ',' << format_double(row.cloud_tx) << ','
            << format_double(row.cloud_fee) << ',' << format_double(row.risk) << ','
            << format_double(row.operational) << ',' << format_double(row.utility) << '\n';
}

void write_ledger_csv(std::ostream& out, const Partition& partition) {
    out << "sbs_id,coalition_id,u,phi,g\n";
    for (std::size_t c = 0; c < partition.coalitions.size(); ++c)
        for (const PaymentEntry& e : partition.coalitions[c].ledger.entries)
            out << e.sbs << ',' << c << ',' << format_double(e.utility) << ','
                << format_double(e.phi) << ',' << format_double(e.payment) << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
    out << "iteration,op,coalitions_before,coalitions_after,system_utility\n";
    for (const TraceEntry& t : trace)
        out << t.step << ',' << t.op << ',' << '"' << t.before << '"' << ',' << '"' << t.after
            << '"' << ',' << format_double(t.system_utility) << '\n';
}

} // namespace edgesim
