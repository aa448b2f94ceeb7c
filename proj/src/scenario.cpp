#include "edgesim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edgesim/random.hpp"

namespace edgesim {

void Scenario::validate() const {
    geometry.validate();
    channel.validate();
    weights.validate();
    for (const Sbs& s : sbs) {
        if (!geometry.contains(s.position))
            throw std::invalid_argument("sbs position outside building bounds");
        if (s.cpu_speed <= 0.0) throw std::invalid_argument("sbs cpu speed must be positive");
        if (s.utilization_cap <= 0.0 || s.utilization_cap >= 1.0)
            throw std::invalid_argument("utilization cap must be in (0,1)");
    }
    for (const Mue& m : mues) {
        if (m.private_fraction < 0.0 || m.private_fraction > 1.0)
            throw std::invalid_argument("private fraction must be in [0,1]");
        if (m.arrival_rate < 0.0) throw std::invalid_argument("arrival rate must be nonnegative");
        if (m.home_sbs < 0 || m.home_sbs >= num_sbs())
            throw std::invalid_argument("home sbs id out of range");
    }
}

void Scenario::build_caches() {
    validate();
    const std::size_t n = sbs.size();
    const std::size_t m = mues.size();

    mue_links_.assign(m, std::vector<LinkMetrics>(n));
    for (std::size_t u = 0; u < m; ++u)
        for (std::size_t i = 0; i < n; ++i)
            mue_links_[u][i] = link_metrics(mues[u].position, sbs[i].position,
                                            channel.target_rate_mue, channel, mues[u].max_tx_dbm);

    sbs_links_.assign(n, std::vector<LinkMetrics>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sbs_links_[i][j] = (i == j)
                                   ? LinkMetrics{0.0, 0.0, false}
                                   : link_metrics(sbs[i].position, sbs[j].position,
                                                  channel.target_rate_sbs, channel, sbs[i].max_tx_dbm);

    authorized_.assign(n, {});
    lambda_s_.assign(n, 0.0);
    for (std::size_t u = 0; u < m; ++u) {
        authorized_[static_cast<std::size_t>(mues[u].home_sbs)].push_back(static_cast<int>(u));
        lambda_s_[static_cast<std::size_t>(mues[u].home_sbs)] += mues[u].arrival_rate;
    }

    omega_max_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        omega_max_[i] = sbs[i].utilization_cap * sbs[i].cpu_speed / weights.rho;
}

void GenConfig::validate() const {
    geometry.validate();
    channel.validate();
    weights.validate();
    if (sbs_intensity < 0.0 || mue_intensity < 0.0)
        throw std::invalid_argument("intensities must be nonnegative");
    if (sbs_count && *sbs_count < 0) throw std::invalid_argument("sbs count must be nonnegative");
    if (mue_count && *mue_count < 0) throw std::invalid_argument("mue count must be nonnegative");
    if (cpu_speed_min <= 0.0 || cpu_speed_max < cpu_speed_min)
        throw std::invalid_argument("bad cpu speed range");
    if (utilization_cap <= 0.0 || utilization_cap >= 1.0)
        throw std::invalid_argument("utilization cap must be in (0,1)");
    if (private_fraction < 0.0 || private_fraction > 1.0)
        throw std::invalid_argument("private fraction must be in [0,1]");
}

namespace {

// Nearest in radio terms: minimum path loss (ties keep the lowest id).
// On one floor this is exactly the Euclidean nearest; across floors it
// accounts for the penetration loss, which is what association follows.
int nearest_sbs(const Point3& p, const std::vector<Sbs>& sbs, const ChannelParams& channel) {
    int best = 0;
    double best_pl = std::numeric_limits<double>::infinity();
    for (const Sbs& s : sbs) {
        const double pl = path_loss_db(p, s.position, channel);
        if (pl < best_pl) {
            best_pl = pl;
            best = s.id;
        }
    }
    return best;
}

} // namespace

Scenario generate_scenario(const GenConfig& config, std::uint64_t seed) {
    config.validate();

    Scenario scen;
    scen.geometry = config.geometry;
    scen.channel = config.channel;
    scen.channel.floor_height_m = config.geometry.floor_height_m;
    scen.weights = config.weights;

    Rng rng(seed);
    const int floors = config.geometry.num_floors();
    const double area = config.geometry.floor_area();

    const int n_sbs = config.sbs_count
                          ? *config.sbs_count
                          : rng.poisson(config.sbs_intensity * area * floors);
    if (n_sbs == 0) throw std::runtime_error("empty deployment");

    scen.sbs.reserve(static_cast<std::size_t>(n_sbs));
    for (int i = 0; i < n_sbs; ++i) {
        Sbs s;
        s.id = i;
        const int floor = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(floors)));
        s.position.x = rng.uniform(0.0, config.geometry.width_m);
        s.position.y = rng.uniform(0.0, config.geometry.depth_m);
        s.position.z = floor * config.geometry.floor_height_m + config.sbs_mount_height_m;
        s.cpu_speed = rng.uniform(config.cpu_speed_min, config.cpu_speed_max);
        s.max_tx_dbm = config.sbs_max_tx_dbm;
        s.utilization_cap = config.utilization_cap;
        scen.sbs.push_back(s);
    }

    const int n_mue = config.mue_count
                          ? *config.mue_count
                          : rng.poisson(config.mue_intensity * area * floors);
    scen.mues.reserve(static_cast<std::size_t>(n_mue));
    for (int u = 0; u < n_mue; ++u) {
        Mue m;
        m.id = u;
        const int floor = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(floors)));
        m.position.x = rng.uniform(0.0, config.geometry.width_m);
        m.position.y = rng.uniform(0.0, config.geometry.depth_m);
        m.position.z = floor * config.geometry.floor_height_m + config.mue_height_m;
        m.arrival_rate = config.arrival_rate;
        m.private_fraction = config.private_fraction;
        m.max_tx_dbm = config.mue_max_tx_dbm;
        m.home_sbs = nearest_sbs(m.position, scen.sbs, scen.channel);
        scen.mues.push_back(m);
    }

    scen.build_caches();

    // The cost model cannot evaluate an MUE whose home link is infeasible;
    // such a deployment is rejected so the caller can retry with a new seed.
    for (const Mue& m : scen.mues)
        if (!scen.covers(m.home_sbs, m.id)) throw std::runtime_error("uncovered mue");

    return scen;
}

GenConfig paper_fig4_config() {
    GenConfig config;
    config.sbs_count = 13;
    config.mue_count = 52;
    return config;
}

} // namespace edgesim
