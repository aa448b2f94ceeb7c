#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgesim/channel.hpp"
#include "edgesim/geometry.hpp"

namespace edgesim {

// Cost-model weights and task/CPU constants. Delays are seconds/task,
// energies joules/task, flows tasks/slot; gamma folds energy into delay
// units and w_c folds the sum into money.
struct WeightProfile {
    double w_c = 0.2;   // money per unit delay+energy cost
    double w_r = 0.2;   // money per trust-weighted offloaded task
    double w_0 = 1.0;   // cloud fee, money per task
    double gamma = 1.0; // delay units per energy unit
    double kappa = 1e-27; // CPU energy constant, J*s^2/cycle^2
    double rho = 1e9;     // mean CPU cycles per task
    double cloud_delay_s = 0.3;  // per task, SBS -> cloud
    double cloud_energy_j = 0.05; // per task, SBS -> cloud

    void validate() const {
        if (w_c < 0 || w_r < 0 || w_0 < 0 || gamma < 0 || kappa < 0 || cloud_delay_s < 0 ||
            cloud_energy_j < 0)
            throw std::invalid_argument("weights must be nonnegative");
        if (rho <= 0) throw std::invalid_argument("rho must be positive");
    }
};

struct Sbs {
    int id = 0;
    Point3 position;
    double cpu_speed = 2e10;      // f_i, cycles/s
    double max_tx_dbm = 20.0;     // p_s
    double utilization_cap = 0.9; // eta in (0,1)
};

struct Mue {
    int id = 0;
    Point3 position;
    int home_sbs = 0;
    double arrival_rate = 5.0;     // lambda^a, tasks/slot
    double private_fraction = 0.0; // tau in [0,1]
    double max_tx_dbm = 10.0;      // p_m
};

// Immutable world state for one run. build_caches() precomputes link metrics,
// coverage sets and per-SBS workload figures; everything downstream reads
// those tables, so a Scenario is safe to share across threads once built.
class Scenario {
public:
    BuildingGeometry geometry;
    ChannelParams channel;
    WeightProfile weights;
    std::vector<Sbs> sbs;
    std::vector<Mue> mues;

    void build_caches();
    void validate() const;

    int num_sbs() const { return static_cast<int>(sbs.size()); }
    int num_mues() const { return static_cast<int>(mues.size()); }

    // Total arrival rate lambda^s_i summed over authorized MUEs.
    double lambda_s(int i) const { return lambda_s_[static_cast<std::size_t>(i)]; }
    // Service rate f_i/rho of the M/M/1 server.
    double service_rate(int i) const {
        return sbs[static_cast<std::size_t>(i)].cpu_speed / weights.rho;
    }
    // Capacity eta * f_i / rho; keeps the queue delay finite.
    double omega_max(int i) const { return omega_max_[static_cast<std::size_t>(i)]; }
    // Surplus (>= 0: seller) or deficit (< 0: buyer).
    double alpha(int i) const { return omega_max(i) - lambda_s(i); }
    bool is_seller(int i) const { return alpha(i) >= 0.0; }

    const LinkMetrics& mue_link(int mue, int sbs_id) const {
        return mue_links_[static_cast<std::size_t>(mue)][static_cast<std::size_t>(sbs_id)];
    }
    const LinkMetrics& sbs_link(int from, int to) const {
        return sbs_links_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
    }
    bool covers(int sbs_id, int mue) const { return mue_link(mue, sbs_id).feasible; }

    const std::vector<int>& authorized_mues(int sbs_id) const {
        return authorized_[static_cast<std::size_t>(sbs_id)];
    }

    // Delay+energy figure d + gamma*e for a link, the unit the stage costs sum.
    double mue_link_cost(int mue, int sbs_id) const {
        const LinkMetrics& lm = mue_link(mue, sbs_id);
        return lm.delay_s + weights.gamma * lm.energy_j;
    }
    double sbs_link_cost(int from, int to) const {
        const LinkMetrics& lm = sbs_link(from, to);
        return lm.delay_s + weights.gamma * lm.energy_j;
    }

private:
    std::vector<std::vector<LinkMetrics>> mue_links_; // [mue][sbs]
    std::vector<std::vector<LinkMetrics>> sbs_links_; // [from][to]
    std::vector<std::vector<int>> authorized_;        // [sbs] -> mue ids
    std::vector<double> lambda_s_;
    std::vector<double> omega_max_;
};

// Scenario generation configuration. Intensities are per m^2 of floor area
// (expected count = intensity * floor_area * num_floors); the fixed-count
// mode bypasses the Poisson draw entirely.
struct GenConfig {
    BuildingGeometry geometry;
    ChannelParams channel;
    WeightProfile weights;
    double sbs_intensity = 0.0;
    double mue_intensity = 0.0;
    std::optional<int> sbs_count; // fixed-count mode
    std::optional<int> mue_count;
    double cpu_speed_min = 1.5e10;
    double cpu_speed_max = 3.0e10;
    double sbs_max_tx_dbm = 20.0;
    double mue_max_tx_dbm = 10.0;
    double sbs_mount_height_m = 2.5; // z offset within the floor
    double mue_height_m = 1.5;
    double arrival_rate = 5.0;
    double private_fraction = 0.2;
    double utilization_cap = 0.9;

    void validate() const;
};

// Draw order (fixed, documented for reproducibility): SBS count (Poisson,
// unless fixed), then per SBS floor, x, y, cpu speed; then MUE count, then
// per MUE floor, x, y. Home SBS assignment is deterministic (nearest,
// tie-break lowest id). Identical seed => bit-identical scenario.
Scenario generate_scenario(const GenConfig& config, std::uint64_t seed);

// Table I parameter set with fixed counts 13 SBSs / 52 MUEs (Fig. 4 family).
GenConfig paper_fig4_config();

} // namespace edgesim
