#pragma once

// Small synthetic worlds with hand-controllable link feasibility. The test
// channel uses a steep path loss exponent so coverage radii are room-scale:
// with these parameters an MUE reaches SBSs within ~17.8 m and an SBS
// reaches peers within ~26.3 m on the same floor.

#include <vector>

#include "edgesim/scenario.hpp"
#include "edgesim/trust.hpp"

namespace edgesim::testing {

inline ChannelParams test_channel() {
    ChannelParams c;
    c.carrier_freq_mhz = 900.0;
    c.path_loss_exponent = 6.0;
    c.noise_power_dbw = -126.2;
    c.bandwidth_hz = 1e6;
    c.target_rate_mue = 1e6; // d = 1e-6 s/task on every feasible MUE link
    c.target_rate_sbs = 1e6;
    c.floor_height_m = 10.0;
    return c;
}

inline WeightProfile test_weights() {
    WeightProfile w;
    w.w_c = 0.2;
    w.w_r = 0.2;
    w.w_0 = 1.0;
    w.gamma = 0.0; // energy out of the algebra unless a test opts in
    w.kappa = 0.0;
    w.rho = 1.0;   // cycles/task: cpu_speed is the service rate directly
    w.cloud_delay_s = 0.3;
    w.cloud_energy_j = 0.0;
    return w;
}

class WorldBuilder {
public:
    WorldBuilder() {
        scenario_.geometry = {100.0, 200.0, 50.0, 10.0};
        scenario_.channel = test_channel();
        scenario_.weights = test_weights();
    }

    WeightProfile& weights() { return scenario_.weights; }
    ChannelParams& channel() { return scenario_.channel; }

    // service rate = cpu (rho = 1); omega_max = eta * cpu
    int add_sbs(double x, double y, double cpu, double eta = 0.5, double z = 2.5) {
        Sbs s;
        s.id = static_cast<int>(scenario_.sbs.size());
        s.position = {x, y, z};
        s.cpu_speed = cpu;
        s.utilization_cap = eta;
        scenario_.sbs.push_back(s);
        return s.id;
    }

    int add_mue(double x, double y, int home, double lambda, double tau, double z = 1.5) {
        Mue m;
        m.id = static_cast<int>(scenario_.mues.size());
        m.position = {x, y, z};
        m.home_sbs = home;
        m.arrival_rate = lambda;
        m.private_fraction = tau;
        scenario_.mues.push_back(m);
        return m.id;
    }

    Scenario build() {
        Scenario s = scenario_;
        s.build_caches();
        return s;
    }

private:
    Scenario scenario_;
};

inline TrustMatrix uniform_trust(int n, double value = 1.0) {
    TrustMatrix m(static_cast<std::size_t>(n),
                  std::vector<double>(static_cast<std::size_t>(n), value));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    return m;
}

} // namespace edgesim::testing
