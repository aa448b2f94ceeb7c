#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "edgesim/geometry.hpp"

namespace edgesim {

// Radio parameters of the indoor deployment. Power-like quantities are kept
// in the units they are usually quoted in (dBW for noise, dBm for transmit
// caps) and converted to linear watts exactly once, here.
struct ChannelParams {
    double carrier_freq_mhz = 900.0;
    double path_loss_exponent = 3.3;
    // Floor penetration loss for n = 1, 2, 3 crossed floors; beyond the
    // table it grows by floor_loss_step_db per extra floor.
    std::array<double, 3> floor_loss_db = {9.0, 12.0, 24.0};
    double floor_loss_step_db = 12.0;
    double noise_power_dbw = -126.2;
    double interference_w = 0.0; // linear; 0 = noise-limited
    double bandwidth_hz = 20e6;
    double target_rate_mue = 25e6; // bits/s, MUE -> SBS
    double target_rate_sbs = 50e6; // bits/s, SBS -> SBS
    double floor_height_m = 10.0;  // for the floor count in the path loss

    double floor_loss(int floors) const {
        if (floors <= 0) return 0.0;
        if (floors <= 3) return floor_loss_db[static_cast<std::size_t>(floors - 1)];
        return floor_loss_db[2] + floor_loss_step_db * (floors - 3);
    }

    double noise_w() const { return std::pow(10.0, noise_power_dbw / 10.0); }

    void validate() const {
        if (carrier_freq_mhz <= 0.0) throw std::invalid_argument("carrier frequency must be positive");
        if (bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth must be positive");
        if (target_rate_mue <= 0.0 || target_rate_sbs <= 0.0)
            throw std::invalid_argument("target rates must be positive");
        if (floor_height_m <= 0.0) throw std::invalid_argument("floor height must be positive");
    }
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// ITU indoor path loss, L[dB] = 20 lg f + 10 nu lg d + L_f(n) - 28,
// with f in MHz, d in meters and n the number of floors crossed.
inline double path_loss_db(const Point3& a, const Point3& b, const ChannelParams& params) {
    const double d = distance(a, b);
    if (d <= 0.0) throw std::invalid_argument("degenerate distance");
    const int floor_a = static_cast<int>(std::floor(a.z / params.floor_height_m));
    const int floor_b = static_cast<int>(std::floor(b.z / params.floor_height_m));
    const int floors = std::abs(floor_a - floor_b);
    return 20.0 * std::log10(params.carrier_freq_mhz) +
           10.0 * params.path_loss_exponent * std::log10(d) + params.floor_loss(floors) - 28.0;
}

inline double channel_gain(const Point3& a, const Point3& b, const ChannelParams& params) {
    return std::pow(10.0, -path_loss_db(a, b, params) / 10.0);
}

struct TxPower {
    double watts = 0.0;   // min(required, cap)
    bool feasible = true; // false when the cap binds
};

// Inverts the Shannon rate: p = (2^(r/W) - 1)(sigma^2 + I)/H, capped at the
// transmitter's maximum power. A capped link cannot sustain the target rate.
inline TxPower tx_power_for_rate(double rate_bps, double gain, const ChannelParams& params,
                                 double max_tx_dbm) {
    if (rate_bps <= 0.0) throw std::invalid_argument("target rate must be positive");
    if (gain <= 0.0) throw std::invalid_argument("no link");
    const double required =
        (std::exp2(rate_bps / params.bandwidth_hz) - 1.0) * (params.noise_w() + params.interference_w) / gain;
    const double cap = dbm_to_watts(max_tx_dbm);
    if (required > cap) return {cap, false};
    return {required, true};
}

// Per-task transmission delay and energy at the target rate (unit task size):
// d = 1/r, e = p/r.
struct LinkMetrics {
    double delay_s = 0.0;
    double energy_j = 0.0;
    bool feasible = false;
};

inline LinkMetrics link_metrics(const Point3& tx, const Point3& rx, double rate_bps,
                                const ChannelParams& params, double max_tx_dbm) {
    const double gain = channel_gain(tx, rx, params);
    const TxPower p = tx_power_for_rate(rate_bps, gain, params, max_tx_dbm);
    return {1.0 / rate_bps, p.watts / rate_bps, p.feasible};
}

} // namespace edgesim
