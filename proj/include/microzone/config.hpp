#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "microzone/channel.hpp"
#include "microzone/geometry.hpp"
#include "microzone/sir.hpp"

namespace microzone {

enum class ArchSelection
{
    used,
    microzone,
    both,
};

inline std::vector<double> threshold_sweep(double start_db, double stop_db, double step_db)
{
    if (!(step_db > 0.0))
        throw std::invalid_argument("threshold step must be positive");
    if (!(stop_db >= start_db))
        throw std::invalid_argument("threshold sweep must be ascending");
    std::vector<double> out;
    // Index-based so that accumulated rounding never drops the end point.
    auto const n = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9));
    for (std::size_t k = 0; k <= n; ++k)
        out.push_back(start_db + step_db * static_cast<double>(k));
    return out;
}

// Every knob of one experiment. Defaults reproduce the reference scenario:
// one cell, 40 users, 45 kb/s over 3.8 Mchip/s, rho = 4, sigma = 5 dB and
// 120 degree antennas with 0 dB gain.
struct ScenarioConfig
{
    ArchSelection architectures = ArchSelection::both;
    std::size_t n_users = 40;
    double bit_rate = 45.0e3;
    double chip_rate = 3.8e6;
    std::vector<double> thresholds_db = threshold_sweep(-10.0, 10.0, 1.0);
    double path_loss_exponent = 4.0;
    double shadowing_std_db = 5.0;
    std::optional<double> noise_power;  // watts; empty derives it from the geometry
    double cell_radius = 1000.0;
    int cluster_size = 1;
    double beamwidth_deg = 120.0;
    double tx_power = 1.0;
    double d_min = 1.0;
    std::size_t n_drops = 10000;
    std::uint64_t master_seed = 1;
    CombinerMode combiner = CombinerMode::paper;
    int interferer_tiers = 0;
    bool paired = true;
    double wavelength = 0.15;
    double max_gain_db = 0.0;
    double floor_gain_db = -infinity;

    friend bool operator==(ScenarioConfig const&, ScenarioConfig const&) = default;
};

inline std::size_t antenna_count(ScenarioConfig const& cfg)
{
    if (cfg.beamwidth_deg == 120.0)
        return 3;
    if (cfg.beamwidth_deg == 60.0)
        return 6;
    throw std::invalid_argument("beamwidth must be 120 or 60 degrees");
}

inline void validate(ScenarioConfig const& cfg)
{
    if (cfg.thresholds_db.empty())
        throw std::invalid_argument("threshold sweep is empty");
    for (std::size_t k = 1; k < cfg.thresholds_db.size(); ++k)
    {
        if (!(cfg.thresholds_db[k] >= cfg.thresholds_db[k - 1]))
            throw std::invalid_argument("threshold sweep must be sorted ascending");
    }
    if (cfg.n_drops < 1)
        throw std::invalid_argument("n_drops must be at least 1");
    if (cfg.cluster_size != 1)
        throw std::invalid_argument("only cluster size 1 is supported");
    if (cfg.interferer_tiers < 0 || cfg.interferer_tiers > 2)
        throw std::invalid_argument("interferer_tiers must be 0, 1 or 2");
    if (!(cfg.cell_radius > 0.0))
        throw std::invalid_argument("cell_radius must be positive");
    if (!(cfg.tx_power >= 0.0))
        throw std::invalid_argument("tx_power must be nonnegative");
    if (cfg.noise_power && !(*cfg.noise_power >= 0.0))
        throw std::invalid_argument("noise_power must be nonnegative");
    if (!(cfg.floor_gain_db <= cfg.max_gain_db))
        throw std::invalid_argument("floor_gain must not exceed max_gain");
    antenna_count(cfg);
    processing_gain(cfg.chip_rate, cfg.bit_rate);
    validate(ChannelParams{cfg.wavelength, 1.0, cfg.path_loss_exponent,
                           cfg.shadowing_std_db, cfg.d_min});
}

inline ChannelParams channel_params(ScenarioConfig const& cfg)
{
    return {cfg.wavelength, 1.0, cfg.path_loss_exponent, cfg.shadowing_std_db, cfg.d_min};
}

inline LayoutParams layout_params(ScenarioConfig const& cfg, Architecture arch)
{
    LayoutParams p;
    p.architecture = arch;
    p.antenna_count = antenna_count(cfg);
    p.cell_radius = cfg.cell_radius;
    p.max_gain = from_db(cfg.max_gain_db);
    p.floor_gain = std::isinf(cfg.floor_gain_db) ? 0.0 : from_db(cfg.floor_gain_db);
    return p;
}

// Thermal noise 30 dB below the median power one user at the cell edge
// delivers to an in-beam antenna (no shadowing, unit fading).
inline double default_noise_power(ScenarioConfig const& cfg)
{
    double const ap = path_gain_constant(cfg.wavelength, 1.0, from_db(cfg.max_gain_db));
    return 1e-3 * cfg.tx_power * ap * std::pow(cfg.cell_radius, -cfg.path_loss_exponent);
}

inline RadioConfig radio_config(ScenarioConfig const& cfg)
{
    RadioConfig r;
    r.chip_rate = cfg.chip_rate;
    r.bit_rate = cfg.bit_rate;
    r.tx_power = cfg.tx_power;
    r.noise_power = cfg.noise_power ? *cfg.noise_power : default_noise_power(cfg);
    return r;
}

}  // namespace microzone
