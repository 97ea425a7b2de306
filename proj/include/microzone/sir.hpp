#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "microzone/channel.hpp"
#include "microzone/geometry.hpp"

namespace microzone {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

struct RadioConfig
{
    double chip_rate = 3.8e6;   // w, chips/s
    double bit_rate = 45.0e3;   // R, bits/s
    double noise_power = 0.0;   // eta, watts, identical at every antenna
    double tx_power = 1.0;      // watts, every user
};

enum class CombinerMode
{
    paper,          // self-normalized sqrt-SIR weighted average
    classical_mrc,  // sum of branch SIRs
};

inline double processing_gain(double chip_rate, double bit_rate)
{
    if (!(bit_rate > 0.0))
        throw std::invalid_argument("bit rate must be positive");
    if (!(chip_rate >= bit_rate))
        throw std::invalid_argument("chip rate must not be below the bit rate");
    return chip_rate / bit_rate;
}

// desired * P_G / (sum(interferers) + eta). A zero denominator gives +inf for
// a positive desired power and 0 otherwise.
inline double uplink_sir(double desired, std::span<double const> interferers,
                         double noise, double pg)
{
    double const denom
        = std::accumulate(interferers.begin(), interferers.end(), 0.0) + noise;
    if (desired <= 0.0)
        return 0.0;
    if (denom <= 0.0)
        return infinity;
    return desired * pg / denom;
}

/*!
 * Branch weights sqrt(gamma_l) / sum_m sqrt(gamma_m).
 *
 * Infinite branches share the whole weight equally. Throws when every branch
 * is zero, since the weights are then undefined.
 */
inline std::vector<double> mrc_weights(std::span<double const> sir)
{
    if (sir.empty())
        throw std::invalid_argument("combiner needs at least one branch");
    for (double g : sir)
    {
        if (!(g >= 0.0))
            throw std::invalid_argument("branch SIR must be nonnegative");
    }
    std::vector<double> w(sir.size(), 0.0);
    auto const n_inf = std::count_if(sir.begin(), sir.end(),
                                     [](double g) { return std::isinf(g); });
    if (n_inf > 0)
    {
        for (std::size_t l = 0; l < sir.size(); ++l)
            w[l] = std::isinf(sir[l]) ? 1.0 / static_cast<double>(n_inf) : 0.0;
        return w;
    }
    double total = 0.0;
    for (std::size_t l = 0; l < sir.size(); ++l)
    {
        w[l] = std::sqrt(sir[l]);
        total += w[l];
    }
    if (total <= 0.0)
        throw std::domain_error("no received signal on any antenna");
    for (auto& x : w)
        x /= total;
    return w;
}

inline double diversity_combine(std::span<double const> sir,
                                CombinerMode mode = CombinerMode::paper)
{
    if (sir.empty())
        throw std::invalid_argument("combiner needs at least one branch");
    if (mode == CombinerMode::classical_mrc)
        return std::accumulate(sir.begin(), sir.end(), 0.0);
    if (sir.size() == 1)
        return sir[0];
    if (std::any_of(sir.begin(), sir.end(), [](double g) { return std::isinf(g); }))
        return infinity;
    if (std::all_of(sir.begin(), sir.end(), [](double g) { return g == 0.0; }))
        return 0.0;
    auto const w = mrc_weights(sir);
    double out = 0.0;
    for (std::size_t l = 0; l < sir.size(); ++l)
        out += w[l] * sir[l];
    return out;
}

struct SirSample
{
    std::vector<double> per_antenna;
    double combined = 0.0;
    std::optional<std::size_t> serving;  // empty: all antennas (microzone)
    std::uint64_t drop_index = 0;
};

/*!
 * Uplink SIR of every measured user in one drop.
 *
 * Users [0, n_measured) belong to the cell under study; any further columns of
 * the link matrix are co-channel users of surrounding cells and only add
 * interference. Sectored users are measured at their serving sector alone;
 * microzone users at every antenna, then combined.
 */
inline std::vector<SirSample> drop_sirs(Layout const& layout,
                                        std::vector<Position> const& users,
                                        std::size_t n_measured,
                                        LinkGainMatrix const& links,
                                        RadioConfig const& radio,
                                        CombinerMode mode,
                                        bool use_mean_gains = false)
{
    double const pg = processing_gain(radio.chip_rate, radio.bit_rate);
    std::size_t const n = links.users;
    auto const g = [&](std::size_t l, std::size_t j) {
        return use_mean_gains ? links.mean_gain(l, j) : links.gain(l, j);
    };

    // Total received power per antenna; each user's interference is the total
    // minus its own contribution.
    std::vector<double> total(links.antennas, 0.0);
    for (std::size_t l = 0; l < links.antennas; ++l)
    {
        for (std::size_t j = 0; j < n; ++j)
            total[l] += g(l, j) * radio.tx_power;
    }

    auto const branch = [&](std::size_t l, std::size_t i) {
        double const desired = g(l, i) * radio.tx_power;
        double const one[] = {std::max(total[l] - desired, 0.0)};
        return uplink_sir(desired, one, radio.noise_power, pg);
    };

    std::vector<SirSample> out(n_measured);
    for (std::size_t i = 0; i < n_measured; ++i)
    {
        auto& s = out[i];
        s.drop_index = links.drop_index;
        if (layout.architecture == Architecture::used)
        {
            std::size_t const b = serving_antenna(layout, users[i]);
            s.serving = b;
            s.per_antenna = {branch(b, i)};
            s.combined = s.per_antenna.front();
        }
        else
        {
            s.per_antenna.resize(links.antennas);
            for (std::size_t l = 0; l < links.antennas; ++l)
                s.per_antenna[l] = branch(l, i);
            s.combined = diversity_combine(s.per_antenna, mode);
        }
    }
    return out;
}

}  // namespace microzone
