#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "microzone/geometry.hpp"
#include "microzone/rng.hpp"

namespace microzone {

// Propagation parameters shared by every link of a drop.
struct ChannelParams
{
    double wavelength = 0.15;         // meters (2 GHz carrier)
    double tx_gain = 1.0;             // linear, mobile antenna (omnidirectional)
    double path_loss_exponent = 4.0;  // rho
    double shadowing_std_db = 5.0;    // sigma of xi
    double d_min = 1.0;               // meters
};

inline void validate(ChannelParams const& p)
{
    if (!(p.wavelength > 0.0))
        throw std::invalid_argument("wavelength must be positive");
    if (!(p.tx_gain >= 0.0))
        throw std::invalid_argument("transmit antenna gain must be nonnegative");
    if (!(p.path_loss_exponent >= 2.0 && p.path_loss_exponent <= 5.0))
        throw std::invalid_argument("path loss exponent must lie in [2, 5], got "
                                    + std::to_string(p.path_loss_exponent));
    if (!(p.shadowing_std_db >= 0.0 && p.shadowing_std_db <= 12.0))
        throw std::invalid_argument("shadowing std must lie in [0, 12] dB, got "
                                    + std::to_string(p.shadowing_std_db));
    if (!(p.d_min > 0.0))
        throw std::invalid_argument("minimum distance must be positive");
}

// Friis constant g_T g_r lambda^2 / (4 pi)^2.
inline double path_gain_constant(double wavelength, double tx_gain, double rx_gain)
{
    if (!(wavelength > 0.0))
        throw std::invalid_argument("wavelength must be positive");
    if (tx_gain < 0.0 || rx_gain < 0.0)
        throw std::invalid_argument("antenna gains must be nonnegative");
    double const four_pi = 4.0 * pi;
    return tx_gain * rx_gain * wavelength * wavelength / (four_pi * four_pi);
}

// Zero-mean Gaussian in dB. Box-Muller with a single output keeps the number
// of uniforms consumed per call fixed at two.
template<class Rng>
double draw_shadowing(double sigma_db, Rng& rng)
{
    double const u1 = 1.0 - rng.uniform();  // (0, 1]
    double const u2 = rng.uniform();
    double const z = std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    return sigma_db * z;
}

// Unit-mean exponential power (Rayleigh envelope squared).
template<class Rng>
double draw_fading_power(Rng& rng)
{
    return -std::log1p(-rng.uniform());
}

inline double link_gain(double path_constant, double distance, double rho,
                        double shadowing_db, double fading_power)
{
    if (!(distance > 0.0))
        throw std::invalid_argument("link distance must be positive");
    return path_constant * std::pow(distance, -rho)
           * std::pow(10.0, shadowing_db / 10.0) * fading_power;
}

/*!
 * Linear link gains from every user to every antenna for one drop.
 *
 * Stored antenna-major: entry (l, j) is at l * users + j. `mean_gains` holds
 * the same links before the fast-fading factor, i.e. the fading-averaged gain
 * for the drop's positions and shadowing.
 */
struct LinkGainMatrix
{
    std::size_t antennas = 0;
    std::size_t users = 0;
    std::uint64_t drop_index = 0;
    std::vector<double> gains;
    std::vector<double> mean_gains;

    double gain(std::size_t l, std::size_t j) const { return gains[l * users + j]; }
    double mean_gain(std::size_t l, std::size_t j) const
    {
        return mean_gains[l * users + j];
    }
};

// Identifies the randomness of one drop. `salt` separates otherwise identical
// streams (e.g. two architectures run unpaired).
struct DropStreams
{
    std::uint64_t master_seed = 0;
    std::uint64_t drop_index = 0;
    std::uint64_t salt = 0;

    StreamRng positions() const
    {
        return StreamRng{derive_seed({master_seed, drop_index, stream::positions, salt})};
    }
    StreamRng link(std::size_t antenna, std::size_t user) const
    {
        return StreamRng{derive_seed({master_seed, drop_index, stream::link, salt,
                                      antenna, user})};
    }
};

/*!
 * Draw the link gains of one drop.
 *
 * Each link owns a substream keyed by (seed, drop, antenna, user) and consumes
 * the shadowing draw first and the fading draw second, so entries do not
 * depend on evaluation order.
 */
inline LinkGainMatrix draw_link_matrix(Layout const& layout,
                                       std::vector<Position> const& users,
                                       ChannelParams const& params,
                                       DropStreams const& streams)
{
    validate(params);
    LinkGainMatrix m;
    m.antennas = layout.antennas.size();
    m.users = users.size();
    m.drop_index = streams.drop_index;
    m.gains.resize(m.antennas * m.users);
    m.mean_gains.resize(m.antennas * m.users);

    for (auto const& ant : layout.antennas)
    {
        for (std::size_t j = 0; j < users.size(); ++j)
        {
            auto rng = streams.link(ant.id, j);
            double const xi = draw_shadowing(params.shadowing_std_db, rng);
            double const fading = draw_fading_power(rng);
            double const ap = path_gain_constant(params.wavelength, params.tx_gain,
                                                 pattern_gain(ant, users[j]));
            double const d = propagation_distance(ant.position, users[j], params.d_min);
            double const mean = link_gain(ap, d, params.path_loss_exponent, xi, 1.0);
            m.mean_gains[ant.id * m.users + j] = mean;
            m.gains[ant.id * m.users + j] = mean * fading;
        }
    }
    return m;
}

/*!
 * Sum-of-sinusoids Rayleigh fading generator.
 *
 * z(t) = N^{-1/2} sum_n exp(i (2 pi f_d t cos(alpha_n) + phi_n)) with
 * alpha_n = (2 pi n - pi + theta) / N, phases phi_n and rotation theta drawn
 * uniformly. E|z|^2 = 1 for any t; the envelope tends to Rayleigh as N grows.
 */
class SosRayleigh
{
  public:
    static constexpr std::size_t min_oscillators = 8;

    template<class Rng>
    SosRayleigh(std::size_t n_oscillators, double doppler_hz, Rng& rng)
        : doppler_(doppler_hz)
    {
        if (n_oscillators < min_oscillators)
            throw std::invalid_argument("sum-of-sinusoids needs at least "
                                        + std::to_string(min_oscillators)
                                        + " oscillators");
        double const n = static_cast<double>(n_oscillators);
        double const theta = two_pi * rng.uniform() - pi;
        freq_.reserve(n_oscillators);
        phase_.reserve(n_oscillators);
        for (std::size_t k = 1; k <= n_oscillators; ++k)
        {
            double const alpha = (two_pi * static_cast<double>(k) - pi + theta) / n;
            freq_.push_back(std::cos(alpha));
            phase_.push_back(two_pi * rng.uniform());
        }
        scale_ = 1.0 / std::sqrt(n);
    }

    std::complex<double> operator()(double t) const
    {
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t k = 0; k < freq_.size(); ++k)
            sum += std::polar(1.0, two_pi * doppler_ * t * freq_[k] + phase_[k]);
        return scale_ * sum;
    }

    std::size_t oscillators() const { return freq_.size(); }

  private:
    double doppler_;
    double scale_ = 1.0;
    std::vector<double> freq_;
    std::vector<double> phase_;
};

template<class Rng>
std::complex<double> sos_rayleigh_sample(std::size_t n_oscillators, double doppler_hz,
                                         double t, Rng& rng)
{
    return SosRayleigh(n_oscillators, doppler_hz, rng)(t);
}

}  // namespace microzone
