#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "microzone/channel.hpp"
#include "microzone/config.hpp"
#include "microzone/geometry.hpp"
#include "microzone/rng.hpp"
#include "microzone/sir.hpp"

namespace microzone {

//---------------------------------------------------------------------------//
// Closed forms
//---------------------------------------------------------------------------//

// Independent exponentials: the desired variable has rate `y1`, interferers
// have rates `ys`, and `c` is a nonnegative offset.
struct ExponentialMixSpec
{
    double y1 = 1.0;
    std::vector<double> ys;
    double c = 0.0;
};

/*!
 * P(z1 <= z2 + ... + zn + c) for independent exponentials z_i of rate Y_i.
 *
 * Equals 1 - exp(-Y1 c) prod_i Y_i / (Y1 + Y_i). Evaluated in log space so
 * that long interferer lists do not overflow the bracketed product.
 */
inline double lemma1_prob(ExponentialMixSpec const& spec)
{
    if (!(spec.y1 > 0.0))
        throw std::invalid_argument("desired rate must be positive");
    if (!(spec.c >= 0.0))
        throw std::invalid_argument("offset c must be nonnegative");
    double log_survive = -spec.y1 * spec.c;
    for (double y : spec.ys)
    {
        if (!(y > 0.0))
            throw std::invalid_argument("interferer rates must be positive");
        log_survive -= std::log1p(spec.y1 / y);
    }
    return -std::expm1(log_survive);
}

/*!
 * Outage of a sectored-cell user under Rayleigh fading, given the mean
 * received powers (gain times power, averaged over fading).
 *
 * Zero-mean interferers contribute nothing and are skipped.
 */
inline double analytic_outage_used(double mean_desired,
                                   std::span<double const> mean_interferers,
                                   double noise, double pg, double threshold)
{
    if (!(mean_desired > 0.0))
        throw std::invalid_argument("mean desired power must be positive");
    if (!(pg > 0.0))
        throw std::invalid_argument("processing gain must be positive");
    if (!(threshold >= 0.0))
        throw std::invalid_argument("threshold must be nonnegative");
    double const k = threshold / (pg * mean_desired);
    double log_survive = -noise * k;
    for (double m : mean_interferers)
    {
        if (m > 0.0)
            log_survive -= std::log1p(k * m);
    }
    return -std::expm1(log_survive);
}

//---------------------------------------------------------------------------//
// Monte Carlo
//---------------------------------------------------------------------------//

struct OutageCurve
{
    Architecture architecture = Architecture::used;
    std::vector<double> thresholds_db;
    std::vector<double> estimates;
    std::vector<double> ci_half_widths;
    std::vector<std::uint64_t> outage_counts;
    std::uint64_t samples = 0;  // (drop, user) pairs behind each estimate
    std::size_t n_drops = 0;
    std::uint64_t seed = 0;
    // Fading-averaged closed-form outage over the same drops; sectored only.
    std::optional<std::vector<double>> analytic;
};

// 95% normal-approximation half width, treating drops as independent units.
inline double ci_half_width(double p, std::size_t n_drops)
{
    return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n_drops));
}

namespace detail {

inline void check_thresholds(std::span<double const> thresholds_db)
{
    if (thresholds_db.empty())
        throw std::invalid_argument("threshold list is empty");
    if (!std::is_sorted(thresholds_db.begin(), thresholds_db.end()))
        throw std::invalid_argument("thresholds must be sorted ascending");
}

// Runs body(drop) for every drop, split into contiguous chunks per worker.
template<class Body>
void for_each_drop(std::size_t n_drops, std::size_t workers, Body&& body)
{
    workers = std::clamp<std::size_t>(workers, 1, n_drops);
    if (workers == 1)
    {
        for (std::size_t d = 0; d < n_drops; ++d)
            body(0, d);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    std::size_t const chunk = (n_drops + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back([&, w] {
            try
            {
                std::size_t const end = std::min(n_drops, (w + 1) * chunk);
                for (std::size_t d = w * chunk; d < end; ++d)
                    body(w, d);
            }
            catch (...)
            {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto const& e : errors)
    {
        if (e)
            std::rethrow_exception(e);
    }
}

inline OutageCurve finish_curve(Architecture arch, std::vector<double> thresholds_db,
                                std::vector<std::uint64_t> counts,
                                std::uint64_t samples, std::size_t n_drops,
                                std::uint64_t seed)
{
    OutageCurve c;
    c.architecture = arch;
    c.thresholds_db = std::move(thresholds_db);
    c.outage_counts = std::move(counts);
    c.samples = samples;
    c.n_drops = n_drops;
    c.seed = seed;
    for (auto k : c.outage_counts)
    {
        double const p = samples ? static_cast<double>(k) / static_cast<double>(samples)
                                 : 0.0;
        c.estimates.push_back(p);
        c.ci_half_widths.push_back(ci_half_width(p, n_drops));
    }
    return c;
}

}  // namespace detail

// Stream salt per architecture; paired runs share salt 0.
inline std::uint64_t stream_salt(Architecture arch, bool paired)
{
    if (paired)
        return 0;
    return arch == Architecture::used ? 1 : 2;
}

/*!
 * Everything drawn for one drop: user positions (measured cell first, then
 * each interfering cell in ring order) and the link gains to the layout's
 * antennas.
 */
struct Drop
{
    std::vector<Position> users;
    LinkGainMatrix links;
};

inline Drop draw_drop(Layout const& layout, ScenarioConfig const& cfg,
                      DropStreams const& streams)
{
    Drop d;
    auto rng = streams.positions();
    d.users = place_users(layout, cfg.n_users, rng);
    for (auto const& center :
         interferer_cell_centers(layout.cell_center, layout.cell_radius, cfg.interferer_tiers))
    {
        for (std::size_t i = 0; i < cfg.n_users; ++i)
            d.users.push_back(sample_in_hexagon(center, layout.cell_radius, rng));
    }
    d.links = draw_link_matrix(layout, d.users, channel_params(cfg), streams);
    return d;
}

/*!
 * Monte Carlo outage of one architecture over `n_drops` drops.
 *
 * Each drop's randomness comes from (seed, drop index) alone and every
 * threshold is tested against the same SIR samples, so the curve is exactly
 * non-decreasing and independent of `workers`. For sectored layouts the
 * fading-averaged closed form is accumulated over the same drops.
 */
inline OutageCurve mc_outage(Layout const& layout, ScenarioConfig const& cfg,
                             std::span<double const> thresholds_db,
                             std::size_t n_drops, std::uint64_t seed,
                             std::size_t workers = 1)
{
    detail::check_thresholds(thresholds_db);
    if (n_drops < 1)
        throw std::invalid_argument("n_drops must be at least 1");

    std::size_t const n_thr = thresholds_db.size();
    std::vector<double> thr_lin;
    for (double t : thresholds_db)
        thr_lin.push_back(from_db(t));

    RadioConfig const radio = radio_config(cfg);
    double const pg = processing_gain(radio.chip_rate, radio.bit_rate);
    bool const sectored = layout.architecture == Architecture::used;
    std::uint64_t const salt = stream_salt(layout.architecture, cfg.paired);

    workers = std::clamp<std::size_t>(workers, 1, n_drops);
    std::vector<std::vector<std::uint64_t>> counts(workers,
                                                   std::vector<std::uint64_t>(n_thr, 0));
    // Per-drop analytic sums, reduced in drop order afterwards.
    std::vector<double> analytic_by_drop(sectored ? n_drops * n_thr : 0, 0.0);

    detail::for_each_drop(n_drops, workers, [&](std::size_t w, std::size_t drop) {
        DropStreams const streams{seed, drop, salt};
        Drop const d = draw_drop(layout, cfg, streams);
        auto const sirs = drop_sirs(layout, d.users, cfg.n_users, d.links, radio,
                                    cfg.combiner);
        for (auto const& s : sirs)
        {
            for (std::size_t t = 0; t < n_thr; ++t)
            {
                if (s.combined <= thr_lin[t])
                    ++counts[w][t];
            }
        }
        if (!sectored)
            return;

        std::vector<double> interferers;
        for (std::size_t i = 0; i < cfg.n_users; ++i)
        {
            std::size_t const b = *sirs[i].serving;
            double const desired = d.links.mean_gain(b, i) * radio.tx_power;
            interferers.clear();
            for (std::size_t j = 0; j < d.links.users; ++j)
            {
                if (j != i)
                    interferers.push_back(d.links.mean_gain(b, j) * radio.tx_power);
            }
            for (std::size_t t = 0; t < n_thr; ++t)
            {
                analytic_by_drop[drop * n_thr + t]
                    += desired > 0.0 ? analytic_outage_used(desired, interferers,
                                                            radio.noise_power, pg,
                                                            thr_lin[t])
                                     : 1.0;
            }
        }
    });

    std::vector<std::uint64_t> total(n_thr, 0);
    for (auto const& c : counts)
    {
        for (std::size_t t = 0; t < n_thr; ++t)
            total[t] += c[t];
    }
    std::uint64_t const samples = static_cast<std::uint64_t>(n_drops) * cfg.n_users;
    auto curve = detail::finish_curve(layout.architecture,
                                      {thresholds_db.begin(), thresholds_db.end()},
                                      std::move(total), samples, n_drops, seed);
    if (sectored)
    {
        std::vector<double> analytic(n_thr, 0.0);
        for (std::size_t drop = 0; drop < n_drops; ++drop)
        {
            for (std::size_t t = 0; t < n_thr; ++t)
                analytic[t] += analytic_by_drop[drop * n_thr + t];
        }
        for (auto& a : analytic)
            a = samples ? a / static_cast<double>(samples) : 0.0;
        curve.analytic = std::move(analytic);
    }
    return curve;
}

// Fixed mean received powers for the geometry-free check of the closed form.
struct MatchedMeans
{
    double mean_desired = 1.0;
    std::vector<double> mean_interferers;
    double noise = 0.0;
    double pg = 1.0;
};

/*!
 * Monte Carlo outage with every received power an independent exponential of
 * the given mean, one SIR sample per drop. The closed form of
 * analytic_outage_used is exact for this model.
 */
inline OutageCurve mc_outage_matched(MatchedMeans const& m,
                                     std::span<double const> thresholds_db,
                                     std::size_t n_drops, std::uint64_t seed)
{
    detail::check_thresholds(thresholds_db);
    if (n_drops < 1)
        throw std::invalid_argument("n_drops must be at least 1");
    std::vector<double> thr_lin;
    for (double t : thresholds_db)
        thr_lin.push_back(from_db(t));

    std::vector<std::uint64_t> counts(thresholds_db.size(), 0);
    for (std::size_t drop = 0; drop < n_drops; ++drop)
    {
        StreamRng rng{derive_seed({seed, drop, stream::matched})};
        double const desired = m.mean_desired * draw_fading_power(rng);
        double interference = 0.0;
        for (double mean : m.mean_interferers)
            interference += mean * draw_fading_power(rng);
        double const one[] = {interference};
        double const sir = uplink_sir(desired, one, m.noise, m.pg);
        for (std::size_t t = 0; t < thr_lin.size(); ++t)
        {
            if (sir <= thr_lin[t])
                ++counts[t];
        }
    }
    auto curve = detail::finish_curve(Architecture::used,
                                      {thresholds_db.begin(), thresholds_db.end()},
                                      std::move(counts), n_drops, n_drops, seed);
    std::vector<double> analytic;
    for (double t : thr_lin)
        analytic.push_back(analytic_outage_used(m.mean_desired, m.mean_interferers,
                                                m.noise, m.pg, t));
    curve.analytic = std::move(analytic);
    return curve;
}

//---------------------------------------------------------------------------//
// Comparison
//---------------------------------------------------------------------------//

struct ComparisonRow
{
    double threshold_db = 0.0;
    double used = 0.0;
    double used_ci = 0.0;
    double micro = 0.0;
    double micro_ci = 0.0;
    double difference = 0.0;  // micro - used
    bool flagged = false;     // microzone strictly worse
};

inline std::vector<ComparisonRow> outage_report(OutageCurve const& used,
                                                OutageCurve const& micro)
{
    if (used.thresholds_db != micro.thresholds_db)
        throw std::invalid_argument("outage curves have different thresholds");
    if (used.n_drops != micro.n_drops || used.seed != micro.seed)
        throw std::invalid_argument("outage curves come from different drops");
    std::vector<ComparisonRow> rows;
    for (std::size_t t = 0; t < used.thresholds_db.size(); ++t)
    {
        ComparisonRow r;
        r.threshold_db = used.thresholds_db[t];
        r.used = used.estimates[t];
        r.used_ci = used.ci_half_widths[t];
        r.micro = micro.estimates[t];
        r.micro_ci = micro.ci_half_widths[t];
        r.difference = r.micro - r.used;
        r.flagged = r.micro > r.used;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace microzone
