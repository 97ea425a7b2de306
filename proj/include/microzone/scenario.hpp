#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "microzone/config.hpp"
#include "microzone/geometry.hpp"
#include "microzone/outage.hpp"

namespace microzone {

class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string fmt_exact(double v)
{
    if (std::isinf(v))
        return v < 0 ? "-inf" : "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Splits "3.8 Mchip/s" into the number and its unit suffix.
struct Quantity
{
    double value = 0.0;
    std::string unit;
};

inline Quantity parse_quantity(std::string const& text)
{
    char const* begin = text.c_str();
    char* end = nullptr;
    double const v = std::strtod(begin, &end);
    if (end == begin)
        throw std::invalid_argument("expected a number, got '" + text + "'");
    if (std::isnan(v))
        throw std::invalid_argument("NaN is not a valid value");
    return {v, trim(end)};
}

// Value scaled by the multiplier registered for its unit; a bare number takes
// the key's base unit.
inline double scaled(std::string const& text, std::map<std::string, double> const& units)
{
    auto const q = parse_quantity(text);
    if (q.unit.empty())
        return q.value;
    auto const it = units.find(q.unit);
    if (it == units.end())
        throw std::invalid_argument("unsupported unit '" + q.unit + "'");
    return q.value * it->second;
}

inline double plain(std::string const& text, std::string_view allowed_unit = {})
{
    auto const q = parse_quantity(text);
    if (!q.unit.empty() && q.unit != allowed_unit)
        throw std::invalid_argument("unsupported unit '" + q.unit + "'");
    return q.value;
}

inline std::uint64_t parse_unsigned(std::string const& text)
{
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("expected a nonnegative integer, got '" + text + "'");
    return std::stoull(text);
}

inline bool parse_bool(std::string const& text)
{
    if (text == "true" || text == "yes" || text == "1")
        return true;
    if (text == "false" || text == "no" || text == "0")
        return false;
    throw std::invalid_argument("expected true or false, got '" + text + "'");
}

inline double db_to_watts(double db, double ref_watts) { return ref_watts * from_db(db); }

inline double parse_power(std::string const& text)
{
    auto const q = parse_quantity(text);
    if (q.unit.empty() || q.unit == "W")
        return q.value;
    if (q.unit == "mW")
        return q.value * 1e-3;
    if (q.unit == "dBW")
        return db_to_watts(q.value, 1.0);
    if (q.unit == "dBm")
        return db_to_watts(q.value, 1e-3);
    throw std::invalid_argument("unsupported unit '" + q.unit + "'");
}

}  // namespace detail

/*!
 * Parse a threshold sweep: either "START:STOP:STEP" or a comma-separated list,
 * in dB, optionally followed by "dB".
 */
inline std::vector<double> parse_thresholds(std::string text)
{
    text = detail::trim(text);
    if (text.size() >= 2 && text.compare(text.size() - 2, 2, "dB") == 0)
        text = detail::trim(text.substr(0, text.size() - 2));
    std::vector<double> out;
    if (text.find(':') != std::string::npos)
    {
        std::vector<double> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':'))
            parts.push_back(detail::plain(detail::trim(item)));
        if (parts.size() != 3)
            throw std::invalid_argument("threshold range must be START:STOP:STEP");
        return threshold_sweep(parts[0], parts[1], parts[2]);
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(detail::plain(detail::trim(item)));
    if (out.empty())
        throw std::invalid_argument("threshold list is empty");
    return out;
}

inline ArchSelection parse_arch(std::string const& text)
{
    if (text == "used")
        return ArchSelection::used;
    if (text == "microzone")
        return ArchSelection::microzone;
    if (text == "both")
        return ArchSelection::both;
    throw std::invalid_argument("architecture must be used, microzone or both");
}

inline std::string to_string(ArchSelection a)
{
    switch (a)
    {
        case ArchSelection::used: return "used";
        case ArchSelection::microzone: return "microzone";
        case ArchSelection::both: return "both";
    }
    return "both";
}

inline CombinerMode parse_combiner(std::string const& text)
{
    if (text == "paper")
        return CombinerMode::paper;
    if (text == "classical-mrc")
        return CombinerMode::classical_mrc;
    throw std::invalid_argument("combiner must be paper or classical-mrc");
}

inline std::string to_string(CombinerMode m)
{
    return m == CombinerMode::paper ? "paper" : "classical-mrc";
}

namespace detail {

inline void apply_key(ScenarioConfig& cfg, std::string const& key, std::string const& value)
{
    static std::map<std::string, double> const rate_units{
        {"b/s", 1.0}, {"bps", 1.0}, {"kb/s", 1e3}, {"kbps", 1e3},
        {"Mb/s", 1e6}, {"Mbps", 1e6}};
    static std::map<std::string, double> const chip_units{
        {"chip/s", 1.0}, {"kchip/s", 1e3}, {"Mchip/s", 1e6},
        {"Hz", 1.0},     {"kHz", 1e3},     {"MHz", 1e6}};
    static std::map<std::string, double> const freq_units{
        {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    static std::map<std::string, double> const length_units{{"m", 1.0}, {"km", 1e3}};

    if (key == "architecture")
        cfg.architectures = parse_arch(value);
    else if (key == "n_users")
        cfg.n_users = parse_unsigned(value);
    else if (key == "bit_rate")
        cfg.bit_rate = scaled(value, rate_units);
    else if (key == "chip_rate")
        cfg.chip_rate = scaled(value, chip_units);
    else if (key == "thresholds")
        cfg.thresholds_db = parse_thresholds(value);
    else if (key == "rho")
        cfg.path_loss_exponent = plain(value);
    else if (key == "shadowing_sigma")
        cfg.shadowing_std_db = plain(value, "dB");
    else if (key == "noise_power")
        cfg.noise_power = value == "auto" ? std::nullopt
                                          : std::optional<double>(parse_power(value));
    else if (key == "cell_radius")
        cfg.cell_radius = scaled(value, length_units);
    else if (key == "cluster_size")
        cfg.cluster_size = static_cast<int>(parse_unsigned(value));
    else if (key == "beamwidth")
        cfg.beamwidth_deg = plain(value, "deg");
    else if (key == "tx_power")
        cfg.tx_power = parse_power(value);
    else if (key == "d_min")
        cfg.d_min = scaled(value, length_units);
    else if (key == "n_drops")
        cfg.n_drops = parse_unsigned(value);
    else if (key == "master_seed")
        cfg.master_seed = parse_unsigned(value);
    else if (key == "combiner")
        cfg.combiner = parse_combiner(value);
    else if (key == "interferer_tiers")
        cfg.interferer_tiers = static_cast<int>(parse_unsigned(value));
    else if (key == "paired")
        cfg.paired = parse_bool(value);
    else if (key == "wavelength")
        cfg.wavelength = scaled(value, length_units);
    else if (key == "carrier_frequency")
        cfg.wavelength = 299792458.0 / scaled(value, freq_units);
    else if (key == "max_gain")
        cfg.max_gain_db = plain(value, "dB");
    else if (key == "floor_gain")
        cfg.floor_gain_db = plain(value, "dB");
    else
        throw ConfigError("unknown key");
}

}  // namespace detail

/*!
 * Parse the flat `key = value` configuration grammar.
 *
 * One key per line, '#' starts a comment, values may carry a unit suffix.
 * Keys that are absent keep their defaults. Unknown or repeated keys, bad
 * values and violated invariants are reported with the offending line.
 */
inline ScenarioConfig parse_config(std::istream& in)
{
    ScenarioConfig cfg;
    std::set<std::string> seen;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw))
    {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        line = detail::trim(line);
        if (line.empty())
            continue;
        auto const where = "line " + std::to_string(line_no);
        auto const eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        auto const key = detail::trim(line.substr(0, eq));
        auto const value = detail::trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError(where + ": key '" + key + "' given twice");
        try
        {
            detail::apply_key(cfg, key, value);
        }
        catch (std::exception const& e)
        {
            throw ConfigError(where + ": key '" + key + "': " + e.what());
        }
    }
    try
    {
        validate(cfg);
    }
    catch (std::exception const& e)
    {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
}

inline ScenarioConfig parse_config(std::string const& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

// Writes every key with full precision; parse_config reads it back exactly.
inline std::string serialize_config(ScenarioConfig const& cfg)
{
    using detail::fmt_exact;
    std::ostringstream os;
    std::string thresholds;
    for (std::size_t k = 0; k < cfg.thresholds_db.size(); ++k)
        thresholds += (k ? ", " : "") + fmt_exact(cfg.thresholds_db[k]);
    os << "architecture = " << to_string(cfg.architectures) << '\n'
       << "n_users = " << cfg.n_users << '\n'
       << "bit_rate = " << fmt_exact(cfg.bit_rate) << " b/s\n"
       << "chip_rate = " << fmt_exact(cfg.chip_rate) << " chip/s\n"
       << "thresholds = " << thresholds << " dB\n"
       << "rho = " << fmt_exact(cfg.path_loss_exponent) << '\n'
       << "shadowing_sigma = " << fmt_exact(cfg.shadowing_std_db) << " dB\n"
       << "noise_power = "
       << (cfg.noise_power ? fmt_exact(*cfg.noise_power) + " W" : std::string("auto"))
       << '\n'
       << "cell_radius = " << fmt_exact(cfg.cell_radius) << " m\n"
       << "cluster_size = " << cfg.cluster_size << '\n'
       << "beamwidth = " << fmt_exact(cfg.beamwidth_deg) << " deg\n"
       << "tx_power = " << fmt_exact(cfg.tx_power) << " W\n"
       << "d_min = " << fmt_exact(cfg.d_min) << " m\n"
       << "n_drops = " << cfg.n_drops << '\n'
       << "master_seed = " << cfg.master_seed << '\n'
       << "combiner = " << to_string(cfg.combiner) << '\n'
       << "interferer_tiers = " << cfg.interferer_tiers << '\n'
       << "paired = " << (cfg.paired ? "true" : "false") << '\n'
       << "wavelength = " << fmt_exact(cfg.wavelength) << " m\n"
       << "max_gain = " << fmt_exact(cfg.max_gain_db) << " dB\n"
       << "floor_gain = " << fmt_exact(cfg.floor_gain_db) << " dB\n";
    return os.str();
}

struct ExperimentResult
{
    ScenarioConfig config;
    std::optional<OutageCurve> used;
    std::optional<OutageCurve> microzone;
    double wall_seconds = 0.0;
};

/*!
 * Run the threshold sweep for every requested architecture.
 *
 * Both architectures draw from the same master seed; with `paired` they also
 * see the same user positions and per-link shadowing and fading. The result
 * depends only on the configuration, never on `workers`.
 */
inline ExperimentResult run_experiment(ScenarioConfig const& cfg, std::size_t workers = 1)
{
    validate(cfg);
    auto const start = std::chrono::steady_clock::now();
    ExperimentResult r;
    r.config = cfg;
    auto const run = [&](Architecture arch) {
        auto const layout = build_layout(layout_params(cfg, arch));
        return mc_outage(layout, cfg, cfg.thresholds_db, cfg.n_drops, cfg.master_seed,
                         workers);
    };
    if (cfg.architectures != ArchSelection::microzone)
        r.used = run(Architecture::used);
    if (cfg.architectures != ArchSelection::used)
        r.microzone = run(Architecture::microzone);
    r.wall_seconds
        = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

namespace detail {

inline std::string fmt_csv(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace detail

/*!
 * One row per threshold:
 * threshold_db,used_mc,used_ci,used_analytic,micro_mc,micro_ci,micro_minus_used
 *
 * Missing curves are written as NA. Output is locale-independent.
 */
inline void emit_csv(ExperimentResult const& result, std::ostream& out)
{
    using detail::fmt_csv;
    if (!result.used && !result.microzone)
        throw std::invalid_argument("experiment result holds no curves");
    auto const& thresholds = result.used ? result.used->thresholds_db
                                         : result.microzone->thresholds_db;
    out << "threshold_db,used_mc,used_ci,used_analytic,micro_mc,micro_ci,micro_minus_used\n";
    std::string const na = "NA";
    for (std::size_t t = 0; t < thresholds.size(); ++t)
    {
        auto const& u = result.used;
        auto const& m = result.microzone;
        out << fmt_csv(thresholds[t]) << ','
            << (u ? fmt_csv(u->estimates[t]) : na) << ','
            << (u ? fmt_csv(u->ci_half_widths[t]) : na) << ','
            << (u && u->analytic ? fmt_csv((*u->analytic)[t]) : na) << ','
            << (m ? fmt_csv(m->estimates[t]) : na) << ','
            << (m ? fmt_csv(m->ci_half_widths[t]) : na) << ','
            << (u && m ? fmt_csv(m->estimates[t] - u->estimates[t]) : na) << '\n';
    }
}

inline void emit_csv(ExperimentResult const& result, std::string const& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    emit_csv(result, out);
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace microzone
