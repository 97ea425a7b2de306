#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "microzone/rng.hpp"

namespace microzone {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Slack applied to inclusive angular comparisons so that bearings computed
// with atan2 land on the intended side of a wedge boundary.
inline constexpr double angle_epsilon = 1e-9;

constexpr double deg_to_rad(double deg) noexcept { return deg * pi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / pi; }

struct Position
{
    double x = 0.0;  // meters
    double y = 0.0;  // meters

    friend bool operator==(Position const&, Position const&) = default;
};

struct Antenna
{
    std::size_t id = 0;
    Position position;
    double boresight = 0.0;      // radians, bearing of the main beam
    double beamwidth = two_pi;   // radians, full width of the flat top
    double max_gain = 1.0;       // linear
    double floor_gain = 0.0;     // linear, outside the beam
};

enum class Architecture
{
    used,       // sectored antennas co-located at the cell center
    microzone,  // one antenna per zone on the cell edge, all combined
};

inline std::string to_string(Architecture a)
{
    return a == Architecture::used ? "used" : "microzone";
}

struct Layout
{
    Architecture architecture = Architecture::used;
    std::size_t antenna_count = 3;  // sectors (used) or zones L (microzone)
    double cell_radius = 1000.0;    // hexagon circumradius, meters
    Position cell_center;
    std::vector<Antenna> antennas;
};

struct LayoutParams
{
    Architecture architecture = Architecture::used;
    std::size_t antenna_count = 3;
    double cell_radius = 1000.0;
    Position cell_center;
    double max_gain = 1.0;
    double floor_gain = 0.0;
};

// Smallest absolute difference between two angles, in [0, pi].
inline double angular_separation(double a, double b) noexcept
{
    double d = std::remainder(a - b, two_pi);
    return std::fabs(d);
}

inline double bearing(Position const& from, Position const& to) noexcept
{
    return std::atan2(to.y - from.y, to.x - from.x);
}

/*!
 * Build the antenna arrangement of one cell.
 *
 * Both layouts use a pointy-top hexagon (vertices at 30 + 60k degrees).
 * Sectored antennas sit at the center with boresights at 90 + 360k/n degrees.
 * Microzone antennas sit on the cell edge at polar angles 90 + 360k/n degrees
 * and look back at the center; for n = 3 they occupy alternate hexagon
 * vertices, where a 120 degree beam spans the whole cell.
 */
inline Layout build_layout(LayoutParams const& p)
{
    if (!(p.cell_radius > 0.0) || !std::isfinite(p.cell_radius))
        throw std::invalid_argument("cell radius must be positive, got "
                                    + std::to_string(p.cell_radius));
    if (p.antenna_count != 3 && p.antenna_count != 6)
        throw std::invalid_argument(
            "antenna count must be 3 (120 degree) or 6 (60 degree), got "
            + std::to_string(p.antenna_count));
    if (p.max_gain < 0.0 || p.floor_gain < 0.0 || p.floor_gain > p.max_gain)
        throw std::invalid_argument("antenna gains must satisfy 0 <= floor <= max");

    Layout layout;
    layout.architecture = p.architecture;
    layout.antenna_count = p.antenna_count;
    layout.cell_radius = p.cell_radius;
    layout.cell_center = p.cell_center;

    double const width = two_pi / static_cast<double>(p.antenna_count);
    double const offset = pi / 2.0;
    for (std::size_t k = 0; k < p.antenna_count; ++k)
    {
        double const angle = offset + width * static_cast<double>(k);
        Antenna a;
        a.id = k;
        a.beamwidth = width;
        a.max_gain = p.max_gain;
        a.floor_gain = p.floor_gain;
        if (p.architecture == Architecture::used)
        {
            a.position = p.cell_center;
            a.boresight = angle;
        }
        else
        {
            a.position = {p.cell_center.x + p.cell_radius * std::cos(angle),
                          p.cell_center.y + p.cell_radius * std::sin(angle)};
            a.boresight = std::remainder(angle + pi, two_pi);
        }
        layout.antennas.push_back(a);
    }
    return layout;
}

// Membership test for the pointy-top hexagon of circumradius `radius`
// centered at `center`. Points on the boundary are inside.
inline bool in_hexagon(Position const& p, Position const& center, double radius) noexcept
{
    double const x = std::fabs(p.x - center.x);
    double const y = std::fabs(p.y - center.y);
    double const tol = 1e-9 * radius;
    double const half_width = radius * std::numbers::sqrt3 / 2.0;
    return x <= half_width + tol && y <= radius - x / std::numbers::sqrt3 + tol;
}

inline bool in_cell(Layout const& layout, Position const& p) noexcept
{
    return in_hexagon(p, layout.cell_center, layout.cell_radius);
}

// Uniform point in the hexagon by rejection from the bounding box.
template<class Rng>
Position sample_in_hexagon(Position const& center, double radius, Rng& rng)
{
    double const half_width = radius * std::numbers::sqrt3 / 2.0;
    for (;;)
    {
        Position p{center.x + (2.0 * rng.uniform() - 1.0) * half_width,
                   center.y + (2.0 * rng.uniform() - 1.0) * radius};
        if (in_hexagon(p, center, radius))
            return p;
    }
}

template<class Rng>
std::vector<Position> place_users(Layout const& layout, std::size_t n, Rng& rng)
{
    std::vector<Position> users;
    users.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        users.push_back(sample_in_hexagon(layout.cell_center, layout.cell_radius, rng));
    return users;
}

// Ideal flat-top sector pattern; the beam edge counts as inside.
inline double pattern_gain(Antenna const& a, Position const& p) noexcept
{
    if (p == a.position)
        return a.max_gain;
    double const off = angular_separation(bearing(a.position, p), a.boresight);
    return off <= a.beamwidth / 2.0 + angle_epsilon ? a.max_gain : a.floor_gain;
}

inline double propagation_distance(Position const& p, Position const& q, double d_min) noexcept
{
    return std::max(std::hypot(p.x - q.x, p.y - q.y), d_min);
}

/*!
 * Sector serving a point in a sectored cell.
 *
 * Wedges are boresight +/- beamwidth/2 seen from the cell center; a point on
 * the boundary between two wedges goes to the lower antenna id. The cell
 * center itself is served by antenna 0.
 */
inline std::size_t serving_antenna(Layout const& layout, Position const& p)
{
    if (layout.architecture == Architecture::microzone)
        throw std::logic_error("microzone uplink uses all antennas");
    if (p == layout.cell_center)
        return 0;
    double const b = bearing(layout.cell_center, p);
    for (auto const& a : layout.antennas)
    {
        if (angular_separation(b, a.boresight) <= a.beamwidth / 2.0 + angle_epsilon)
            return a.id;
    }
    // Unreachable while the wedges partition the circle.
    throw std::logic_error("sector wedges do not cover bearing "
                           + std::to_string(rad_to_deg(b)));
}

/*!
 * Centers of the co-channel cells surrounding the origin cell, ring by ring.
 *
 * With cluster size 1 every neighbor reuses the carrier. Ring 1 has 6 cells at
 * distance sqrt(3) R; ring 2 adds 12 more.
 */
inline std::vector<Position> interferer_cell_centers(Position const& center,
                                                     double radius,
                                                     int tiers)
{
    if (tiers < 0 || tiers > 2)
        throw std::invalid_argument("interferer tiers must be 0, 1 or 2");
    std::vector<Position> out;
    double const pitch = std::numbers::sqrt3 * radius;
    // Axial lattice with basis vectors at 0 and 60 degrees (flat-edge normals).
    for (int q = -tiers; q <= tiers; ++q)
    {
        for (int r = -tiers; r <= tiers; ++r)
        {
            int const s = -q - r;
            int const ring = std::max({std::abs(q), std::abs(r), std::abs(s)});
            if (ring == 0 || ring > tiers)
                continue;
            out.push_back({center.x + pitch * (q + 0.5 * r),
                           center.y + pitch * (std::numbers::sqrt3 / 2.0) * r});
        }
    }
    return out;
}

}  // namespace microzone
