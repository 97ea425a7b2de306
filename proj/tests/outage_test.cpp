#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "microzone/outage.hpp"

using namespace microzone;

namespace {

// Brute-force estimate of P(z1 <= sum z_i + c), drawn with the standard
// library's engine and distributions rather than the simulator's streams.
struct OracleEstimate
{
    double p;
    double se;
};

OracleEstimate lemma_oracle(ExponentialMixSpec const& s, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 eng(seed);
    std::exponential_distribution<double> z1(s.y1);
    std::vector<std::exponential_distribution<double>> zs;
    for (double y : s.ys)
        zs.emplace_back(y);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < n; ++k)
    {
        double const a = z1(eng);
        double b = s.c;
        for (auto& d : zs)
            b += d(eng);
        hits += a <= b;
    }
    double const p = double(hits) / n;
    return {p, std::sqrt(p * (1 - p) / n)};
}

}  // namespace

TEST(Lemma1, ExactCases)
{
    EXPECT_EQ(lemma1_prob({1.0, {}, 0.0}), 0.0);
    EXPECT_NEAR(lemma1_prob({1.0, {1.0}, 0.0}), 0.5, 1e-15);
    EXPECT_NEAR(lemma1_prob({1.0, {2.0}, 0.5}), 1.0 - 1.0 / (1.5 * std::exp(0.5)), 1e-15);
    EXPECT_NEAR(lemma1_prob({1.0, {2.0}, 0.5}), 0.59565, 1e-5);
}

TEST(Lemma1, AgreesWithOracle)
{
    ExponentialMixSpec const s{1.0, {2.0}, 0.5};
    auto const o = lemma_oracle(s, 10000000, 1);
    EXPECT_LT(std::fabs(lemma1_prob(s) - o.p), 4 * o.se);
}

TEST(Lemma1, RejectsBadRates)
{
    EXPECT_THROW(lemma1_prob({0.0, {}, 0.0}), std::invalid_argument);
    EXPECT_THROW(lemma1_prob({1.0, {0.0}, 0.0}), std::invalid_argument);
    EXPECT_THROW(lemma1_prob({1.0, {-2.0}, 0.0}), std::invalid_argument);
    EXPECT_THROW(lemma1_prob({1.0, {1.0}, -1.0}), std::invalid_argument);
}

TEST(Lemma1, MonotoneAndInRange)
{
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto rate = [&] { return std::pow(10.0, 2.0 * u(eng) - 1.0); };
    for (int trial = 0; trial < 2000; ++trial)
    {
        ExponentialMixSpec s{rate(), {}, 5.0 * u(eng)};
        int const n = 1 + int(u(eng) * 6);
        for (int i = 0; i < n; ++i)
            s.ys.push_back(rate());
        double const p = lemma1_prob(s);
        EXPECT_GT(p, 0.0);
        EXPECT_LE(p, 1.0);

        auto t = s;
        t.c += 0.1;
        EXPECT_GE(lemma1_prob(t), p);
        t = s;
        t.y1 *= 1.1;
        EXPECT_GE(lemma1_prob(t), p);
        t = s;
        t.ys[0] *= 1.1;
        EXPECT_LE(lemma1_prob(t), p);
    }
}

TEST(AnalyticOutageUsed, Values)
{
    double const one[] = {2.0};
    EXPECT_EQ(analytic_outage_used(2.0, one, 0.5, 10.0, 0.0), 0.0);
    EXPECT_NEAR(analytic_outage_used(2.0, one, 0.0, 1.0, 1.0), 0.5, 1e-15);
    double const two[] = {3.0, 3.0};
    EXPECT_NEAR(analytic_outage_used(3.0, two, 0.0, 1.0, 1.0), 0.75, 1e-15);
    EXPECT_THROW(analytic_outage_used(0.0, one, 0.0, 1.0, 1.0), std::invalid_argument);
}

TEST(AnalyticOutageUsed, Limits)
{
    double const interf[] = {0.3, 1.2, 0.01};
    EXPECT_EQ(analytic_outage_used(1.0, interf, 0.1, 84.4, 0.0), 0.0);
    EXPECT_NEAR(analytic_outage_used(1.0, interf, 0.1, 84.4, 1e6), 1.0, 1e-6);
}

TEST(AnalyticOutageUsed, IsLemmaWithRescaledRates)
{
    // z1 = desired power, z_j = (gamma / P_G) * interferer power, c = eta gamma / P_G.
    double const md = 2.5, pg = 7.0, gamma = 1.7, eta = 0.3;
    std::vector<double> mi{0.4, 1.1, 3.0};
    ExponentialMixSpec s;
    s.y1 = 1.0 / md;
    for (double m : mi)
        s.ys.push_back(pg / (gamma * m));
    s.c = eta * gamma / pg;
    EXPECT_NEAR(analytic_outage_used(md, mi, eta, pg, gamma), lemma1_prob(s), 1e-14);
}

TEST(McOutageMatched, WithinConfidenceOfClosedForm)
{
    MatchedMeans m{1.0, {0.05, 0.02, 0.1}, 0.01, 10.0};
    std::vector<double> const thr{-10, -5, 0, 5, 10};
    auto const c = mc_outage_matched(m, thr, 20000, 9);
    ASSERT_TRUE(c.analytic);
    int inside = 0;
    for (std::size_t t = 0; t < thr.size(); ++t)
        inside += std::fabs(c.estimates[t] - (*c.analytic)[t]) <= c.ci_half_widths[t];
    EXPECT_GE(inside, 4);
    for (std::size_t t = 1; t < thr.size(); ++t)
        EXPECT_GE(c.estimates[t], c.estimates[t - 1]);
}

namespace {

ScenarioConfig small_config()
{
    ScenarioConfig cfg;
    cfg.n_users = 10;
    return cfg;
}

Layout layout_for(ScenarioConfig const& cfg, Architecture arch)
{
    return build_layout(layout_params(cfg, arch));
}

}  // namespace

TEST(McOutage, InterferenceFreeSingleUser)
{
    auto cfg = small_config();
    cfg.n_users = 1;
    cfg.noise_power = 0.0;
    std::vector<double> const thr{-10, 0, 10, 30};
    for (auto arch : {Architecture::used, Architecture::microzone})
    {
        auto const c = mc_outage(layout_for(cfg, arch), cfg, thr, 1, 1);
        for (double e : c.estimates)
            EXPECT_EQ(e, 0.0);
    }
}

TEST(McOutage, MonotoneAndBounded)
{
    auto const cfg = small_config();
    for (auto arch : {Architecture::used, Architecture::microzone})
    {
        auto const c = mc_outage(layout_for(cfg, arch), cfg, cfg.thresholds_db, 300, 4);
        for (std::size_t t = 0; t < c.estimates.size(); ++t)
        {
            EXPECT_GE(c.estimates[t], 0.0);
            EXPECT_LE(c.estimates[t], 1.0);
            EXPECT_GE(c.ci_half_widths[t], 0.0);
            if (t)
            {
                EXPECT_GE(c.estimates[t], c.estimates[t - 1]);
            }
        }
        EXPECT_EQ(c.analytic.has_value(), arch == Architecture::used);
    }
}

TEST(McOutage, WorkerCountInvariant)
{
    auto const cfg = small_config();
    for (auto arch : {Architecture::used, Architecture::microzone})
    {
        auto const layout = layout_for(cfg, arch);
        auto const a = mc_outage(layout, cfg, cfg.thresholds_db, 97, 12, 1);
        auto const b = mc_outage(layout, cfg, cfg.thresholds_db, 97, 12, 4);
        EXPECT_EQ(a.outage_counts, b.outage_counts);
        EXPECT_EQ(a.estimates, b.estimates);
        EXPECT_EQ(a.analytic, b.analytic);
    }
}

TEST(McOutage, ConfidenceShrinksAsRootN)
{
    auto const cfg = small_config();
    auto const layout = layout_for(cfg, Architecture::used);
    std::vector<double> const thr{0.0};
    auto const a = mc_outage(layout, cfg, thr, 400, 2);
    auto const b = mc_outage(layout, cfg, thr, 1600, 2);
    double const ratio = a.ci_half_widths[0] / b.ci_half_widths[0];
    EXPECT_NEAR(ratio, 2.0, 0.2 * 2.0);
}

TEST(McOutage, AnalyticTracksSimulation)
{
    // The per-drop closed form is the fading average of the MC indicator.
    auto const cfg = small_config();
    auto const c = mc_outage(layout_for(cfg, Architecture::used), cfg, cfg.thresholds_db,
                             2000, 21);
    for (std::size_t t = 0; t < c.estimates.size(); ++t)
        EXPECT_NEAR(c.estimates[t], (*c.analytic)[t], 2 * c.ci_half_widths[t] + 1e-3);
}

TEST(McOutage, RejectsBadArguments)
{
    auto const cfg = small_config();
    auto const layout = layout_for(cfg, Architecture::used);
    std::vector<double> const unsorted{0.0, -1.0};
    EXPECT_THROW(mc_outage(layout, cfg, unsorted, 10, 1), std::invalid_argument);
    EXPECT_THROW(mc_outage(layout, cfg, std::vector<double>{}, 10, 1), std::invalid_argument);
    EXPECT_THROW(mc_outage(layout, cfg, cfg.thresholds_db, 0, 1), std::invalid_argument);
}

TEST(OutageReport, SelfComparisonAndMismatch)
{
    auto const cfg = small_config();
    auto const c = mc_outage(layout_for(cfg, Architecture::used), cfg, cfg.thresholds_db, 50, 1);
    auto const rows = outage_report(c, c);
    ASSERT_EQ(rows.size(), c.thresholds_db.size());
    for (auto const& r : rows)
    {
        EXPECT_EQ(r.difference, 0.0);
        EXPECT_FALSE(r.flagged);
    }

    auto other = c;
    other.thresholds_db.back() += 1.0;
    EXPECT_THROW(outage_report(c, other), std::invalid_argument);
}

TEST(OutageReport, FlagsWorseMicrozone)
{
    OutageCurve u, m;
    u.thresholds_db = m.thresholds_db = {0.0, 1.0};
    u.estimates = {0.2, 0.3};
    m.estimates = {0.1, 0.4};
    u.ci_half_widths = m.ci_half_widths = {0.01, 0.01};
    auto const rows = outage_report(u, m);
    EXPECT_FALSE(rows[0].flagged);
    EXPECT_TRUE(rows[1].flagged);
    EXPECT_NEAR(rows[1].difference, 0.1, 1e-15);
}
