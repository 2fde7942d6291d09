#include "common.hpp"

using namespace ruelle;
using namespace ruelle::test;

namespace {

struct Setup {
    BranchMap map = doubling_map();
    Potential phi = Potential::constant(0);
    Potential psi = Potential::cos_mode(1);
    Solution sol;
    FreeEnergyCurve curve;

    Setup()
    {
        const auto d = disc(128);
        sol = solve(map, phi, d);
        FreeEnergyOptions o;
        o.t0 = 2;
        curve = free_energy(map, phi, psi, d, o);
    }
};

const Setup& setup()
{
    static const Setup s;
    return s;
}

LdpOptions options(Real a, Real b, std::vector<int> n, std::int64_t samples, std::uint64_t seed = 11)
{
    LdpOptions o;
    o.a = a;
    o.b = b;
    o.n_list = std::move(n);
    o.samples = samples;
    o.seed = seed;
    return o;
}

}  // namespace

TEST(Ldp, TypicalIntervalRateTendsToZero)
{
    const auto& s = setup();
    const auto e = ldp_monte_carlo(s.map, s.sol, s.psi, s.curve, options(-0.2L, 0.2L, {2, 10, 40}, 40000));
    ASSERT_EQ(e.rows.size(), 3u);
    EXPECT_LT(std::fabs(*e.rows[2].rate), std::fabs(*e.rows[0].rate));
    EXPECT_GT(*e.rows[2].rate, -0.01L);
}

TEST(Ldp, EmpiricalRateBelowPredictionAndApproaching)
{
    const auto& s = setup();
    const auto e = ldp_monte_carlo(s.map, s.sol, s.psi, s.curve, options(0.25L, 0.45L, {10, 20, 30}, 200000));
    EXPECT_LT(e.predicted_upper, 0);
    for (const auto& r : e.rows) {
        ASSERT_TRUE(r.rate);
        EXPECT_LE(*r.rate, e.predicted_upper + r.ci_half_width);
    }
    EXPECT_LT(std::fabs(*e.rows[2].rate - e.predicted_upper), std::fabs(*e.rows[0].rate - e.predicted_upper));
}

TEST(Ldp, SeedDeterminesResult)
{
    const auto& s = setup();
    auto o = options(0.25L, 0.45L, {5, 10}, 20000, 3);
    const auto a = ldp_monte_carlo(s.map, s.sol, s.psi, s.curve, o);
    const auto b = ldp_monte_carlo(s.map, s.sol, s.psi, s.curve, o);
    o.parallel = false;
    const auto c = ldp_monte_carlo(s.map, s.sol, s.psi, s.curve, o);
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        EXPECT_EQ(a.rows[k].hits, b.rows[k].hits);
        EXPECT_EQ(a.rows[k].hits, c.rows[k].hits);
        EXPECT_EQ(a.rows[k].ci_half_width, c.rows[k].ci_half_width);
    }
}

TEST(Ldp, ConfidenceWidthScalesAsInverseSquareRoot)
{
    const auto& s = setup();
    const auto a = ldp_monte_carlo(s.map, s.sol, s.psi, s.curve, options(0.1L, 0.5L, {10}, 40000));
    const auto b = ldp_monte_carlo(s.map, s.sol, s.psi, s.curve, options(0.1L, 0.5L, {10}, 80000));
    const Real ratio = b.rows[0].ci_half_width / a.rows[0].ci_half_width;
    EXPECT_NEAR(ratio, 1 / std::sqrt(Real(2)), 0.3L / std::sqrt(Real(2)));
}

TEST(Ldp, ZeroHitsDisplay)
{
    const auto& s = setup();
    const auto e = ldp_monte_carlo(s.map, s.sol, s.psi, s.curve, options(0.9L, 0.95L, {30}, 1000));
    ASSERT_EQ(e.rows[0].hits, 0);
    EXPECT_FALSE(e.rows[0].rate);
    EXPECT_EQ(e.rows[0].display, "-inf (0 hits / 1000)");
}

TEST(Ldp, RejectsBadInterval)
{
    const auto& s = setup();
    EXPECT_THROW(ldp_monte_carlo(s.map, s.sol, s.psi, s.curve, options(0.5L, 0.2L, {10}, 100)), Error);
}

TEST(RateScan, ConstantFamilyRowsIdentical)
{
    const MapFamily fam{"doubling", "", {}};
    FreeEnergyOptions o;
    o.t0 = 0.5L;
    o.n_t = 21;
    const std::vector<Real> v{0, 0.1L, 0.2L};
    const auto scan = rate_continuity_scan(fam, Potential::constant(0), Potential::cos_mode(1), v, 11, disc(64), o);
    EXPECT_EQ(scan.max_neighbor_sup, 0);
}

TEST(RateScan, TranslatedDoublingHalfPeriod)
{
    const MapFamily fam{"translated-doubling", "s", {{"s", 0.0L}}};
    FreeEnergyOptions o;
    o.t0 = 0.5L;
    o.n_t = 21;
    const std::vector<Real> v{0.1L, 0.6L};
    const auto scan = rate_continuity_scan(fam, Potential::constant(0), Potential::cos_mode(1, 0.5L), v, 11, disc(64), o);
    EXPECT_LT(scan.max_neighbor_sup, 1e-8L);
}

TEST(RateScan, NeighborDifferencesShrinkWithStep)
{
    const MapFamily fam{"perturbed-doubling", "t", {{"t", 0.0L}}};
    FreeEnergyOptions o;
    o.t0 = 0.5L;
    o.n_t = 21;
    std::vector<Real> sup;
    for (int m : {5, 10}) {
        std::vector<Real> v;
        for (int k = 0; k <= m; ++k) v.push_back(0.2L * k / m);
        sup.push_back(rate_continuity_scan(fam, Potential::constant(0), Potential::cos_mode(1), v, 21, disc(64), o)
                          .max_neighbor_sup);
    }
    EXPECT_GE(sup[0] / sup[1], 1.5L);
}
