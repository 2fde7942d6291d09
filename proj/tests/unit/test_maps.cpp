#include "common.hpp"

using namespace ruelle;
using namespace ruelle::test;

TEST(Maps, DoublingPreimages)
{
    const auto p = doubling_map().preimages(0.25L);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_NEAR(p[0], 0.125L, 1e-15L);
    EXPECT_NEAR(p[1], 0.625L, 1e-15L);
}

TEST(Maps, MannevillePomeauPreimagesAtHalf)
{
    const auto p = manneville_pomeau_map(1).preimages(0.5L);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_NEAR(p[0], (std::sqrt(Real(5)) - 1) / 4, 1e-14L);
    EXPECT_NEAR(p[1], 0.75L, 1e-14L);
}

TEST(Maps, DegreeThreeEndpointTieGoesToLowerBranch)
{
    const auto p = linear_map(3).preimages(0);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_NEAR(p[0], 0, 1e-15L);
    EXPECT_NEAR(p[1], Real(1) / 3, 1e-15L);
    EXPECT_NEAR(p[2], Real(2) / 3, 1e-15L);
}

TEST(Maps, PreimagesMapForwardForEveryFamily)
{
    const std::vector<BranchMap> maps{doubling_map(), linear_map(3), manneville_pomeau_map(0.5L),
                                      perturbed_doubling_map(0.1L), translated_doubling_map(0.2L)};
    for (const auto& m : maps) {
        for (Real x : {0.0L, 0.1L, 0.37L, 0.5L, 0.93L}) {
            const auto pre = m.preimages(x);
            ASSERT_EQ(static_cast<int>(pre.size()), m.degree()) << m.family_tag();
            for (Real y : pre) EXPECT_LT(circle_distance(m(y), x), 1e-12L) << m.family_tag() << " x=" << x;
        }
    }
}

TEST(Maps, BranchDerivativesPositive)
{
    const auto m = perturbed_doubling_map(0.2L);
    for (int i = 0; i < 200; ++i) EXPECT_GT(m.derivative((i + 0.5L) / 200), 0);
}

TEST(Maps, PiecewisePolynomialMatchesBuiltinDoubling)
{
    const auto m = piecewise_polynomial_map({0, 0.5L, 1}, {Polynomial{{0, 2}}, Polynomial{{0, 2}}});
    const auto d = doubling_map();
    for (Real x : {0.05L, 0.3L, 0.71L}) {
        EXPECT_NEAR(m(x), d(x), 1e-15L);
        const auto a = m.preimages(x), b = d.preimages(x);
        for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-14L);
    }
}

TEST(Maps, FamilyParameterDerivativeMatchesDifference)
{
    const MapFamily fam{"perturbed-doubling", "t", {{"t", 0.1L}}};
    const auto m = fam.at(0.1L);
    const Real h = 1e-5L;
    for (Real x : {0.02L, 0.1L, 0.6L}) {
        const Real fd = (fam.at(0.1L + h)(x) - fam.at(0.1L - h)(x)) / (2 * h);
        EXPECT_NEAR(m.param_derivative(x), fd, 1e-8L);
    }
}

TEST(Maps, UnknownFamilyIsConfigError)
{
    try {
        builtin_map("tent", {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::config);
    }
}

TEST(Hypotheses, DoublingZeroPotentialPasses)
{
    const auto r = check_hypotheses(doubling_map(), Potential::constant(0), {});
    EXPECT_TRUE(r.h1);
    EXPECT_TRUE(r.h2);
    EXPECT_TRUE(r.p);
    EXPECT_NEAR(r.sigma, 2, 1e-12L);
    EXPECT_EQ(r.eps_phi, 0);
    EXPECT_NEAR(r.vep_value, std::pow(2.0L, -r.alpha), 1e-12L);
}

TEST(Hypotheses, ConstantPotentialSameVerdicts)
{
    const auto a = check_hypotheses(doubling_map(), Potential::constant(0), {});
    const auto b = check_hypotheses(doubling_map(), Potential::constant(1.7L), {});
    EXPECT_EQ(a.h1, b.h1);
    EXPECT_EQ(a.h2, b.h2);
    EXPECT_EQ(a.p, b.p);
    EXPECT_EQ(b.oscillation, 0);
    EXPECT_EQ(a.vep_value, b.vep_value);
}

TEST(Hypotheses, MannevillePomeauWithRegionA)
{
    HypothesisAux aux;
    aux.region_A = {Arc{0, 0.05L}};
    aux.q = 1;
    const auto r = check_hypotheses(manneville_pomeau_map(1), Potential::constant(0), aux);
    EXPECT_TRUE(r.h1);
    EXPECT_TRUE(r.h2);
    EXPECT_GT(r.sigma, 1);
    // L = sup over A of 1/f' = 1/f'(0) = 1, certified from above on the grid
    EXPECT_GE(r.big_L, 1);
    EXPECT_LT(r.big_L, 1.001L);
}

TEST(Hypotheses, MannevillePomeauWithoutRegionFailsH1)
{
    const auto r = check_hypotheses(manneville_pomeau_map(1), Potential::constant(0), {});
    EXPECT_FALSE(r.h1);
    EXPECT_FALSE(r.passes());
}

TEST(Hypotheses, LargeOscillationFailsP)
{
    const auto r = check_hypotheses(doubling_map(), Potential::cos_mode(1, 2), {});
    EXPECT_FALSE(r.p);
    EXPECT_GE(r.vep_value, 1);
}

TEST(Potential, SamplesInterpolateAcrossSeam)
{
    const Grid g{8, 0};
    std::vector<Real> v(8);
    for (int i = 0; i < 8; ++i) v[i] = i;
    const auto p = Potential::samples(GridFunction(g, v));
    EXPECT_NEAR(p(0.9375L), 3.5L, 1e-15L);  // halfway between node 7 (value 7) and node 0 (value 0)
    EXPECT_NEAR(p(1.0L), p(0.0L), 1e-15L);
}

TEST(Potential, LogDerivativeFollowsBranch)
{
    const auto m = manneville_pomeau_map(1);
    const auto p = Potential::log_derivative(m, -1);
    for (Real x : {0.1L, 0.4L, 0.8L}) EXPECT_NEAR(p(x), -std::log(m.derivative(x)), 1e-14L);
}

TEST(Potential, ArithmeticIsLinear)
{
    const auto a = Potential::trig(0.2L, {0.1L, 0.3L}, {0.05L});
    const auto b = Potential::sin_mode(2, 0.7L);
    const auto c = 2 * a - b;
    for (Real x : {0.0L, 0.21L, 0.77L}) {
        EXPECT_NEAR(c(x), 2 * a(x) - b(x), 1e-15L);
        EXPECT_NEAR(c.derivative(x), 2 * a.derivative(x) - b.derivative(x), 1e-13L);
    }
}
