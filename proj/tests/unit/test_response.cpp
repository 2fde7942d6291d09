#include "common.hpp"

using namespace ruelle;
using namespace ruelle::test;

namespace {

const Potential kCos = Potential::cos_mode(1);

Potential random_direction(unsigned seed)
{
    const CounterRng rng(seed, 0);
    std::vector<Real> a(3), b(3);
    for (int k = 0; k < 3; ++k) {
        a[k] = 0.06L * (rng.uniform(2 * k) - 0.5L);
        b[k] = 0.06L * (rng.uniform(2 * k + 1) - 0.5L);
    }
    return Potential::trig(0.02L * (rng.uniform(9) - 0.5L), a, b);
}

}  // namespace

TEST(PotentialResponse, LambdaAlongOneIsLambda)
{
    const PotentialResponse r(doubling_map(), Potential::cos_mode(1, 0.1L), disc(128));
    EXPECT_NEAR(r.d_lambda(Potential::constant(1)), r.base().triple.lambda, 1e-12L);
}

TEST(PotentialResponse, DoublingZeroAlongCosine)
{
    const PotentialResponse r(doubling_map(), Potential::constant(0), disc(128, Interpolation::fourier, 1e-15L));
    EXPECT_NEAR(r.d_lambda(kCos), 0, 1e-13L);
    EXPECT_NEAR(r.d_pressure(kCos), 0, 1e-13L);
    EXPECT_NEAR(r.d_pressure(Potential::constant(1)), 1, 1e-13L);
    EXPECT_NEAR(r.d_conformal(kCos, kCos), 0.5L, 1e-12L);
    EXPECT_NEAR(r.d_equilibrium(kCos, kCos), 0.5L, 1e-12L);
    EXPECT_NEAR(r.d_conformal(Potential::constant(1), kCos), 0, 1e-13L);
    EXPECT_NEAR(r.d_equilibrium(Potential::constant(1), kCos), 0, 1e-13L);
}

TEST(PotentialResponse, DensityVanishesWhenBothTermsDo)
{
    const PotentialResponse r(doubling_map(), Potential::constant(0.4L), disc(128, Interpolation::fourier, 1e-15L));
    const auto dh = r.d_density(kCos);
    for (int i = 0; i < dh.size(); ++i) EXPECT_NEAR(dh[i], 0, 1e-12L);
}

TEST(PotentialResponse, DensityIsLinearInDirection)
{
    const PotentialResponse r(doubling_map(), Potential::cos_mode(1, 0.1L), disc(128));
    const auto H = Potential::sin_mode(1);
    const auto a = r.d_density(H), b = r.d_density(2 * H);
    for (int i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], 2 * a[i], 1e-13L);
}

TEST(PotentialResponse, AllQuantitiesMatchFiniteDifferences)
{
    const auto phi0 = Potential::cos_mode(1, 0.1L);
    const PotentialResponse r(doubling_map(), phi0, fd_discretization(disc(128)));
    for (unsigned seed = 1; seed <= 3; ++seed) {
        const auto H = random_direction(seed);
        const auto g = random_direction(seed + 100) * 10;
        for (auto q : {PotentialQuantity::lambda, PotentialQuantity::pressure, PotentialQuantity::density,
                       PotentialQuantity::conformal, PotentialQuantity::equilibrium}) {
            const auto rep = validate_potential_response(r, q, g, H);
            EXPECT_LT(rep.rel_error, 1e-4L) << to_string(q) << " seed " << seed;
        }
    }
}

TEST(PotentialResponse, DensityAlongSineWithinFdTolerance)
{
    const PotentialResponse r(doubling_map(), Potential::cos_mode(1, 0.1L), fd_discretization(disc(256)));
    const auto rep = validate_potential_response(r, PotentialQuantity::density, {}, Potential::sin_mode(1));
    EXPECT_LT(rep.abs_error, 1e-3L);
}

TEST(PotentialResponse, MannevillePomeauGeometricDirection)
{
    const auto map = manneville_pomeau_map(0.5L);
    const auto phi0 = Potential::log_derivative(map, -0.05L);
    const auto H = Potential::log_derivative(map, -1);
    const auto d = fd_discretization(disc(256));
    const PotentialResponse r(map, phi0, d);
    const Real eps = 1e-4L;
    const Real fd = (pressure(map, phi0 + eps * H, d) - pressure(map, phi0 - eps * H, d)) / (2 * eps);
    EXPECT_NEAR(r.d_pressure(H), fd, 1e-4L);
}

TEST(PotentialResponse, NeumannMatchesDirect)
{
    const auto phi0 = Potential::cos_mode(1, 0.1L);
    const PotentialResponse a(doubling_map(), phi0, disc(128, Interpolation::linear, 1e-15L), ResolventMethod::direct);
    const PotentialResponse b(doubling_map(), phi0, disc(128, Interpolation::linear, 1e-15L), ResolventMethod::neumann);
    const auto H = Potential::sin_mode(2, 0.1L);
    EXPECT_NEAR(a.d_equilibrium(kCos, H), b.d_equilibrium(kCos, H), 1e-10L);
    EXPECT_GT(b.series_terms(), 0);
}

TEST(PotentialResponse, QuantityNames)
{
    EXPECT_EQ(potential_quantity("density"), PotentialQuantity::density);
    EXPECT_EQ(to_string(PotentialQuantity::conformal), "conformal");
    EXPECT_THROW(potential_quantity("volume"), Error);
}

TEST(DynamicsResponse, ZeroDirection)
{
    const VectorField zero = [](Real, int) { return Real(0); };
    EXPECT_EQ(d_transfer_d_dynamics(doubling_map(), Potential::cos_mode(1, 0.1L), kCos, zero, 0.3L), 0);
}

TEST(DynamicsResponse, ConstantOneIsStationary)
{
    const auto H = field_of(Potential::sin_mode(1, 0.3L));
    for (int n : {1, 3, 6})
        EXPECT_NEAR(d_transfer_n_d_dynamics(perturbed_doubling_map(0.1L), Potential::constant(0), Potential::constant(1), H,
                                            0.37L, n),
                    0, 1e-12L);
}

TEST(DynamicsResponse, TranslatedDoublingClosedForm)
{
    const auto map = translated_doubling_map(0);
    const auto H = family_direction(map);
    for (Real x : {0.1L, 0.3L, 0.77L}) {
        const Real expected = -0.5L * (kCos.derivative(x / 2) + kCos.derivative(x / 2 + 0.5L));
        EXPECT_NEAR(d_transfer_d_dynamics(map, Potential::constant(0), kCos, H, x), expected, 1e-8L);
        const auto g = Potential::sin_mode(1);
        const Real eg = -0.5L * (g.derivative(x / 2) + g.derivative(x / 2 + 0.5L));
        EXPECT_NEAR(d_transfer_d_dynamics(map, Potential::constant(0), g, H, x), eg, 1e-8L);
    }
}

TEST(DynamicsResponse, IterateOneMatchesSingleStep)
{
    const auto map = perturbed_doubling_map(0.1L);
    const auto pot = Potential::cos_mode(1, 0.1L);
    const auto H = family_direction(map);
    EXPECT_NEAR(d_transfer_n_d_dynamics(map, pot, kCos, H, 0.4L, 1), d_transfer_d_dynamics(map, pot, kCos, H, 0.4L),
                1e-15L);
}

TEST(DynamicsResponse, IterateMatchesFiniteDifference)
{
    const MapFamily fam{"perturbed-doubling", "t", {{"t", 0.1L}}};
    const auto pot = Potential::cos_mode(1, 0.1L);
    const auto g = as_observable(kCos);
    const Real eps = 1e-5L;
    const int n = 4;
    const Real fd = (apply_transfer_tree(fam.at(0.1L + eps), pot, g, 0.3L, n) -
                     apply_transfer_tree(fam.at(0.1L - eps), pot, g, 0.3L, n)) /
                    (2 * eps);
    const auto map = fam.at(0.1L);
    EXPECT_NEAR(d_transfer_n_d_dynamics(map, pot, kCos, family_direction(map), 0.3L, n), fd, 1e-7L);
}

TEST(DynamicsResponse, LinearInDirection)
{
    const auto map = perturbed_doubling_map(0.1L);
    const auto pot = Potential::cos_mode(1, 0.1L);
    const auto h1 = field_of(Potential::sin_mode(1)), h2 = field_of(Potential::cos_mode(2));
    const Real t = 0.7L;
    const VectorField sum = [&](Real y, int k) { return h1(y, k) + t * h2(y, k); };
    for (int n : {1, 3}) {
        const Real a = d_transfer_n_d_dynamics(map, pot, kCos, sum, 0.21L, n);
        const Real b = d_transfer_n_d_dynamics(map, pot, kCos, h1, 0.21L, n) +
                       t * d_transfer_n_d_dynamics(map, pot, kCos, h2, 0.21L, n);
        EXPECT_NEAR(a, b, 1e-10L);
    }
}

TEST(DynamicsResponse, PressureConstantInFamilyForZeroPotential)
{
    for (const MapFamily& fam : {MapFamily{"perturbed-doubling", "t", {{"t", 0.1L}}},
                                 MapFamily{"translated-doubling", "s", {{"s", 0.0L}}},
                                 MapFamily{"manneville-pomeau", "alpha", {{"alpha", 0.5L}}}}) {
        const Real s0 = fam.params.at(fam.parameter);
        EXPECT_LT(std::fabs(d_pressure_d_dynamics(fam, Potential::constant(0), s0, disc(128)).analytic_value), 1e-8L)
            << fam.tag;
    }
    const MapFamily tr{"translated-doubling", "s", {{"s", 0.0L}}};
    EXPECT_LT(std::fabs(d_pressure_d_dynamics(tr, Potential::constant(0.3L), 0.1L, disc(128)).analytic_value), 1e-8L);
}

TEST(DynamicsResponse, PressurePerturbedDoublingMatchesFd)
{
    const MapFamily fam{"perturbed-doubling", "t", {{"t", 0.1L}}};
    const auto rep = d_pressure_d_dynamics(fam, Potential::cos_mode(1, 0.05L), 0.1L, disc(256));
    EXPECT_LT(rep.rel_error, 1e-3L);
    EXPECT_GT(std::fabs(rep.fd_value), 1e-6L);
}

TEST(DynamicsResponse, PressureRejectsGeometricPotential)
{
    const MapFamily fam{"perturbed-doubling", "t", {{"t", 0.1L}}};
    EXPECT_THROW(d_pressure_d_dynamics(fam, Potential::log_derivative(fam.at(0.1L), -1), 0.1L, disc(64)), Error);
}

TEST(MaxEntropyResponse, ConstantObservable)
{
    const MapFamily fam{"perturbed-doubling", "t", {{"t", 0.1L}}};
    EXPECT_NEAR(d_maxentropy_expectation(fam, Potential::constant(2), 0.1L, disc(128)).analytic_value, 0, 1e-12L);
}

TEST(MaxEntropyResponse, TranslatedDoublingIsZero)
{
    const MapFamily fam{"translated-doubling", "s", {{"s", 0.0L}}};
    EXPECT_NEAR(d_maxentropy_expectation(fam, kCos, 0.1L, disc(128)).analytic_value, 0, 1e-10L);
}

TEST(MaxEntropyResponse, PerturbedDoublingMatchesFd)
{
    const MapFamily fam{"perturbed-doubling", "t", {{"t", 0.1L}}};
    const auto rep = d_maxentropy_expectation(fam, kCos, 0.1L, disc(256));
    EXPECT_LT(rep.rel_error, 1e-3L);
    ASSERT_TRUE(rep.truncation_tail_bound);
    EXPECT_LT(*rep.truncation_tail_bound, 1e-12L);
}
