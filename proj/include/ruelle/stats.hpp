#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/response.hpp"

namespace ruelle {

struct CorrelationSeries {
    std::vector<Real> values;  // C(0..n_max)
    std::optional<Real> tau_fit;
    Real fit_residual = 0;
    int fit_points = 0;
    std::vector<std::string> notes;
};

// C(n) = int (a o f^n) b dmu - mu(a) mu(b), via nu(a L~^n(h (b - mu(b)))).
CorrelationSeries correlation(const Solution& sol, const Potential& a, const Potential& b, int n_max);
CorrelationSeries correlation(const BranchMap& map, const Potential& pot, const Potential& a, const Potential& b,
                              int n_max, const Discretization& disc);

// Least-squares slope of log|C(n)| over the points above the noise floor.
void fit_decay(CorrelationSeries& series, Real floor = 1e-13L);

struct CorrelationDerivative {
    Real s0 = 0;
    Real step = 0;
    std::vector<Real> values;  // d/ds C(n) at s0, n = 0..n_max
    Real max_tail = 0;         // max |values[n]| over the last quarter of n
};

// Central difference in the family parameter of C(n) at phi == 0.
CorrelationDerivative d_correlation_d_dynamics(const MapFamily& family, const Potential& a, const Potential& b,
                                               int n_max, Real s0, const Discretization& disc,
                                               Real step = kDefaultFdStep);

struct CltParameters {
    Real mean = 0;
    Real variance = 0;          // after clamping
    Real raw_variance = 0;      // truncated series before clamping
    bool coboundary = false;    // raw variance below the threshold
    int terms = 0;
    std::optional<Real> tail_bound;
    std::vector<std::string> notes;
};

inline constexpr Real kCoboundaryThreshold = 1e-8L;

CltParameters clt_parameters(const Solution& sol, const Potential& psi, Real tol = 1e-15L);
CltParameters clt_parameters(const BranchMap& map, const Potential& pot, const Potential& psi,
                             const Discretization& disc, Real tol = 1e-15L);

// ---------------------------------------------------------------------------

struct FreeEnergyCurve {
    std::vector<Real> t;
    std::vector<Real> e;
    std::vector<Real> de;   // spline E'
    std::vector<Real> d2e;  // spline E''
    Real t0 = 0;
    bool t0_automatic = false;
    bool affine = false;    // psi constant: E(t) = t c exactly
    Real affine_slope = 0;
    bool convex = false;    // second differences >= -1e-10
    bool bounds_ok = false; // t inf psi <= E(t) <= t sup psi (t > 0), reversed for t < 0
    Real psi_inf = 0;
    Real psi_sup = 0;
    std::vector<std::string> notes;

    Real mean() const;  // E'(0)
    Real value(Real t) const;
    Real slope(Real t) const;
    Real curvature(Real t) const;

    // Spline built from e on the t grid (absent for affine curves).
    struct Spline;
    std::shared_ptr<const Spline> spline;
};

struct FreeEnergyOptions {
    std::optional<Real> t0;
    int n_t = 41;
    HypothesisAux aux;  // used for the automatic radius
};

// Largest t0 in {0.4^k : k = 0..30} such that phi +- t0 psi pass the checker.
Real admissible_radius(const BranchMap& map, const Potential& phi, const Potential& psi, const HypothesisAux& aux);

FreeEnergyCurve free_energy(const BranchMap& map, const Potential& phi, const Potential& psi,
                            const Discretization& disc, const FreeEnergyOptions& opts = {});

struct RateFunction {
    std::vector<Real> s;
    std::vector<Real> values;
    Real argmin = 0;  // m = E'(0)
    Real at_argmin = 0;
    bool convex = false;
    bool nonnegative = false;
};

// I(s) = sup_{|t| <= t0} (s t - E(t)) by ternary search on the spline.
Real legendre(const FreeEnergyCurve& curve, Real s);
RateFunction rate_function(const FreeEnergyCurve& curve, int n_s = 41);
// inf of I over [a, b] (I convex with minimum at m).
Real rate_infimum(const FreeEnergyCurve& curve, Real a, Real b);

// ---------------------------------------------------------------------------

struct DeviationRow {
    int n = 0;
    std::int64_t hits = 0;
    std::int64_t samples = 0;
    std::optional<Real> rate;  // (1/n) log(hits / samples); absent on zero hits
    Real ci_low = 0;
    Real ci_high = 0;
    Real ci_half_width = 0;
    std::string display;  // "-inf (0 hits / N)" on zero hits
};

struct DeviationExperiment {
    Real a = 0;
    Real b = 0;
    std::uint64_t seed = 0;
    std::int64_t samples = 0;
    int batches = 0;
    Real predicted_upper = 0;  // -inf_[a,b] I
    Real predicted_lower = 0;  // -inf_(a,b) I
    std::vector<DeviationRow> rows;
};

struct LdpOptions {
    Real a = 0;
    Real b = 0;
    std::vector<int> n_list;
    std::int64_t samples = 1000000;
    int batches = 20;
    std::uint64_t seed = 0;
    bool parallel = true;
};

// Initial points drawn from the discretized mu by inverse CDF, orbits iterated
// with the exact map.
DeviationExperiment ldp_monte_carlo(const BranchMap& map, const Solution& sol, const Potential& psi,
                                    const FreeEnergyCurve& curve, const LdpOptions& opts);

struct RateScan {
    std::vector<Real> v;
    std::vector<Real> s;  // common interval J
    std::vector<std::vector<Real>> table;  // table[v][s]
    std::vector<Real> neighbor_sup;        // sup_s |I_{v_{k+1}} - I_{v_k}|
    Real max_neighbor_sup = 0;
};

RateScan rate_continuity_scan(const MapFamily& family, const Potential& phi, const Potential& psi,
                              std::span<const Real> v_grid, int n_s, const Discretization& disc,
                              const FreeEnergyOptions& opts);

}  // namespace ruelle
