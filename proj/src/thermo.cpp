#include "ruelle/thermo.hpp"

namespace ruelle {

Solution solve(const BranchMap& map, const Potential& pot, const Discretization& disc)
{
    if (disc.n < 2) fail(ErrorKind::config, "discretization.N too small");
    Solution s{build_operator(map, pot, disc.n, disc.scheme, disc.interpolation), {}};
    s.triple = leading_triple(s.op, disc.solver);
    s.triple.tau = gap_estimate(s.op, s.triple, &s.triple.warnings);
    return s;
}

Real pressure(const BranchMap& map, const Potential& pot, const Discretization& disc)
{
    auto op = build_operator(map, pot, disc.n, disc.scheme, disc.interpolation);
    return std::log(leading_triple(op, disc.solver).lambda);
}

Real pressure_oracle_tree(const BranchMap& map, const Potential& pot, Real x0, int n)
{
    const Real v = apply_transfer_tree(map, pot, [](Real) { return Real(1); }, x0, n);
    return std::log(v) / n;
}

PeriodicOracle pressure_oracle_periodic(const BranchMap& map, const Potential& pot, int n)
{
    auto pts = parallel::periodic_points(map, pot, n);
    PeriodicOracle out;
    std::vector<PeriodicPoint> ok;
    ok.reserve(pts.size());
    for (const auto& p : pts) {
        if (p.converged)
            ok.push_back(p);
        else
            ++out.skipped;
    }
    if (ok.empty()) fail(ErrorKind::solver, "no periodic point converged");
    std::sort(ok.begin(), ok.end(), [](const PeriodicPoint& a, const PeriodicPoint& b) {
        return a.x < b.x || (a.x == b.x && a.weight < b.weight);
    });
    std::vector<Real> xs, weights;
    for (const auto& p : ok) {
        if (!xs.empty() && circle_distance(p.x, xs.back()) <= 1e-10L) continue;
        xs.push_back(p.x);
        weights.push_back(p.weight);
    }
    // the seam: a point just below 1 duplicating one at 0
    if (xs.size() > 1 && circle_distance(xs.back(), xs.front()) <= 1e-10L) weights.pop_back();
    const Real top = *std::max_element(weights.begin(), weights.end());
    Real acc = 0;
    for (Real w : weights) acc += std::exp(w - top);
    out.points = static_cast<std::int64_t>(weights.size());
    out.value = (top + std::log(acc)) / n;
    return out;
}

std::vector<Real> equilibrium_weights(const SpectralTriple& t)
{
    std::vector<Real> mu(t.nu.size());
    Real s = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        mu[i] = t.h[static_cast<int>(i)] * t.nu[i];
        s += mu[i];
    }
    for (auto& v : mu) v /= s;
    return mu;
}

ThermoReport thermo_report(const BranchMap& map, const Potential& pot, const Solution& sol)
{
    ThermoReport r;
    const auto& t = sol.triple;
    r.lambda = t.lambda;
    r.pressure = std::log(t.lambda);
    r.equilibrium = equilibrium_weights(t);
    r.grid = sol.op.grid;
    r.scheme = sol.op.scheme;
    r.interpolation = sol.op.interpolation;
    r.tau = t.tau.value_or(1);
    r.iterations = t.iterations;
    r.right_residual = t.right_residual;
    r.left_residual = t.left_residual;
    r.dropped_pieces = sol.op.dropped_pieces;
    r.warnings = t.warnings;
    Real phi_mean = 0, lyap = 0;
    for (int i = 0; i < r.grid.n; ++i) {
        const Real x = r.grid.node(i);
        phi_mean += r.equilibrium[i] * pot(x);
        lyap += r.equilibrium[i] * std::log(map.derivative(x));
    }
    r.entropy = r.pressure - phi_mean;
    r.lyapunov = lyap;
    if (pot.is_geometric()) r.dimension = r.entropy / r.lyapunov;
    if (r.dropped_pieces > 0) r.warnings.push_back("ulam assembly dropped degenerate intersections");
    return r;
}

ThermoReport equilibrium_state(const BranchMap& map, const Potential& pot, const Discretization& disc)
{
    return thermo_report(map, pot, solve(map, pot, disc));
}

std::vector<ScanRow> bifurcation_scan(const MapFamily& family, const Potential& pot, std::span<const Real> values,
                                      const Discretization& disc)
{
    std::vector<ScanRow> rows;
    rows.reserve(values.size());
    for (Real v : values) {
        const BranchMap map = family.at(v);
        const Potential phi = pot.rebound(map);
        const auto rep = equilibrium_state(map, phi, disc);
        rows.push_back({v, rep.pressure, rep.entropy, rep.lyapunov, rep.dimension});
    }
    return rows;
}

}  // namespace ruelle
