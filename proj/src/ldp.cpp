#include "ruelle/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <sstream>

namespace ruelle {

DeviationExperiment ldp_monte_carlo(const BranchMap& map, const Solution& sol, const Potential& psi,
                                    const FreeEnergyCurve& curve, const LdpOptions& opts)
{
    if (!(opts.a <= opts.b)) fail(ErrorKind::config, "ldp interval must satisfy a <= b");
    if (opts.samples < opts.batches || opts.batches < 2)
        fail(ErrorKind::config, "ldp needs at least 2 batches and one sample per batch");
    if (opts.n_list.empty()) fail(ErrorKind::config, "ldp.n_list is empty");

    DeviationExperiment ex;
    ex.a = opts.a;
    ex.b = opts.b;
    ex.seed = opts.seed;
    ex.samples = opts.samples;
    ex.batches = opts.batches;
    const Real inf_rate = rate_infimum(curve, opts.a, opts.b);
    ex.predicted_upper = -inf_rate;
    ex.predicted_lower = -inf_rate;  // I is continuous, so the open interval has the same infimum

    const auto mu = equilibrium_weights(sol.triple);
    std::vector<Real> cdf(mu.size());
    Real acc = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        acc += std::max<Real>(mu[i], 0);
        cdf[i] = acc;
    }
    HitCountRequest req;
    req.map = &map;
    req.psi = &psi;
    req.cdf = cdf;
    req.grid = sol.op.grid;
    req.n_list = opts.n_list;
    req.a = opts.a;
    req.b = opts.b;
    req.n_samples = opts.samples;
    req.batches = opts.batches;
    req.seed = opts.seed;
    const auto counts = opts.parallel ? parallel::hit_counts(req) : serial::hit_counts(req);

    // sample s belongs to batch floor(s B / N)
    std::vector<std::int64_t> batch_size(opts.batches, 0);
    for (int b = 0; b < opts.batches; ++b) {
        auto first = [&](int bb) { return (static_cast<std::int64_t>(bb) * opts.samples + opts.batches - 1) / opts.batches; };
        batch_size[b] = first(b + 1) - first(b);
    }
    const boost::math::students_t dist(opts.batches - 1);
    const Real q = static_cast<Real>(boost::math::quantile(boost::math::complement(dist, 0.025)));
    const std::size_t nn = opts.n_list.size();
    for (std::size_t j = 0; j < nn; ++j) {
        DeviationRow row;
        row.n = opts.n_list[j];
        row.samples = opts.samples;
        std::vector<Real> p(opts.batches);
        for (int b = 0; b < opts.batches; ++b) {
            const std::int64_t h = counts[b * nn + j];
            row.hits += h;
            p[b] = static_cast<Real>(h) / static_cast<Real>(batch_size[b]);
        }
        if (row.hits == 0) {
            row.display = "-inf (0 hits / " + std::to_string(opts.samples) + ")";
            ex.rows.push_back(row);
            continue;
        }
        const Real phat = static_cast<Real>(row.hits) / static_cast<Real>(opts.samples);
        Real mean = 0;
        for (Real v : p) mean += v;
        mean /= opts.batches;
        Real var = 0;
        for (Real v : p) var += (v - mean) * (v - mean);
        var /= opts.batches - 1;
        const Real se = std::sqrt(var / opts.batches);
        row.rate = std::log(phat) / row.n;
        // delta method on (1/n) log p
        row.ci_half_width = q * se / (phat * row.n);
        row.ci_low = *row.rate - row.ci_half_width;
        row.ci_high = *row.rate + row.ci_half_width;
        std::ostringstream s;
        s << static_cast<double>(*row.rate);
        row.display = s.str();
        ex.rows.push_back(row);
    }
    return ex;
}

RateScan rate_continuity_scan(const MapFamily& family, const Potential& phi, const Potential& psi,
                              std::span<const Real> v_grid, int n_s, const Discretization& disc,
                              const FreeEnergyOptions& opts)
{
    if (v_grid.size() < 2) fail(ErrorKind::config, "rate scan needs at least two parameter values");
    if (n_s < 2) fail(ErrorKind::config, "rate scan needs at least two s points");
    std::vector<FreeEnergyCurve> curves;
    curves.reserve(v_grid.size());
    Real lo = -std::numeric_limits<Real>::infinity(), hi = -lo;
    for (Real v : v_grid) {
        const BranchMap map = family.at(v);
        curves.push_back(free_energy(map, phi.rebound(map), psi.rebound(map), disc, opts));
        const auto& c = curves.back();
        if (!c.convex) fail(ErrorKind::precondition, "free-energy curve not convex in the scan");
        lo = std::max(lo, c.slope(-c.t0));
        hi = std::min(hi, c.slope(c.t0));
    }
    if (!(lo < hi)) fail(ErrorKind::precondition, "empty common rate-function interval across the scan");

    RateScan out;
    out.v.assign(v_grid.begin(), v_grid.end());
    out.s.resize(n_s);
    for (int j = 0; j < n_s; ++j) out.s[j] = lo + (hi - lo) * static_cast<Real>(j) / (n_s - 1);
    out.table.resize(curves.size());
    parallel::for_rows(static_cast<int>(curves.size()), [&](int k) {
        out.table[k].resize(n_s);
        for (int j = 0; j < n_s; ++j) out.table[k][j] = legendre(curves[k], out.s[j]);
    });
    for (std::size_t k = 0; k + 1 < curves.size(); ++k) {
        Real m = 0;
        for (int j = 0; j < n_s; ++j) m = std::max(m, std::fabs(out.table[k + 1][j] - out.table[k][j]));
        out.neighbor_sup.push_back(m);
        out.max_neighbor_sup = std::max(out.max_neighbor_sup, m);
    }
    return out;
}

}  // namespace ruelle
