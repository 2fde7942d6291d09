#include "ruelle/stats.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <sstream>

namespace ruelle {

namespace {

std::vector<Real> on_nodes(const Grid& grid, const Potential& p)
{
    return sample(grid, [&](Real x) { return p(x); });
}

Real sup_norm(std::span<const Real> v)
{
    Real m = 0;
    for (Real x : v) m = std::max(m, std::fabs(x));
    return m;
}

// nu(a .) against L~^n(h (b - mu(b))), n = 0..n_max
std::vector<Real> covariance_sequence(const Solution& sol, std::span<const Real> a, std::span<const Real> b,
                                      int n_max)
{
    const auto& t = sol.triple;
    const auto mu = equilibrium_weights(t);
    const Real mean_b = integrate(mu, b);
    std::vector<Real> v(b.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = t.h[static_cast<int>(i)] * (b[i] - mean_b);
    std::vector<Real> out;
    out.reserve(n_max + 1);
    std::vector<Real> w(a.size());
    for (int n = 0; n <= n_max; ++n) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = a[i] * v[i];
        out.push_back(integrate(t.nu, w));
        if (n < n_max) v = project_zero_mean(t, apply_normalized(sol.op, t, v));
    }
    return out;
}

}  // namespace

void fit_decay(CorrelationSeries& series, Real floor)
{
    std::vector<Real> xs, ys;
    for (std::size_t n = 0; n < series.values.size(); ++n) {
        const Real c = std::fabs(series.values[n]);
        if (c > floor) {
            xs.push_back(static_cast<Real>(n));
            ys.push_back(std::log(c));
        }
    }
    series.fit_points = static_cast<int>(xs.size());
    series.tau_fit.reset();
    if (xs.size() < 2) {
        series.notes.push_back("fewer than two correlations above the noise floor; no decay rate fitted");
        return;
    }
    const Real k = static_cast<Real>(xs.size());
    Real sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const Real mx = sx / k, my = sy / k;
    Real sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const Real slope = sxy / sxx;
    Real rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Real r = ys[i] - (my + slope * (xs[i] - mx));
        rss += r * r;
    }
    series.tau_fit = std::exp(slope);
    series.fit_residual = std::sqrt(rss / k);
}

CorrelationSeries correlation(const Solution& sol, const Potential& a, const Potential& b, int n_max)
{
    if (n_max < 0) fail(ErrorKind::config, "n_max must be >= 0");
    const Grid& grid = sol.op.grid;
    CorrelationSeries out;
    out.values = covariance_sequence(sol, on_nodes(grid, a), on_nodes(grid, b), n_max);
    fit_decay(out);
    return out;
}

CorrelationSeries correlation(const BranchMap& map, const Potential& pot, const Potential& a, const Potential& b,
                              int n_max, const Discretization& disc)
{
    return correlation(solve(map, pot, disc), a, b, n_max);
}

CorrelationDerivative d_correlation_d_dynamics(const MapFamily& family, const Potential& a, const Potential& b,
                                               int n_max, Real s0, const Discretization& disc, Real step)
{
    if (!(step > 0)) fail(ErrorKind::config, "finite-difference step must be positive");
    const Discretization fd_disc = fd_discretization(disc);
    const Potential zero = Potential::constant(0);
    CorrelationDerivative out;
    out.s0 = s0;
    out.step = step;
    out.values.assign(n_max + 1, 0);
    if (family.parameter.empty()) return out;
    const auto plus = correlation(family.at(s0 + step), zero, a, b, n_max, fd_disc).values;
    const auto minus = correlation(family.at(s0 - step), zero, a, b, n_max, fd_disc).values;
    for (int n = 0; n <= n_max; ++n) out.values[n] = (plus[n] - minus[n]) / (2 * step);
    for (int n = n_max - n_max / 4; n <= n_max; ++n) out.max_tail = std::max(out.max_tail, std::fabs(out.values[n]));
    return out;
}

CltParameters clt_parameters(const Solution& sol, const Potential& psi, Real tol)
{
    const auto& t = sol.triple;
    const Grid& grid = sol.op.grid;
    const auto mu = equilibrium_weights(t);
    auto p = on_nodes(grid, psi);
    CltParameters out;
    out.mean = integrate(mu, p);
    for (auto& x : p) x -= out.mean;
    const Real p_norm = sup_norm(p);
    const Real tau = t.tau.value_or(1);

    std::vector<Real> v(p.size()), w(p.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = t.h[static_cast<int>(i)] * p[i];
    v = project_zero_mean(t, v);
    constexpr int kMaxTerms = 100000;
    const bool summable = tau < 1 - 1e-6L;
    const Real threshold = tol * (summable ? 1 - tau : 1);
    Real sum = 0;
    int n = 0;
    for (; n < kMaxTerms; ++n) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = p[i] * v[i];
        const Real c = integrate(t.nu, w);
        sum += n == 0 ? c : 2 * c;
        v = project_zero_mean(t, apply_normalized(sol.op, t, v));
        if (sup_norm(v) * p_norm < threshold) {
            ++n;
            break;
        }
    }
    out.terms = n;
    if (summable) {
        out.tail_bound = 2 * p_norm * sup_norm(v) / (1 - tau);
    } else {
        out.notes.push_back("spectral gap too small for a certified truncation; partial sum reported");
    }
    if (n == kMaxTerms) out.notes.push_back("series truncated at the term cap before reaching tolerance");
    out.raw_variance = sum;
    out.coboundary = sum < kCoboundaryThreshold;
    out.variance = out.coboundary ? 0 : sum;
    if (out.coboundary) out.notes.push_back("variance below 1e-8: psi treated as cohomologous to a constant");
    return out;
}

CltParameters clt_parameters(const BranchMap& map, const Potential& pot, const Potential& psi,
                             const Discretization& disc, Real tol)
{
    return clt_parameters(solve(map, pot, disc), psi, tol);
}

// ---------------------------------------------------------------------------

struct FreeEnergyCurve::Spline {
    boost::math::interpolators::cardinal_cubic_b_spline<Real> s;
};

Real FreeEnergyCurve::value(Real t) const
{
    if (affine) return t * affine_slope;
    // Exact samples on the grid (in particular E(0) = 0).
    const auto k = std::llround(static_cast<double>((t - this->t.front()) / (this->t[1] - this->t.front())));
    if (k >= 0 && k < static_cast<long long>(e.size()) && this->t[k] == t) return e[k];
    return spline->s(t);
}
Real FreeEnergyCurve::slope(Real t) const { return affine ? affine_slope : spline->s.prime(t); }
Real FreeEnergyCurve::curvature(Real t) const { return affine ? 0 : spline->s.double_prime(t); }
Real FreeEnergyCurve::mean() const { return slope(0); }

Real admissible_radius(const BranchMap& map, const Potential& phi, const Potential& psi, const HypothesisAux& aux)
{
    HypothesisReport last;
    for (int k = 0; k <= 30; ++k) {
        const Real t = std::pow(0.4L, static_cast<Real>(k));
        const auto plus = check_hypotheses(map, phi + t * psi, aux);
        if (!plus.passes()) {
            last = plus;
            continue;
        }
        const auto minus = check_hypotheses(map, phi - t * psi, aux);
        if (minus.passes()) return t;
        last = minus;
    }
    std::ostringstream msg;
    msg << "no admissible t0 in {0.4^k}: constants inequality fails (vep = " << static_cast<double>(last.vep_value)
        << ", vepp = " << static_cast<double>(last.vepp_value) << ", H1 " << (last.h1 ? "ok" : "fails") << ", H2 "
        << (last.h2 ? "ok" : "fails") << ")";
    fail(ErrorKind::hypotheses, msg.str());
}

FreeEnergyCurve free_energy(const BranchMap& map, const Potential& phi, const Potential& psi,
                            const Discretization& disc, const FreeEnergyOptions& opts)
{
    if (opts.n_t < 5 || opts.n_t % 2 == 0) fail(ErrorKind::config, "free_energy.n_t must be odd and >= 5");
    FreeEnergyCurve c;
    if (opts.t0) {
        if (!(*opts.t0 > 0)) fail(ErrorKind::config, "free_energy.t0 must be positive");
        c.t0 = *opts.t0;
    } else {
        c.t0 = admissible_radius(map, phi, psi, opts.aux);
        c.t0_automatic = true;
    }
    const int n = opts.n_t;
    c.t.resize(n);
    c.e.assign(n, 0);
    for (int k = 0; k < n; ++k) c.t[k] = c.t0 * static_cast<Real>(2 * k - (n - 1)) / (n - 1);

    Real lo = std::numeric_limits<Real>::infinity(), hi = -lo;
    for (int i = 0; i < 4096; ++i) {
        const Real v = psi(static_cast<Real>(i) / 4096);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    c.psi_inf = lo;
    c.psi_sup = hi;

    if (psi.is_constant()) {
        c.affine = true;
        c.affine_slope = psi.constant_part();
        for (int k = 0; k < n; ++k) c.e[k] = c.t[k] * c.affine_slope;
        c.e[(n - 1) / 2] = 0;
        c.notes.push_back("psi constant: E(t) = t c (pressure shift identity)");
    } else {
        const Real p0 = pressure(map, phi, disc);
        for (int k = 0; k < n; ++k) {
            if (k == (n - 1) / 2) continue;
            c.e[k] = pressure(map, phi + c.t[k] * psi, disc) - p0;
        }
        const Real dt = c.t[1] - c.t[0];
        // Fourth-order one-sided slopes at the ends; the spline's own endpoint
        // estimate spoils E'' at +-t0.
        const Real left = (-25 * c.e[0] + 48 * c.e[1] - 36 * c.e[2] + 16 * c.e[3] - 3 * c.e[4]) / (12 * dt);
        const Real right =
            (25 * c.e[n - 1] - 48 * c.e[n - 2] + 36 * c.e[n - 3] - 16 * c.e[n - 4] + 3 * c.e[n - 5]) / (12 * dt);
        c.spline = std::make_shared<const FreeEnergyCurve::Spline>(FreeEnergyCurve::Spline{
            boost::math::interpolators::cardinal_cubic_b_spline<Real>(c.e.begin(), c.e.end(), c.t[0], dt, left, right)});
    }

    c.convex = true;
    for (int k = 1; k + 1 < n; ++k)
        if (c.e[k - 1] - 2 * c.e[k] + c.e[k + 1] < -1e-10L) c.convex = false;
    c.bounds_ok = true;
    constexpr Real slack = 1e-10L;
    for (int k = 0; k < n; ++k) {
        const Real t = c.t[k];
        const Real a = t >= 0 ? t * lo : t * hi;
        const Real b = t >= 0 ? t * hi : t * lo;
        if (c.e[k] < a - slack || c.e[k] > b + slack) c.bounds_ok = false;
    }
    c.de.resize(n);
    c.d2e.resize(n);
    for (int k = 0; k < n; ++k) {
        c.de[k] = c.slope(c.t[k]);
        c.d2e[k] = c.curvature(c.t[k]);
    }
    return c;
}

Real legendre(const FreeEnergyCurve& curve, Real s)
{
    if (curve.affine) {
        const Real r = (s - curve.affine_slope) * (s >= curve.affine_slope ? curve.t0 : -curve.t0);
        return std::max<Real>(r, 0);
    }
    auto objective = [&](Real t) { return s * t - curve.value(t); };
    Real lo = -curve.t0, hi = curve.t0;
    for (int it = 0; it < 200 && hi - lo > 1e-15L; ++it) {
        const Real m1 = lo + (hi - lo) / 3;
        const Real m2 = hi - (hi - lo) / 3;
        if (objective(m1) < objective(m2))
            lo = m1;
        else
            hi = m2;
    }
    // t = 0 is always admissible and gives 0
    return std::max<Real>(objective((lo + hi) / 2), 0);
}

RateFunction rate_function(const FreeEnergyCurve& curve, int n_s)
{
    if (!curve.convex) fail(ErrorKind::precondition, "free-energy curve is not convex; Legendre transform refused");
    if (n_s < 3) fail(ErrorKind::config, "rate function needs at least 3 points");
    RateFunction r;
    r.argmin = curve.mean();
    if (curve.affine) {
        r.s = {curve.affine_slope};
        r.values = {0};
    } else {
        const Real a = curve.slope(-curve.t0), b = curve.slope(curve.t0);
        r.s.resize(n_s);
        r.values.resize(n_s);
        for (int j = 0; j < n_s; ++j) {
            r.s[j] = a + (b - a) * static_cast<Real>(j) / (n_s - 1);
            r.values[j] = legendre(curve, r.s[j]);
        }
    }
    r.at_argmin = legendre(curve, r.argmin);
    r.nonnegative = std::all_of(r.values.begin(), r.values.end(), [](Real v) { return v >= 0; });
    r.convex = true;
    for (std::size_t j = 1; j + 1 < r.values.size(); ++j)
        if (r.values[j - 1] - 2 * r.values[j] + r.values[j + 1] < -1e-10L) r.convex = false;
    return r;
}

Real rate_infimum(const FreeEnergyCurve& curve, Real a, Real b)
{
    if (!(a <= b)) fail(ErrorKind::config, "interval must satisfy a <= b");
    const Real m = curve.mean();
    if (a <= m && m <= b) return 0;
    const Real lo = curve.slope(-curve.t0), hi = curve.slope(curve.t0);
    const Real s = m < a ? a : b;
    if (s < lo || s > hi) {
        std::ostringstream msg;
        msg << "interval endpoint " << static_cast<double>(s) << " lies outside the rate-function domain ["
            << static_cast<double>(lo) << ", " << static_cast<double>(hi) << "]; increase t0";
        fail(ErrorKind::precondition, msg.str());
    }
    return legendre(curve, s);
}

}  // namespace ruelle
