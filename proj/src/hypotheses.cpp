#include "ruelle/maps.hpp"
#include "ruelle/potential.hpp"

namespace ruelle {

bool Arc::contains(Real x) const
{
    if (lo <= hi) return x >= lo && x <= hi;
    return x >= lo || x <= hi;
}

bool Arc::meets(Real c0, Real c1) const
{
    auto inside = [&](Real v) { return v >= c0 && v <= c1; };
    return contains(c0) || contains(c1) || inside(lo) || inside(hi);
}

Real vepp_expression(int d, int q, Real sigma, Real L, Real alpha, Real eps)
{
    const Real frac = ((d - q) * std::pow(sigma, -alpha) + q * std::pow(L, alpha) * (1 + std::pow(L - 1, alpha))) / d;
    return (1 + eps) * std::exp(eps) * frac;
}

Real vep_expression(int d, int q, Real sigma, Real L, Real alpha, Real eps, int m)
{
    const Real frac = ((d - q) * std::pow(sigma, -alpha) + q * std::pow(L, alpha) * (1 + std::pow(L - 1, alpha))) / d;
    return std::exp(eps) * frac + eps * 2 * m * std::pow(L, alpha) * std::pow(kCircleDiameter, alpha);
}

namespace {

bool in_region(const std::vector<Arc>& A, Real x)
{
    return std::any_of(A.begin(), A.end(), [&](const Arc& a) { return a.contains(x); });
}

bool meets_region(const std::vector<Arc>& A, Real c0, Real c1)
{
    if (c1 < c0) return meets_region(A, c0, 1) || meets_region(A, 0, c1);
    return std::any_of(A.begin(), A.end(), [&](const Arc& a) { return a.meets(c0, c1); });
}

}  // namespace

HypothesisReport check_hypotheses(const BranchMap& map, const Potential& pot, const HypothesisAux& aux)
{
    if (!(aux.delta > 0)) fail(ErrorKind::config, "hypotheses.delta must be positive");
    if (aux.q < 0) fail(ErrorKind::config, "hypotheses.q must be >= 0");
    HypothesisReport rep;
    const int d = map.degree();
    const int S = aux.samples_per_branch;
    rep.region_A = aux.region_A;
    rep.q = aux.q;
    rep.delta = aux.delta;
    rep.m = aux.m > 0 ? aux.m : static_cast<int>(std::ceil(1 / (2 * aux.delta) - 1e-12L));
    rep.alpha = pot.holder_exponent();
    rep.smoothness = pot.smoothness_order();

    Real sigma = std::numeric_limits<Real>::infinity();
    Real Lbig = 1;
    Real phi_min = std::numeric_limits<Real>::infinity();
    Real phi_max = -phi_min;
    Real lip = 0;
    Real dmax[3] = {0, 0, 0};

    for (int k = 0; k < d; ++k) {
        const Real a = map.breakpoint(k), b = map.breakpoint(k + 1);
        const Real h = (b - a) / S;
        // branch domains are half-open [a_k, a_{k+1})
        if (meets_region(aux.region_A, wrap(a), wrap(b - 1e-12L))) ++rep.branches_meeting_A;
        Real prev_y = a;
        Real prev_d1 = map.lift_d1(k, a);
        Real prev_d2 = std::fabs(map.lift_d2(k, a));
        for (int i = 1; i <= S; ++i) {
            const Real y = a + (b - a) * i / S;
            const Real mid = (prev_y + y) / 2;
            const Real d1 = map.lift_d1(k, y);
            const Real d2 = std::fabs(map.lift_d2(k, y));
            const Real dm = std::fabs(map.lift_d2(k, mid));
            Real lower = std::min(prev_d1, d1);
            const Real curv = std::max({prev_d2, d2, dm});
            if (std::isfinite(curv)) {
                lower -= curv * h / 2;
            } else {
                lower = std::min(lower, map.lift_d1(k, mid));
                ++rep.uncertified_cells;
            }
            const Real c0 = wrap(prev_y), c1 = wrap(y);
            const bool meets = meets_region(aux.region_A, c0, c1);
            const bool inside = in_region(aux.region_A, c0) && in_region(aux.region_A, c1) &&
                                in_region(aux.region_A, wrap(mid));
            if (!inside) sigma = std::min(sigma, lower);
            if (meets) Lbig = std::max(Lbig, lower > 0 ? 1 / lower : std::numeric_limits<Real>::infinity());
            prev_y = y;
            prev_d1 = d1;
            prev_d2 = d2;
        }
        for (int i = 0; i < S; ++i) {
            const Real y = a + (b - a) * i / S;
            const Real v = pot.on_branch(y, k);
            phi_min = std::min(phi_min, v);
            phi_max = std::max(phi_max, v);
            const Real dv = pot.derivative_on_branch(y, k);
            lip = std::max(lip, std::fabs(dv * std::exp(v)));
            dmax[1] = std::max(dmax[1], std::fabs(dv));
            if (rep.smoothness >= 2) dmax[2] = std::max(dmax[2], std::fabs(pot.second_derivative(wrap(y))));
        }
    }
    rep.sigma = sigma;
    rep.big_L = Lbig;
    rep.oscillation = phi_max - phi_min;

    if (rep.alpha >= 1) {
        rep.holder_ratio = lip / std::exp(phi_min);
    } else {
        constexpr int M = 1024;
        std::vector<Real> e(M);
        for (int i = 0; i < M; ++i) e[i] = std::exp(pot(Real(i) / M));
        Real best = 0;
        for (int i = 0; i < M; ++i)
            for (int j = i + 1; j < M; ++j) {
                const Real dist = std::min<Real>(j - i, M - (j - i)) / M;
                best = std::max(best, std::fabs(e[i] - e[j]) / std::pow(dist, rep.alpha));
            }
        rep.holder_ratio = best / std::exp(phi_min);
    }
    if (!std::isfinite(rep.holder_ratio)) rep.holder_ratio = std::numeric_limits<Real>::infinity();
    rep.eps_phi = std::max(rep.oscillation, rep.holder_ratio);

    const bool lfinite = std::isfinite(Lbig);
    rep.h1 = sigma > 1 && std::isfinite(sigma) && lfinite;
    rep.h2 = aux.q < d && rep.branches_meeting_A <= aux.q;
    if (rep.h1) {
        rep.vep_value = vep_expression(d, aux.q, sigma, Lbig, rep.alpha, rep.eps_phi, rep.m);
        rep.vepp_value = vepp_expression(d, aux.q, sigma, Lbig, rep.alpha, rep.eps_phi);
    } else {
        rep.vep_value = rep.vepp_value = std::numeric_limits<Real>::infinity();
    }
    rep.p = rep.vep_value < 1 && rep.vepp_value < 1;

    if (rep.smoothness >= 1) {
        Real e = rep.oscillation;
        for (int s = 1; s <= std::min(rep.smoothness, 2); ++s) e = std::max(e, dmax[s]);
        rep.eps_phi_prime = e;
        if (rep.h1) {
            rep.vep_prime_value = vep_expression(d, aux.q, sigma, Lbig, rep.alpha, e, rep.m);
            rep.vepp_prime_value = vepp_expression(d, aux.q, sigma, Lbig, rep.alpha, e);
        } else {
            rep.vep_prime_value = rep.vepp_prime_value = std::numeric_limits<Real>::infinity();
        }
        rep.p_prime = rep.vep_prime_value < 1 && rep.vepp_prime_value < 1;
    } else {
        rep.eps_phi_prime = std::numeric_limits<Real>::infinity();
        rep.vep_prime_value = rep.vepp_prime_value = std::numeric_limits<Real>::infinity();
    }
    return rep;
}

}  // namespace ruelle
