#include "ruelle/response.hpp"

#include <sstream>

namespace ruelle {

ResponseReport make_report(Real analytic, Real fd, Real step)
{
    ResponseReport r;
    r.analytic_value = analytic;
    r.fd_value = fd;
    r.fd_step = step;
    r.abs_error = std::fabs(analytic - fd);
    r.rel_error = r.abs_error / std::max<Real>(1, std::fabs(fd));
    return r;
}

ResponseReport make_report(std::span<const Real> analytic, std::span<const Real> fd, Real step)
{
    Real diff = 0, top = 0, a_top = 0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
        diff = std::max(diff, std::fabs(analytic[i] - fd[i]));
        top = std::max(top, std::fabs(fd[i]));
        a_top = std::max(a_top, std::fabs(analytic[i]));
    }
    ResponseReport r;
    r.analytic_value = a_top;
    r.fd_value = top;
    r.fd_step = step;
    r.abs_error = diff;
    r.rel_error = diff / std::max<Real>(1, top);
    r.notes.push_back("grid quantity: values are sup norms, abs_error is the sup-norm difference");
    return r;
}

Discretization fd_discretization(Discretization disc)
{
    disc.solver.tol = std::max<Real>(kMinTolerance, 1e-17L);
    return disc;
}

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

}  // namespace

// ---------------------------------------------------------------------------

PotentialResponse::PotentialResponse(const BranchMap& map, const Potential& phi0, const Discretization& disc,
                                     ResolventMethod method)
    : map_(map), phi_(phi0), disc_(disc), method_(method), sol_(ruelle::solve(map, phi0, disc))
{
    resolvent_ = std::make_unique<Resolvent>(sol_.op, sol_.triple);
    const auto& t = sol_.triple;
    std::vector<Real> v(sol_.op.size());
    for (int i = 0; i < sol_.op.size(); ++i) v[i] = 1 - t.h[i];
    r_one_ = solve(project_zero_mean(t, v));
}

std::vector<Real> PotentialResponse::solve(std::span<const Real> v) const
{
    return resolvent_->solve(v, method_);
}

PotentialResponse::Direction PotentialResponse::direction(const Potential& H) const
{
    const auto& t = sol_.triple;
    Direction dir;
    dir.dm = assemble_like(sol_.op, map_, [&](Real y, int k) { return std::exp(phi_.on_branch(y, k)) * H.on_branch(y, k); });
    dir.dm_t_nu = apply_adjoint(dir.dm, t.nu);
    for (auto& x : dir.dm_t_nu) x /= t.lambda;
    dir.d_lambda = t.lambda * integrate(dir.dm_t_nu, t.h.values());
    dir.kappa = integrate(dir.dm_t_nu, r_one_);
    return dir;
}

std::vector<Real> PotentialResponse::density(const Direction& dir) const
{
    const auto& t = sol_.triple;
    const int n = sol_.op.size();
    const Real mu_h = dir.d_lambda / t.lambda;
    auto rhs = apply_operator(dir.dm, t.h.values());
    for (int i = 0; i < n; ++i) rhs[i] = rhs[i] / t.lambda - mu_h * t.h[i];
    auto out = solve(project_zero_mean(t, rhs));
    for (int i = 0; i < n; ++i) out[i] += dir.kappa * t.h[i];
    return out;
}

Real PotentialResponse::conformal(const Direction& dir, std::span<const Real> g) const
{
    const auto& t = sol_.triple;
    const Real nu_g = integrate(t.nu, g);
    std::vector<Real> v(g.begin(), g.end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= nu_g * t.h[static_cast<int>(i)];
    const auto u = solve(project_zero_mean(t, v));
    return integrate(dir.dm_t_nu, u) - nu_g * dir.kappa;
}

Real PotentialResponse::d_lambda(const Potential& H) const { return direction(H).d_lambda; }

Real PotentialResponse::d_pressure(const Potential& H) const { return direction(H).d_lambda / sol_.triple.lambda; }

GridFunction PotentialResponse::d_density(const Potential& H) const { return sol_.op.function(density(direction(H))); }

Real PotentialResponse::d_conformal(const Potential& g, const Potential& H) const
{
    return conformal(direction(H), on_nodes(sol_.op.grid, g));
}

Real PotentialResponse::d_equilibrium(const Potential& g, const Potential& H) const
{
    const auto& t = sol_.triple;
    const auto dir = direction(H);
    auto gv = on_nodes(sol_.op.grid, g);
    const auto dh = density(dir);
    Real second = 0;
    for (std::size_t i = 0; i < gv.size(); ++i) second += t.nu[i] * gv[i] * dh[i];
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] *= t.h[static_cast<int>(i)];
    return conformal(dir, gv) + second;
}

Real d_lambda_d_potential(const BranchMap& map, const Potential& phi0, const Potential& H, const Discretization& disc)
{
    return PotentialResponse(map, phi0, disc).d_lambda(H);
}

Real d_pressure_d_potential(const BranchMap& map, const Potential& phi0, const Potential& H, const Discretization& disc)
{
    return PotentialResponse(map, phi0, disc).d_pressure(H);
}

GridFunction d_density_d_potential(const BranchMap& map, const Potential& phi0, const Potential& H,
                                   const Discretization& disc)
{
    return PotentialResponse(map, phi0, disc).d_density(H);
}

Real d_conformal_expectation(const BranchMap& map, const Potential& phi0, const Potential& g, const Potential& H,
                             const Discretization& disc)
{
    return PotentialResponse(map, phi0, disc).d_conformal(g, H);
}

Real d_equilibrium_expectation(const BranchMap& map, const Potential& phi0, const Potential& g, const Potential& H,
                               const Discretization& disc)
{
    return PotentialResponse(map, phi0, disc).d_equilibrium(g, H);
}

std::string to_string(PotentialQuantity q)
{
    switch (q) {
    case PotentialQuantity::lambda: return "lambda";
    case PotentialQuantity::pressure: return "pressure";
    case PotentialQuantity::density: return "density";
    case PotentialQuantity::conformal: return "conformal";
    case PotentialQuantity::equilibrium: return "equilibrium";
    }
    return "?";
}

PotentialQuantity potential_quantity(const std::string& name)
{
    for (auto q : {PotentialQuantity::lambda, PotentialQuantity::pressure, PotentialQuantity::density,
                   PotentialQuantity::conformal, PotentialQuantity::equilibrium})
        if (to_string(q) == name) return q;
    fail(ErrorKind::config, "unknown response quantity '" + name + "'");
}

ResponseReport validate_potential_response(const PotentialResponse& response, PotentialQuantity q,
                                           const Potential& g, const Potential& H, Real step)
{
    if (!(step > 0)) fail(ErrorKind::config, "finite-difference step must be positive");
    const auto& grid = response.base().op.grid;
    const auto gv = on_nodes(grid, g);
    auto measure = [&](const Potential& phi) {
        const auto s = solve(response.map(), phi, response.discretization());
        const auto& t = s.triple;
        switch (q) {
        case PotentialQuantity::lambda: return std::vector<Real>{t.lambda};
        case PotentialQuantity::pressure: return std::vector<Real>{std::log(t.lambda)};
        case PotentialQuantity::density: return std::vector<Real>(t.h.values().begin(), t.h.values().end());
        case PotentialQuantity::conformal: return std::vector<Real>{integrate(t.nu, gv)};
        case PotentialQuantity::equilibrium: return std::vector<Real>{integrate(equilibrium_weights(t), gv)};
        }
        return std::vector<Real>{};
    };
    const auto plus = measure(response.potential() + step * H);
    const auto minus = measure(response.potential() - step * H);
    std::vector<Real> fd(plus.size());
    for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (plus[i] - minus[i]) / (2 * step);

    ResponseReport r;
    switch (q) {
    case PotentialQuantity::lambda: r = make_report(response.d_lambda(H), fd[0], step); break;
    case PotentialQuantity::pressure: r = make_report(response.d_pressure(H), fd[0], step); break;
    case PotentialQuantity::density: {
        const auto dh = response.d_density(H);
        r = make_report(dh.values(), fd, step);
        break;
    }
    case PotentialQuantity::conformal: r = make_report(response.d_conformal(g, H), fd[0], step); break;
    case PotentialQuantity::equilibrium: r = make_report(response.d_equilibrium(g, H), fd[0], step); break;
    }
    r.series_terms_used = response.series_terms();
    if (r.series_terms_used > 0) r.truncation_tail_bound = 1e-15L;
    return r;
}

// ---------------------------------------------------------------------------

VectorField family_direction(const BranchMap& map)
{
    return [&map](Real y, int k) { return map.lift_dparam(k, y); };
}

VectorField field_of(const Potential& H)
{
    return [H](Real y, int) { return H(wrap(y)); };
}

Real preimage_velocity(const BranchMap& map, const VectorField& H, Real y, int k)
{
    return -H(y, k) / map.lift_d1(k, y);
}

namespace {

void require_smooth(const Potential& p, const char* what)
{
    if (p.smoothness_order() < 1) fail(ErrorKind::precondition, std::string(what) + " must be at least C^1");
}

struct Jet {
    Real value = 0;
    Real slope = 0;
};

// (L^m g)(x) and its x-derivative on the exact preimage tree.
Jet transfer_jet(const BranchMap& map, const Potential& pot, const Potential& g, Real x, int m)
{
    if (m == 0) return {g(x), g.derivative(x)};
    Jet out;
    for (int k = 0; k < map.degree(); ++k) {
        const Real y = map.preimage_lift(x, k);
        const Real w = std::exp(pot.on_branch(y, k));
        const Jet in = transfer_jet(map, pot, g, wrap(y), m - 1);
        out.value += w * in.value;
        out.slope += w * (pot.derivative_on_branch(y, k) * in.value + in.slope) / map.lift_d1(k, y);
    }
    return out;
}

// sum_k e^phi(y_k) [phi'(y_k) u(y_k) + u'(y_k)] (T_k H)(x), u given as a jet.
template <class U>
Real d_transfer_of(const BranchMap& map, const Potential& pot, const VectorField& H, Real x, U&& u)
{
    Real acc = 0;
    for (int k = 0; k < map.degree(); ++k) {
        const Real y = map.preimage_lift(wrap(x), k);
        const Jet j = u(wrap(y));
        acc += std::exp(pot.on_branch(y, k)) * (pot.derivative_on_branch(y, k) * j.value + j.slope) *
               preimage_velocity(map, H, y, k);
    }
    return acc;
}

}  // namespace

Real d_transfer_d_dynamics(const BranchMap& map, const Potential& pot, const Potential& g, const VectorField& H,
                           Real x)
{
    require_smooth(g, "observable");
    require_smooth(pot, "potential");
    return d_transfer_of(map, pot, H, x, [&](Real y) { return Jet{g(y), g.derivative(y)}; });
}

Real d_transfer_n_d_dynamics(const BranchMap& map, const Potential& pot, const Potential& g, const VectorField& H,
                             Real x, int n)
{
    require_smooth(g, "observable");
    require_smooth(pot, "potential");
    if (n < 1) fail(ErrorKind::precondition, "n must be >= 1");
    check_tree_guard(map.degree(), n);
    Real acc = 0;
    for (int i = 1; i <= n; ++i) {
        const int inner = n - i;
        const Observable q = [&, inner](Real z) {
            return d_transfer_of(map, pot, H, z, [&](Real y) { return transfer_jet(map, pot, g, y, inner); });
        };
        acc += i == 1 ? q(wrap(x)) : apply_transfer_tree(map, pot, q, x, i - 1);
    }
    return acc;
}

namespace {

void require_fixed_potential(const Potential& pot)
{
    if (pot.has_log_part())
        fail(ErrorKind::precondition,
             "dynamics derivatives need a potential independent of the map (drop the log f' term)");
    require_smooth(pot, "potential");
}

Real family_step(Real step)
{
    if (!(step > 0)) fail(ErrorKind::config, "finite-difference step must be positive");
    return step;
}

}  // namespace

ResponseReport d_pressure_d_dynamics(const MapFamily& family, const Potential& pot, Real s0,
                                     const Discretization& disc, Real step)
{
    require_fixed_potential(pot);
    family_step(step);
    const Discretization fd_disc = fd_discretization(disc);
    const BranchMap map = family.at(s0);
    const auto sol = solve(map, pot, fd_disc);
    const auto& t = sol.triple;
    const auto H = family_direction(map);
    const Grid& grid = sol.op.grid;
    std::vector<Real> row(grid.n);
    parallel::for_rows(grid.n, [&](int i) {
        row[i] = d_transfer_of(map, pot, H, grid.node(i), [&](Real y) { return Jet{t.h(y), t.h.derivative(y)}; });
    });
    const Real analytic = integrate(t.nu, row) / t.lambda;

    Real fd = 0;
    if (!family.parameter.empty()) {
        const Real p_plus = pressure(family.at(s0 + step), pot, fd_disc);
        const Real p_minus = pressure(family.at(s0 - step), pot, fd_disc);
        fd = (p_plus - p_minus) / (2 * step);
    }
    auto r = make_report(analytic, fd, step);
    if (family.parameter.empty()) r.notes.push_back("family has no parameter: the map does not move");
    r.notes.push_back(std::string("eigenfunction derivative from the ") +
                      (grid.offset == 0 && sol.op.interpolation == Interpolation::fourier ? "Fourier interpolant"
                                                                                           : "centered node differences"));
    return r;
}

ResponseReport d_maxentropy_expectation(const MapFamily& family, const Potential& g, Real s0,
                                        const Discretization& disc, Real step, Real tol)
{
    require_smooth(g, "observable");
    family_step(step);
    const Discretization fd_disc = fd_discretization(disc);
    const Potential zero = Potential::constant(0);
    const BranchMap map = family.at(s0);
    const auto sol = solve(map, zero, fd_disc);
    const auto& t = sol.triple;
    const Real tau = *t.tau;
    if (tau >= 1 - 1e-6L) fail(ErrorKind::solver, "spectral gap too small for the maximal-entropy series");
    const auto H = family_direction(map);
    const Grid& grid = sol.op.grid;
    const auto mu = equilibrium_weights(t);

    const auto gv = on_nodes(grid, g);
    const Real g_norm = sup_norm(gv);
    auto term = project_zero_mean(t, gv);  // P0 g
    auto contribution = [&](const std::vector<Real>& u) {
        const GridFunction uf = sol.op.function(u);
        std::vector<Real> row(grid.n);
        parallel::for_rows(grid.n, [&](int i) {
            row[i] = d_transfer_of(map, zero, H, grid.node(i), [&](Real y) { return Jet{uf(y), uf.derivative(y)}; });
        });
        return integrate(mu, row) / t.lambda;
    };

    constexpr int kWarmup = 10;
    constexpr int kMaxTerms = 10000;
    Real sum = 0;
    Real c_tilde = 0;
    int terms = 0;
    int limit = kMaxTerms;
    std::optional<Real> tail;
    for (int i = 0; i <= limit; ++i) {
        const Real norm = sup_norm(term);
        if (i < kWarmup && g_norm > 0) {
            if (tau > 1e-12L) c_tilde = std::max(c_tilde, norm / (std::pow(tau, static_cast<Real>(i)) * g_norm));
        }
        if (i == kWarmup - 1 || (norm == 0 && i < kWarmup)) {
            if (tau > 1e-12L && c_tilde > 0) {
                const Real k = std::ceil(std::log(tol * (1 - tau) / (c_tilde * g_norm)) / std::log(tau));
                if (!(k <= kMaxTerms)) {
                    std::ostringstream msg;
                    msg << "maximal-entropy series needs more than " << kMaxTerms << " terms (tau = "
                        << static_cast<double>(tau) << "): gap too small";
                    fail(ErrorKind::solver, msg.str());
                }
                limit = std::max(i, static_cast<int>(k));
                tail = c_tilde * g_norm * std::pow(tau, static_cast<Real>(limit + 1)) / (1 - tau);
            } else {
                limit = i;
                tail = 0;
            }
        }
        sum += contribution(term);
        ++terms;
        if (i == limit) break;
        term = project_zero_mean(t, apply_normalized(sol.op, t, term));
    }

    Real fd = 0;
    if (!family.parameter.empty()) {
        auto expectation = [&](Real s) {
            const auto tr = solve(family.at(s), zero, fd_disc).triple;
            return integrate(equilibrium_weights(tr), on_nodes(grid, g));
        };
        fd = (expectation(s0 + step) - expectation(s0 - step)) / (2 * step);
    }
    auto r = make_report(sum, fd, step);
    r.series_terms_used = terms;
    r.truncation_tail_bound = tail;
    if (family.parameter.empty()) r.notes.push_back("family has no parameter: the map does not move");
    return r;
}

}  // namespace ruelle
