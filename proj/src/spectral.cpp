#include "ruelle/spectral.hpp"

#include <Eigen/Dense>
#include <sstream>

namespace ruelle {

Real integrate(std::span<const Real> weights, std::span<const Real> values)
{
    Real acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * values[i];
    return acc;
}

std::vector<Real> sample(const Grid& grid, const Observable& f)
{
    std::vector<Real> out(grid.n);
    for (int i = 0; i < grid.n; ++i) out[i] = f(grid.node(i));
    return out;
}

std::vector<Real> apply_normalized(const DiscretizedOperator& op, const SpectralTriple& t, std::span<const Real> v)
{
    auto out = apply_operator(op, v);
    for (auto& x : out) x /= t.lambda;
    return out;
}

std::vector<Real> project_zero_mean(const SpectralTriple& t, std::span<const Real> v)
{
    const Real m = integrate(t.nu, v);
    std::vector<Real> out(v.begin(), v.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= m * t.h[static_cast<int>(i)];
    return out;
}

namespace {

Real sup_norm(std::span<const Real> v)
{
    Real m = 0;
    for (Real x : v) m = std::max(m, std::fabs(x));
    return m;
}

Real sum(std::span<const Real> v)
{
    Real s = 0;
    for (Real x : v) s += x;
    return s;
}

// Power iteration on v -> M v (or v^T M); returns the normalized vector.
std::vector<Real> power(const DiscretizedOperator& op, std::vector<Real> v, bool transpose, const SolverOptions& opts,
                        int& iterations)
{
    Real lam_prev = 0;
    Real last_change = 0;
    for (int it = 1; it <= opts.max_iter; ++it) {
        auto w = transpose ? apply_adjoint(op, v) : apply_operator(op, v);
        const Real lam = sum(w) / sum(v);
        const Real s = sup_norm(w);
        if (!(s > 0) || !std::isfinite(s)) fail(ErrorKind::solver, "power iteration collapsed (zero or non-finite iterate)");
        Real change = 0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] /= s;
            change = std::max(change, std::fabs(w[i] - v[i]));
        }
        v.swap(w);
        last_change = change;
        if (it > 1 && std::fabs(lam - lam_prev) <= opts.tol * std::fabs(lam) && change <= opts.tol) {
            iterations = it;
            return v;
        }
        lam_prev = lam;
    }
    std::ostringstream msg;
    msg << "eigen-solver did not converge in " << opts.max_iter << " iterations (last change "
        << static_cast<double>(last_change) << ")";
    fail(ErrorKind::solver, msg.str());
}

// nu^T M h / nu^T h accumulated in quad precision: lambda feeds central
// differences whose rounding floor is ulp(lambda) / step.
Real rayleigh_quotient(const DiscretizedOperator& op, std::span<const Real> nu, std::span<const Real> h)
{
    __float128 num = 0, den = 0;
    for (int i = 0; i < op.size(); ++i) {
        __float128 row = 0;
        const auto r = op.matrix.row(i);
        for (int j = 0; j < op.size(); ++j) row += static_cast<__float128>(r[j]) * static_cast<__float128>(h[j]);
        num += static_cast<__float128>(nu[i]) * row;
        den += static_cast<__float128>(nu[i]) * static_cast<__float128>(h[i]);
    }
    return static_cast<Real>(num / den);
}

}  // namespace

SpectralTriple leading_triple(const DiscretizedOperator& op, const SolverOptions& opts)
{
    if (!(opts.tol >= kMinTolerance)) fail(ErrorKind::precondition, "eigen tolerance below the precision floor");
    if (opts.max_iter < 1) fail(ErrorKind::precondition, "max_iter must be positive");
    const int n = op.size();
    SpectralTriple t;
    int it_right = 0, it_left = 0;
    auto h = power(op, std::vector<Real>(n, 1), false, opts, it_right);
    auto nu = power(op, std::vector<Real>(n, Real(1) / n), true, opts, it_left);
    t.iterations = std::max(it_right, it_left);

    Real mass = sum(nu);
    for (auto& x : nu) x /= mass;
    Real negative = 0;
    for (Real x : nu)
        if (x < 0) negative -= x;
    if (negative > 0) {
        if (negative >= 1e-8L) {
            std::ostringstream msg;
            msg << "conformal weights carry negative mass " << static_cast<double>(negative)
                << "; discretization untrustworthy";
            fail(ErrorKind::solver, msg.str());
        }
        for (auto& x : nu) x = std::max<Real>(x, 0);
        mass = sum(nu);
        for (auto& x : nu) x /= mass;
        t.clipped_mass = negative;
        t.warnings.push_back("clipped negative conformal weights");
    }
    const Real norm = integrate(nu, h);
    for (auto& x : h) x /= norm;
    for (Real x : h)
        if (!(x > 0)) fail(ErrorKind::solver, "leading eigenfunction is not positive on the grid");

    const auto Mh = apply_operator(op, h);
    t.lambda = rayleigh_quotient(op, nu, h);
    const auto nuM = apply_adjoint(op, nu);
    Real rr = 0, rl = 0;
    for (int i = 0; i < n; ++i) {
        rr = std::max(rr, std::fabs(Mh[i] - t.lambda * h[i]));
        rl += std::fabs(nuM[i] - t.lambda * nu[i]);
    }
    t.right_residual = rr / t.lambda;
    t.left_residual = rl / t.lambda;
    t.nu = std::move(nu);
    t.h = op.function(std::move(h));
    return t;
}

Real gap_estimate(const DiscretizedOperator& op, const SpectralTriple& triple, std::vector<std::string>* warnings)
{
    const int n = op.size();
    std::vector<Real> v(n);
    for (int i = 0; i < n; ++i) {
        const Real x = op.grid.node(i);
        v[i] = std::sin(kTwoPi * 3 * x) + 0.5L * std::cos(kTwoPi * 5 * x) + 0.25L * std::sin(kTwoPi * x) +
               0.1L * static_cast<Real>((i * 7919) % 13) / 13;
    }
    v = project_zero_mean(triple, v);
    constexpr int kWindow = 50;
    constexpr int kMaxIter = 4000;
    std::vector<Real> logs;
    Real prev_est = -1;
    for (int it = 1; it <= kMaxIter; ++it) {
        const Real s0 = sup_norm(v);
        if (!(s0 > 0)) return 0;
        for (auto& x : v) x /= s0;
        v = project_zero_mean(triple, apply_normalized(op, triple, v));
        const Real r = sup_norm(v);
        // annihilated in one step: the deflated operator is numerically nilpotent
        if (r < 1e-12L) return r;
        logs.push_back(std::log(r));
        if (it >= kWindow && it % 10 == 0) {
            Real acc = 0;
            for (int k = it - kWindow; k < it; ++k) acc += logs[k];
            const Real est = std::exp(acc / kWindow);
            if (est < 1e-12L) return est;
            if (prev_est >= 0 && std::fabs(est - prev_est) < 1e-6L) return std::min<Real>(est, 1);
            prev_est = est;
        }
    }
    if (prev_est >= 1 || prev_est < 0) {
        if (warnings) warnings->push_back("gap deflation did not settle; tau reported as upper bound 1");
        return 1;
    }
    if (warnings) warnings->push_back("gap estimate did not stabilize to 1e-6");
    return prev_est;
}

struct Resolvent::Impl {
    Eigen::PartialPivLU<Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>> lu;
};

Resolvent::Resolvent(const DiscretizedOperator& op, const SpectralTriple& triple)
    : op_(&op), triple_(&triple), tau_(triple.tau ? *triple.tau : gap_estimate(op, triple))
{
}

Resolvent::~Resolvent() = default;
Resolvent::Resolvent(Resolvent&&) noexcept = default;

std::vector<Real> Resolvent::solve(std::span<const Real> v, ResolventMethod method, Real tol) const
{
    const int n = op_->size();
    const auto& t = *triple_;
    if (static_cast<int>(v.size()) != n) fail(ErrorKind::precondition, "resolvent input has wrong size");
    const Real mean = integrate(t.nu, v);
    if (std::fabs(mean) > 1e-10L) {
        std::ostringstream msg;
        msg << "resolvent input must have zero mean against nu (got " << static_cast<double>(mean) << ")";
        fail(ErrorKind::precondition, msg.str());
    }
    if (tau_ >= 1 - 1e-6L) fail(ErrorKind::solver, "spectral gap too small: resolvent series not summable");

    if (method == ResolventMethod::neumann) {
        std::vector<Real> u(n, 0);
        auto term = project_zero_mean(t, v);
        const Real threshold = tol * (1 - tau_);
        int k = 0;
        for (; k < 10000000; ++k) {
            if (sup_norm(term) < threshold) break;
            for (int i = 0; i < n; ++i) u[i] += term[i];
            term = project_zero_mean(t, apply_normalized(*op_, t, term));
        }
        last_terms_ = k;
        return u;
    }

    if (!impl_) {
        Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a(i, j) = (i == j ? 1 : 0) - op_->matrix(i, j) / t.lambda + t.h[i] * t.nu[j];
        impl_ = std::make_unique<Impl>();
        impl_->lu.compute(a);
    }
    Eigen::Matrix<Real, Eigen::Dynamic, 1> rhs(n);
    for (int i = 0; i < n; ++i) rhs(i) = v[i];
    Eigen::Matrix<Real, Eigen::Dynamic, 1> sol = impl_->lu.solve(rhs);
    std::vector<Real> u(n);
    for (int i = 0; i < n; ++i) u[i] = sol(i);
    last_terms_ = 0;
    return project_zero_mean(t, u);
}

std::vector<Real> resolvent_solve(const DiscretizedOperator& op, const SpectralTriple& triple,
                                  std::span<const Real> v, ResolventMethod method, Real tol)
{
    return Resolvent(op, triple).solve(v, method, tol);
}

}  // namespace ruelle
