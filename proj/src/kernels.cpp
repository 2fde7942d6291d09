#include "ruelle/kernels.hpp"

#include <omp.h>

#include "ruelle/rng.hpp"

namespace ruelle {

void check_tree_guard(int degree, int depth)
{
    if (depth < 1) fail(ErrorKind::precondition, "tree depth must be >= 1");
    if (std::pow(static_cast<double>(degree), depth) > kMaxTreeLeaves)
        fail(ErrorKind::resource, "preimage tree with " + std::to_string(degree) + "^" + std::to_string(depth) +
                                      " leaves exceeds the 2^24 guard");
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n)
{
    if (n > 0) omp_set_num_threads(n);
}

namespace {

Real tree_recurse(const BranchMap& map, const Potential& pot, const Observable& g, Real x, int depth)
{
    if (depth == 0) return g(x);
    Real acc = 0;
    for (int k = 0; k < map.degree(); ++k) {
        const Real y = map.preimage_lift(x, k);
        acc += std::exp(pot.on_branch(y, k)) * tree_recurse(map, pot, g, wrap(y), depth - 1);
    }
    return acc;
}

// Fixed point of the inverse-branch composition selected by code (digits in
// base d, most significant digit applied last).
PeriodicPoint periodic_point(const BranchMap& map, const Potential& pot, int n, std::int64_t code)
{
    const int d = map.degree();
    std::vector<int> digits(n);
    std::int64_t c = code;
    for (int i = n - 1; i >= 0; --i) {
        digits[i] = static_cast<int>(c % d);
        c /= d;
    }
    // G = g_{digits[0]} o ... o g_{digits[n-1]}; returns G(x) and G'(x).
    auto apply = [&](Real x, Real& slope) {
        slope = 1;
        for (int i = n - 1; i >= 0; --i) {
            const Real y = map.preimage_lift(x, digits[i]);
            slope /= map.lift_d1(digits[i], y);
            x = wrap(y);
        }
        return x;
    };
    auto residual = [](Real x, Real gx) {
        Real r = x - gx;
        return r - std::nearbyint(r);
    };

    PeriodicPoint out;
    Real x = 0.5L, slope = 1;
    for (int it = 0; it < 60; ++it) {
        const Real gx = apply(x, slope);
        const Real r = residual(x, gx);
        x = gx;
        if (std::fabs(r) < 1e-14L) break;
    }
    for (int it = 0; it < 100; ++it) {
        const Real gx = apply(x, slope);
        const Real r = residual(x, gx);
        if (std::fabs(r) <= 1e-12L) {
            out.converged = true;
            x = gx;
            break;
        }
        const Real denom = 1 - slope;
        x = denom > 1e-300L ? wrap(x - r / denom) : gx;
    }
    if (!out.converged) return out;
    // Polish and accumulate S_n phi along the orbit x -> ... -> x.
    Real s = 0;
    Real z = x;
    for (int i = n - 1; i >= 0; --i) {
        const Real y = map.preimage_lift(z, digits[i]);
        s += pot.on_branch(y, digits[i]);
        z = wrap(y);
    }
    out.x = x;
    out.weight = s;
    return out;
}

std::int64_t code_count(int d, int n)
{
    check_tree_guard(d, n);
    std::int64_t total = 1;
    for (int i = 0; i < n; ++i) total *= d;
    return total;
}

void count_sample(const HitCountRequest& req, std::int64_t s, int n_max, std::int64_t* counts)
{
    const CounterRng rng(req.seed, static_cast<std::uint64_t>(s));
    const Real u1 = rng.uniform(0) * req.cdf.back();
    const Real u2 = rng.uniform(1);
    const auto it = std::upper_bound(req.cdf.begin(), req.cdf.end(), u1);
    const int cell = static_cast<int>(std::min<std::ptrdiff_t>(it - req.cdf.begin(), req.grid.n - 1));
    Real x = wrap(req.grid.node(cell) + (u2 - 0.5L) / req.grid.n);
    const int batch = static_cast<int>(s * req.batches / req.n_samples);
    const std::size_t nn = req.n_list.size();
    Real sum = 0;
    std::size_t next = 0;
    for (int step = 1; step <= n_max; ++step) {
        sum += (*req.psi)(x);
        x = (*req.map)(x);
        while (next < nn && req.n_list[next] == step) {
            const Real avg = sum / step;
            if (avg >= req.a && avg <= req.b) ++counts[batch * nn + next];
            ++next;
        }
    }
}

void validate_request(const HitCountRequest& req)
{
    if (!req.map || !req.psi || req.cdf.empty() || req.n_samples <= 0 || req.batches < 1)
        fail(ErrorKind::precondition, "incomplete Monte-Carlo request");
    if (!std::is_sorted(req.n_list.begin(), req.n_list.end()) || req.n_list.empty() || req.n_list.front() < 1)
        fail(ErrorKind::precondition, "n_list must be increasing positive integers");
}

}  // namespace

namespace serial {

void matvec(const DenseMatrix& m, std::span<const Real> x, std::span<Real> y)
{
    for (int i = 0; i < m.rows; ++i) {
        const auto r = m.row(i);
        Real acc = 0;
        for (int j = 0; j < m.cols; ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
}

void vecmat(std::span<const Real> x, const DenseMatrix& m, std::span<Real> y)
{
    std::fill(y.begin(), y.end(), Real(0));
    for (int i = 0; i < m.rows; ++i) {
        const auto r = m.row(i);
        const Real xi = x[i];
        for (int j = 0; j < m.cols; ++j) y[j] += xi * r[j];
    }
}

void for_rows(int n, const std::function<void(int)>& fn)
{
    for (int i = 0; i < n; ++i) fn(i);
}

Real transfer_tree(const BranchMap& map, const Potential& pot, const Observable& g, Real x, int depth)
{
    check_tree_guard(map.degree(), depth);
    return tree_recurse(map, pot, g, wrap(x), depth);
}

std::vector<PeriodicPoint> periodic_points(const BranchMap& map, const Potential& pot, int n)
{
    const std::int64_t total = code_count(map.degree(), n);
    std::vector<PeriodicPoint> out(total);
    for (std::int64_t c = 0; c < total; ++c) out[c] = periodic_point(map, pot, n, c);
    return out;
}

std::vector<std::int64_t> hit_counts(const HitCountRequest& req)
{
    validate_request(req);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(req.batches) * req.n_list.size(), 0);
    const int n_max = req.n_list.back();
    for (std::int64_t s = 0; s < req.n_samples; ++s) count_sample(req, s, n_max, counts.data());
    return counts;
}

}  // namespace serial

namespace parallel {

void matvec(const DenseMatrix& m, std::span<const Real> x, std::span<Real> y)
{
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m.rows; ++i) {
        const auto r = m.row(i);
        Real acc = 0;
        for (int j = 0; j < m.cols; ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
}

void vecmat(std::span<const Real> x, const DenseMatrix& m, std::span<Real> y)
{
    // Column blocks per thread; every y[j] still accumulates rows in order.
    constexpr int kBlock = 64;
    const int nblocks = (m.cols + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
    for (int blk = 0; blk < nblocks; ++blk) {
        const int j0 = blk * kBlock;
        const int j1 = std::min(m.cols, j0 + kBlock);
        for (int j = j0; j < j1; ++j) y[j] = 0;
        for (int i = 0; i < m.rows; ++i) {
            const auto r = m.row(i);
            const Real xi = x[i];
            for (int j = j0; j < j1; ++j) y[j] += xi * r[j];
        }
    }
}

void for_rows(int n, const std::function<void(int)>& fn)
{
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) fn(i);
}

Real transfer_tree(const BranchMap& map, const Potential& pot, const Observable& g, Real x, int depth)
{
    check_tree_guard(map.degree(), depth);
    const int d = map.degree();
    int split = 0;
    std::int64_t width = 1;
    while (split < depth && width < 256) {
        ++split;
        width *= d;
    }
    // Expand the first `split` levels breadth-first: node points and edge weights.
    std::vector<std::vector<Real>> pts(split + 1), wts(split + 1);
    pts[0] = {wrap(x)};
    for (int l = 0; l < split; ++l) {
        pts[l + 1].reserve(pts[l].size() * d);
        wts[l + 1].reserve(pts[l].size() * d);
        for (Real p : pts[l])
            for (int k = 0; k < d; ++k) {
                const Real y = map.preimage_lift(p, k);
                pts[l + 1].push_back(wrap(y));
                wts[l + 1].push_back(std::exp(pot.on_branch(y, k)));
            }
    }
    std::vector<Real> vals(pts[split].size());
    const int leaves = static_cast<int>(vals.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < leaves; ++i) vals[i] = tree_recurse(map, pot, g, pts[split][i], depth - split);
    // Fold back up with the same association as the serial recursion.
    for (int l = split; l > 0; --l) {
        std::vector<Real> up(pts[l - 1].size());
        for (std::size_t p = 0; p < up.size(); ++p) {
            Real acc = 0;
            for (int k = 0; k < d; ++k) acc += wts[l][p * d + k] * vals[p * d + k];
            up[p] = acc;
        }
        vals.swap(up);
    }
    return vals[0];
}

std::vector<PeriodicPoint> periodic_points(const BranchMap& map, const Potential& pot, int n)
{
    const std::int64_t total = code_count(map.degree(), n);
    std::vector<PeriodicPoint> out(total);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t c = 0; c < total; ++c) out[c] = periodic_point(map, pot, n, c);
    return out;
}

std::vector<std::int64_t> hit_counts(const HitCountRequest& req)
{
    validate_request(req);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(req.batches) * req.n_list.size(), 0);
    const int n_max = req.n_list.back();
#pragma omp parallel
    {
        std::vector<std::int64_t> local(counts.size(), 0);
#pragma omp for schedule(static)
        for (std::int64_t s = 0; s < req.n_samples; ++s) count_sample(req, s, n_max, local.data());
#pragma omp critical
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
    }
    return counts;
}

}  // namespace parallel

}  // namespace ruelle
