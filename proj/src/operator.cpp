#include "ruelle/operator.hpp"

#include <atomic>
#include <ostream>

#include "ruelle/format.hpp"

namespace ruelle {

std::string to_string(Scheme s) { return s == Scheme::ulam ? "ulam" : "collocation"; }
std::string to_string(Interpolation i) { return i == Interpolation::fourier ? "fourier" : "linear"; }

Real apply_transfer_point(const BranchMap& map, const Potential& pot, const Observable& g, Real x)
{
    Real acc = 0;
    for (int k = 0; k < map.degree(); ++k) {
        const Real y = map.preimage_lift(wrap(x), k);
        acc += std::exp(pot.on_branch(y, k)) * g(wrap(y));
    }
    return acc;
}

Real apply_transfer_tree(const BranchMap& map, const Potential& pot, const Observable& g, Real x, int n)
{
    return parallel::transfer_tree(map, pot, g, x, n);
}

PreimageTable tabulate_preimages(const BranchMap& map, const Grid& grid)
{
    PreimageTable t{grid, map.degree(), std::vector<Real>(static_cast<std::size_t>(grid.n) * map.degree())};
    parallel::for_rows(grid.n, [&](int i) {
        const Real x = grid.node(i);
        for (int k = 0; k < t.degree; ++k) t.points[static_cast<std::size_t>(i) * t.degree + k] = map.preimage_lift(x, k);
    });
    return t;
}

namespace {

void check_size(int n)
{
    if (n < 2) fail(ErrorKind::config, "grid needs at least 2 nodes");
}

DiscretizedOperator blank(const BranchMap& map, const Potential& pot, const Grid& grid, Scheme scheme,
                          Interpolation interp)
{
    DiscretizedOperator op;
    op.matrix = DenseMatrix(grid.n, grid.n);
    op.grid = grid;
    op.scheme = scheme;
    op.interpolation = interp;
    op.degree = map.degree();
    op.map_tag = map.family_tag();
    op.potential_tag = pot.describe();
    return op;
}

// Row i of the Ulam matrix: image of every cell under each branch, intersected with cell i.
int ulam_row(const BranchMap& map, const BranchWeight& weight, int n, int i, std::span<Real> row)
{
    const Real base = map.image_base();
    const Real width = Real(1) / n;
    int dropped = 0;
    for (int k = 0; k < map.degree(); ++k) {
        const Real top = base + k + 1;
        const Real lo = base + k + wrap(Real(i) / n - base);
        const Real hi = lo + width;
        Real targets[2][2];
        int nt = 0;
        if (hi <= top + 16 * kEps) {
            targets[nt][0] = lo;
            targets[nt++][1] = std::min(hi, top);
        } else {
            targets[nt][0] = lo;
            targets[nt++][1] = top;
            targets[nt][0] = base + k;
            targets[nt++][1] = base + k + (hi - top);
        }
        for (int t = 0; t < nt; ++t) {
            const Real u = map.inverse_on_branch(k, targets[t][0]);
            const Real v = map.inverse_on_branch(k, targets[t][1]);
            long long jj = static_cast<long long>(std::floor(u * n));
            for (;; ++jj) {
                const Real c0 = static_cast<Real>(jj) / n;
                if (c0 >= v) break;
                const Real p0 = std::max(u, c0);
                const Real p1 = std::min(v, static_cast<Real>(jj + 1) / n);
                if (p1 <= p0) continue;
                if (p1 - p0 < 1e-14L) {
                    ++dropped;
                    continue;
                }
                const Real len = map.lift(k, p1) - map.lift(k, p0);
                const Real mid = (p0 + p1) / 2;
                const int j = static_cast<int>(((jj % n) + n) % n);
                row[j] += weight(mid, k) * len * n;
            }
        }
    }
    return dropped;
}

void collocation_rows(const BranchWeight& weight, const PreimageTable& table, DiscretizedOperator& op)
{
    const Grid& grid = table.grid;
    const Interpolation interp = op.interpolation;
    const int n = grid.n;
    parallel::for_rows(n, [&](int i) {
        auto row = op.matrix.row(i);
        for (int k = 0; k < table.degree; ++k) {
            const Real y = table.at(i, k);
            const Real w = weight(y, k);
            if (interp == Interpolation::fourier) {
                for (int j = 0; j < n; ++j) row[j] += w * fourier_cardinal(n, y - grid.node(j));
                continue;
            }
            const Real u = wrap(y) * n - grid.offset;
            Real fl = std::floor(u);
            Real theta = u - fl;
            if (theta <= 8 * kEps * n) {
                theta = 0;
            } else if (1 - theta <= 8 * kEps * n) {
                theta = 0;
                fl += 1;
            }
            const long long j = static_cast<long long>(fl);
            const int j0 = static_cast<int>(((j % n) + n) % n);
            const int j1 = (j0 + 1) % n;
            row[j0] += w * (1 - theta);
            if (theta != 0) row[j1] += w * theta;
        }
    });
}

BranchWeight exp_weight(const Potential& pot)
{
    return [&pot](Real y, int k) { return std::exp(pot.on_branch(y, k)); };
}

}  // namespace

DiscretizedOperator build_collocation(const BranchMap& map, const Potential& pot, const PreimageTable& table,
                                      Interpolation interp)
{
    check_size(table.grid.n);
    DiscretizedOperator op = blank(map, pot, table.grid, Scheme::collocation, interp);
    collocation_rows(exp_weight(pot), table, op);
    return op;
}

DiscretizedOperator build_operator(const BranchMap& map, const Potential& pot, int n_cells, Scheme scheme,
                                   Interpolation interp)
{
    check_size(n_cells);
    if (scheme == Scheme::collocation) return build_collocation(map, pot, tabulate_preimages(map, Grid{n_cells, 0}), interp);

    if (interp != Interpolation::linear) fail(ErrorKind::config, "ulam scheme supports linear interpolation only");
    DiscretizedOperator op = blank(map, pot, Grid{n_cells, 0.5L}, Scheme::ulam, interp);
    std::atomic<int> dropped{0};
    const auto weight = exp_weight(pot);
    parallel::for_rows(n_cells, [&](int i) { dropped += ulam_row(map, weight, n_cells, i, op.matrix.row(i)); });
    op.dropped_pieces = dropped.load();
    return op;
}

DiscretizedOperator assemble_like(const DiscretizedOperator& like, const BranchMap& map, const BranchWeight& weight)
{
    DiscretizedOperator op = like;
    std::fill(op.matrix.data.begin(), op.matrix.data.end(), Real(0));
    op.potential_tag = "weighted";
    if (like.scheme == Scheme::collocation) {
        collocation_rows(weight, tabulate_preimages(map, like.grid), op);
    } else {
        std::atomic<int> dropped{0};
        parallel::for_rows(op.size(), [&](int i) { dropped += ulam_row(map, weight, op.size(), i, op.matrix.row(i)); });
        op.dropped_pieces = dropped.load();
    }
    return op;
}

std::vector<Real> apply_operator(const DiscretizedOperator& op, std::span<const Real> v)
{
    std::vector<Real> out(op.size());
    parallel::matvec(op.matrix, v, out);
    return out;
}

std::vector<Real> apply_adjoint(const DiscretizedOperator& op, std::span<const Real> v)
{
    std::vector<Real> out(op.size());
    parallel::vecmat(v, op.matrix, out);
    return out;
}

void write_operator_csv(std::ostream& os, const DiscretizedOperator& op)
{
    os << "# scheme=" << to_string(op.scheme) << " interpolation=" << to_string(op.interpolation)
       << " N=" << op.size() << " map=" << op.map_tag << " potential=" << op.potential_tag << "\n";
    for (int i = 0; i < op.size(); ++i) {
        const auto row = op.matrix.row(i);
        for (int j = 0; j < op.size(); ++j) os << (j ? "," : "") << format_real(row[j]);
        os << "\n";
    }
}

}  // namespace ruelle
