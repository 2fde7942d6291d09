#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ruelle/kernels.hpp"

namespace ruelle {

enum class Scheme { collocation, ulam };

std::string to_string(Scheme s);
std::string to_string(Interpolation i);

// Exact branch preimages of every grid node (lift coordinates, node-major).
struct PreimageTable {
    Grid grid;
    int degree = 0;
    std::vector<Real> points;

    Real at(int node, int branch) const { return points[static_cast<std::size_t>(node) * degree + branch]; }
};

PreimageTable tabulate_preimages(const BranchMap& map, const Grid& grid);

struct DiscretizedOperator {
    DenseMatrix matrix;
    Grid grid;
    Scheme scheme = Scheme::collocation;
    Interpolation interpolation = Interpolation::linear;
    int degree = 0;
    std::string map_tag;
    std::string potential_tag;
    int dropped_pieces = 0;  // ulam intersections shorter than 1e-14

    int size() const { return grid.n; }
    GridFunction function(std::vector<Real> values) const { return {grid, std::move(values), interpolation}; }
};

// Sum over the d preimages of e^{phi(y)} g(y).
Real apply_transfer_point(const BranchMap& map, const Potential& pot, const Observable& g, Real x);
// (L^n g)(x) over the full d^n-leaf preimage tree.
Real apply_transfer_tree(const BranchMap& map, const Potential& pot, const Observable& g, Real x, int n);

// n_cells is the number of grid nodes/cells; ulam uses cell midpoints as nodes.
DiscretizedOperator build_operator(const BranchMap& map, const Potential& pot, int n_cells, Scheme scheme,
                                   Interpolation interp = Interpolation::linear);
// Collocation from precomputed preimages (reused across potentials).
DiscretizedOperator build_collocation(const BranchMap& map, const Potential& pot, const PreimageTable& table,
                                      Interpolation interp);

// Same assembly with branch weights w(y, k) in place of e^{phi(y)}. Entries are
// linear in the weights, so w = e^phi H yields the derivative along phi + eps H.
using BranchWeight = std::function<Real(Real y, int k)>;
DiscretizedOperator assemble_like(const DiscretizedOperator& like, const BranchMap& map, const BranchWeight& weight);

std::vector<Real> apply_operator(const DiscretizedOperator& op, std::span<const Real> v);
std::vector<Real> apply_adjoint(const DiscretizedOperator& op, std::span<const Real> v);

void write_operator_csv(std::ostream& os, const DiscretizedOperator& op);

}  // namespace ruelle
