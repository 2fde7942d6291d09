#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ruelle/grid.hpp"
#include "ruelle/maps.hpp"
#include "ruelle/potential.hpp"

namespace ruelle {

struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Real> data;  // row-major

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}
    Real& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    Real operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
    std::span<Real> row(int i) { return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)}; }
    std::span<const Real> row(int i) const
    {
        return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
    }
};

using Observable = std::function<Real(Real)>;

// One periodic orbit candidate: fixed point of an n-fold inverse-branch
// composition and its Birkhoff weight S_n phi.
struct PeriodicPoint {
    Real x = 0;
    Real weight = 0;
    bool converged = false;
};

struct HitCountRequest {
    const BranchMap* map = nullptr;
    const Potential* psi = nullptr;
    std::span<const Real> cdf;  // cumulative weights of the sampling density, one per cell
    Grid grid;                  // cell i is [node(i) - 1/2N, node(i) + 1/2N)
    std::span<const int> n_list;
    Real a = 0;
    Real b = 0;
    std::int64_t n_samples = 0;
    int batches = 1;
    std::uint64_t seed = 0;
};

// Every kernel exists twice: a plain serial reference and an OpenMP version.
// Reductions are organized so both produce bitwise-identical results.
namespace serial {

void matvec(const DenseMatrix& m, std::span<const Real> x, std::span<Real> y);
void vecmat(std::span<const Real> x, const DenseMatrix& m, std::span<Real> y);
void for_rows(int n, const std::function<void(int)>& fn);
Real transfer_tree(const BranchMap& map, const Potential& pot, const Observable& g, Real x, int depth);
std::vector<PeriodicPoint> periodic_points(const BranchMap& map, const Potential& pot, int n);
std::vector<std::int64_t> hit_counts(const HitCountRequest& req);

}  // namespace serial

namespace parallel {

void matvec(const DenseMatrix& m, std::span<const Real> x, std::span<Real> y);
void vecmat(std::span<const Real> x, const DenseMatrix& m, std::span<Real> y);
void for_rows(int n, const std::function<void(int)>& fn);
Real transfer_tree(const BranchMap& map, const Potential& pot, const Observable& g, Real x, int depth);
std::vector<PeriodicPoint> periodic_points(const BranchMap& map, const Potential& pot, int n);
std::vector<std::int64_t> hit_counts(const HitCountRequest& req);

}  // namespace parallel

// Resource guard shared by the preimage-tree kernels.
inline constexpr double kMaxTreeLeaves = 16777216.0;  // 2^24
void check_tree_guard(int degree, int depth);

int max_threads();
void set_threads(int n);

}  // namespace ruelle
