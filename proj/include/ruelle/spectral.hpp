#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/operator.hpp"

namespace ruelle {

struct SolverOptions {
    Real tol = 1e-12L;
    int max_iter = 100000;
};

// Smallest tolerance the eigen-solver accepts (a few ulps of Real).
inline constexpr Real kMinTolerance = 64 * kEps;

struct SpectralTriple {
    Real lambda = 0;
    GridFunction h;          // normalized so that sum nu_i h_i = 1
    std::vector<Real> nu;    // nonnegative, sums to 1
    std::optional<Real> tau; // |lambda_2| / lambda
    int iterations = 0;
    Real right_residual = 0;
    Real left_residual = 0;
    Real clipped_mass = 0;   // negative nu mass removed before renormalizing
    std::vector<std::string> warnings;
};

SpectralTriple leading_triple(const DiscretizedOperator& op, const SolverOptions& opts = {});
Real gap_estimate(const DiscretizedOperator& op, const SpectralTriple& triple,
                  std::vector<std::string>* warnings = nullptr);

enum class ResolventMethod { neumann, direct };

// (I - L~)^{-1} on the zero-mean subspace E0 = { v : sum nu_i v_i = 0 }, with
// L~ = L / lambda. The direct factorization is computed once and reused.
class Resolvent {
public:
    Resolvent(const DiscretizedOperator& op, const SpectralTriple& triple);
    ~Resolvent();
    Resolvent(Resolvent&&) noexcept;

    std::vector<Real> solve(std::span<const Real> v, ResolventMethod method = ResolventMethod::direct,
                            Real tol = 1e-15L) const;
    // Number of series terms used by the last neumann solve.
    int last_terms() const { return last_terms_; }
    Real tau() const { return tau_; }

private:
    struct Impl;
    const DiscretizedOperator* op_;
    const SpectralTriple* triple_;
    Real tau_;
    mutable std::unique_ptr<Impl> impl_;
    mutable int last_terms_ = 0;
};

std::vector<Real> resolvent_solve(const DiscretizedOperator& op, const SpectralTriple& triple,
                                  std::span<const Real> v, ResolventMethod method, Real tol = 1e-15L);

// Node-weight quadrature sum w_i f_i in index order.
Real integrate(std::span<const Real> weights, std::span<const Real> values);
std::vector<Real> sample(const Grid& grid, const Observable& f);
// L~ v = L v / lambda
std::vector<Real> apply_normalized(const DiscretizedOperator& op, const SpectralTriple& t, std::span<const Real> v);
// v - h * nu(v)
std::vector<Real> project_zero_mean(const SpectralTriple& t, std::span<const Real> v);

}  // namespace ruelle
