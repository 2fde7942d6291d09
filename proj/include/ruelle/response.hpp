#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/thermo.hpp"

namespace ruelle {

struct ResponseReport {
    Real analytic_value = 0;
    Real fd_value = 0;
    Real fd_step = 0;
    Real abs_error = 0;
    Real rel_error = 0;  // abs_error / max(1, |fd|)
    int series_terms_used = 0;
    std::optional<Real> truncation_tail_bound;
    std::vector<std::string> notes;
};

ResponseReport make_report(Real analytic, Real fd, Real step);
// Grid-valued comparison in the sup norm.
ResponseReport make_report(std::span<const Real> analytic, std::span<const Real> fd, Real step);

inline constexpr Real kDefaultFdStep = 1e-4L;

// Same discretization with the eigen tolerance pushed to the precision floor,
// so that central differences at small steps are not dominated by solver noise.
Discretization fd_discretization(Discretization disc);

// ---------------------------------------------------------------------------
// Derivatives in the potential, phi0 -> phi0 + eps H.
//
// All quantities are exact derivatives of the discretized problem: the matrix
// derivative along H is reassembled with weights e^phi0 H, and the resolvent
// acts on E0 = { v : nu(v) = 0 }. In the continuum limit they reduce to
//   D lambda = lambda nu(h H),  D P = mu(H),
//   D h = R[L~(H h) - mu(H) h] + h nu(H R(1 - h)),
//   D nu(g) = nu(H R(g - nu(g) h)) - nu(g) nu(H R(1 - h)),
//   D mu(g) = D nu(g h) + nu(g D h),
// with R = (I - L~|E0)^{-1}.
class PotentialResponse {
public:
    PotentialResponse(const BranchMap& map, const Potential& phi0, const Discretization& disc,
                      ResolventMethod method = ResolventMethod::direct);
    PotentialResponse(const PotentialResponse&) = delete;
    PotentialResponse& operator=(const PotentialResponse&) = delete;

    const Solution& base() const { return sol_; }
    const BranchMap& map() const { return map_; }
    const Potential& potential() const { return phi_; }
    const Discretization& discretization() const { return disc_; }
    const Resolvent& resolvent() const { return *resolvent_; }

    Real d_lambda(const Potential& H) const;
    Real d_pressure(const Potential& H) const;
    GridFunction d_density(const Potential& H) const;
    Real d_conformal(const Potential& g, const Potential& H) const;
    Real d_equilibrium(const Potential& g, const Potential& H) const;

    // Neumann series terms used by the most recent resolvent solve (0 for direct).
    int series_terms() const { return resolvent_->last_terms(); }

private:
    struct Direction {
        DiscretizedOperator dm;
        std::vector<Real> dm_t_nu;  // dM^T nu / lambda
        Real d_lambda = 0;
        Real kappa = 0;  // nu^T dM R(1 - h) / lambda
    };
    Direction direction(const Potential& H) const;
    std::vector<Real> density(const Direction& dir) const;
    Real conformal(const Direction& dir, std::span<const Real> g) const;
    std::vector<Real> solve(std::span<const Real> v) const;

    BranchMap map_;
    Potential phi_;
    Discretization disc_;
    ResolventMethod method_;
    Solution sol_;
    std::unique_ptr<Resolvent> resolvent_;
    std::vector<Real> r_one_;  // R(1 - h)
};

Real d_lambda_d_potential(const BranchMap& map, const Potential& phi0, const Potential& H, const Discretization& disc);
Real d_pressure_d_potential(const BranchMap& map, const Potential& phi0, const Potential& H, const Discretization& disc);
GridFunction d_density_d_potential(const BranchMap& map, const Potential& phi0, const Potential& H,
                                   const Discretization& disc);
Real d_conformal_expectation(const BranchMap& map, const Potential& phi0, const Potential& g, const Potential& H,
                             const Discretization& disc);
Real d_equilibrium_expectation(const BranchMap& map, const Potential& phi0, const Potential& g, const Potential& H,
                               const Discretization& disc);

enum class PotentialQuantity { lambda, pressure, density, conformal, equilibrium };

std::string to_string(PotentialQuantity q);
PotentialQuantity potential_quantity(const std::string& name);

// Analytic value from `response` against a central difference of the
// discretized quantity at phi0 +- step H. `g` is ignored for lambda, pressure
// and density.
ResponseReport validate_potential_response(const PotentialResponse& response, PotentialQuantity q,
                                           const Potential& g, const Potential& H, Real step = kDefaultFdStep);

// ---------------------------------------------------------------------------
// Derivatives in the dynamics. A direction H is a circle vector field; for a
// family s -> f_s it is the lift derivative d/ds F_s on each branch.

using VectorField = std::function<Real(Real y, int k)>;

VectorField family_direction(const BranchMap& map);
VectorField field_of(const Potential& H);

// (T_k H)(x) = -H(y_k) / f'(y_k): motion of the k-th preimage of x.
Real preimage_velocity(const BranchMap& map, const VectorField& H, Real y, int k);

// (D_f L g . H)(x) = sum_k (g e^phi)'(y_k) (T_k H)(x)
Real d_transfer_d_dynamics(const BranchMap& map, const Potential& pot, const Potential& g, const VectorField& H,
                           Real x);
// sum_{i=1}^n L^{i-1}(D_f L(L^{n-i} g) . H)(x), evaluated on the exact preimage tree.
Real d_transfer_n_d_dynamics(const BranchMap& map, const Potential& pot, const Potential& g, const VectorField& H,
                             Real x, int n);

// D_f P . H with H = d/ds f_s at s0, against a central difference of pressure(f_{s0 +- step}).
ResponseReport d_pressure_d_dynamics(const MapFamily& family, const Potential& pot, Real s0,
                                     const Discretization& disc, Real step = kDefaultFdStep);

// d/ds int g d mu_{f_s} at s0 for the measure of maximal entropy (phi == 0).
ResponseReport d_maxentropy_expectation(const MapFamily& family, const Potential& g, Real s0,
                                        const Discretization& disc, Real step = kDefaultFdStep, Real tol = 1e-14L);

}  // namespace ruelle
