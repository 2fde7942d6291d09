#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/core.hpp"

namespace ruelle {

// Lift description of a degree-d orientation-preserving circle map. Branch k
// lives on [a_k, a_{k+1}] (a_d = a_0 + 1) and its lift F_k maps it increasingly
// onto [F(a_0) + k, F(a_0) + k + 1].
class MapModel {
public:
    virtual ~MapModel() = default;
    virtual int degree() const = 0;
    virtual Real breakpoint(int k) const = 0;
    virtual Real lift(int k, Real y) const = 0;
    virtual Real lift_d1(int k, Real y) const = 0;
    virtual Real lift_d2(int k, Real y) const = 0;
    // d/ds of the lift along the family parameter (zero for parameter-free maps).
    virtual Real lift_dparam(int, Real) const { return 0; }
    virtual std::optional<Real> inverse_lift(int, Real) const { return std::nullopt; }
};

struct Polynomial {
    std::vector<Real> coef;  // coef[i] * y^i
    Real operator()(Real y) const;
    Real derivative(Real y, int order = 1) const;
};

class BranchMap {
public:
    BranchMap(std::shared_ptr<const MapModel> model, std::string tag,
              std::map<std::string, Real> params = {}, std::string parameter = {});

    int degree() const { return degree_; }
    const std::string& family_tag() const { return tag_; }
    const std::map<std::string, Real>& family_params() const { return params_; }
    // Name of the parameter moved by lift_dparam, empty when the family has none.
    const std::string& parameter() const { return parameter_; }
    const MapModel& model() const { return *model_; }

    Real breakpoint(int k) const { return breaks_[k]; }
    Real image_base() const { return base_; }

    // Lift coordinate of circle point x, in [a_0, a_0 + 1).
    Real to_lift(Real x) const;
    // Branch owning lift coordinate y (ties go to the lower index).
    int branch_of_lift(Real y) const;
    int branch_of(Real x) const { return branch_of_lift(to_lift(x)); }

    Real operator()(Real x) const;
    Real derivative(Real x) const;
    Real second_derivative(Real x) const;
    Real param_derivative(Real x) const;

    Real lift(int k, Real y) const { return model_->lift(k, y); }
    Real lift_d1(int k, Real y) const { return model_->lift_d1(k, y); }
    Real lift_d2(int k, Real y) const { return model_->lift_d2(k, y); }
    Real lift_dparam(int k, Real y) const { return model_->lift_dparam(k, y); }

    // Solve F_k(y) = target for target in [F(a_0) + k, F(a_0) + k + 1].
    Real inverse_on_branch(int k, Real target) const;
    // Preimage of x on branch k, in lift coordinates (inside [a_k, a_{k+1}]).
    Real preimage_lift(Real x, int k) const { return inverse_on_branch(k, base_ + k + wrap(x - base_)); }
    // The d preimages as circle points, sorted by branch index.
    std::vector<Real> preimages(Real x) const;

private:
    std::shared_ptr<const MapModel> model_;
    std::string tag_;
    std::map<std::string, Real> params_;
    std::string parameter_;
    int degree_;
    std::vector<Real> breaks_;
    Real base_;
};

BranchMap doubling_map();
BranchMap linear_map(int d);
BranchMap manneville_pomeau_map(Real alpha);
BranchMap perturbed_doubling_map(Real t);
BranchMap translated_doubling_map(Real s);
// breaks: a_0 < ... < a_d = a_0 + 1; one lift polynomial per branch, in absolute y.
BranchMap piecewise_polynomial_map(std::vector<Real> breaks, std::vector<Polynomial> lifts);

// Bump used by the perturbed-doubling family: C^2, odd, supported on |y| < 0.2.
Real pitchfork_bump(Real y, int order = 0);

// One-parameter family s -> f_s of builtin maps.
struct MapFamily {
    std::string tag;
    std::string parameter;
    std::map<std::string, Real> params;

    BranchMap at(Real s) const;
    static MapFamily of(const BranchMap& map);
};

BranchMap builtin_map(const std::string& tag, const std::map<std::string, Real>& params);

// ---------------------------------------------------------------------------
// Standing hypotheses

struct Arc {
    Real lo = 0;
    Real hi = 0;  // counter-clockwise from lo to hi; lo > hi wraps through 0
    bool contains(Real x) const;
    bool meets(Real lo2, Real hi2) const;  // closed sub-interval of [0,1]
};

struct HypothesisAux {
    std::vector<Arc> region_A;
    int q = 0;
    Real delta = 0.05L;
    int m = 0;  // 0 -> ceil(1/(2 delta))
    int samples_per_branch = 4096;
};

class Potential;

struct HypothesisReport {
    Real sigma = 0;
    Real big_L = 1;
    std::vector<Arc> region_A;
    int q = 0;
    int m = 0;
    Real delta = 0;
    Real alpha = 1;
    int smoothness = 0;
    Real oscillation = 0;
    Real holder_ratio = 0;
    Real eps_phi = 0;
    Real vep_value = 0;
    Real vepp_value = 0;
    Real eps_phi_prime = 0;
    Real vep_prime_value = 0;
    Real vepp_prime_value = 0;
    int branches_meeting_A = 0;
    int uncertified_cells = 0;
    bool h1 = false;
    bool h2 = false;
    bool p = false;
    bool p_prime = false;
    std::string note = "certified up to grid resolution";

    bool passes() const { return h1 && h2 && (p || p_prime); }
};

HypothesisReport check_hypotheses(const BranchMap& map, const Potential& pot, const HypothesisAux& aux);

// Left-hand sides of the two constants inequalities.
Real vep_expression(int d, int q, Real sigma, Real L, Real alpha, Real eps, int m);
Real vepp_expression(int d, int q, Real sigma, Real L, Real alpha, Real eps);

}  // namespace ruelle
