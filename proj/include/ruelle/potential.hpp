#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/grid.hpp"
#include "ruelle/maps.hpp"

namespace ruelle {

// Real observable on the circle: constant + trigonometric polynomial
// + c * log f' (branch-wise, bound to a map) + interpolated grid samples.
// Used for potentials phi, observables psi, g and directions H alike.
class Potential {
public:
    Potential() = default;

    static Potential constant(Real c);
    // a[k-1] cos(2 pi k x) + b[k-1] sin(2 pi k x)
    static Potential trig(Real c0, std::vector<Real> a, std::vector<Real> b = {});
    static Potential cos_mode(int k, Real amplitude = 1);
    static Potential sin_mode(int k, Real amplitude = 1);
    static Potential log_derivative(const BranchMap& map, Real coef);
    static Potential samples(GridFunction g);

    Real operator()(Real x) const;
    // Evaluation at lift coordinate y of branch k (matters only for the log f' part).
    Real on_branch(Real y, int k) const;
    Real derivative(Real x) const;
    Real derivative_on_branch(Real y, int k) const;
    Real second_derivative(Real x) const;

    Potential& operator+=(const Potential& other);
    Potential& operator*=(Real s);
    friend Potential operator+(Potential a, const Potential& b) { return a += b; }
    friend Potential operator-(Potential a, const Potential& b) { return a += b * Real(-1); }
    friend Potential operator*(Potential a, Real s) { return a *= s; }
    friend Potential operator*(Real s, Potential a) { return a *= s; }

    Real constant_part() const { return c0_; }
    const std::vector<Real>& cos_coefficients() const { return a_; }
    const std::vector<Real>& sin_coefficients() const { return b_; }
    Real log_coefficient() const { return log_coef_; }
    bool has_log_part() const { return map_ != nullptr && log_coef_ != 0; }
    bool has_samples() const { return samples_.has_value(); }
    bool is_constant() const;
    bool is_zero() const { return is_constant() && c0_ == 0; }
    // phi == 0 or phi == -t log f' (no other component).
    bool is_geometric() const;

    // Copy whose log f' part is bound to another map (same coefficient).
    Potential rebound(const BranchMap& map) const;

    Real holder_exponent() const { return alpha_; }
    int smoothness_order() const { return r_; }
    Potential& with_regularity(Real alpha, int r);

    std::string describe() const;

private:
    Real trig_value(Real x) const;
    Real trig_derivative(Real x, int order) const;

    Real c0_ = 0;
    std::vector<Real> a_, b_;
    Real log_coef_ = 0;
    std::shared_ptr<const BranchMap> map_;
    std::optional<GridFunction> samples_;
    Real sample_scale_ = 1;
    Real alpha_ = 1;
    int r_ = 2;
};

}  // namespace ruelle
