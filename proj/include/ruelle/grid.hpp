#pragma once

#include <span>
#include <vector>

#include "ruelle/core.hpp"

namespace ruelle {

// N equispaced circle nodes x_i = (i + offset) / N.
struct Grid {
    int n = 0;
    Real offset = 0;

    Real node(int i) const { return (i + offset) / n; }
    Real spacing() const { return Real(1) / n; }
    std::vector<Real> nodes() const;
    bool operator==(const Grid&) const = default;
};

enum class Interpolation { linear, fourier };

class GridFunction {
public:
    GridFunction() = default;
    GridFunction(Grid grid, std::vector<Real> values, Interpolation interp = Interpolation::linear);

    const Grid& grid() const { return grid_; }
    Interpolation interpolation() const { return interp_; }
    std::span<const Real> values() const { return values_; }
    int size() const { return grid_.n; }
    Real operator[](int i) const { return values_[i]; }

    Real operator()(Real x) const;
    // Derivative of the interpolant (Fourier) or of the linear interpolant of
    // centered node differences.
    Real derivative(Real x) const;

private:
    Real linear_eval(std::span<const Real> v, Real x) const;
    Real fourier_eval(Real x, bool derivative) const;

    Grid grid_;
    std::vector<Real> values_;
    Interpolation interp_ = Interpolation::linear;
    std::vector<Real> cos_coef_;  // fourier: a_k, k = 0..K
    std::vector<Real> sin_coef_;  // fourier: b_k
    std::vector<Real> slope_;     // linear: centered differences
};

// Cardinal function of trigonometric interpolation on N equispaced nodes.
Real fourier_cardinal(int n, Real z);

}  // namespace ruelle
