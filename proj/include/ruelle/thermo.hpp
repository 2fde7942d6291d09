#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/spectral.hpp"

namespace ruelle {

struct Discretization {
    int n = 256;
    Scheme scheme = Scheme::collocation;
    Interpolation interpolation = Interpolation::linear;
    SolverOptions solver;
};

struct Solution {
    DiscretizedOperator op;
    SpectralTriple triple;  // tau always filled
};

Solution solve(const BranchMap& map, const Potential& pot, const Discretization& disc);

Real pressure(const BranchMap& map, const Potential& pot, const Discretization& disc);
Real pressure_oracle_tree(const BranchMap& map, const Potential& pot, Real x0, int n);

struct PeriodicOracle {
    Real value = 0;
    std::int64_t points = 0;   // distinct fixed points of f^n
    std::int64_t skipped = 0;  // codes whose fixed-point iteration failed
};

PeriodicOracle pressure_oracle_periodic(const BranchMap& map, const Potential& pot, int n);

struct ThermoReport {
    Real pressure = 0;
    Real lambda = 0;
    std::vector<Real> equilibrium;  // mu weights on the grid nodes
    Real entropy = 0;
    Real lyapunov = 0;
    std::optional<Real> dimension;
    Real tau = 0;
    Grid grid;
    Scheme scheme = Scheme::collocation;
    Interpolation interpolation = Interpolation::linear;
    int iterations = 0;
    Real right_residual = 0;
    Real left_residual = 0;
    int dropped_pieces = 0;
    std::vector<std::string> warnings;
};

// mu_i = h_i nu_i, renormalized to sum 1.
std::vector<Real> equilibrium_weights(const SpectralTriple& t);

ThermoReport thermo_report(const BranchMap& map, const Potential& pot, const Solution& sol);
ThermoReport equilibrium_state(const BranchMap& map, const Potential& pot, const Discretization& disc);

struct ScanRow {
    Real parameter = 0;
    Real pressure = 0;
    Real entropy = 0;
    Real lyapunov = 0;
    std::optional<Real> dimension;
};

// Thermodynamic quantities along s -> f_s; a log f' potential follows the map.
std::vector<ScanRow> bifurcation_scan(const MapFamily& family, const Potential& pot, std::span<const Real> values,
                                      const Discretization& disc);

}  // namespace ruelle
