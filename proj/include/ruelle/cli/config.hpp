#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ruelle/stats.hpp"
#include "json.hpp"

namespace ruelle::cli {

using nlohmann::json;

struct MapSpec {
    std::string family = "doubling";
    std::map<std::string, Real> params;
    // family "piecewise-polynomial"
    std::vector<Real> breaks;
    std::vector<std::vector<Real>> lifts;
};

struct PotentialSpec {
    Real constant = 0;
    std::vector<Real> cos, sin;
    Real log_derivative = 0;
    std::vector<Real> samples;
    Interpolation samples_interpolation = Interpolation::linear;
    std::optional<Real> holder_exponent;
    std::optional<int> smoothness;
};

struct HypothesisSpec {
    std::vector<std::pair<Real, Real>> region_A;
    int q = 0;
    int m = 0;
    Real delta = 0.05L;
    int samples_per_branch = 4096;
    bool override_gate = false;
};

struct Tolerances {
    Real eigen = 1e-12L;
    int max_iter = 100000;
    Real resolvent = 1e-15L;
    Real series = 1e-14L;
};

struct PressureSpec {
    std::optional<int> tree_depth;
    std::optional<int> periodic_period;
    Real x0 = 0.3L;
};

struct SpectrumSpec {
    bool write_matrix = false;
};

struct ResponseSpec {
    std::string quantity = "pressure";
    PotentialSpec direction;  // H for potential derivatives
    PotentialSpec observable; // g
    Real fd_step = kDefaultFdStep;
    std::optional<Real> s0;   // dynamics: family parameter value (default: the map's own)
    ResolventMethod method = ResolventMethod::direct;
    Real x = 0.3L;            // transfer-dynamics evaluation point
    int n = 1;                // transfer-dynamics iterate
};

struct CorrelationSpec {
    PotentialSpec a;
    PotentialSpec b;
    int n_max = 20;
    bool dynamics_derivative = false;
    std::optional<Real> s0;
};

struct CltSpec {
    PotentialSpec psi;
};

struct FreeEnergySpec {
    PotentialSpec psi;
    std::optional<Real> t0;
    int n_t = 41;
    int n_s = 41;
};

struct LdpSpec {
    std::pair<Real, Real> interval{0, 0};
    std::vector<int> n_list;
    std::int64_t samples = 1000000;
    int batches = 20;
    std::uint64_t seed = 0;
};

struct ScanSpec {
    Real start = 0;
    Real stop = 0;
    Real step = 0;
    std::vector<std::string> quantities{"pressure", "entropy", "lyapunov", "dimension"};
    int n_s = 21;

    std::vector<Real> values() const;
};

struct OutputSpec {
    std::string dir = "out";
};

struct RunConfig {
    MapSpec map;
    PotentialSpec potential;
    int n = 256;
    Scheme scheme = Scheme::collocation;
    Interpolation interpolation = Interpolation::linear;
    Tolerances tolerances;
    HypothesisSpec hypotheses;
    PressureSpec pressure;
    SpectrumSpec spectrum;
    ResponseSpec response;
    CorrelationSpec correlation;
    CltSpec clt;
    FreeEnergySpec free_energy;  // also supplies psi, t0, n_t for ldp and rate-scan
    LdpSpec ldp;
    ScanSpec scan;
    OutputSpec output;

    Discretization discretization() const;
    HypothesisAux aux() const;
    FreeEnergyOptions free_energy_options() const;
};

// Strict parse: unknown keys, wrong types and out-of-range values raise
// Error(config) naming the JSON path of the offending key.
RunConfig parse_config(const std::string& text);
RunConfig parse_config(const json& doc);
inline RunConfig parse_config(const char* text) { return parse_config(std::string(text)); }
// Normalized echo with every default filled in.
json to_json(const RunConfig& cfg);

BranchMap build_map(const MapSpec& spec);
Potential build_potential(const PotentialSpec& spec, const BranchMap& map);

}  // namespace ruelle::cli
