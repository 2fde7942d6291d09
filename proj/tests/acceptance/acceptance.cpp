// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "ruelle/cli/run.hpp"
#include "ruelle/rng.hpp"
#include "ruelle/stats.hpp"

using namespace ruelle;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Detail {
public:
    template <class T>
    Detail& operator<<(const T& v)
    {
        s_ << v;
        return *this;
    }
    std::string str() const { return s_.str(); }

private:
    std::ostringstream s_;
};

double d(Real v) { return static_cast<double>(v); }

Discretization disc(int n, Interpolation interp = Interpolation::linear, Real tol = 1e-13L)
{
    Discretization r;
    r.n = n;
    r.interpolation = interp;
    r.solver.tol = tol;
    return r;
}

FreeEnergyOptions with_t0(Real t0, int n_t = 41)
{
    FreeEnergyOptions o;
    o.t0 = t0;
    o.n_t = n_t;
    return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome exact_pressure()
{
    Outcome o;
    Detail det;
    for (int deg : {2, 3}) {
        const auto t0 = std::chrono::steady_clock::now();
        const Real p = pressure(linear_map(deg), Potential::constant(0), disc(256));
        const double secs = seconds_since(t0);
        const Real err = std::fabs(p - std::log(Real(deg)));
        o.pass = o.pass && err < 1e-10L && secs < 1;
        det << "deg " << deg << ": |P - log d| = " << d(err) << " in " << secs << " s; ";
    }
    o.detail = det.str();
    return o;
}

Outcome pressure_family()
{
    Outcome o;
    Detail det;
    Real worst = 0;
    for (Real t : {0.0L, 0.3L, 0.9L}) {
        const auto map = linear_map(2);
        const Real p = pressure(map, Potential::log_derivative(map, -t), disc(256));
        worst = std::max(worst, std::fabs(p - (1 - t) * std::log(Real(2))));
    }
    o.pass = worst < 1e-10L;
    det << "max |P - (1-t) log 2| over t in {0, 0.3, 0.9} = " << d(worst);
    o.detail = det.str();
    return o;
}

Outcome oracle_triangulation()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto map = doubling_map();
    const auto phi = Potential::cos_mode(1, 0.1L);
    const Real spec = pressure(map, phi, disc(1024));
    const Real tree = pressure_oracle_tree(map, phi, 0.3L, 20);
    const Real per = pressure_oracle_periodic(map, phi, 16).value;
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = std::fabs(spec - tree) < 0.02L && std::fabs(spec - per) < 0.02L && std::fabs(tree - per) < 0.01L && secs < 30;
    Detail det;
    det << "spectral " << d(spec) << ", tree " << d(tree) << ", periodic " << d(per) << "; |s-t| " << d(std::fabs(spec - tree))
        << ", |s-p| " << d(std::fabs(spec - per)) << ", |t-p| " << d(std::fabs(tree - per)) << "; " << secs << " s";
    o.detail = det.str();
    return o;
}

Potential random_trig(const CounterRng& rng, Real sup)
{
    // degree <= 4; coefficients scaled so that sum |c| <= sup bounds the sup norm
    std::vector<Real> a(4), b(4);
    Real c0 = rng.uniform(0) - 0.5L, total = std::fabs(c0);
    for (int k = 0; k < 4; ++k) {
        a[k] = rng.uniform(1 + 2 * k) - 0.5L;
        b[k] = rng.uniform(2 + 2 * k) - 0.5L;
        total += std::fabs(a[k]) + std::fabs(b[k]);
    }
    const Real s = sup / total;
    for (auto& v : a) v *= s;
    for (auto& v : b) v *= s;
    return Potential::trig(c0 * s, a, b);
}

Outcome linear_response()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto map = doubling_map();
    const PotentialResponse resp(map, Potential::cos_mode(1, 0.1L), fd_discretization(disc(256)));
    Real worst_rel = 0, min_ratio = 1e300L, max_ratio = 0;
    int checks = 0;
    for (std::uint64_t dir = 0; dir < 10; ++dir) {
        const auto H = random_trig(CounterRng(2024, dir), 0.1L);
        const auto g = random_trig(CounterRng(4048, dir), 1);
        for (auto q : {PotentialQuantity::lambda, PotentialQuantity::pressure, PotentialQuantity::density,
                       PotentialQuantity::conformal, PotentialQuantity::equilibrium}) {
            const auto fine = validate_potential_response(resp, q, g, H, 1e-4L);
            const auto coarse = validate_potential_response(resp, q, g, H, 1e-3L);
            worst_rel = std::max(worst_rel, fine.rel_error);
            const Real ratio = coarse.abs_error / fine.abs_error;
            min_ratio = std::min(min_ratio, ratio);
            max_ratio = std::max(max_ratio, ratio);
            ++checks;
        }
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = worst_rel < 1e-4L && min_ratio >= 50 && max_ratio <= 200 && secs < 120;
    Detail det;
    det << checks << " checks; max rel error " << d(worst_rel) << "; FD error ratio eps 1e-3/1e-4 in [" << d(min_ratio)
        << ", " << d(max_ratio) << "]; " << secs << " s";
    o.detail = det.str();
    return o;
}

Outcome dynamics_response()
{
    Outcome o;
    Detail det;
    Real worst_zero = 0;
    for (const MapFamily& fam :
         {MapFamily{"doubling", "", {}}, MapFamily{"linear-d", "", {{"degree", 3}}},
          MapFamily{"manneville-pomeau", "alpha", {{"alpha", 0.5L}}}, MapFamily{"perturbed-doubling", "t", {{"t", 0.1L}}},
          MapFamily{"translated-doubling", "s", {{"s", 0.1L}}}}) {
        const Real s0 = fam.parameter.empty() ? 0 : fam.params.at(fam.parameter);
        const auto r = d_pressure_d_dynamics(fam, Potential::constant(0), s0, disc(256));
        worst_zero = std::max({worst_zero, std::fabs(r.analytic_value), std::fabs(r.fd_value)});
    }
    const MapFamily pd{"perturbed-doubling", "t", {{"t", 0.1L}}};
    const auto p = d_pressure_d_dynamics(pd, Potential::cos_mode(1, 0.05L), 0.1L, disc(256));
    const auto m = d_maxentropy_expectation(pd, Potential::cos_mode(1), 0.1L, disc(256));
    o.pass = worst_zero < 1e-8L && p.rel_error < 1e-3L && m.rel_error < 1e-3L;
    det << "phi=0 max |dP| over builtin families " << d(worst_zero) << "; pressure analytic " << d(p.analytic_value)
        << " vs FD " << d(p.fd_value) << " (rel " << d(p.rel_error) << "); max-entropy int cos analytic "
        << d(m.analytic_value) << " vs FD " << d(m.fd_value) << " (rel " << d(m.rel_error) << ")";
    o.detail = det.str();
    return o;
}

Outcome correlation_clt()
{
    const auto map = doubling_map();
    const auto zero = Potential::constant(0);
    const auto c = Potential::cos_mode(1);
    const auto df = disc(128, Interpolation::fourier, 1e-15L);
    const auto series = correlation(map, zero, c, c, 20, df);
    Real tail = 0;
    for (int n = 1; n <= 20; ++n) tail = std::max(tail, std::fabs(series.values[n]));
    const auto clt = clt_parameters(map, zero, c, df);
    const auto cob = clt_parameters(map, zero, Potential::cos_mode(2) - c, df);
    const auto fe = free_energy(map, zero, c, df, with_t0(0.2L));
    const Real e2 = fe.curvature(0);
    Outcome o;
    o.pass = std::fabs(series.values[0] - 0.5L) < 1e-10L && tail < 1e-10L && std::fabs(clt.variance - 0.5L) < 1e-6L &&
             cob.raw_variance < 1e-8L && std::fabs(e2 - clt.variance) < 1e-4L;
    Detail det;
    det << "|C(0)-1/2| " << d(std::fabs(series.values[0] - 0.5L)) << ", max_{1..20}|C(n)| " << d(tail) << ", |s2-1/2| "
        << d(std::fabs(clt.variance - 0.5L)) << ", coboundary s2 " << d(cob.raw_variance) << ", |E''(0)-s2| "
        << d(std::fabs(e2 - clt.variance));
    o.detail = det.str();
    return o;
}

Outcome free_energy_properties()
{
    struct Case {
        BranchMap map;
        Potential phi, psi;
        Discretization disc;
        FreeEnergyOptions opts;
    };
    const auto pd = perturbed_doubling_map(0.1L);
    const std::vector<Case> cases{
        {doubling_map(), Potential::constant(0), Potential::cos_mode(1), disc(128, Interpolation::fourier, 1e-15L), with_t0(0.5L)},
        {doubling_map(), Potential::constant(0), Potential::cos_mode(1), disc(256), with_t0(2)},
        {pd, Potential::cos_mode(1, 0.05L), Potential::sin_mode(1) + Potential::cos_mode(2, 0.5L), disc(128), with_t0(0.5L)},
        {linear_map(3), Potential::constant(0), Potential::sin_mode(2), disc(128), FreeEnergyOptions{}},
        {doubling_map(), Potential::cos_mode(1, 0.1L), Potential::constant(0.3L), disc(64), with_t0(1)},
    };
    bool zero = true, bounds = true, affine = true, nonneg = true, convex = true;
    Real at_m = 0, duality = 0;
    for (const auto& c : cases) {
        const auto f = free_energy(c.map, c.phi, c.psi, c.disc, c.opts);
        zero = zero && f.e[f.t.size() / 2] == 0 && f.value(0) == 0;
        bounds = bounds && f.bounds_ok;
        if (c.psi.is_constant()) {
            for (std::size_t k = 0; k < f.t.size(); ++k)
                affine = affine && f.affine && f.e[k] == f.t[k] * c.psi.constant_part();
            continue;
        }
        const auto I = rate_function(f, 41);
        nonneg = nonneg && I.nonnegative;
        convex = convex && I.convex && f.convex;
        at_m = std::max(at_m, std::fabs(I.at_argmin));
        for (std::size_t k = 1; k + 1 < f.t.size(); ++k) {
            const Real t = f.t[k];
            duality = std::max(duality, std::fabs(legendre(f, f.slope(t)) - (t * f.slope(t) - f.value(t))));
        }
    }
    Outcome o;
    o.pass = zero && bounds && affine && nonneg && convex && at_m <= 1e-10L && duality < 1e-8L;
    Detail det;
    det << cases.size() << " runs: E(0)=0 " << (zero ? "yes" : "NO") << ", affine for constant psi "
        << (affine ? "yes" : "NO") << ", bounds " << (bounds ? "yes" : "NO") << ", I>=0 " << (nonneg ? "yes" : "NO")
        << ", convex " << (convex ? "yes" : "NO") << ", max I(m) " << d(at_m) << ", max duality gap " << d(duality);
    o.detail = det.str();
    return o;
}

Outcome monte_carlo_ldp()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto map = doubling_map();
    const auto zero = Potential::constant(0);
    const auto psi = Potential::cos_mode(1);
    const auto dd = disc(256);
    const auto sol = solve(map, zero, dd);
    const auto fe = free_energy(map, zero, psi, dd, with_t0(2));
    LdpOptions opts;
    opts.a = 0.25L;
    opts.b = 0.45L;
    for (int n = 10; n <= 30; ++n) opts.n_list.push_back(n);
    opts.samples = 1000000;
    opts.seed = 20240531;
    const auto e = ldp_monte_carlo(map, sol, psi, fe, opts);
    const auto& last = e.rows.back();
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = last.rate && std::fabs(*last.rate - e.predicted_upper) <= last.ci_half_width && secs < 300;
    Detail det;
    det << "n=30 empirical rate " << last.display << " [" << d(last.ci_low) << ", " << d(last.ci_high)
        << "] vs -inf_[a,b] I = " << d(e.predicted_upper) << "; n=10 rate " << e.rows.front().display << "; " << secs
        << " s (finite-n prefactor, see README)";
    o.detail = det.str();
    return o;
}

Outcome continuity_scans()
{
    const MapFamily pd{"perturbed-doubling", "t", {{"t", 0.0L}}};
    const auto zero = Potential::constant(0);
    auto grid = [](int m) {
        std::vector<Real> v;
        for (int k = 0; k <= m; ++k) v.push_back(0.2L * k / m);
        return v;
    };
    const auto coarse = bifurcation_scan(pd, zero, grid(10), disc(256));
    const auto fine = bifurcation_scan(pd, zero, grid(20), disc(256));
    using Get = std::function<Real(const ScanRow&)>;
    const std::vector<std::pair<const char*, Get>> cols{{"pressure", [](const ScanRow& r) { return r.pressure; }},
                                                        {"entropy", [](const ScanRow& r) { return r.entropy; }},
                                                        {"lyapunov", [](const ScanRow& r) { return r.lyapunov; }},
                                                        {"dimension", [](const ScanRow& r) { return *r.dimension; }}};
    bool jumps_ok = true;
    Real worst = 0;
    for (const auto& [name, get] : cols) {
        for (std::size_t k = 0; k + 1 < coarse.size(); ++k) {
            const Real jump = std::fabs(get(coarse[k + 1]) - get(coarse[k]));
            const Real est = 2 * std::max(std::fabs(get(fine[2 * k + 1]) - get(fine[2 * k])),
                                          std::fabs(get(fine[2 * k + 2]) - get(fine[2 * k + 1])));
            if (jump > 3 * est + 1e-10L) jumps_ok = false;
            if (est > 0) worst = std::max(worst, jump / est);
        }
    }
    std::vector<Real> sup;
    for (int m : {5, 10, 20})
        sup.push_back(rate_continuity_scan(pd, zero, Potential::cos_mode(1), grid(m), 21, disc(128), with_t0(0.5L, 21))
                          .max_neighbor_sup);
    const Real r1 = sup[0] / sup[1], r2 = sup[1] / sup[2];
    Outcome o;
    o.pass = jumps_ok && r1 >= 1.5L && r2 >= 1.5L;
    Detail det;
    det << "bifurcation scan max jump/refinement-estimate " << d(worst) << " (limit 3); rate-scan neighbor sup "
        << d(sup[0]) << " -> " << d(sup[1]) << " -> " << d(sup[2]) << ", ratios " << d(r1) << ", " << d(r2);
    o.detail = det.str();
    return o;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(const std::string& tool)
{
    const fs::path root = fs::temp_directory_path() / "ruelle_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"check-hypotheses", R"({"map": {"family": "doubling"}})"},
        {"pressure", R"({"map": {"family": "doubling"}, "potential": {"cos": [0.001]}, "pressure": {"tree_depth": 12, "periodic_period": 10}})"},
        {"spectrum", R"({"map": {"family": "linear-d", "params": {"degree": 3}}, "discretization": {"N": 32}, "spectrum": {"write_matrix": true}})"},
        {"equilibrium", R"({"map": {"family": "perturbed-doubling", "params": {"t": 0.1}}, "discretization": {"N": 128}})"},
        {"response", R"({"map": {"family": "doubling"}, "potential": {"cos": [0.001]}, "discretization": {"N": 128},
                         "response": {"quantity": "equilibrium", "direction": {"sin": [0.05]}, "observable": {"cos": [1]}}})"},
        {"correlation", R"({"map": {"family": "perturbed-doubling", "params": {"t": 0.1}}, "discretization": {"N": 128},
                            "correlation": {"a": {"cos": [1]}, "b": {"sin": [1]}, "n_max": 15, "dynamics_derivative": true}})"},
        {"clt", R"({"map": {"family": "doubling"}, "discretization": {"N": 128, "interpolation": "fourier"}, "clt": {"psi": {"cos": [1]}}})"},
        {"free-energy", R"({"map": {"family": "doubling"}, "discretization": {"N": 128}, "free_energy": {"psi": {"cos": [1]}, "t0": 0.5}})"},
        {"ldp", R"({"map": {"family": "doubling"}, "discretization": {"N": 128}, "free_energy": {"psi": {"cos": [1]}, "t0": 2, "n_t": 21},
                    "ldp": {"interval": [0.25, 0.45], "n_list": [10, 20], "samples": 50000, "seed": 17}})"},
        {"rate-scan", R"({"map": {"family": "perturbed-doubling", "params": {"t": 0}}, "discretization": {"N": 64},
                          "free_energy": {"psi": {"cos": [1]}, "t0": 0.5, "n_t": 21}, "scan": {"start": 0, "stop": 0.2, "step": 0.1, "n_s": 11}})"},
        {"bifurcation-scan", R"({"map": {"family": "perturbed-doubling", "params": {"t": 0}}, "discretization": {"N": 128},
                                 "scan": {"start": 0, "stop": 0.2, "step": 0.02}})"},
    };
    Outcome o;
    int files = 0;
    std::string bad;
    for (const auto& [cmd, cfg] : runs) {
        const auto cfg_path = root / (cmd + ".json");
        std::ofstream(cfg_path) << cfg;
        fs::path dirs[2] = {root / (cmd + "_1"), root / (cmd + "_2")};
        int codes[2];
        for (int i = 0; i < 2; ++i) {
            const std::string line = "\"" + tool + "\" " + cmd + " \"" + cfg_path.string() + "\" --out \"" +
                                     dirs[i].string() + "\"" + (i ? " --threads 1" : "") + " > /dev/null 2>&1";
            codes[i] = std::system(line.c_str());
        }
        if (codes[0] != 0 || codes[1] != 0) {
            o.pass = false;
            bad += cmd + " (exit) ";
            continue;
        }
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            const auto name = entry.path().filename();
            ++files;
            if (!fs::exists(dirs[1] / name) || slurp(entry.path()) != slurp(dirs[1] / name)) {
                o.pass = false;
                bad += cmd + "/" + name.string() + " ";
            }
        }
    }
    Detail det;
    det << runs.size() << " commands run twice via the CLI (second with --threads 1), " << files
        << " output files compared byte-for-byte" << (bad.empty() ? "" : "; differing: " + bad);
    o.detail = det.str();
    fs::remove_all(root);
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    const std::string tool = argc > 1 ? argv[1] : RUELLE_TOOL;
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"exact pressure (doubling log 2, degree-3 log 3)", exact_pressure},
        {"pressure family (1-t) log 2", pressure_family},
        {"oracle triangulation (spectral / tree / periodic)", oracle_triangulation},
        {"linear response in the potential vs finite differences", linear_response},
        {"response in the dynamics", dynamics_response},
        {"correlation / CLT exactness", correlation_clt},
        {"free energy and rate function properties", free_energy_properties},
        {"Monte-Carlo large deviations", monte_carlo_ldp},
        {"continuity scans", continuity_scans},
        {"determinism", [&] { return determinism(tool); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s criterion %zu: %s -- %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria pass\n", criteria.size() - failed, criteria.size());
    return failed ? 1 : 0;
}
