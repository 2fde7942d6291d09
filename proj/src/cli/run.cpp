#include "ruelle/cli/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <new>
#include <sstream>

#include <omp.h>

#include "ruelle/format.hpp"

namespace ruelle::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSchema = "ruelle-report/1";
constexpr int kMaxGrid = 8192;  // dense N x N long double matrix: 1 GiB

double num(Real v) { return static_cast<double>(v); }

json nums(std::span<const Real> v)
{
    json out = json::array();
    for (Real x : v) out.push_back(num(x));
    return out;
}

json opt_num(const std::optional<Real>& v) { return v ? json(num(*v)) : json(nullptr); }

const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::config: return "config";
    case ErrorKind::hypotheses: return "hypotheses";
    case ErrorKind::solver: return "solver";
    case ErrorKind::resource: return "resource";
    case ErrorKind::precondition: return "precondition";
    }
    return "unknown";
}

json arcs_json(const std::vector<Arc>& arcs)
{
    json out = json::array();
    for (const auto& a : arcs) out.push_back({num(a.lo), num(a.hi)});
    return out;
}

json hypotheses_json(const HypothesisReport& h)
{
    return {{"H1", h.h1},
            {"H2", h.h2},
            {"P", h.p},
            {"P_prime", h.p_prime},
            {"passes", h.passes()},
            {"sigma", num(h.sigma)},
            {"L", num(h.big_L)},
            {"region_A", arcs_json(h.region_A)},
            {"q", h.q},
            {"m", h.m},
            {"delta", num(h.delta)},
            {"alpha", num(h.alpha)},
            {"smoothness", h.smoothness},
            {"oscillation", num(h.oscillation)},
            {"holder_ratio", num(h.holder_ratio)},
            {"eps_phi", num(h.eps_phi)},
            {"vep", num(h.vep_value)},
            {"vepp", num(h.vepp_value)},
            {"eps_phi_prime", num(h.eps_phi_prime)},
            {"vep_prime", num(h.vep_prime_value)},
            {"vepp_prime", num(h.vepp_prime_value)},
            {"branches_meeting_A", h.branches_meeting_A},
            {"uncertified_cells", h.uncertified_cells},
            {"note", h.note}};
}

json thermo_json(const ThermoReport& t)
{
    return {{"pressure", num(t.pressure)},
            {"lambda", num(t.lambda)},
            {"entropy", num(t.entropy)},
            {"lyapunov", num(t.lyapunov)},
            {"dimension", opt_num(t.dimension)},
            {"tau", num(t.tau)},
            {"N", t.grid.n},
            {"scheme", to_string(t.scheme)},
            {"interpolation", to_string(t.interpolation)},
            {"iterations", t.iterations},
            {"right_residual", num(t.right_residual)},
            {"left_residual", num(t.left_residual)},
            {"dropped_pieces", t.dropped_pieces}};
}

json response_json(const ResponseReport& r)
{
    return {{"analytic", num(r.analytic_value)},
            {"fd", num(r.fd_value)},
            {"fd_step", num(r.fd_step)},
            {"abs_error", num(r.abs_error)},
            {"rel_error", num(r.rel_error)},
            {"series_terms", r.series_terms_used},
            {"truncation_tail_bound", opt_num(r.truncation_tail_bound)},
            {"notes", r.notes}};
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

    std::string text() const
    {
        std::ostringstream out;
        line(out, header_);
        for (const auto& r : rows_) line(out, r);
        return out.str();
    }

private:
    static void line(std::ostream& out, const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string cell(Real v) { return format_real(v); }
std::string cell(const std::optional<Real>& v) { return v ? format_real(*v) : std::string(); }

struct Context {
    Context(const RunConfig& cfg, BranchMap map, Potential phi)
        : cfg(cfg), disc(cfg.discretization()), map(std::move(map)), phi(std::move(phi))
    {
    }

    const RunConfig& cfg;
    Discretization disc;
    BranchMap map;
    Potential phi;
    json result = json::object();
    json hypotheses = nullptr;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::string>> csvs;

    void csv(const std::string& name, const Csv& c) { csvs.emplace_back(name, c.text()); }
    void warn(const std::vector<std::string>& w) { warnings.insert(warnings.end(), w.begin(), w.end()); }
    Potential potential(const PotentialSpec& spec) const { return build_potential(spec, map); }
};

// Gate on the standing hypotheses for (map, phi); returns false when the run
// must stop with exit 3.
bool gate(Context& c)
{
    const auto rep = check_hypotheses(c.map, c.phi, c.cfg.aux());
    c.hypotheses = hypotheses_json(rep);
    c.hypotheses["override"] = c.cfg.hypotheses.override_gate;
    if (rep.passes()) return true;
    if (c.cfg.hypotheses.override_gate) {
        c.warnings.push_back("hypotheses failed; continuing because hypotheses.override is set");
        return true;
    }
    return false;
}

void write_density(Context& c, const ThermoReport& t, const SpectralTriple& triple)
{
    Csv csv({"x", "mu_weight", "mu_density", "h", "nu"});
    const Real n = t.grid.n;
    for (int i = 0; i < t.grid.n; ++i)
        csv.row({cell(t.grid.node(i)), cell(t.equilibrium[i]), cell(t.equilibrium[i] * n), cell(triple.h[i]),
                 cell(triple.nu[i])});
    c.csv("density.csv", csv);
}

void cmd_check(Context& c)
{
    c.result = c.hypotheses;
}

void cmd_pressure(Context& c)
{
    const auto sol = solve(c.map, c.phi, c.disc);
    const auto t = thermo_report(c.map, c.phi, sol);
    c.warn(t.warnings);
    c.result = thermo_json(t);
    json oracles = json::object();
    if (c.cfg.pressure.tree_depth) {
        const Real v = pressure_oracle_tree(c.map, c.phi, c.cfg.pressure.x0, *c.cfg.pressure.tree_depth);
        oracles["tree"] = {{"depth", *c.cfg.pressure.tree_depth}, {"x0", num(c.cfg.pressure.x0)}, {"value", num(v)}};
    }
    if (c.cfg.pressure.periodic_period) {
        const auto p = pressure_oracle_periodic(c.map, c.phi, *c.cfg.pressure.periodic_period);
        oracles["periodic"] = {{"period", *c.cfg.pressure.periodic_period},
                               {"value", num(p.value)},
                               {"points", p.points},
                               {"skipped", p.skipped}};
    }
    c.result["oracles"] = oracles;
    write_density(c, t, sol.triple);
}

void cmd_equilibrium(Context& c)
{
    const auto sol = solve(c.map, c.phi, c.disc);
    const auto t = thermo_report(c.map, c.phi, sol);
    c.warn(t.warnings);
    c.result = thermo_json(t);
    write_density(c, t, sol.triple);
}

void cmd_spectrum(Context& c)
{
    const auto sol = solve(c.map, c.phi, c.disc);
    const auto& t = sol.triple;
    c.warn(t.warnings);
    c.result = {{"lambda", num(t.lambda)},
                {"pressure", num(std::log(t.lambda))},
                {"tau", opt_num(t.tau)},
                {"iterations", t.iterations},
                {"right_residual", num(t.right_residual)},
                {"left_residual", num(t.left_residual)},
                {"clipped_mass", num(t.clipped_mass)},
                {"N", sol.op.size()},
                {"degree", sol.op.degree},
                {"dropped_pieces", sol.op.dropped_pieces}};
    Csv csv({"x", "h", "nu"});
    for (int i = 0; i < sol.op.size(); ++i) csv.row({cell(sol.op.grid.node(i)), cell(t.h[i]), cell(t.nu[i])});
    c.csv("eigenvectors.csv", csv);
    if (c.cfg.spectrum.write_matrix) {
        std::vector<std::string> header{"row"};
        for (int j = 0; j < sol.op.size(); ++j) header.push_back("c" + std::to_string(j));
        Csv m(header);
        for (int i = 0; i < sol.op.size(); ++i) {
            std::vector<std::string> r{std::to_string(i)};
            for (Real v : sol.op.matrix.row(i)) r.push_back(cell(v));
            m.row(std::move(r));
        }
        c.csv("matrix.csv", m);
    }
}

Real family_point(const BranchMap& map, const std::optional<Real>& s0)
{
    if (s0) return *s0;
    const auto& p = map.family_params();
    auto it = p.find(map.parameter());
    return it == p.end() ? 0 : it->second;
}

void cmd_response(Context& c)
{
    const auto& r = c.cfg.response;
    c.result["quantity"] = r.quantity;
    if (r.quantity == "pressure-dynamics" || r.quantity == "maxentropy") {
        const auto family = MapFamily::of(c.map);
        const Real s0 = family_point(c.map, r.s0);
        c.result["parameter"] = family.parameter;
        c.result["s0"] = num(s0);
        const auto rep = r.quantity == "maxentropy"
                             ? d_maxentropy_expectation(family, c.potential(r.observable), s0, c.disc, r.fd_step,
                                                        c.cfg.tolerances.series)
                             : d_pressure_d_dynamics(family, c.phi, s0, c.disc, r.fd_step);
        c.result["report"] = response_json(rep);
        return;
    }
    if (r.quantity == "transfer-dynamics") {
        const auto g = c.potential(r.observable);
        const Real v = d_transfer_n_d_dynamics(c.map, c.phi, g, family_direction(c.map), r.x, r.n);
        c.result["x"] = num(r.x);
        c.result["n"] = r.n;
        c.result["value"] = num(v);
        return;
    }
    const auto q = potential_quantity(r.quantity);
    const auto H = c.potential(r.direction);
    const auto g = c.potential(r.observable);
    const PotentialResponse resp(c.map, c.phi, fd_discretization(c.disc), r.method);
    const auto rep = validate_potential_response(resp, q, g, H, r.fd_step);
    c.result["report"] = response_json(rep);
    if (q == PotentialQuantity::density) {
        const auto dh = resp.d_density(H);
        Csv csv({"x", "dh"});
        for (int i = 0; i < dh.size(); ++i) csv.row({cell(dh.grid().node(i)), cell(dh[i])});
        c.csv("d_density.csv", csv);
    }
}

void cmd_correlation(Context& c)
{
    const auto& r = c.cfg.correlation;
    const auto a = c.potential(r.a);
    const auto b = c.potential(r.b);
    auto series = correlation(c.map, c.phi, a, b, r.n_max, c.disc);
    fit_decay(series);
    c.warn(series.notes);
    c.result = {{"n_max", r.n_max},
                {"tau_fit", opt_num(series.tau_fit)},
                {"fit_residual", num(series.fit_residual)},
                {"fit_points", series.fit_points}};
    std::optional<CorrelationDerivative> dc;
    if (r.dynamics_derivative) {
        const auto family = MapFamily::of(c.map);
        const Real s0 = family_point(c.map, r.s0);
        dc = d_correlation_d_dynamics(family, a, b, r.n_max, s0, c.disc);
        c.result["dynamics_derivative"] = {{"s0", num(dc->s0)}, {"step", num(dc->step)}, {"max_tail", num(dc->max_tail)}};
    }
    Csv csv(dc ? std::vector<std::string>{"n", "C", "dC_ds"} : std::vector<std::string>{"n", "C"});
    for (int n = 0; n <= r.n_max; ++n) {
        std::vector<std::string> row{std::to_string(n), cell(series.values[n])};
        if (dc) row.push_back(cell(dc->values[n]));
        csv.row(std::move(row));
    }
    c.csv("correlation.csv", csv);
}

void cmd_clt(Context& c)
{
    const auto p = clt_parameters(c.map, c.phi, c.potential(c.cfg.clt.psi), c.disc, c.cfg.tolerances.series);
    c.warn(p.notes);
    c.result = {{"mean", num(p.mean)},
                {"variance", num(p.variance)},
                {"raw_variance", num(p.raw_variance)},
                {"coboundary", p.coboundary},
                {"terms", p.terms},
                {"tail_bound", opt_num(p.tail_bound)}};
}

json curve_json(const FreeEnergyCurve& f)
{
    return {{"t0", num(f.t0)},
            {"t0_automatic", f.t0_automatic},
            {"n_t", f.t.size()},
            {"mean", num(f.mean())},
            {"curvature_at_0", num(f.curvature(0))},
            {"affine", f.affine},
            {"convex", f.convex},
            {"bounds_ok", f.bounds_ok},
            {"psi_inf", num(f.psi_inf)},
            {"psi_sup", num(f.psi_sup)}};
}

void cmd_free_energy(Context& c)
{
    const auto psi = c.potential(c.cfg.free_energy.psi);
    const auto curve = free_energy(c.map, c.phi, psi, c.disc, c.cfg.free_energy_options());
    c.warn(curve.notes);
    c.result["free_energy"] = curve_json(curve);
    Csv fe({"t", "E", "dE", "d2E"});
    for (std::size_t k = 0; k < curve.t.size(); ++k)
        fe.row({cell(curve.t[k]), cell(curve.e[k]), cell(curve.de[k]), cell(curve.d2e[k])});
    c.csv("free_energy.csv", fe);
    const auto rate = rate_function(curve, c.cfg.free_energy.n_s);
    c.result["rate_function"] = {{"argmin", num(rate.argmin)},
                                 {"at_argmin", num(rate.at_argmin)},
                                 {"convex", rate.convex},
                                 {"nonnegative", rate.nonnegative},
                                 {"s_min", num(rate.s.front())},
                                 {"s_max", num(rate.s.back())}};
    Csv rf({"s", "I"});
    for (std::size_t k = 0; k < rate.s.size(); ++k) rf.row({cell(rate.s[k]), cell(rate.values[k])});
    c.csv("rate_function.csv", rf);
}

void cmd_ldp(Context& c, std::uint64_t seed)
{
    const auto& l = c.cfg.ldp;
    const auto psi = c.potential(c.cfg.free_energy.psi);
    const auto sol = solve(c.map, c.phi, c.disc);
    const auto curve = free_energy(c.map, c.phi, psi, c.disc, c.cfg.free_energy_options());
    c.warn(curve.notes);
    c.result["free_energy"] = curve_json(curve);
    LdpOptions opts;
    opts.a = l.interval.first;
    opts.b = l.interval.second;
    opts.n_list = l.n_list;
    opts.samples = l.samples;
    opts.batches = l.batches;
    opts.seed = seed;
    const auto exp = ldp_monte_carlo(c.map, sol, psi, curve, opts);
    json rows = json::array();
    Csv csv({"n", "hits", "samples", "rate", "ci_low", "ci_high", "ci_half_width", "display"});
    for (const auto& r : exp.rows) {
        rows.push_back({{"n", r.n},
                        {"hits", r.hits},
                        {"samples", r.samples},
                        {"rate", opt_num(r.rate)},
                        {"ci_low", num(r.ci_low)},
                        {"ci_high", num(r.ci_high)},
                        {"ci_half_width", num(r.ci_half_width)},
                        {"display", r.display}});
        csv.row({std::to_string(r.n), std::to_string(r.hits), std::to_string(r.samples), cell(r.rate),
                 cell(r.ci_low), cell(r.ci_high), cell(r.ci_half_width), r.display});
    }
    c.result["experiment"] = {{"a", num(exp.a)},
                              {"b", num(exp.b)},
                              {"seed", exp.seed},
                              {"samples", exp.samples},
                              {"batches", exp.batches},
                              {"predicted_upper", num(exp.predicted_upper)},
                              {"predicted_lower", num(exp.predicted_lower)},
                              {"rows", rows}};
    c.csv("ldp.csv", csv);
}

void cmd_rate_scan(Context& c)
{
    const auto family = MapFamily::of(c.map);
    const auto v = c.cfg.scan.values();
    const auto scan = rate_continuity_scan(family, c.phi, c.potential(c.cfg.free_energy.psi), v, c.cfg.scan.n_s, c.disc,
                                           c.cfg.free_energy_options());
    c.result = {{"parameter", family.parameter},
                {"values", nums(scan.v)},
                {"s_min", num(scan.s.front())},
                {"s_max", num(scan.s.back())},
                {"neighbor_sup", nums(scan.neighbor_sup)},
                {"max_neighbor_sup", num(scan.max_neighbor_sup)}};
    std::vector<std::string> header{"s"};
    for (Real x : scan.v) header.push_back("I@" + format_real(x));
    Csv csv(header);
    for (std::size_t j = 0; j < scan.s.size(); ++j) {
        std::vector<std::string> row{cell(scan.s[j])};
        for (const auto& r : scan.table) row.push_back(cell(r[j]));
        csv.row(std::move(row));
    }
    c.csv("rate_scan.csv", csv);
}

void cmd_bifurcation(Context& c)
{
    const auto family = MapFamily::of(c.map);
    const auto v = c.cfg.scan.values();
    const auto rows = bifurcation_scan(family, c.phi, v, c.disc);
    const auto& qs = c.cfg.scan.quantities;
    std::vector<std::string> header{family.parameter.empty() ? std::string("parameter") : family.parameter};
    header.insert(header.end(), qs.begin(), qs.end());
    Csv csv(header);
    for (const auto& r : rows) {
        std::vector<std::string> row{cell(r.parameter)};
        for (const auto& q : qs) {
            if (q == "pressure") row.push_back(cell(r.pressure));
            if (q == "entropy") row.push_back(cell(r.entropy));
            if (q == "lyapunov") row.push_back(cell(r.lyapunov));
            if (q == "dimension") row.push_back(cell(r.dimension));
        }
        csv.row(std::move(row));
    }
    c.result = {{"parameter", family.parameter}, {"rows", rows.size()}, {"quantities", qs}};
    c.csv("bifurcation.csv", csv);
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::resource, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorKind::resource, "write failed for " + path.string());
}

json status_json(int code, const std::string& kind, const std::string& message)
{
    json s = {{"exit_code", code}, {"ok", code == kExitOk}};
    if (code != kExitOk) s["error"] = {{"kind", kind}, {"message", message}};
    return s;
}

}  // namespace

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::config: return kExitConfig;
    case ErrorKind::hypotheses: return kExitHypotheses;
    case ErrorKind::resource: return kExitResource;
    case ErrorKind::solver:
    case ErrorKind::precondition: return kExitSolver;
    }
    return kExitSolver;
}

const std::vector<std::string>& commands()
{
    static const std::vector<std::string> names{"check-hypotheses", "pressure",    "spectrum", "equilibrium",
                                                "response",         "correlation", "clt",      "free-energy",
                                                "ldp",              "rate-scan",   "bifurcation-scan"};
    return names;
}

RunResult run(const std::string& command, const RunConfig& cfg_in, const Overrides& ov)
{
    const auto start = std::chrono::steady_clock::now();
    RunConfig cfg = cfg_in;
    if (ov.seed) cfg.ldp.seed = *ov.seed;
    // The echo omits the --out override so that runs into different
    // directories stay byte-identical.
    RunResult res;
    json report = {{"schema", kSchema}, {"command", command}, {"config", to_json(cfg)}};
    if (ov.out_dir) cfg.output.dir = *ov.out_dir;
    json result = nullptr;
    json hypotheses = nullptr;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::string>> csvs;
    std::string kind, message;

    try {
        if (std::find(commands().begin(), commands().end(), command) == commands().end())
            fail(ErrorKind::config, "unknown command '" + command + "'");
        if (ov.threads) {
            if (*ov.threads < 1) fail(ErrorKind::config, "--threads must be >= 1");
            omp_set_num_threads(*ov.threads);
        }
        if (cfg.n > kMaxGrid)
            fail(ErrorKind::resource, "discretization.N = " + std::to_string(cfg.n) + " exceeds the limit " +
                                          std::to_string(kMaxGrid));

        const BranchMap map = build_map(cfg.map);
        Context c(cfg, map, build_potential(cfg.potential, map));
        try {
            const bool ok = gate(c);
            if (!ok && command != "check-hypotheses")
                fail(ErrorKind::hypotheses, "standing hypotheses fail for the configured map and potential");
            if (!ok) {
                kind = "hypotheses";
                message = "standing hypotheses fail";
                res.exit_code = kExitHypotheses;
            }
            if (ok || command == "check-hypotheses") {
                static const std::map<std::string, std::function<void(Context&)>> table{
                    {"check-hypotheses", cmd_check},   {"pressure", cmd_pressure},
                    {"spectrum", cmd_spectrum},        {"equilibrium", cmd_equilibrium},
                    {"response", cmd_response},        {"correlation", cmd_correlation},
                    {"clt", cmd_clt},                  {"free-energy", cmd_free_energy},
                    {"rate-scan", cmd_rate_scan},      {"bifurcation-scan", cmd_bifurcation}};
                if (command == "ldp")
                    cmd_ldp(c, cfg.ldp.seed);
                else
                    table.at(command)(c);
            }
        } catch (...) {
            result = c.result;
            hypotheses = c.hypotheses;
            warnings = c.warnings;
            throw;
        }
        result = c.result;
        hypotheses = c.hypotheses;
        warnings = c.warnings;
        csvs = std::move(c.csvs);
    } catch (const Error& e) {
        res.exit_code = exit_code(e.kind());
        kind = kind_name(e.kind());
        message = e.what();
    } catch (const std::bad_alloc&) {
        res.exit_code = kExitResource;
        kind = "resource";
        message = "out of memory";
    } catch (const std::exception& e) {
        res.exit_code = kExitSolver;
        kind = "solver";
        message = e.what();
    }

    report["hypotheses"] = hypotheses;
    report["result"] = result;
    report["warnings"] = warnings;
    report["status"] = status_json(res.exit_code, kind, message);

    try {
        const fs::path dir(cfg.output.dir);
        fs::create_directories(dir);
        for (const auto& [name, text] : csvs) {
            write_text(dir / name, text);
            res.files.push_back((dir / name).string());
        }
        write_text(dir / "report.json", report.dump(2) + "\n");
        res.files.push_back((dir / "report.json").string());
    } catch (const std::exception& e) {
        if (res.exit_code == kExitOk) res.exit_code = kExitResource;
        report["status"] = status_json(res.exit_code, "resource", e.what());
    }

    res.report = std::move(report);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

RunResult run_file(const std::string& command, const std::string& config_path, const Overrides& ov)
{
    std::ifstream in(config_path, std::ios::binary);
    std::string kind = "config", message;
    if (!in) {
        message = "cannot read config file '" + config_path + "'";
    } else {
        std::ostringstream text;
        text << in.rdbuf();
        try {
            return run(command, parse_config(text.str()), ov);
        } catch (const Error& e) {
            kind = kind_name(e.kind());
            message = e.what();
        }
    }
    RunResult res;
    res.exit_code = kExitConfig;
    res.report = {{"schema", kSchema},
                  {"command", command},
                  {"config", nullptr},
                  {"hypotheses", nullptr},
                  {"result", nullptr},
                  {"warnings", json::array()},
                  {"status", status_json(res.exit_code, kind, message)}};
    if (ov.out_dir) {
        try {
            fs::create_directories(*ov.out_dir);
            const auto path = fs::path(*ov.out_dir) / "report.json";
            write_text(path, res.report.dump(2) + "\n");
            res.files.push_back(path.string());
        } catch (const std::exception&) {
        }
    }
    return res;
}

}  // namespace ruelle::cli
