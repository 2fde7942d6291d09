#include "ruelle/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ruelle::cli {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what)
{
    fail(ErrorKind::config, "config error at '" + path + "': " + what);
}

// A JSON object whose keys must all be consumed.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) bad(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return j_.contains(key); }

    const json* get(const std::string& key)
    {
        if (!j_.contains(key)) return nullptr;
        used_.insert(key);
        return &j_.at(key);
    }

    Real real(const std::string& key, Real def) { return opt_real(key).value_or(def); }
    std::optional<Real> opt_real(const std::string& key)
    {
        const json* v = get(key);
        if (!v) return std::nullopt;
        if (!v->is_number()) bad(at(key), "expected a number");
        return static_cast<Real>(v->get<double>());
    }
    long long integer(const std::string& key, long long def)
    {
        const json* v = get(key);
        if (!v) return def;
        if (!v->is_number_integer()) bad(at(key), "expected an integer");
        return v->get<long long>();
    }
    bool boolean(const std::string& key, bool def)
    {
        const json* v = get(key);
        if (!v) return def;
        if (!v->is_boolean()) bad(at(key), "expected true or false");
        return v->get<bool>();
    }
    std::string string(const std::string& key, const std::string& def)
    {
        const json* v = get(key);
        if (!v) return def;
        if (!v->is_string()) bad(at(key), "expected a string");
        return v->get<std::string>();
    }
    std::vector<Real> reals(const std::string& key)
    {
        const json* v = get(key);
        if (!v) return {};
        return real_array(*v, at(key));
    }
    std::optional<Obj> child(const std::string& key)
    {
        const json* v = get(key);
        if (!v) return std::nullopt;
        return Obj(*v, at(key));
    }

    static std::vector<Real> real_array(const json& v, const std::string& path)
    {
        if (!v.is_array()) bad(path, "expected an array of numbers");
        std::vector<Real> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) bad(path + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(static_cast<Real>(v[i].get<double>()));
        }
        return out;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) bad(at(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

Interpolation parse_interpolation(const std::string& s, const std::string& path)
{
    if (s == "linear") return Interpolation::linear;
    if (s == "fourier") return Interpolation::fourier;
    bad(path, "interpolation must be 'linear' or 'fourier'");
}

PotentialSpec parse_potential(Obj o)
{
    PotentialSpec p;
    p.constant = o.real("constant", 0);
    p.cos = o.reals("cos");
    p.sin = o.reals("sin");
    p.log_derivative = o.real("log_derivative", 0);
    if (auto s = o.child("samples")) {
        p.samples = s->reals("values");
        if (p.samples.size() < 2) bad(s->at("values"), "need at least 2 samples");
        p.samples_interpolation = parse_interpolation(s->string("interpolation", "linear"), s->at("interpolation"));
        s->finish();
    }
    p.holder_exponent = o.opt_real("holder_exponent");
    if (p.holder_exponent && !(*p.holder_exponent > 0 && *p.holder_exponent <= 1))
        bad(o.at("holder_exponent"), "must lie in (0, 1]");
    if (o.has("smoothness")) {
        const long long r = o.integer("smoothness", 0);
        if (r < 0) bad(o.at("smoothness"), "must be >= 0");
        p.smoothness = static_cast<int>(r);
    }
    o.finish();
    return p;
}

PotentialSpec potential_or_default(Obj& parent, const std::string& key)
{
    if (auto c = parent.child(key)) return parse_potential(*c);
    return {};
}

MapSpec parse_map(Obj o)
{
    MapSpec m;
    m.family = o.string("family", "doubling");
    static const std::set<std::string> families{"doubling", "linear-d", "manneville-pomeau", "perturbed-doubling",
                                                "translated-doubling", "piecewise-polynomial"};
    if (!families.count(m.family)) bad(o.at("family"), "unknown map family '" + m.family + "'");
    const bool explicit_branches = m.family == "piecewise-polynomial";
    if (explicit_branches) {
        if (o.has("params")) bad(o.at("params"), "mutually exclusive with explicit branches");
        auto b = o.child("branches");
        if (!b) bad(o.at("branches"), "required for family 'piecewise-polynomial'");
        m.breaks = b->reals("breaks");
        const json* lifts = b->get("lifts");
        if (!lifts || !lifts->is_array()) bad(b->at("lifts"), "expected an array of coefficient arrays");
        for (std::size_t i = 0; i < lifts->size(); ++i)
            m.lifts.push_back(Obj::real_array((*lifts)[i], b->at("lifts") + "[" + std::to_string(i) + "]"));
        b->finish();
    } else {
        if (o.has("branches")) bad(o.at("branches"), "only allowed for family 'piecewise-polynomial'");
        if (auto p = o.child("params")) {
            for (const char* key : {"alpha", "t", "s", "degree"})
                if (auto v = p->opt_real(key)) m.params[key] = *v;
            p->finish();
        }
        if (m.family == "manneville-pomeau" && m.params.count("alpha") && !(m.params["alpha"] > 0))
            bad(o.at("params.alpha"), "alpha must be > 0");
    }
    o.finish();
    return m;
}

Scheme parse_scheme(const std::string& s, const std::string& path)
{
    if (s == "collocation") return Scheme::collocation;
    if (s == "ulam") return Scheme::ulam;
    bad(path, "scheme must be 'collocation' or 'ulam'");
}

json reals_json(const std::vector<Real>& v)
{
    json out = json::array();
    for (Real x : v) out.push_back(static_cast<double>(x));
    return out;
}

json potential_json(const PotentialSpec& p)
{
    json out = json::object();
    out["constant"] = static_cast<double>(p.constant);
    out["cos"] = reals_json(p.cos);
    out["sin"] = reals_json(p.sin);
    out["log_derivative"] = static_cast<double>(p.log_derivative);
    if (!p.samples.empty())
        out["samples"] = {{"values", reals_json(p.samples)}, {"interpolation", to_string(p.samples_interpolation)}};
    if (p.holder_exponent) out["holder_exponent"] = static_cast<double>(*p.holder_exponent);
    if (p.smoothness) out["smoothness"] = *p.smoothness;
    return out;
}

int positive_int(Obj& o, const std::string& key, long long def, long long min = 1)
{
    const long long v = o.integer(key, def);
    if (v < min) bad(o.at(key), "must be >= " + std::to_string(min));
    if (v > 100000000) bad(o.at(key), "too large");
    return static_cast<int>(v);
}

}  // namespace

std::vector<Real> ScanSpec::values() const
{
    if (!(step > 0) || !(stop >= start)) fail(ErrorKind::config, "scan needs step > 0 and stop >= start");
    const long long n = std::llround(static_cast<double>((stop - start) / step));
    if (std::fabs(static_cast<double>(start + n * step - stop)) > 1e-9)
        fail(ErrorKind::config, "scan range is not a whole number of steps");
    std::vector<Real> out;
    for (long long k = 0; k <= n; ++k) out.push_back(start + step * static_cast<Real>(k));
    return out;
}

Discretization RunConfig::discretization() const
{
    Discretization d;
    d.n = n;
    d.scheme = scheme;
    d.interpolation = interpolation;
    d.solver.tol = tolerances.eigen;
    d.solver.max_iter = tolerances.max_iter;
    return d;
}

HypothesisAux RunConfig::aux() const
{
    HypothesisAux a;
    for (const auto& [lo, hi] : hypotheses.region_A) a.region_A.push_back({lo, hi});
    a.q = hypotheses.q;
    a.m = hypotheses.m;
    a.delta = hypotheses.delta;
    a.samples_per_branch = hypotheses.samples_per_branch;
    return a;
}

FreeEnergyOptions RunConfig::free_energy_options() const
{
    FreeEnergyOptions o;
    o.t0 = free_energy.t0;
    o.n_t = free_energy.n_t;
    o.aux = aux();
    return o;
}

RunConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::config, std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig parse_config(const json& doc)
{
    RunConfig c;
    Obj root(doc, "");
    if (auto m = root.child("map")) c.map = parse_map(*m);
    c.potential = potential_or_default(root, "potential");

    if (auto d = root.child("discretization")) {
        c.n = positive_int(*d, "N", 256, 8);
        c.scheme = parse_scheme(d->string("scheme", "collocation"), d->at("scheme"));
        c.interpolation = parse_interpolation(d->string("interpolation", "linear"), d->at("interpolation"));
        if (c.scheme == Scheme::ulam && c.interpolation != Interpolation::linear)
            bad(d->at("interpolation"), "ulam scheme supports linear interpolation only");
        d->finish();
    }
    if (auto t = root.child("tolerances")) {
        c.tolerances.eigen = t->real("eigen", c.tolerances.eigen);
        if (!(c.tolerances.eigen >= kMinTolerance) || !(c.tolerances.eigen < 1))
            bad(t->at("eigen"), "must lie in [64 eps, 1)");
        c.tolerances.max_iter = positive_int(*t, "max_iter", c.tolerances.max_iter);
        c.tolerances.resolvent = t->real("resolvent", c.tolerances.resolvent);
        c.tolerances.series = t->real("series", c.tolerances.series);
        if (!(c.tolerances.resolvent > 0)) bad(t->at("resolvent"), "must be positive");
        if (!(c.tolerances.series > 0)) bad(t->at("series"), "must be positive");
        t->finish();
    }
    if (auto h = root.child("hypotheses")) {
        if (const json* a = h->get("region_A")) {
            if (!a->is_array()) bad(h->at("region_A"), "expected an array of [lo, hi] arcs");
            for (std::size_t i = 0; i < a->size(); ++i) {
                const auto path = h->at("region_A") + "[" + std::to_string(i) + "]";
                const auto arc = Obj::real_array((*a)[i], path);
                if (arc.size() != 2) bad(path, "an arc is [lo, hi]");
                c.hypotheses.region_A.push_back({arc[0], arc[1]});
            }
        }
        c.hypotheses.q = positive_int(*h, "q", 0, 0);
        c.hypotheses.m = positive_int(*h, "m", 0, 0);
        c.hypotheses.delta = h->real("delta", c.hypotheses.delta);
        if (!(c.hypotheses.delta > 0 && c.hypotheses.delta <= 0.5L)) bad(h->at("delta"), "must lie in (0, 0.5]");
        c.hypotheses.samples_per_branch = positive_int(*h, "samples_per_branch", 4096, 16);
        c.hypotheses.override_gate = h->boolean("override", false);
        h->finish();
    }
    if (auto p = root.child("pressure")) {
        if (p->has("tree_depth")) c.pressure.tree_depth = positive_int(*p, "tree_depth", 1);
        if (p->has("periodic_period")) c.pressure.periodic_period = positive_int(*p, "periodic_period", 1);
        c.pressure.x0 = p->real("x0", c.pressure.x0);
        p->finish();
    }
    if (auto s = root.child("spectrum")) {
        c.spectrum.write_matrix = s->boolean("write_matrix", false);
        s->finish();
    }
    if (auto r = root.child("response")) {
        auto& s = c.response;
        s.quantity = r->string("quantity", s.quantity);
        static const std::set<std::string> known{"lambda",   "pressure",          "density",    "conformal",
                                                 "equilibrium", "pressure-dynamics", "maxentropy", "transfer-dynamics"};
        if (!known.count(s.quantity)) bad(r->at("quantity"), "unknown quantity '" + s.quantity + "'");
        s.direction = potential_or_default(*r, "direction");
        s.observable = potential_or_default(*r, "observable");
        s.fd_step = r->real("fd_step", s.fd_step);
        if (!(s.fd_step > 0)) bad(r->at("fd_step"), "must be positive");
        s.s0 = r->opt_real("s0");
        const auto method = r->string("method", "direct");
        if (method == "direct")
            s.method = ResolventMethod::direct;
        else if (method == "neumann")
            s.method = ResolventMethod::neumann;
        else
            bad(r->at("method"), "must be 'direct' or 'neumann'");
        s.x = r->real("x", s.x);
        s.n = positive_int(*r, "n", 1);
        r->finish();
    }
    if (auto r = root.child("correlation")) {
        c.correlation.a = potential_or_default(*r, "a");
        c.correlation.b = potential_or_default(*r, "b");
        c.correlation.n_max = positive_int(*r, "n_max", 20, 0);
        c.correlation.dynamics_derivative = r->boolean("dynamics_derivative", false);
        c.correlation.s0 = r->opt_real("s0");
        r->finish();
    }
    if (auto r = root.child("clt")) {
        c.clt.psi = potential_or_default(*r, "psi");
        r->finish();
    }
    if (auto r = root.child("free_energy")) {
        c.free_energy.psi = potential_or_default(*r, "psi");
        c.free_energy.t0 = r->opt_real("t0");
        if (c.free_energy.t0 && !(*c.free_energy.t0 > 0)) bad(r->at("t0"), "must be positive");
        c.free_energy.n_t = positive_int(*r, "n_t", 41, 5);
        if (c.free_energy.n_t % 2 == 0) bad(r->at("n_t"), "must be odd so that t = 0 is a grid point");
        c.free_energy.n_s = positive_int(*r, "n_s", 41, 3);
        r->finish();
    }
    if (auto r = root.child("ldp")) {
        const auto iv = r->reals("interval");
        if (iv.size() != 2 || !(iv[0] <= iv[1])) bad(r->at("interval"), "expected [a, b] with a <= b");
        c.ldp.interval = {iv[0], iv[1]};
        if (const json* nl = r->get("n_list")) {
            if (!nl->is_array()) bad(r->at("n_list"), "expected an array of integers");
            for (std::size_t i = 0; i < nl->size(); ++i) {
                if (!(*nl)[i].is_number_integer() || (*nl)[i].get<long long>() < 1)
                    bad(r->at("n_list") + "[" + std::to_string(i) + "]", "expected a positive integer");
                c.ldp.n_list.push_back((*nl)[i].get<int>());
            }
            if (!std::is_sorted(c.ldp.n_list.begin(), c.ldp.n_list.end()) ||
                std::adjacent_find(c.ldp.n_list.begin(), c.ldp.n_list.end()) != c.ldp.n_list.end())
                bad(r->at("n_list"), "must be strictly increasing");
        }
        c.ldp.samples = r->integer("samples", c.ldp.samples);
        if (c.ldp.samples < 2) bad(r->at("samples"), "must be >= 2");
        c.ldp.batches = positive_int(*r, "batches", 20, 2);
        const long long seed = r->integer("seed", 0);
        if (seed < 0) bad(r->at("seed"), "must be >= 0");
        c.ldp.seed = static_cast<std::uint64_t>(seed);
        r->finish();
    }
    if (auto r = root.child("scan")) {
        c.scan.start = r->real("start", 0);
        c.scan.stop = r->real("stop", 0);
        c.scan.step = r->real("step", 0);
        if (const json* q = r->get("quantities")) {
            static const std::set<std::string> known{"pressure", "entropy", "lyapunov", "dimension"};
            if (!q->is_array()) bad(r->at("quantities"), "expected an array of names");
            c.scan.quantities.clear();
            for (std::size_t i = 0; i < q->size(); ++i) {
                const auto path = r->at("quantities") + "[" + std::to_string(i) + "]";
                if (!(*q)[i].is_string() || !known.count((*q)[i].get<std::string>()))
                    bad(path, "expected one of pressure, entropy, lyapunov, dimension");
                c.scan.quantities.push_back((*q)[i].get<std::string>());
            }
        }
        c.scan.n_s = positive_int(*r, "n_s", 21, 2);
        r->finish();
    }
    if (auto o = root.child("output")) {
        c.output.dir = o->string("dir", c.output.dir);
        o->finish();
    }
    root.finish();
    return c;
}

json to_json(const RunConfig& c)
{
    json j;
    json map = {{"family", c.map.family}};
    if (c.map.family == "piecewise-polynomial") {
        json lifts = json::array();
        for (const auto& l : c.map.lifts) lifts.push_back(reals_json(l));
        map["branches"] = {{"breaks", reals_json(c.map.breaks)}, {"lifts", lifts}};
    } else {
        json params = json::object();
        for (const auto& [k, v] : c.map.params) params[k] = static_cast<double>(v);
        map["params"] = params;
    }
    j["map"] = map;
    j["potential"] = potential_json(c.potential);
    j["discretization"] = {{"N", c.n}, {"scheme", to_string(c.scheme)}, {"interpolation", to_string(c.interpolation)}};
    j["tolerances"] = {{"eigen", static_cast<double>(c.tolerances.eigen)},
                       {"max_iter", c.tolerances.max_iter},
                       {"resolvent", static_cast<double>(c.tolerances.resolvent)},
                       {"series", static_cast<double>(c.tolerances.series)}};
    json arcs = json::array();
    for (const auto& [lo, hi] : c.hypotheses.region_A) arcs.push_back({static_cast<double>(lo), static_cast<double>(hi)});
    j["hypotheses"] = {{"region_A", arcs},
                       {"q", c.hypotheses.q},
                       {"m", c.hypotheses.m},
                       {"delta", static_cast<double>(c.hypotheses.delta)},
                       {"samples_per_branch", c.hypotheses.samples_per_branch},
                       {"override", c.hypotheses.override_gate}};
    json pressure = {{"x0", static_cast<double>(c.pressure.x0)}};
    if (c.pressure.tree_depth) pressure["tree_depth"] = *c.pressure.tree_depth;
    if (c.pressure.periodic_period) pressure["periodic_period"] = *c.pressure.periodic_period;
    j["pressure"] = pressure;
    j["spectrum"] = {{"write_matrix", c.spectrum.write_matrix}};
    json response = {{"quantity", c.response.quantity},
                     {"direction", potential_json(c.response.direction)},
                     {"observable", potential_json(c.response.observable)},
                     {"fd_step", static_cast<double>(c.response.fd_step)},
                     {"method", c.response.method == ResolventMethod::direct ? "direct" : "neumann"},
                     {"x", static_cast<double>(c.response.x)},
                     {"n", c.response.n}};
    if (c.response.s0) response["s0"] = static_cast<double>(*c.response.s0);
    j["response"] = response;
    json corr = {{"a", potential_json(c.correlation.a)},
                 {"b", potential_json(c.correlation.b)},
                 {"n_max", c.correlation.n_max},
                 {"dynamics_derivative", c.correlation.dynamics_derivative}};
    if (c.correlation.s0) corr["s0"] = static_cast<double>(*c.correlation.s0);
    j["correlation"] = corr;
    j["clt"] = {{"psi", potential_json(c.clt.psi)}};
    json fe = {{"psi", potential_json(c.free_energy.psi)}, {"n_t", c.free_energy.n_t}, {"n_s", c.free_energy.n_s}};
    if (c.free_energy.t0) fe["t0"] = static_cast<double>(*c.free_energy.t0);
    j["free_energy"] = fe;
    j["ldp"] = {{"interval", {static_cast<double>(c.ldp.interval.first), static_cast<double>(c.ldp.interval.second)}},
                {"n_list", c.ldp.n_list},
                {"samples", c.ldp.samples},
                {"batches", c.ldp.batches},
                {"seed", c.ldp.seed}};
    j["scan"] = {{"start", static_cast<double>(c.scan.start)},
                 {"stop", static_cast<double>(c.scan.stop)},
                 {"step", static_cast<double>(c.scan.step)},
                 {"quantities", c.scan.quantities},
                 {"n_s", c.scan.n_s}};
    j["output"] = {{"dir", c.output.dir}};
    return j;
}

BranchMap build_map(const MapSpec& spec)
{
    if (spec.family == "piecewise-polynomial") {
        std::vector<Polynomial> lifts;
        for (const auto& l : spec.lifts) lifts.push_back(Polynomial{l});
        return piecewise_polynomial_map(spec.breaks, std::move(lifts));
    }
    return builtin_map(spec.family, spec.params);
}

Potential build_potential(const PotentialSpec& spec, const BranchMap& map)
{
    Potential p = Potential::trig(spec.constant, spec.cos, spec.sin);
    if (spec.log_derivative != 0) p += Potential::log_derivative(map, spec.log_derivative);
    if (!spec.samples.empty()) {
        const int n = static_cast<int>(spec.samples.size());
        p += Potential::samples(GridFunction(Grid{n, 0}, spec.samples, spec.samples_interpolation));
    }
    if (spec.holder_exponent || spec.smoothness)
        p.with_regularity(spec.holder_exponent.value_or(p.holder_exponent()), spec.smoothness.value_or(p.smoothness_order()));
    return p;
}

}  // namespace ruelle::cli
