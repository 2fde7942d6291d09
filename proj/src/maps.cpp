#include "ruelle/maps.hpp"

#include <cstdio>
#include <sstream>

namespace ruelle {

Real Polynomial::operator()(Real y) const
{
    Real acc = 0;
    for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * y + *it;
    return acc;
}

Real Polynomial::derivative(Real y, int order) const
{
    Real acc = 0;
    for (int i = static_cast<int>(coef.size()) - 1; i >= order; --i) {
        Real falling = 1;
        for (int j = 0; j < order; ++j) falling *= static_cast<Real>(i - j);
        acc = acc * y + coef[i] * falling;
    }
    return acc;
}

namespace {

class LinearModel final : public MapModel {
public:
    LinearModel(int d, Real shift, Real dshift) : d_(d), shift_(shift), dshift_(dshift) {}
    int degree() const override { return d_; }
    Real breakpoint(int k) const override { return static_cast<Real>(k) / d_; }
    Real lift(int, Real y) const override { return d_ * y + shift_; }
    Real lift_d1(int, Real) const override { return d_; }
    Real lift_d2(int, Real) const override { return 0; }
    Real lift_dparam(int, Real) const override { return dshift_; }
    std::optional<Real> inverse_lift(int, Real target) const override { return (target - shift_) / d_; }

private:
    int d_;
    Real shift_;
    Real dshift_;
};

// y (1 + (2y)^alpha) on [0,1/2], 2y on [1/2,1]
class MannevillePomeauModel final : public MapModel {
public:
    explicit MannevillePomeauModel(Real alpha) : alpha_(alpha) {}
    int degree() const override { return 2; }
    Real breakpoint(int k) const override { return k * 0.5L; }
    Real lift(int k, Real y) const override
    {
        if (k == 1) return 2 * y;
        return y + y * std::pow(2 * y, alpha_);
    }
    Real lift_d1(int k, Real y) const override
    {
        if (k == 1) return 2;
        return 1 + (1 + alpha_) * std::pow(2 * y, alpha_);
    }
    Real lift_d2(int k, Real y) const override
    {
        if (k == 1) return 0;
        return 2 * alpha_ * (1 + alpha_) * std::pow(2 * y, alpha_ - 1);
    }
    Real lift_dparam(int k, Real y) const override
    {
        if (k == 1 || y <= 0) return 0;
        return y * std::pow(2 * y, alpha_) * std::log(2 * y);
    }
    std::optional<Real> inverse_lift(int k, Real target) const override
    {
        if (k == 1) return target / 2;
        if (alpha_ == 1) return (std::sqrt(1 + 8 * target) - 1) / 4;
        return std::nullopt;
    }

private:
    Real alpha_;
};

class PerturbedDoublingModel final : public MapModel {
public:
    explicit PerturbedDoublingModel(Real t) : t_(t) {}
    int degree() const override { return 2; }
    Real breakpoint(int k) const override { return k * 0.5L; }
    Real lift(int, Real y) const override { return 2 * y - t_ * pitchfork_bump(y); }
    Real lift_d1(int, Real y) const override { return 2 - t_ * pitchfork_bump(y, 1); }
    Real lift_d2(int, Real y) const override { return -t_ * pitchfork_bump(y, 2); }
    Real lift_dparam(int, Real y) const override { return -pitchfork_bump(y); }

private:
    Real t_;
};

class PolynomialModel final : public MapModel {
public:
    PolynomialModel(std::vector<Real> breaks, std::vector<Polynomial> lifts)
        : breaks_(std::move(breaks)), lifts_(std::move(lifts))
    {
    }
    int degree() const override { return static_cast<int>(lifts_.size()); }
    Real breakpoint(int k) const override { return breaks_[k]; }
    Real lift(int k, Real y) const override { return lifts_[k](y); }
    Real lift_d1(int k, Real y) const override { return lifts_[k].derivative(y, 1); }
    Real lift_d2(int k, Real y) const override { return lifts_[k].derivative(y, 2); }

private:
    std::vector<Real> breaks_;
    std::vector<Polynomial> lifts_;
};

std::string branch_name(int k) { return "branch " + std::to_string(k); }

}  // namespace

Real pitchfork_bump(Real y, int order)
{
    constexpr Real w = 0.2L;
    const Real z = y - std::nearbyint(y);
    if (std::fabs(z) >= w) return 0;
    const Real u = z / w;
    const Real s = 1 - u * u;
    switch (order) {
    case 0: return z * s * s * s;
    case 1: return s * s * (1 - 7 * u * u);
    case 2: return u * s * (42 * u * u - 18) / w;
    default: return 0;
    }
}

BranchMap::BranchMap(std::shared_ptr<const MapModel> model, std::string tag,
                     std::map<std::string, Real> params, std::string parameter)
    : model_(std::move(model)), tag_(std::move(tag)), params_(std::move(params)),
      parameter_(std::move(parameter))
{
    degree_ = model_->degree();
    if (degree_ < 1) fail(ErrorKind::config, "map degree must be positive");
    breaks_.resize(degree_ + 1);
    for (int k = 0; k <= degree_; ++k) breaks_[k] = model_->breakpoint(k);
    base_ = model_->lift(0, breaks_[0]);
}

Real BranchMap::to_lift(Real x) const { return breaks_[0] + wrap(x - breaks_[0]); }

int BranchMap::branch_of_lift(Real y) const
{
    auto it = std::upper_bound(breaks_.begin() + 1, breaks_.end() - 1, y);
    return static_cast<int>(it - breaks_.begin()) - 1;
}

Real BranchMap::operator()(Real x) const
{
    Real y = to_lift(x);
    return wrap(model_->lift(branch_of_lift(y), y));
}

Real BranchMap::derivative(Real x) const
{
    Real y = to_lift(x);
    return model_->lift_d1(branch_of_lift(y), y);
}

Real BranchMap::second_derivative(Real x) const
{
    Real y = to_lift(x);
    return model_->lift_d2(branch_of_lift(y), y);
}

Real BranchMap::param_derivative(Real x) const
{
    Real y = to_lift(x);
    return model_->lift_dparam(branch_of_lift(y), y);
}

Real BranchMap::inverse_on_branch(int k, Real target) const
{
    Real lo = breaks_[k];
    Real hi = breaks_[k + 1];
    if (auto inv = model_->inverse_lift(k, target)) return std::clamp(*inv, lo, hi);

    Real flo = model_->lift(k, lo) - target;
    Real fhi = model_->lift(k, hi) - target;
    if (flo > 1e-12L || fhi < -1e-12L)
        fail(ErrorKind::config, "non-monotone " + branch_name(k) + ": image does not cover the circle once");
    if (flo >= 0) return lo;

    int iter = 0;
    while (hi - lo > 1e-6L && iter < 100) {
        Real mid = (lo + hi) / 2;
        Real fm = model_->lift(k, mid) - target;
        (fm < 0 ? lo : hi) = mid;
        ++iter;
    }
    Real y = (lo + hi) / 2;
    Real r = model_->lift(k, y) - target;
    for (; iter < 100; ++iter) {
        if (r == 0) break;
        if (r < 0) lo = y; else hi = y;
        Real slope = model_->lift_d1(k, y);
        if (!(slope > 0)) fail(ErrorKind::config, "non-monotone " + branch_name(k) + ": derivative not positive");
        Real next = y - r / slope;
        if (!(next > lo && next < hi)) next = (lo + hi) / 2;
        Real step = std::fabs(next - y);
        y = next;
        r = model_->lift(k, y) - target;
        if (step <= 4 * kEps * std::max<Real>(1, std::fabs(y))) break;
    }
    if (!(std::fabs(r) <= 1e-12L)) {
        std::ostringstream msg;
        msg << "preimage root-find failed on " << branch_name(k) << " (residual "
            << static_cast<double>(r) << ")";
        fail(ErrorKind::solver, msg.str());
    }
    return y;
}

std::vector<Real> BranchMap::preimages(Real x) const
{
    std::vector<Real> out(degree_);
    for (int k = 0; k < degree_; ++k) out[k] = wrap(preimage_lift(x, k));
    return out;
}

BranchMap doubling_map()
{
    return BranchMap(std::make_shared<LinearModel>(2, 0, 0), "doubling");
}

BranchMap linear_map(int d)
{
    if (d < 2) fail(ErrorKind::config, "linear-d needs degree >= 2");
    return BranchMap(std::make_shared<LinearModel>(d, 0, 0), "linear-d", {{"degree", static_cast<Real>(d)}});
}

BranchMap manneville_pomeau_map(Real alpha)
{
    if (!(alpha > 0)) fail(ErrorKind::config, "manneville-pomeau needs alpha > 0");
    return BranchMap(std::make_shared<MannevillePomeauModel>(alpha), "manneville-pomeau", {{"alpha", alpha}},
                     "alpha");
}

BranchMap perturbed_doubling_map(Real t)
{
    // keeps f' >= 2 - t > 1 with margin: bump slope lies in [-0.653, 1]
    if (!(t > -0.9L && t < 0.9L)) fail(ErrorKind::config, "perturbed-doubling needs |t| < 0.9");
    return BranchMap(std::make_shared<PerturbedDoublingModel>(t), "perturbed-doubling", {{"t", t}}, "t");
}

BranchMap translated_doubling_map(Real s)
{
    return BranchMap(std::make_shared<LinearModel>(2, 2 * s, 2), "translated-doubling", {{"s", s}}, "s");
}

BranchMap piecewise_polynomial_map(std::vector<Real> breaks, std::vector<Polynomial> lifts)
{
    const int d = static_cast<int>(lifts.size());
    if (d < 1 || static_cast<int>(breaks.size()) != d + 1)
        fail(ErrorKind::config, "piecewise-polynomial needs d branches and d+1 breakpoints");
    if (std::fabs(breaks[d] - breaks[0] - 1) > 1e-12L)
        fail(ErrorKind::config, "piecewise-polynomial breakpoints must span one turn");
    const Real base = lifts[0](breaks[0]);
    for (int k = 0; k < d; ++k) {
        if (!(breaks[k + 1] > breaks[k])) fail(ErrorKind::config, "breakpoints must increase");
        if (std::fabs(lifts[k](breaks[k]) - (base + k)) > 1e-10L ||
            std::fabs(lifts[k](breaks[k + 1]) - (base + k + 1)) > 1e-10L)
            fail(ErrorKind::config, branch_name(k) + " does not map onto the full circle");
        for (int i = 0; i <= 256; ++i) {
            Real y = breaks[k] + (breaks[k + 1] - breaks[k]) * i / 256;
            if (!(lifts[k].derivative(y) > 0))
                fail(ErrorKind::config, "non-monotone " + branch_name(k));
        }
    }
    return BranchMap(std::make_shared<PolynomialModel>(std::move(breaks), std::move(lifts)), "piecewise-polynomial");
}

namespace {

Real param_or_throw(const std::map<std::string, Real>& params, const std::string& key, const std::string& tag)
{
    auto it = params.find(key);
    if (it == params.end()) fail(ErrorKind::config, tag + " requires parameter '" + key + "'");
    return it->second;
}

}  // namespace

BranchMap builtin_map(const std::string& tag, const std::map<std::string, Real>& params)
{
    if (tag == "doubling") return doubling_map();
    if (tag == "linear-d") {
        Real d = param_or_throw(params, "degree", tag);
        if (d != std::floor(d)) fail(ErrorKind::config, "linear-d degree must be an integer");
        return linear_map(static_cast<int>(d));
    }
    if (tag == "manneville-pomeau") return manneville_pomeau_map(param_or_throw(params, "alpha", tag));
    if (tag == "perturbed-doubling") return perturbed_doubling_map(param_or_throw(params, "t", tag));
    if (tag == "translated-doubling") return translated_doubling_map(param_or_throw(params, "s", tag));
    fail(ErrorKind::config, "unknown map family '" + tag + "'");
}

BranchMap MapFamily::at(Real s) const
{
    auto p = params;
    if (!parameter.empty()) p[parameter] = s;
    return builtin_map(tag, p);
}

MapFamily MapFamily::of(const BranchMap& map)
{
    if (map.family_tag() == "piecewise-polynomial")
        fail(ErrorKind::config, "explicit piecewise-polynomial maps do not form a family");
    return MapFamily{map.family_tag(), map.parameter(), map.family_params()};
}

}  // namespace ruelle
