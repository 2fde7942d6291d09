#include "ruelle/potential.hpp"

#include <cstdio>

namespace ruelle {

Potential Potential::constant(Real c)
{
    Potential p;
    p.c0_ = c;
    return p;
}

Potential Potential::trig(Real c0, std::vector<Real> a, std::vector<Real> b)
{
    Potential p;
    p.c0_ = c0;
    const std::size_t K = std::max(a.size(), b.size());
    a.resize(K, 0);
    b.resize(K, 0);
    p.a_ = std::move(a);
    p.b_ = std::move(b);
    return p;
}

Potential Potential::cos_mode(int k, Real amplitude)
{
    std::vector<Real> a(k, 0);
    a[k - 1] = amplitude;
    return trig(0, std::move(a));
}

Potential Potential::sin_mode(int k, Real amplitude)
{
    std::vector<Real> b(k, 0);
    b[k - 1] = amplitude;
    return trig(0, {}, std::move(b));
}

Potential Potential::log_derivative(const BranchMap& map, Real coef)
{
    Potential p;
    p.map_ = std::make_shared<const BranchMap>(map);
    p.log_coef_ = coef;
    p.r_ = 1;
    return p;
}

Potential Potential::samples(GridFunction g)
{
    Potential p;
    p.samples_ = std::move(g);
    p.r_ = 0;
    return p;
}

bool Potential::is_constant() const
{
    auto zero = [](Real v) { return v == 0; };
    return std::all_of(a_.begin(), a_.end(), zero) && std::all_of(b_.begin(), b_.end(), zero) &&
           !has_log_part() && !samples_;
}

bool Potential::is_geometric() const
{
    auto zero = [](Real v) { return v == 0; };
    return c0_ == 0 && std::all_of(a_.begin(), a_.end(), zero) && std::all_of(b_.begin(), b_.end(), zero) &&
           !samples_;
}

Potential& Potential::with_regularity(Real alpha, int r)
{
    if (!(alpha > 0 && alpha <= 1)) fail(ErrorKind::config, "holder exponent must lie in (0,1]");
    if (r < 0) fail(ErrorKind::config, "smoothness order must be >= 0");
    alpha_ = alpha;
    r_ = r;
    return *this;
}

Potential Potential::rebound(const BranchMap& map) const
{
    Potential p = *this;
    if (has_log_part()) p.map_ = std::make_shared<const BranchMap>(map);
    return p;
}

Real Potential::trig_value(Real x) const
{
    Real acc = c0_;
    for (std::size_t k = 0; k < a_.size(); ++k) {
        const Real th = kTwoPi * static_cast<Real>(k + 1) * x;
        if (a_[k] != 0) acc += a_[k] * std::cos(th);
        if (b_[k] != 0) acc += b_[k] * std::sin(th);
    }
    return acc;
}

Real Potential::trig_derivative(Real x, int order) const
{
    Real acc = 0;
    for (std::size_t k = 0; k < a_.size(); ++k) {
        const Real w = kTwoPi * static_cast<Real>(k + 1);
        const Real th = w * x;
        const Real c = std::cos(th), s = std::sin(th);
        if (order == 1)
            acc += w * (b_[k] * c - a_[k] * s);
        else
            acc += -w * w * (a_[k] * c + b_[k] * s);
    }
    return acc;
}

Real Potential::on_branch(Real y, int k) const
{
    Real v = trig_value(y);
    if (has_log_part()) v += log_coef_ * std::log(map_->lift_d1(k, y));
    if (samples_) v += sample_scale_ * (*samples_)(y);
    return v;
}

Real Potential::operator()(Real x) const
{
    if (has_log_part()) {
        Real y = map_->to_lift(x);
        return on_branch(y, map_->branch_of_lift(y));
    }
    return on_branch(x, 0);
}

Real Potential::derivative_on_branch(Real y, int k) const
{
    Real v = trig_derivative(y, 1);
    if (has_log_part()) v += log_coef_ * map_->lift_d2(k, y) / map_->lift_d1(k, y);
    if (samples_) v += sample_scale_ * samples_->derivative(y);
    return v;
}

Real Potential::derivative(Real x) const
{
    if (has_log_part()) {
        Real y = map_->to_lift(x);
        return derivative_on_branch(y, map_->branch_of_lift(y));
    }
    return derivative_on_branch(x, 0);
}

Real Potential::second_derivative(Real x) const
{
    Real v = trig_derivative(x, 2);
    if (has_log_part() || samples_) {
        Potential rest = *this;
        rest.c0_ = 0;
        rest.a_.clear();
        rest.b_.clear();
        constexpr Real h = 1e-6L;
        v += (rest.derivative(x + h) - rest.derivative(x - h)) / (2 * h);
    }
    return v;
}

Potential& Potential::operator+=(const Potential& o)
{
    c0_ += o.c0_;
    const std::size_t K = std::max(a_.size(), o.a_.size());
    a_.resize(K, 0);
    b_.resize(K, 0);
    for (std::size_t k = 0; k < o.a_.size(); ++k) {
        a_[k] += o.a_[k];
        b_[k] += o.b_[k];
    }
    if (o.has_log_part()) {
        if (has_log_part() && (map_->family_tag() != o.map_->family_tag() ||
                               map_->family_params() != o.map_->family_params()))
            fail(ErrorKind::precondition, "cannot add log f' terms bound to different maps");
        if (!map_) map_ = o.map_;
        log_coef_ += o.log_coef_;
    }
    if (o.samples_) {
        if (samples_) {
            if (!(samples_->grid() == o.samples_->grid()) ||
                samples_->interpolation() != o.samples_->interpolation())
                fail(ErrorKind::precondition, "cannot add grid samples on different grids");
            std::vector<Real> v(samples_->size());
            for (int i = 0; i < samples_->size(); ++i)
                v[i] = sample_scale_ * (*samples_)[i] + o.sample_scale_ * (*o.samples_)[i];
            samples_ = GridFunction(samples_->grid(), std::move(v), samples_->interpolation());
            sample_scale_ = 1;
        } else {
            samples_ = o.samples_;
            sample_scale_ = o.sample_scale_;
        }
    }
    alpha_ = std::min(alpha_, o.alpha_);
    r_ = std::min(r_, o.r_);
    return *this;
}

Potential& Potential::operator*=(Real s)
{
    c0_ *= s;
    for (auto& v : a_) v *= s;
    for (auto& v : b_) v *= s;
    log_coef_ *= s;
    sample_scale_ *= s;
    return *this;
}

std::string Potential::describe() const
{
    std::string out;
    char buf[64];
    auto term = [&](const std::string& t) { out += (out.empty() ? "" : " + ") + t; };
    if (c0_ != 0 || (a_.empty() && !has_log_part() && !samples_)) {
        std::snprintf(buf, sizeof buf, "%.6Lg", c0_);
        term(buf);
    }
    for (std::size_t k = 0; k < a_.size(); ++k) {
        if (a_[k] != 0) {
            std::snprintf(buf, sizeof buf, "%.6Lg*cos(%zu)", a_[k], k + 1);
            term(buf);
        }
        if (b_[k] != 0) {
            std::snprintf(buf, sizeof buf, "%.6Lg*sin(%zu)", b_[k], k + 1);
            term(buf);
        }
    }
    if (has_log_part()) {
        std::snprintf(buf, sizeof buf, "%.6Lg*log f'", log_coef_);
        term(buf);
    }
    if (samples_) term("samples(N=" + std::to_string(samples_->size()) + ")");
    return out;
}

}  // namespace ruelle
