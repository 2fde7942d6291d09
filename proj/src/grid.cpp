#include "ruelle/grid.hpp"

namespace ruelle {

std::vector<Real> Grid::nodes() const
{
    std::vector<Real> out(n);
    for (int i = 0; i < n; ++i) out[i] = node(i);
    return out;
}

Real fourier_cardinal(int n, Real z)
{
    z = wrap(z);
    if (z > 0.5L) z -= 1;
    if (z == 0) return 1;
    const Real num = std::sin(n * kPi * z);
    if (n % 2 == 0) return num / (n * std::tan(kPi * z));
    return num / (n * std::sin(kPi * z));
}

GridFunction::GridFunction(Grid grid, std::vector<Real> values, Interpolation interp)
    : grid_(grid), values_(std::move(values)), interp_(interp)
{
    const int n = grid_.n;
    if (n < 1 || static_cast<int>(values_.size()) != n)
        fail(ErrorKind::precondition, "grid function size does not match grid");
    if (interp_ == Interpolation::fourier) {
        if (grid_.offset != 0) fail(ErrorKind::config, "fourier interpolation needs nodes at i/N");
        std::vector<Real> c(n), s(n);
        for (int m = 0; m < n; ++m) {
            c[m] = std::cos(kTwoPi * m / n);
            s[m] = std::sin(kTwoPi * m / n);
        }
        const int K = n / 2;
        cos_coef_.assign(K + 1, 0);
        sin_coef_.assign(K + 1, 0);
        for (int k = 0; k <= K; ++k) {
            Real a = 0, b = 0;
            for (int j = 0; j < n; ++j) {
                const int m = static_cast<int>((static_cast<long long>(k) * j) % n);
                a += values_[j] * c[m];
                b += values_[j] * s[m];
            }
            const bool half = (k == 0) || (n % 2 == 0 && k == K);
            cos_coef_[k] = (half ? 1 : 2) * a / n;
            sin_coef_[k] = (half ? 0 : 2) * b / n;
        }
    } else {
        slope_.resize(n);
        for (int i = 0; i < n; ++i)
            slope_[i] = (values_[(i + 1) % n] - values_[(i + n - 1) % n]) * n / 2;
    }
}

Real GridFunction::linear_eval(std::span<const Real> v, Real x) const
{
    const int n = grid_.n;
    Real u = wrap(x) * n - grid_.offset;
    Real fl = std::floor(u);
    Real theta = u - fl;
    long long j = static_cast<long long>(fl);
    int j0 = static_cast<int>(((j % n) + n) % n);
    int j1 = (j0 + 1) % n;
    return v[j0] * (1 - theta) + v[j1] * theta;
}

Real GridFunction::fourier_eval(Real x, bool derivative) const
{
    const Real theta = kTwoPi * wrap(x);
    const Real c1 = std::cos(theta), s1 = std::sin(theta);
    Real ck = 1, sk = 0;
    Real acc = derivative ? 0 : cos_coef_[0];
    for (std::size_t k = 1; k < cos_coef_.size(); ++k) {
        const Real cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
        if (derivative)
            acc += kTwoPi * static_cast<Real>(k) * (sin_coef_[k] * ck - cos_coef_[k] * sk);
        else
            acc += cos_coef_[k] * ck + sin_coef_[k] * sk;
    }
    return acc;
}

Real GridFunction::operator()(Real x) const
{
    const int n = grid_.n;
    const Real u = wrap(x) * n - grid_.offset;
    const Real r = std::nearbyint(u);
    if (std::fabs(u - r) <= 8 * kEps * n) {
        long long j = static_cast<long long>(r);
        return values_[static_cast<int>(((j % n) + n) % n)];
    }
    if (interp_ == Interpolation::fourier) return fourier_eval(x, false);
    return linear_eval(values_, x);
}

Real GridFunction::derivative(Real x) const
{
    if (interp_ == Interpolation::fourier) return fourier_eval(x, true);
    return linear_eval(slope_, x);
}

}  // namespace ruelle
