#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ruelle/format.hpp"
#include "ruelle/rng.hpp"
#include "ruelle/stats.hpp"

namespace ruelle::test {

inline Discretization disc(int n, Interpolation interp = Interpolation::linear, Real tol = 1e-13L,
                           Scheme scheme = Scheme::collocation)
{
    Discretization d;
    d.n = n;
    d.scheme = scheme;
    d.interpolation = interp;
    d.solver.tol = tol;
    return d;
}

inline Observable as_observable(const Potential& p)
{
    return [p](Real x) { return p(x); };
}

inline Real sup_diff(std::span<const Real> a, std::span<const Real> b)
{
    Real m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline const Real kLog2 = std::log(Real(2));
inline const Real kLog3 = std::log(Real(3));

}  // namespace ruelle::test
