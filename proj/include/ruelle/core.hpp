#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ruelle {

// Extended precision throughout: finite-difference validation of the response
// formulas needs eigen-solves resolved far below double rounding.
using Real = long double;

inline constexpr Real kPi = std::numbers::pi_v<Real>;
inline constexpr Real kTwoPi = 2 * kPi;
inline constexpr Real kEps = std::numeric_limits<Real>::epsilon();
inline constexpr Real kCircleDiameter = 0.5L;

enum class ErrorKind { config, hypotheses, solver, resource, precondition };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// R/Z with fundamental domain [0,1).
inline Real wrap(Real x)
{
    Real r = x - std::floor(x);
    return r >= 1 ? r - 1 : r;
}

inline Real circle_distance(Real x, Real y)
{
    Real d = std::fabs(wrap(x) - wrap(y));
    return std::min(d, 1 - d);
}

}  // namespace ruelle
