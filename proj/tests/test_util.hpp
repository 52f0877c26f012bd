#pragma once

#include <string>

#include "optquad/real.hpp"

namespace optquad::testing {

inline bool close_abs(const real_t& a, const real_t& b, double tol)
{
    using std::abs;
    return abs(a - b) <= real_t(tol);
}

inline bool close_rel(const real_t& a, const real_t& b, double tol)
{
    using std::abs;
    const real_t scale = (std::max)(abs(a), abs(b));
    if (scale == real_t(0)) return true;
    return abs(a - b) <= real_t(tol) * scale;
}

inline std::string str(const real_t& v)
{
    return v.str(25, std::ios_base::scientific);
}

} // namespace optquad::testing
