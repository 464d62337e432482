#pragma once

#include "doctest.h"
#include "tor/real.hpp"

#include <string>

inline tor::Real R(const char *s) { return tor::Real(s); }

inline bool near(const tor::Real &a, const tor::Real &b, const tor::Real &eps)
{
    return abs(a - b) <= eps;
}

inline bool near(const tor::Real &a, double b, double eps)
{
    return abs(a - tor::Real(b)) <= tor::Real(eps);
}
