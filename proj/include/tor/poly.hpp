#pragma once

#include "tor/real.hpp"

#include <vector>

namespace tor {

/* Coefficients in ascending order; trailing coefficient nonzero. */
using IntPoly = std::vector<Int>;
using RatPoly = std::vector<Rat>;

int degree(const IntPoly &p);
int degree(const RatPoly &p);
RatPoly to_rat(const IntPoly &p);
void trim(RatPoly &p);
void trim(IntPoly &p);

RatPoly add(const RatPoly &a, const RatPoly &b);
RatPoly sub(const RatPoly &a, const RatPoly &b);
RatPoly mul(const RatPoly &a, const RatPoly &b);
IntPoly mul(const IntPoly &a, const IntPoly &b);
void divmod(const RatPoly &a, const RatPoly &b, RatPoly &q, RatPoly &r);
RatPoly gcd(RatPoly a, RatPoly b); /* monic */
IntPoly derivative(const IntPoly &p);
bool is_squarefree(const IntPoly &p);

Real eval(const IntPoly &p, const Real &x);
Cx eval(const IntPoly &p, const Cx &x);
Rat eval(const RatPoly &p, const Rat &x);

/* Number of distinct real roots (Sturm). */
int real_root_count(const IntPoly &p);

Int resultant(const IntPoly &a, const IntPoly &b);
Int discriminant(const IntPoly &p); /* monic p */

std::string to_string(const IntPoly &p);

} // namespace tor
