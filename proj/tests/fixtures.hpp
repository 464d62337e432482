#pragma once

#include "tor/matrix.hpp"

#include <initializer_list>

inline tor::IMat imat(int n, std::initializer_list<long> v)
{
    tor::IMat m(n, n);
    int k = 0;
    for (long x : v) {
        m.a[k++] = x;
    }
    return m;
}

/* companion of x^3 + x^2 - 2x - 1 */
inline tor::IMat cubic_A() { return imat(3, {0, 0, 1, 1, 0, 2, 0, 1, -1}); }
inline tor::IMat cubic_B()
{
    tor::IMat a = cubic_A();
    return a * a - tor::IMat::identity(3).scaled(2);
}

/* companion of x^4 - x^3 - 2x^2 + 1, signature (2,1), discriminant -283 */
inline tor::IMat quartic_A() { return imat(4, {0, 0, 0, -1, 1, 0, 0, 0, 0, 1, 0, 2, 0, 0, 1, 1}); }
inline tor::IMat quartic_B() { return quartic_A() + tor::IMat::identity(4); }

/* x^4 - 2x^2 - 1 has signature (2,1) and the real subfield Q(sqrt 2) fixed by the
   complex place; multiplication by a + a^2 - a^3 and by a^2 = 1 + sqrt 2 */
inline tor::IMat subfield_A()
{
    return imat(4, {0, -1, 1, -1, 1, 0, -1, 1, 1, -1, 2, -3, -1, 1, -1, 2});
}
inline tor::IMat subfield_B()
{
    return imat(4, {0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 2, 0, 0, 1, 0, 2});
}
