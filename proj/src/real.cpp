#include "tor/real.hpp"

#include <cmath>
#include <sstream>

namespace tor {

namespace {
unsigned g_bits = 128;

unsigned digits_for(unsigned bits)
{
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}
} // namespace

void set_precision(unsigned bits)
{
    if (bits < 32)
        throw Error("InvalidConfig", "precision below 32 bits");
    g_bits = bits;
    Real::default_precision(digits_for(bits));
}

unsigned precision() { return g_bits; }

PrecisionGuard::PrecisionGuard(unsigned bits) : saved_(g_bits)
{
    set_precision(bits);
}

PrecisionGuard::~PrecisionGuard() { set_precision(saved_); }

Real tol(double frac)
{
    return exp2r(Real(-frac * static_cast<double>(g_bits)));
}

Real log2r(const Real &x) { return log(x) / log(Real(2)); }

Real exp2r(const Real &x) { return exp(x * log(Real(2))); }

Real pi() { return boost::math::constants::pi<Real>(); }

Real to_real(const Rat &q)
{
    return Real(Real(numerator(q)) / Real(denominator(q)));
}

Real to_real(const Int &z) { return Real(z); }

Real fresh(const Real &x)
{
    Real r;
    r.precision(Real::default_precision());
    r = x;
    return r;
}

Int round_to_int(const Real &x)
{
    Int z;
    mpfr_get_z(z.backend().data(), x.backend().data(), MPFR_RNDN);
    return z;
}

std::string dec(const Real &x, int digits)
{
    std::ostringstream os;
    os.precision(digits > 0 ? digits : static_cast<int>(digits_for(g_bits)));
    os << x;
    return os.str();
}

static const bool g_init = [] {
    Real::default_precision(digits_for(g_bits));
    return true;
}();

} // namespace tor
