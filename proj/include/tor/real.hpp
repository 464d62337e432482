#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tor {

namespace mp = boost::multiprecision;

using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using Int = mp::mpz_int;
using Rat = mp::mpq_rational;

/* Working precision in bits. Values created afterwards use it. */
void set_precision(unsigned bits);
unsigned precision();

/* RAII switch used by routines that retry at a higher precision. */
class PrecisionGuard {
public:
    explicit PrecisionGuard(unsigned bits);
    ~PrecisionGuard();
    PrecisionGuard(const PrecisionGuard &) = delete;
    PrecisionGuard &operator=(const PrecisionGuard &) = delete;

private:
    unsigned saved_;
};

/* 2^(-frac * precision) */
Real tol(double frac);

Real log2r(const Real &x);
Real exp2r(const Real &x);
Real pi();
Real to_real(const Rat &q);
Real to_real(const Int &z);
Real fresh(const Real &x); /* copy re-rounded at the current precision */
Int round_to_int(const Real &x);
std::string dec(const Real &x, int digits = 0);

struct Cx {
    Real re, im;

    Cx() : re(0), im(0) {}
    Cx(Real r) : re(std::move(r)), im(0) {}
    Cx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    Cx operator+(const Cx &o) const { return {re + o.re, im + o.im}; }
    Cx operator-(const Cx &o) const { return {re - o.re, im - o.im}; }
    Cx operator-() const { return {-re, -im}; }
    Cx operator*(const Cx &o) const
    {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Cx operator*(const Real &s) const { return {re * s, im * s}; }
    Cx operator/(const Cx &o) const
    {
        Real n = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / n, (im * o.re - re * o.im) / n};
    }
    Cx &operator+=(const Cx &o) { re += o.re; im += o.im; return *this; }
    Cx &operator-=(const Cx &o) { re -= o.re; im -= o.im; return *this; }
    Cx &operator*=(const Cx &o) { *this = *this * o; return *this; }
    Cx conj() const { return {re, -im}; }
    Real norm2() const { return re * re + im * im; }
    Real abs() const { return sqrt(norm2()); }
};

/* Base class for recoverable domain errors; `kind` names the condition. */
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string &what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string &kind() const { return kind_; }

private:
    std::string kind_;
};

/* Deterministic generator used wherever sampling is needed. */
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next()
    {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    std::int64_t range(std::int64_t lo, std::int64_t hi) /* inclusive */
    {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next() % span);
    }

private:
    std::uint64_t s_;
};

} // namespace tor
