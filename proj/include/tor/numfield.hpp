#pragma once

#include "tor/matrix.hpp"
#include "tor/poly.hpp"

#include <memory>

namespace tor {

struct CertRoot {
    Cx z;
    Real radius; /* disk around z holding exactly one root */
    bool real;
};

/* All d roots: r1 real ascending, r2 upper half-plane, then the r2
   conjugates in the same order (root r1+r2+j = conj of root r1+j). */
std::vector<CertRoot> find_roots(const IntPoly &p, unsigned bits);

bool is_irreducible(const IntPoly &p);

struct NumberField {
    IntPoly min_poly;
    int d = 0, r1 = 0, r2 = 0;
    std::vector<CertRoot> roots;
    Int disc;
    unsigned precision_bits = 0;

    const Cx &root(int i) const { return roots[i].z; }
};

using Field = std::shared_ptr<const NumberField>;

/* Certifies roots and irreducibility; throws Reducible otherwise. */
Field make_field(const IntPoly &min_poly, unsigned bits = 0);

class AlgebraicNumber {
public:
    AlgebraicNumber() = default;
    AlgebraicNumber(Field k, std::vector<Rat> coords);
    static AlgebraicNumber from_int(Field k, const Int &n);
    static AlgebraicNumber gen(Field k); /* theta */

    const Field &field() const { return k_; }
    const std::vector<Rat> &coords() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()); }

    AlgebraicNumber operator+(const AlgebraicNumber &o) const;
    AlgebraicNumber operator-(const AlgebraicNumber &o) const;
    AlgebraicNumber operator-() const;
    AlgebraicNumber operator*(const AlgebraicNumber &o) const;
    AlgebraicNumber operator*(const Rat &s) const;
    AlgebraicNumber inverse() const; /* throws DivisionByZero */
    AlgebraicNumber operator/(const AlgebraicNumber &o) const { return *this * o.inverse(); }
    AlgebraicNumber pow(long e) const;
    bool operator==(const AlgebraicNumber &o) const { return c_ == o.c_; }
    bool operator!=(const AlgebraicNumber &o) const { return !(*this == o); }
    bool is_zero() const;
    bool is_one() const;
    bool is_integral() const; /* algebraic integer */

    Cx embed(int i) const; /* sigma_i, 0 <= i < d */
    QMat mult_matrix() const; /* column j = coords of alpha * theta^j */

private:
    Field k_;
    std::vector<Rat> c_;
};

/* Sum of log2+ |sigma_i(alpha)| over all d embeddings. */
Real mahler_height(const AlgebraicNumber &a);
std::pair<Rat, Rat> norm_trace(const AlgebraicNumber &a);
bool is_cm(const NumberField &k);

/* Highest precision used when certification needs a retry. */
constexpr unsigned kMaxPrecision = 4096;

} // namespace tor
