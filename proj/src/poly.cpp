#include "tor/poly.hpp"

#include "tor/matrix.hpp"

#include <sstream>

namespace tor {

int degree(const IntPoly &p)
{
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; i--)
        if (p[i] != 0)
            return i;
    return -1;
}

int degree(const RatPoly &p)
{
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; i--)
        if (p[i] != 0)
            return i;
    return -1;
}

RatPoly to_rat(const IntPoly &p)
{
    RatPoly r(p.size());
    for (size_t i = 0; i < p.size(); i++)
        r[i] = Rat(p[i]);
    return r;
}

void trim(RatPoly &p) { p.resize(static_cast<size_t>(degree(p) + 1)); }
void trim(IntPoly &p) { p.resize(static_cast<size_t>(degree(p) + 1)); }

RatPoly add(const RatPoly &a, const RatPoly &b)
{
    RatPoly r(std::max(a.size(), b.size()), Rat(0));
    for (size_t i = 0; i < a.size(); i++)
        r[i] += a[i];
    for (size_t i = 0; i < b.size(); i++)
        r[i] += b[i];
    trim(r);
    return r;
}

RatPoly sub(const RatPoly &a, const RatPoly &b)
{
    RatPoly r(std::max(a.size(), b.size()), Rat(0));
    for (size_t i = 0; i < a.size(); i++)
        r[i] += a[i];
    for (size_t i = 0; i < b.size(); i++)
        r[i] -= b[i];
    trim(r);
    return r;
}

RatPoly mul(const RatPoly &a, const RatPoly &b)
{
    if (a.empty() || b.empty())
        return {};
    RatPoly r(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); i++)
        for (size_t j = 0; j < b.size(); j++)
            r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

IntPoly mul(const IntPoly &a, const IntPoly &b)
{
    if (a.empty() || b.empty())
        return {};
    IntPoly r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); i++)
        for (size_t j = 0; j < b.size(); j++)
            r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

void divmod(const RatPoly &a, const RatPoly &b, RatPoly &q, RatPoly &r)
{
    int db = degree(b);
    if (db < 0)
        throw Error("DivisionByZero", "polynomial division by zero");
    r = a;
    trim(r);
    int dr = degree(r);
    q.assign(static_cast<size_t>(std::max(dr - db + 1, 0)), Rat(0));
    while (dr >= db) {
        Rat f = r[dr] / b[db];
        q[dr - db] = f;
        for (int i = 0; i <= db; i++)
            r[dr - db + i] -= f * b[i];
        trim(r);
        dr = degree(r);
    }
    trim(q);
}

RatPoly gcd(RatPoly a, RatPoly b)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        RatPoly q, r;
        divmod(a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Rat lc = a.back();
        for (auto &c : a)
            c /= lc;
    }
    return a;
}

IntPoly derivative(const IntPoly &p)
{
    IntPoly d;
    for (size_t i = 1; i < p.size(); i++)
        d.push_back(p[i] * static_cast<long>(i));
    trim(d);
    return d;
}

bool is_squarefree(const IntPoly &p)
{
    return degree(gcd(to_rat(p), to_rat(derivative(p)))) == 0;
}

Real eval(const IntPoly &p, const Real &x)
{
    Real s = 0;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; i--)
        s = s * x + Real(p[i]);
    return s;
}

Cx eval(const IntPoly &p, const Cx &x)
{
    Cx s;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; i--)
        s = s * x + Cx(Real(p[i]));
    return s;
}

Rat eval(const RatPoly &p, const Rat &x)
{
    Rat s = 0;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; i--)
        s = s * x + p[i];
    return s;
}

static int sign_changes(const std::vector<int> &s)
{
    int n = 0, last = 0;
    for (int v : s) {
        if (v == 0)
            continue;
        if (last != 0 && v != last)
            n++;
        last = v;
    }
    return n;
}

int real_root_count(const IntPoly &p)
{
    std::vector<RatPoly> seq;
    seq.push_back(to_rat(p));
    seq.push_back(to_rat(derivative(p)));
    while (degree(seq.back()) > 0) {
        RatPoly q, r;
        divmod(seq[seq.size() - 2], seq.back(), q, r);
        for (auto &c : r)
            c = -c;
        if (r.empty())
            break;
        seq.push_back(r);
    }
    std::vector<int> at_neg, at_pos;
    for (auto &s : seq) {
        int d = degree(s);
        int lc = s[d] > 0 ? 1 : -1;
        at_pos.push_back(lc);
        at_neg.push_back(d % 2 ? -lc : lc);
    }
    return sign_changes(at_neg) - sign_changes(at_pos);
}

Int resultant(const IntPoly &a, const IntPoly &b)
{
    int m = degree(a), n = degree(b);
    int N = m + n;
    if (N == 0)
        return 1;
    IMat s(N, N);
    for (int i = 0; i < n; i++)
        for (int j = 0; j <= m; j++)
            s(i, i + j) = a[m - j];
    for (int i = 0; i < m; i++)
        for (int j = 0; j <= n; j++)
            s(n + i, i + j) = b[n - j];
    return det(s);
}

Int discriminant(const IntPoly &p)
{
    int d = degree(p);
    Int r = resultant(p, derivative(p));
    return ((d * (d - 1) / 2) % 2) ? Int(-r) : r;
}

std::string to_string(const IntPoly &p)
{
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < p.size(); i++)
        os << (i ? "," : "") << p[i];
    os << "]";
    return os.str();
}

} // namespace tor
