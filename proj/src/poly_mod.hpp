#pragma once

// Dense univariate polynomial arithmetic over F_p, shared by the division
// polynomial code and the cubic splitting tests.  Coefficients are stored
// low to high with no trailing zeros; the zero polynomial is the empty
// vector.  Degrees stay in the hundreds here, so schoolbook products are
// the right tool.

#include <vector>

#include "cyclix/arith.hpp"
#include "cyclix/common.hpp"

namespace cyclix::polymod {

using Poly = std::vector<i64>;

inline void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly reduce_coeffs(Poly a, i64 p) {
    for (auto& c : a) { c %= p; if (c < 0) c += p; }
    trim(a);
    return a;
}

inline Poly add(const Poly& a, const Poly& b, i64 p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) {
        r[i] += b[i];
        if (r[i] >= p) r[i] -= p;
    }
    trim(r);
    return r;
}

inline Poly sub(const Poly& a, const Poly& b, i64 p) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) {
        r[i] -= b[i];
        if (r[i] < 0) r[i] += p;
    }
    trim(r);
    return r;
}

inline Poly mul(const Poly& a, const Poly& b, i64 p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            r[i + j] = (i64)(((u128)r[i + j] + (u128)(u64)a[i] * (u64)b[j]) % (u64)p);
        }
    }
    trim(r);
    return r;
}

inline Poly scale(Poly a, i64 c, i64 p) {
    c %= p; if (c < 0) c += p;
    for (auto& v : a) v = mulmod(v, c, p);
    trim(a);
    return a;
}

// remainder of a by monic m
inline Poly rem_monic(Poly a, const Poly& m, i64 p) {
    check_internal(!m.empty() && m.back() == 1, "rem_monic: modulus not monic");
    size_t dm = m.size() - 1;
    while (a.size() > dm) {
        i64 lead = a.back();
        size_t shift = a.size() - 1 - dm;
        if (lead != 0) {
            for (size_t i = 0; i < dm; ++i) {
                a[shift + i] = (a[shift + i] - mulmod(lead, m[i], p) % p + p) % p;
            }
        }
        a.pop_back();
    }
    trim(a);
    return a;
}

inline Poly monic(Poly a, i64 p) {
    a = reduce_coeffs(std::move(a), p);
    if (a.empty()) fail_internal("monic: zero polynomial");
    i64 inv = inv_mod(a.back(), p);
    return scale(std::move(a), inv, p);
}

// base^e mod (m, p); m monic
inline Poly powmod_poly(Poly base, i64 e, const Poly& m, i64 p) {
    Poly r{1};
    base = rem_monic(std::move(base), m, p);
    while (e > 0) {
        if (e & 1) r = rem_monic(mul(r, base, p), m, p);
        base = rem_monic(mul(base, base, p), m, p);
        e >>= 1;
    }
    return r;
}

// x^e mod (m, p); m monic
inline Poly pow_x(i64 e, const Poly& m, i64 p) {
    return powmod_poly(Poly{0, 1}, e, m, p);
}

inline i64 eval(const Poly& a, i64 x, i64 p) {
    i64 r = 0;
    for (size_t i = a.size(); i-- > 0;) {
        r = (mulmod(r, x, p) + a[i]) % p;
    }
    return r;
}

}  // namespace cyclix::polymod
