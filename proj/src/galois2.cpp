#include "cyclix/galois2.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "cyclix/arith.hpp"
#include "poly_mod.hpp"

namespace cyclix {

namespace {

i128 g_eval_wide(const CurveModel& m, i64 x) {
    return ((i128)x + m.A) * x * x + (i128)m.B * x + m.C;
}

// integer roots of the monic cubic, ascending; the discriminant is
// nonzero here so roots are simple
std::vector<i64> integer_roots(const CurveModel& m) {
    std::vector<i64> roots;
    auto quad_roots = [&](i64 u, i64 v) {
        // integer roots of x^2 + ux + v
        i128 disc = (i128)u * u - 4 * (i128)v;
        if (disc < 0) return;
        u64 s = isqrt_u64((u64)disc);
        if ((i128)s * s != disc) return;
        if ((-u - (i64)s) % 2 == 0) {
            roots.push_back((-u - (i64)s) / 2);
            if (s != 0) roots.push_back((-u + (i64)s) / 2);
        }
    };
    if (m.C == 0) {
        roots.push_back(0);
        quad_roots(m.A, m.B);
    } else {
        i64 r = 0;
        bool found = false;
        for (i64 d : divisors(std::llabs(m.C))) {
            for (i64 cand : {d, -d}) {
                if (g_eval_wide(m, cand) == 0) { r = cand; found = true; break; }
            }
            if (found) break;
        }
        if (found) {
            roots.push_back(r);
            // deflate: g = (x - r)(x^2 + ux + v)
            i64 u = m.A + r;
            i128 v = (i128)m.B + (i128)r * u;
            if (v > INT64_MAX || v < INT64_MIN) fail_unsupported("root deflation overflows");
            quad_roots(u, (i64)v);
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

i64 odd_part(i64 n) {
    while (n % 2 == 0) n /= 2;
    return n;
}

// does the cubic split into three linear factors mod q?
bool cubic_splits_mod(const CurveModel& m, i64 q) {
    using namespace polymod;
    Poly g = reduce_coeffs({m.C, m.B, m.A, 1}, q);
    return pow_x(q, g, q) == Poly({0, 1});
}

// split classes of a cyclic cubic field mod its conductor: the index-3
// kernel of the character cut out by the field
std::vector<i64> cubic_split_kernel(const CurveModel& m, i64 f2, i64 dg) {
    i64 target = euler_phi(f2) / 3;
    check_internal(euler_phi(f2) % 3 == 0, "cubic conductor with phi not divisible by 3");
    if (f2 == 9 || is_prime(f2)) {
        // cyclic unit group: the kernel is exactly the cubes
        std::vector<i64> H;
        for (i64 a = 1; a < f2; ++a) {
            if (std::gcd(a, f2) == 1 && powmod(a, target, f2) == 1) H.push_back(a);
        }
        check_internal((i64)H.size() == target, "cube kernel has wrong size");
        return H;
    }
    // composite conductor: recover the kernel from actual split primes and
    // close under multiplication until the subgroup has index 3
    std::set<i64> H{1};
    std::vector<i64> nonsplit;
    auto extend = [&](i64 r) {
        std::vector<i64> fresh{r};
        while (!fresh.empty()) {
            i64 x = fresh.back();
            fresh.pop_back();
            if (!H.insert(x).second) continue;
            std::vector<i64> next;
            for (i64 h : H) next.push_back(mulmod(h, x, f2));
            for (i64 y : next) {
                if (!H.count(y)) fresh.push_back(y);
            }
        }
    };
    int scanned = 0;
    for (i64 q : small_primes()) {
        if (q == 2 || dg % q == 0 || f2 % q == 0) continue;
        if (++scanned > 20000) break;
        i64 r = q % f2;
        if (cubic_splits_mod(m, q)) {
            if (!H.count(r)) extend(r);
            if ((i64)H.size() > target) fail_internal("split classes exceed the index-3 kernel");
            if ((i64)H.size() == target) break;
        } else {
            nonsplit.push_back(r);
        }
    }
    if ((i64)H.size() != target) {
        fail_unsupported("cubic split kernel not resolved within prime budget");
    }
    for (i64 r : nonsplit) {
        if (H.count(r)) fail_internal("non-split residue landed in the kernel");
    }
    return {H.begin(), H.end()};
}

i64 smallest_primitive_root(i64 p) {
    auto fs = factorize(p - 1);
    for (i64 g = 2; g < p; ++g) {
        bool ok = true;
        for (auto& [q, e] : fs) {
            (void)e;
            if (powmod(g, (p - 1) / q, p) == 1) { ok = false; break; }
        }
        if (ok) return g;
    }
    fail_internal("no primitive root found");
}

}  // namespace

TwoTorsionField classify_k2(const CurveModel& m) {
    TwoTorsionField k2;
    k2.disc_g = disc_g(m);
    if (k2.disc_g == 0) fail_pre("classify_k2: singular model");
    k2.roots = integer_roots(m);
    if (k2.roots.size() == 3) {
        k2.kind = K2Kind::Trivial;
        k2.f2 = 1;
        return k2;
    }
    if (k2.roots.size() == 1) {
        k2.kind = K2Kind::Quadratic;
        i64 r = k2.roots[0];
        i64 u = m.A + r;
        i128 v = (i128)m.B + (i128)r * u;
        i128 core_wide = (i128)u * u - 4 * v;
        if (core_wide > INT64_MAX || core_wide < INT64_MIN) {
            fail_unsupported("classify_k2: quadratic core overflows");
        }
        k2.D = squarefree_part((i64)core_wide);
        check_internal(k2.D != 0 && k2.D != 1, "quadratic layer degenerated");
        k2.d2 = (((k2.D % 4) + 4) % 4 == 1) ? k2.D : 4 * k2.D;
        k2.f2 = std::llabs(k2.d2);
        return k2;
    }
    check_internal(k2.roots.empty(), "monic integer cubic with two integer roots");
    u64 s = (k2.disc_g > 0) ? isqrt_u64((u64)k2.disc_g) : 0;
    if (k2.disc_g > 0 && (i64)(s * s) == k2.disc_g) {
        k2.kind = K2Kind::CyclicCubic;
        k2.f2 = cubic_conductor(m);
        k2.cubic_kernel = cubic_split_kernel(m, k2.f2, k2.disc_g);
        return k2;
    }
    k2.kind = K2Kind::S3;
    k2.D = squarefree_part(k2.disc_g);
    check_internal(k2.D != 1, "nonsquare discriminant with trivial core");
    k2.d2 = (((k2.D % 4) + 4) % 4 == 1) ? k2.D : 4 * k2.D;
    k2.f2 = std::llabs(k2.d2);
    return k2;
}

i64 k2_degree(const TwoTorsionField& k2) {
    switch (k2.kind) {
        case K2Kind::Trivial: return 1;
        case K2Kind::Quadratic: return 2;
        case K2Kind::CyclicCubic: return 3;
        case K2Kind::S3: return 6;
    }
    fail_internal("unreachable");
}

i64 k2_ab_degree(const TwoTorsionField& k2) {
    switch (k2.kind) {
        case K2Kind::Trivial: return 1;
        case K2Kind::Quadratic: return 2;
        case K2Kind::CyclicCubic: return 3;
        case K2Kind::S3: return 2;
    }
    fail_internal("unreachable");
}

int gamma_ab2(const TwoTorsionField& k2, i64 f, i64 a) {
    if (f < 1) fail_pre("gamma_ab2: f must be >= 1");
    i64 an = a % f; if (an < 0) an += f;
    if (std::gcd(an, f) != 1) fail_pre("gamma_ab2: gcd(a, f) must be 1");
    if (k2.kind == K2Kind::Trivial) return 1;
    // only visible once the abelian layer sits inside Q(zeta_f)
    if (f % k2.f2 != 0) return 1;
    if (k2.kind == K2Kind::CyclicCubic) {
        i64 r = an % k2.f2;
        return std::binary_search(k2.cubic_kernel.begin(), k2.cubic_kernel.end(), r) ? 1 : 0;
    }
    return kronecker(k2.d2, an) == 1 ? 1 : 0;
}

i64 find_b(const TwoTorsionField& k2) {
    if (k2.kind == K2Kind::Trivial) fail_pre("find_b: trivial K2 has no twist class");
    if (k2.kind == K2Kind::CyclicCubic) {
        i64 of2 = odd_part(k2.f2);
        for (i64 b = 2; b < k2.f2; ++b) {
            if (std::gcd(b, k2.f2) != 1) continue;
            if (std::gcd(b - 1, of2) != 1) continue;
            if (!std::binary_search(k2.cubic_kernel.begin(), k2.cubic_kernel.end(), b)) {
                return b;
            }
        }
        fail_internal("find_b: cubic scan exhausted");
    }
    i64 b;
    if (k2.D == -1 || k2.D == 2) {
        b = 3;
    } else if (k2.D == -2) {
        b = 7;
    } else {
        // build b one prime at a time: non-residue at the smallest odd
        // prime of D, a non-identity residue elsewhere, trivial 2-part
        std::vector<std::pair<i64, i64>> cong;
        std::vector<i64> odd_primes;
        for (auto& [q, e] : factorize(std::llabs(k2.D))) {
            (void)e;
            if (q > 2) odd_primes.push_back(q);
        }
        check_internal(!odd_primes.empty(), "quadratic core without odd primes slipped the special cases");
        i64 p0 = odd_primes.front();
        cong.push_back({smallest_primitive_root(p0), p0});
        for (size_t i = 1; i < odd_primes.size(); ++i) {
            i64 q = odd_primes[i];
            i64 g = smallest_primitive_root(q);
            cong.push_back({mulmod(g, g, q), q});
        }
        i64 dm4 = ((k2.D % 4) + 4) % 4;
        if (dm4 == 3) cong.push_back({1, 4});
        if (dm4 == 2) cong.push_back({1, 8});
        auto sol = crt_solve(cong);
        check_internal(sol.has_value(), "find_b: congruences conflict");
        b = sol->first;
    }
    check_internal(kronecker(k2.d2, b) == -1, "find_b: character is not -1");
    check_internal(std::gcd(b - 1, odd_part(k2.f2)) == 1, "find_b: b-1 shares odd factor with f2");
    check_internal(std::gcd(b, k2.f2) == 1, "find_b: b not a unit mod f2");
    return b;
}

CongruentB find_b_congruent(const TwoTorsionField& k2, i64 m, i64 a) {
    if (k2.kind != K2Kind::Quadratic && k2.kind != K2Kind::S3) {
        fail_pre("find_b_congruent: needs a quadratic abelian layer");
    }
    if (m <= 1 || m >= k2.f2 || k2.f2 % m != 0) {
        fail_pre("find_b_congruent: m must be a proper nontrivial divisor of f2");
    }
    i64 an = a % m; if (an < 0) an += m;
    if (std::gcd(an, m) != 1) fail_pre("find_b_congruent: gcd(a, m) must be 1");
    if (std::gcd(odd_part(m), an - 1) != 1) {
        fail_pre("find_b_congruent: a - 1 shares an odd factor with m");
    }
    i64 of2 = odd_part(k2.f2);
    for (i64 b = an; b <= k2.f2; b += m) {
        if (b <= 1) continue;
        if (std::gcd(b, k2.f2) != 1) continue;
        if (std::gcd(b - 1, of2) != 1) continue;
        if (kronecker(k2.d2, b) == -1) return {false, b};
    }
    // the search can only come up empty in one precise configuration
    bool predicted = (k2.f2 == 3 * m) && (kronecker(-k2.d2 / 3, an) == -1);
    if (!predicted) fail_internal("find_b_congruent: unexpected empty search");
    return {true, 0};
}

i64 cubic_conductor_impl(const CurveModel& m);  // cubic_field.cpp

i64 cubic_conductor(const CurveModel& m) {
    i64 dg = disc_g(m);
    if (dg <= 0) fail_pre("cubic_conductor: not a cyclic cubic (discriminant not a positive square)");
    u64 s = isqrt_u64((u64)dg);
    if ((i64)(s * s) != dg) fail_pre("cubic_conductor: not a cyclic cubic (discriminant not a square)");
    if (!integer_roots(m).empty()) fail_pre("cubic_conductor: cubic is reducible");
    return cubic_conductor_impl(m);
}

}  // namespace cyclix
