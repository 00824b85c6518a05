#include "cyclix/curve.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "cyclix/arith.hpp"
#include "poly_mod.hpp"

namespace cyclix {

namespace {

constexpr i64 kCoeffCap = 1LL << 31;

i128 disc_g_wide(const CurveModel& m) {
    if (std::llabs(m.A) >= kCoeffCap || std::llabs(m.B) >= kCoeffCap ||
        std::llabs(m.C) >= kCoeffCap) {
        fail_unsupported("curve coefficients too large");
    }
    i128 A = m.A, B = m.B, C = m.C;
    return 18 * A * B * C - 4 * A * A * A * C + A * A * B * B - 4 * B * B * B -
           27 * C * C;
}

void ensure_good(const CurveModel& m, i64 p) {
    if (p < 3 || !is_prime(p)) fail_pre("p must be an odd prime");
    i128 d = disc_g_wide(m) % p;
    if (d == 0) fail_pre("bad reduction at p");
}

// affine arithmetic on y^2 = x^3 + A x^2 + B x + C over F_p
struct Pt {
    i64 x = 0, y = 0;
    bool inf = true;
};

struct Ec {
    i64 p, A, B, C;
    Ec(i64 p_, i64 A_, i64 B_, i64 C_) : p(p_) {
        A = A_ % p; if (A < 0) A += p;
        B = B_ % p; if (B < 0) B += p;
        C = C_ % p; if (C < 0) C += p;
    }
    i64 adm(i64 a, i64 b) const { i64 r = a + b; return r >= p ? r - p : r; }
    i64 sbm(i64 a, i64 b) const { i64 r = a - b; return r < 0 ? r + p : r; }
    i64 g_at(i64 x) const {
        i64 v = adm(x, A);
        v = adm(mulmod(v, x, p), B);
        return adm(mulmod(v, x, p), C);
    }
    Pt dbl(Pt P) const {
        if (P.inf || P.y == 0) return {};
        i64 num = adm(adm(mulmod(3, mulmod(P.x, P.x, p), p),
                          mulmod(adm(A, A), P.x, p)), B);
        i64 lam = mulmod(num, inv_mod(adm(P.y, P.y), p), p);
        i64 x3 = sbm(sbm(sbm(mulmod(lam, lam, p), A), P.x), P.x);
        return {x3, sbm(mulmod(lam, sbm(P.x, x3), p), P.y), false};
    }
    Pt add(Pt P, Pt Q) const {
        if (P.inf) return Q;
        if (Q.inf) return P;
        if (P.x == Q.x) {
            if (adm(P.y, Q.y) == 0) return {};
            return dbl(P);
        }
        i64 lam = mulmod(sbm(Q.y, P.y), inv_mod(sbm(Q.x, P.x), p), p);
        i64 x3 = sbm(sbm(sbm(mulmod(lam, lam, p), A), P.x), Q.x);
        return {x3, sbm(mulmod(lam, sbm(P.x, x3), p), P.y), false};
    }
    Pt mul(i64 k, Pt P) const {
        Pt R;
        while (k > 0) {
            if (k & 1) R = add(R, P);
            P = dbl(P);
            k >>= 1;
        }
        return R;
    }
};

i64 sqrt_of_residue(i64 v, i64 p) {
    auto s = mod_sqrt(v, p);
    check_internal(s.has_value(), "expected quadratic residue");
    return *s;
}

// exact order of P given that some multiple of it lies in [lo, hi]
// (which holds whenever ord(P) divides a group order in that window)
i64 order_in_window(const Ec& E, Pt P, i64 lo, i64 hi) {
    check_internal(!P.inf, "order_in_window: infinity sampled");
    i64 L = hi - lo + 1;
    i64 s = (i64)isqrt_u64((u64)L);
    if (s * s < L) ++s;
    // baby steps t*P for t in [1, s); an infinity here IS the order
    std::vector<std::pair<i64, i64>> baby;  // (x, t)
    std::vector<i64> baby_y(s, 0);
    Pt cur = P;
    for (i64 t = 1; t < s; ++t) {
        if (cur.inf) return t;
        baby.push_back({cur.x, t});
        baby_y[t] = cur.y;
        cur = E.add(cur, P);
    }
    std::sort(baby.begin(), baby.end());
    Pt sP = E.mul(s, P);
    Pt R = E.mul(lo, P);
    std::vector<i64> hits;
    i64 kmax = (L + s - 1) / s;
    for (i64 k = 0; k <= kmax; ++k) {
        i64 mbase = lo + k * s;
        if (R.inf) {
            if (mbase <= hi) hits.push_back(mbase);
        } else {
            auto it = std::lower_bound(baby.begin(), baby.end(),
                                       std::pair<i64, i64>{R.x, INT64_MIN});
            for (; it != baby.end() && it->first == R.x; ++it) {
                i64 t = it->second, ty = baby_y[t];
                if (R.y == ty) {
                    i64 cand = mbase - t;  // R = tP, so (mbase - t) P = O
                    if (cand >= lo && cand <= hi) hits.push_back(cand);
                }
                if (R.y == (ty == 0 ? 0 : E.p - ty)) {
                    i64 cand = mbase + t;  // R = -tP
                    if (cand <= hi) hits.push_back(cand);
                }
            }
        }
        R = E.add(R, sP);
    }
    check_internal(!hits.empty(), "order_in_window: no kill in window");
    i64 g = 0;
    for (i64 h : hits) g = std::gcd(g, h);
    // g is a multiple of ord(P); strip primes while the point still dies
    for (auto& [q, e] : factorize(g)) {
        for (int i = 0; i < e; ++i) {
            if (E.mul(g / q, P).inf) g /= q;
            else break;
        }
    }
    return g;
}

i64 count_points_bsgs(const CurveModel& m, i64 p) {
    i64 w = (i64)isqrt_u64((u64)(4 * p));
    i64 lo = p + 1 - w, hi = p + 1 + w;
    i64 u = 2;  // least nonresidue, for the twist
    while (powmod(u, (p - 1) / 2, p) != p - 1) ++u;
    i64 u2 = mulmod(u, u, p), u3 = mulmod(u2, u, p);
    Ec E(p, m.A, m.B, m.C);
    Ec T(p, mulmod(u, E.A, p), mulmod(u2, E.B, p), mulmod(u3, E.C, p));
    i64 LE = 1, LT = 1;
    int samples = 0;
    for (i64 x0 = 0; x0 < p; ++x0) {
        i64 v = E.g_at(x0);
        bool twist = false;
        Pt P;
        if (v == 0) {
            P = {x0, 0, false};
        } else if (powmod(v, (p - 1) / 2, p) == 1) {
            P = {x0, sqrt_of_residue(v, p), false};
        } else {
            // x |-> ux carries this x onto the quadratic twist
            P = {mulmod(u, x0, p), sqrt_of_residue(mulmod(u3, v, p), p), false};
            twist = true;
        }
        // both group orders land in the same window [p+1-w, p+1+w]
        i64 o = order_in_window(twist ? T : E, P, lo, hi);
        if (twist) LT = std::lcm(LT, o);
        else LE = std::lcm(LE, o);
        // N must satisfy LE | N and LT | (2p + 2 - N); stop when unique
        auto sol = crt_solve({{0, LE}, {(2 * p + 2) % LT, LT}});
        check_internal(sol.has_value(), "count_points: incompatible orders");
        auto [r, M] = *sol;
        i64 first = lo + (((r - lo) % M) + M) % M;
        check_internal(first <= hi, "count_points: window left empty");
        if (first + M > hi) return first;
        if (++samples >= 300) break;
    }
    fail_internal("count_points: sample budget exhausted");
}

}  // namespace

std::string model_id(const CurveModel& m) {
    return std::to_string(m.A) + "," + std::to_string(m.B) + "," +
           std::to_string(m.C);
}

i64 disc_g(const CurveModel& m) {
    i128 d = disc_g_wide(m);
    if (d > INT64_MAX || d < INT64_MIN) fail_unsupported("disc_g overflows");
    return (i64)d;
}

i64 disc_E(const CurveModel& m) {
    i128 d = 16 * disc_g_wide(m);
    if (d > INT64_MAX || d < INT64_MIN) fail_unsupported("disc_E overflows");
    return (i64)d;
}

bool good_reduction(const CurveModel& m, i64 p) {
    if (p < 2) fail_pre("good_reduction: p must be prime");
    if (p == 2) return false;
    return disc_g_wide(m) % p != 0;
}

i64 count_points_charsum(const CurveModel& m, i64 p) {
    ensure_good(m, p);
    if (p > 50'000'000) fail_unsupported("count_points_charsum: p too large");
    std::vector<char> qr((size_t)p, 0);
    for (i64 t = 0; t <= (p - 1) / 2; ++t) qr[(size_t)mulmod(t, t, p)] = 1;
    Ec E(p, m.A, m.B, m.C);
    i64 N = p + 1;
    for (i64 x = 0; x < p; ++x) {
        i64 v = E.g_at(x);
        if (v != 0) N += qr[(size_t)v] ? 1 : -1;
    }
    return N;
}

i64 count_points(const CurveModel& m, i64 p, i64 p0) {
    ensure_good(m, p);
    if (p0 < kBsgsFloor)
        fail_pre("count_points: threshold below the BSGS uniqueness floor");
    if (p <= p0) return count_points_charsum(m, p);
    i64 N = count_points_bsgs(m, p);
    i64 a = p + 1 - N;
    check_internal(a * a <= 4 * p, "count_points: Hasse bound violated");
    return N;
}

GroupStructure group_structure(const CurveModel& m, i64 p, i64 p0) {
    ensure_good(m, p);
    GroupStructure gs;
    gs.p = p;
    gs.N = count_points(m, p, p0);
    gs.a_p = p + 1 - gs.N;
    Ec E(p, m.A, m.B, m.C);
    i64 d1 = 1;
    for (auto& [q, ge] : factorize(std::gcd(gs.N, p - 1))) {
        (void)ge;
        int alpha = 0;
        for (i64 t = gs.N; t % q == 0; t /= q) ++alpha;
        int beta = 0;
        for (i64 t = p - 1; t % q == 0; t /= q) ++beta;
        if (alpha / 2 == 0 || beta == 0) continue;
        i64 M = gs.N;
        for (int i = 0; i < alpha; ++i) M /= q;
        // certify v1 = v_q(d1) by sampling: v2 is witnessed by any point of
        // large q-order, v1 by a pair whose order-q "bottom" points are
        // independent (if v1 were smaller, all bottoms of points of order
        // > q^v1 would share one cyclic line)
        struct Bot { Pt b; int e; };
        std::vector<Bot> bots;
        int v1 = 0, v2 = 0;
        bool resolved = false;
        for (i64 x0 = 0; x0 < p && x0 < 2'000'000; ++x0) {
            i64 v = E.g_at(x0);
            Pt P;
            if (v == 0) {
                P = {x0, 0, false};
            } else if (powmod(v, (p - 1) / 2, p) == 1) {
                P = {x0, sqrt_of_residue(v, p), false};
            } else {
                continue;
            }
            Pt Pq = E.mul(M, P);  // q-part of P
            if (Pq.inf) continue;
            int e = 0;
            Pt bottom;
            while (!Pq.inf) {
                bottom = Pq;
                Pq = E.mul(q, Pq);
                ++e;
                check_internal(e <= alpha, "group_structure: q-order too big");
            }
            v2 = std::max(v2, e);
            for (auto& R : bots) {
                int cap = std::min(e, R.e);
                if (cap <= v1) continue;
                bool dependent = false;
                Pt S = R.b;
                for (i64 k = 1; k < q; ++k) {
                    if (S.x == bottom.x && S.y == bottom.y) { dependent = true; break; }
                    S = E.add(S, R.b);
                }
                if (!dependent) v1 = cap;
            }
            if (bots.size() < 200) bots.push_back({bottom, e});
            if (v1 + v2 == alpha) { resolved = true; break; }
        }
        check_internal(resolved, "group_structure: sample budget exhausted");
        for (int i = 0; i < v1; ++i) d1 *= q;
    }
    gs.d1 = d1;
    gs.d2 = gs.N / d1;
    check_internal(gs.d2 % gs.d1 == 0, "group_structure: d1 must divide d2");
    check_internal((p - 1) % gs.d1 == 0, "group_structure: d1 must divide p-1");
    gs.is_cyclic = (gs.d1 == 1);
    return gs;
}

bool is_cyclic(const CurveModel& m, i64 p) {
    return group_structure(m, p).is_cyclic;
}

namespace {

// x-only division polynomials: entry n holds psi_n for odd n and
// psi_n / (2y) for even n, with y^2 folded into W = 4 g(x)
struct DivPolyCtx {
    i64 p;
    polymod::Poly W, W2;
    std::map<i64, polymod::Poly> memo;

    DivPolyCtx(const CurveModel& m, i64 p_) : p(p_) {
        using namespace polymod;
        Ec E(p, m.A, m.B, m.C);
        i64 a = E.A, b = E.B, c = E.C;
        i64 b2 = mulmod(4, a, p), b4 = mulmod(2, b, p), b6 = mulmod(4, c, p);
        i64 b8 = (mulmod(mulmod(4, a, p), c, p) - mulmod(b, b, p) % p + p) % p;
        W = reduce_coeffs({4 * c % p, 4 * b % p, 4 * a % p, 4 % p}, p);
        W2 = mul(W, W, p);
        memo[0] = {};
        memo[1] = {1};
        memo[2] = {1};
        memo[3] = reduce_coeffs({b8, mulmod(3, b6, p), mulmod(3, b4, p), b2, 3}, p);
        memo[4] = reduce_coeffs({(mulmod(b4, b8, p) - mulmod(b6, b6, p) + p) % p,
                                 (mulmod(b2, b8, p) - mulmod(b4, b6, p) + p) % p,
                                 mulmod(10, b8, p), mulmod(10, b6, p),
                                 mulmod(5, b4, p), b2, 2}, p);
    }

    const polymod::Poly& get(i64 n) {
        using namespace polymod;
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        Poly r;
        if (n % 2 == 1) {
            i64 mm = n / 2;
            Poly cube_m = mul(mul(get(mm), get(mm), p), get(mm), p);
            Poly cube_m1 = mul(mul(get(mm + 1), get(mm + 1), p), get(mm + 1), p);
            Poly left = mul(get(mm + 2), cube_m, p);
            Poly right = mul(get(mm - 1), cube_m1, p);
            if (mm % 2 == 0) r = sub(mul(W2, left, p), right, p);
            else r = sub(left, mul(W2, right, p), p);
        } else {
            i64 mm = n / 2;
            Poly left = mul(get(mm + 2), mul(get(mm - 1), get(mm - 1), p), p);
            Poly right = mul(get(mm - 2), mul(get(mm + 1), get(mm + 1), p), p);
            r = mul(get(mm), sub(left, right, p), p);
        }
        return memo[n] = std::move(r);
    }
};

}  // namespace

std::vector<i64> division_poly_x(const CurveModel& m, i64 n, i64 p) {
    if (n < 1 || n % 2 == 0) fail_pre("division_poly_x: n must be odd and positive");
    if (p < 3 || !is_prime(p)) fail_pre("division_poly_x: p must be an odd prime");
    DivPolyCtx ctx(m, p);
    return ctx.get(n);
}

bool full_q_torsion(const CurveModel& m, i64 p, i64 q) {
    ensure_good(m, p);
    if (q < 2 || !is_prime(q)) fail_pre("full_q_torsion: q must be prime");
    if (q == p) fail_pre("full_q_torsion: q = p not allowed");
    using namespace polymod;
    Ec E(p, m.A, m.B, m.C);
    Poly g = reduce_coeffs({E.C, E.B, E.A, 1}, p);
    if (q == 2) {
        // rational 2-torsion means the cubic splits; good reduction keeps
        // it squarefree mod p, so splitting is x^p = x mod g
        return pow_x(p, g, p) == Poly({0, 1});
    }
    if ((p - 1) % q != 0) return false;  // Weil pairing needs mu_q in F_p
    if (q > 31) fail_unsupported("full_q_torsion: q beyond division polynomial cap");
    Poly psi = monic(division_poly_x(m, q, p), p);
    // all x-coordinates of E[q] rational: psi_q | x^p - x (psi_q is
    // squarefree mod p at good reduction)
    if (pow_x(p, psi, p) != Poly({0, 1})) return false;
    // and every such x lifts: g(x) must be a square at every root, i.e.
    // g^((p-1)/2) = 1 modulo the squarefree psi_q
    Poly chi = powmod_poly(g, (p - 1) / 2, psi, p);
    return chi == Poly({1});
}

}  // namespace cyclix
