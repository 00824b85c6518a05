#include "cyclix/density.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "cyclix/arith.hpp"

namespace cyclix {

namespace {

// tail tables stop here; exact Euler factors are available below this point
constexpr i64 kTailLimit = 1000000;

// largest modulus the entanglement engine will enumerate
constexpr i64 kEngineCap = 5000000;

// largest working modulus f' for norm-form histograms, and the largest
// 2-power part the parity-restricted brute force will walk (cost is the
// cube of that part)
constexpr i64 kGdCap = 4000;
constexpr i64 kGdParityCap = 1024;

const mpz_class& pow10_24() {
    static const mpz_class v = [] {
        mpz_class t;
        mpz_ui_pow_ui(t.get_mpz_t(), 10, 24);
        return t;
    }();
    return v;
}

mpz_class mpz_from_u128(u128 v) {
    mpz_class hi = (unsigned long)(v >> 64);
    mpz_class lo = (unsigned long)(u64)v;
    return (hi << 64) + lo;
}

// |GL2(F_p)| = p (p-1) (p^2-1) in 128 bits; fine for p up to the table limit
u128 gl2_prime_u128(u128 p) { return p * (p - 1) * (p * p - 1); }

// prefix sums of ceil(10^24 / |GL2(F_p)|) over the primes of the static
// sieve, so any tail sum_{Y < p <= 10^6} 1/|GL2(F_p)| has an exact rational
// upper bound
const std::vector<u128>& gl2_tail_prefix() {
    static const std::vector<u128> table = [] {
        const auto& ps = small_primes();
        std::vector<u128> pre(ps.size() + 1, 0);
        u128 scale = 1;
        for (int i = 0; i < 24; ++i) scale *= 10;
        for (size_t i = 0; i < ps.size(); ++i) {
            u128 g = gl2_prime_u128((u128)ps[i]);
            pre[i + 1] = pre[i] + (scale + g - 1) / g;
        }
        return pre;
    }();
    return table;
}

// upper bound on sum_{p > Y} 1/|GL2(F_p)|: the scaled table up to 10^6 plus
// (8/9) 10^-18 for the rest, since 1/|GL2(F_p)| <= (8/3) p^-4 and the prime
// sum beyond 10^6 is below the integral (8/3) int_{10^6} x^-4 dx
mpq_class euler_tail(i64 Y) {
    const auto& ps = small_primes();
    const auto& pre = gl2_tail_prefix();
    size_t idx = std::upper_bound(ps.begin(), ps.end(), Y) - ps.begin();
    mpq_class out(mpz_from_u128(pre.back() - pre[idx]), pow10_24());
    out.canonicalize();
    mpz_class den18;
    mpz_ui_pow_ui(den18.get_mpz_t(), 10, 18);
    mpq_class rest(mpz_class(8), 9 * den18);
    rest.canonicalize();
    return out + rest;
}

// 1 - t / |GL2(F_p)| as an exact rational
mpq_class euler_factor(i64 p, i64 t) {
    mpz_class g = gl2_degree(p);
    mpq_class out(g - t, g);
    out.canonicalize();
    return out;
}

// does sigma_x act trivially on K2^ab; x must be coprime to f2
bool k2_fixes(const TwoTorsionField& k2, i64 x) {
    switch (k2.kind) {
        case K2Kind::Trivial:
            return true;
        case K2Kind::Quadratic:
        case K2Kind::S3:
            return kronecker(k2.d2, x) == 1;
        case K2Kind::CyclicCubic:
            return std::binary_search(k2.cubic_kernel.begin(),
                                      k2.cubic_kernel.end(), x % k2.f2);
    }
    fail_internal("k2_fixes: bad kind");
}

i64 lcm_capped(i64 a, i64 b, i64 cap) {
    i128 l = (i128)(a / std::gcd(a, b)) * b;
    if (l > cap) fail_unsupported(
        "entanglement resolution exceeds the supported modulus range");
    return (i64)l;
}

// the thirteen rational CM classes, keyed by j-invariant; D is the positive
// squarefree core of the CM field
struct CmClass {
    i64 j_hi;  // j fits i64 for every rational CM class
    i64 D;
    bool maximal;
};

const CmClass kCmTable[] = {
    {0, 3, true},
    {1728, 1, true},
    {8000, 2, true},
    {-3375, 7, true},
    {-32768, 11, true},
    {-884736, 19, true},
    {-884736000, 43, true},
    {-147197952000, 67, true},
    {-262537412640768000LL, 163, true},
    {54000, 3, false},
    {287496, 1, false},
    {-12288000, 3, false},
    {16581375, 7, false},
};

// discriminant of Q(sqrt(s)) for squarefree s
i64 quad_disc_of(i64 s) {
    return (((s % 4) + 4) % 4 == 1) ? s : 4 * s;
}

}  // namespace

mpz_class gl2_degree(i64 d) {
    if (d < 1) fail_pre("gl2_degree: modulus must be positive");
    mpz_class out = 1;
    for (auto [p, e] : factorize(d)) {
        mpz_class pe;
        mpz_ui_pow_ui(pe.get_mpz_t(), (unsigned long)p, (unsigned long)(4 * e - 3));
        out *= pe * (p - 1) * (mpz_class(p) * p - 1);
    }
    return out;
}

static CurveProfile make_profile_impl(const CurveModel& m,
                                      std::optional<i64> override_me) {
    i64 dg = disc_g(m);
    if (dg == 0) fail_pre("make_profile: singular model");

    CurveProfile pr;
    pr.model = m;
    pr.k2 = classify_k2(m);

    // j = c4^3 / Delta with the usual c-invariants of y^2 = g(x)
    mpz_class A = m.A, B = m.B, C = m.C;
    mpz_class c4 = 16 * A * A - 48 * B;
    mpz_class c6 = -64 * A * A * A + 288 * A * B - 864 * C;
    mpz_class delta = 16 * mpz_class(dg);
    check_internal(c4 * c4 * c4 - c6 * c6 == 1728 * delta,
                   "c-invariant identity failed");
    pr.j = mpq_class(c4 * c4 * c4, delta);
    pr.j.canonicalize();

    for (const auto& row : kCmTable) {
        if (pr.j == row.j_hi) {
            pr.cm = true;
            pr.cm_D = row.D;
            pr.cm_maximal = row.maximal;
            break;
        }
    }

    i64 me = 30;
    for (auto [p, e] : factorize(dg)) {
        if (p == 2 || p == 3 || p == 5) continue;
        if (me > INT64_MAX / p) fail_unsupported(
            "entanglement modulus overflows");
        me *= p;
    }
    if (override_me) {
        i64 ov = *override_me;
        if (ov < 1 || moebius(ov) == 0 || ov % 30 != 0)
            fail_pre("make_profile: override must be squarefree and divisible by 30");
        for (auto [p, e] : factorize(dg))
            if (ov % p != 0)
                fail_pre("make_profile: override must cover every bad prime");
        me = ov;
    }
    pr.ent_mod = me;
    return pr;
}

CurveProfile make_profile(const CurveModel& m) {
    return make_profile_impl(m, std::nullopt);
}

CurveProfile make_profile(const CurveModel& m, i64 me_override) {
    return make_profile_impl(m, me_override);
}

DensityEstimate delta_noncm(const CurveProfile& pr, i64 f, i64 a, i64 Y) {
    if (pr.cm) fail_pre("delta_noncm: model has complex multiplication");
    if (f < 1) fail_pre("delta_noncm: modulus must be positive");
    i64 an = ((a % f) + f) % f;
    if (std::gcd(an, f) != 1 && f > 1)
        fail_pre("delta_noncm: residue not coprime to modulus");
    if (Y < 2) fail_pre("delta_noncm: truncation point must be at least 2");
    if (Y > kTailLimit)
        fail_unsupported("delta_noncm: truncation beyond the tail table");

    // split f into the part g supported on primes of ent_mod and the rest
    i64 g = 1, fcop = f;
    for (auto [p, e] : factorize(pr.ent_mod)) {
        while (fcop % p == 0) {
            g *= p;
            fcop /= p;
        }
    }

    // inclusion-exclusion over the squarefree divisors d of ent_mod: for each,
    // gamma says whether sigma_a fixes L_d inside Q(zeta_g), and the degree
    // [L_d : L_d meet Q(zeta_g)] comes from enumerating the fixing subgroup
    // of L_d in (Z/M')* and projecting it to (Z/g)*
    mpq_class fs = 0;
    std::vector<std::pair<i64, int>> trace;
    i64 phi_g = euler_phi(g);
    for (i64 d : divisors(pr.ent_mod)) {
        i64 dp = d % 2 == 0 ? d / 2 : d;  // odd part; ent_mod is squarefree
        bool even = d % 2 == 0;
        i64 Mp = lcm_capped(dp, g, kEngineCap);
        if (even) Mp = lcm_capped(Mp, pr.k2.f2, kEngineCap);

        i64 hsize = 0;
        std::set<i64> proj;
        for (i64 x = 1; x <= Mp; ++x) {
            if (std::gcd(x, Mp) != 1) continue;
            if (x % dp != 1 % dp) continue;
            if (even && !k2_fixes(pr.k2, x % pr.k2.f2)) continue;
            ++hsize;
            proj.insert(x % g);
        }
        check_internal(hsize > 0, "fixing subgroup cannot be empty");

        bool gamma = proj.count(an % g) != 0;
        trace.push_back({d, gamma ? 1 : 0});
        if (!gamma) continue;  // term vanishes

        i64 phi_mp = euler_phi(Mp);
        check_internal(phi_mp % hsize == 0, "subgroup order must divide phi");
        i64 deg = phi_mp / hsize;
        if (even && pr.k2.kind == K2Kind::S3) deg *= 3;
        i64 ssize = (i64)proj.size();
        check_internal(phi_g % ssize == 0, "projection order must divide phi");

        // mu(d) * [L_d meet Q(zeta_g) : Q] / [L_d : Q]
        mpq_class term(mpz_class(moebius(d)) * phi_g, mpz_class(ssize) * deg);
        term.canonicalize();
        fs += term;
    }
    check_internal(fs >= 0, "entanglement sum must be nonnegative");

    // Euler product over primes away from ent_mod: exact factors up to Y plus
    // the exact factors of the large primes dividing f, bracketed below by
    // the certified tail
    mpq_class prod = 1;
    for (i64 p : small_primes()) {
        if (p > Y) break;
        if (pr.ent_mod % p == 0) continue;
        if (f % p == 0) {
            if (an % p == 1) prod *= euler_factor(p, p - 1);
            // a != 1 mod p: the p-condition is already unsatisfiable, factor 1
        } else {
            prod *= euler_factor(p, 1);
        }
    }
    for (auto [p, e] : factorize(fcop)) {
        if (p <= Y) continue;
        if (an % p == 1) prod *= euler_factor(p, p - 1);
    }

    mpq_class lo_scale = 1 - euler_tail(Y);
    if (lo_scale < 0) lo_scale = 0;

    DensityEstimate est;
    est.model_id = model_id(pr.model);
    est.f = f;
    est.a = f == 1 ? 1 : an;
    est.Y = Y;
    mpq_class base = fs / euler_phi(f);
    est.value_hi = base * prod;
    est.value_lo = base * prod * lo_scale;
    est.tail = est.value_hi - est.value_lo;
    est.gamma_trace = std::move(trace);
    est.mode = DensityMode::TruncatedSeries;
    return est;
}

mpq_class lower_bound_noncm(const CurveProfile& pr, i64 f) {
    if (pr.cm) fail_pre("lower_bound_noncm: model has complex multiplication");
    if (pr.k2.kind == K2Kind::Trivial)
        fail_pre("lower_bound_noncm: rational 2-torsion has no positive bound");
    if (f < 1 || std::gcd(f, pr.ent_mod) != 1)
        fail_pre("lower_bound_noncm: modulus must be coprime to ent_mod");

    const i64 Y = 200;  // matches the gate's truncation of delta_noncm

    // worst case over residues: primes dividing f take the split factor
    mpq_class prod = 1;
    for (i64 p : small_primes()) {
        if (p > Y) break;
        if (pr.ent_mod % p == 0) continue;
        prod *= euler_factor(p, f % p == 0 ? p - 1 : 1);
    }
    for (auto [p, e] : factorize(f))
        if (p > Y) prod *= euler_factor(p, p - 1);
    mpq_class lo_scale = 1 - euler_tail(Y);
    if (lo_scale < 0) lo_scale = 0;
    prod *= lo_scale;

    mpq_class me_part = 1;
    for (auto [p, e] : factorize(pr.ent_mod)) {
        if (p == 2) continue;
        mpq_class fac(p - 2, p - 1);
        fac.canonicalize();
        me_part *= fac;
    }

    // the 2-torsion layer: ([K2:Q] - 1 - mu(f2) ([K2ab:Q] - 1) /
    // prod_{2 < p | f2} (p - 2)) / [K2:Q]
    i64 deg = k2_degree(pr.k2);
    mpq_class kpart(deg - 1, 1);
    i64 mu = moebius(pr.k2.f2);
    if (mu != 0) {
        mpz_class pd = 1;
        for (auto [p, e] : factorize(pr.k2.f2))
            if (p > 2) pd *= (p - 2);
        mpq_class corr(mpz_class(mu) * (k2_ab_degree(pr.k2) - 1), pd);
        corr.canonicalize();
        kpart -= corr;
    }
    kpart /= deg;
    check_internal(kpart > 0, "2-torsion factor must be positive");

    return prod * me_part * kpart / euler_phi(f);
}

namespace {

// smallest prime factor for every integer up to the tail limit
const std::vector<int32_t>& spf_table() {
    static const std::vector<int32_t> table = [] {
        std::vector<int32_t> v(kTailLimit + 1, 0);
        for (i64 i = 2; i <= kTailLimit; ++i) {
            if (v[i]) continue;
            for (i64 j = i; j <= kTailLimit; j += i)
                if (!v[j]) v[j] = (int32_t)i;
        }
        return v;
    }();
    return table;
}

// |GL2(Z/e)| for squarefree e, or 0 when e is not squarefree
u128 gl2_u128_if_squarefree(i64 e) {
    const auto& spf = spf_table();
    u128 out = 1;
    while (e > 1) {
        i64 p = spf[e];
        e /= p;
        if (e % p == 0) return 0;
        out *= gl2_prime_u128((u128)p);
    }
    return out;
}

// upper bound on sum over e in (T, 10^6], k | e, e squarefree of 1/|GL2(Z/e)|
// plus the certified remainder for e beyond the table
mpq_class sk_sum(i64 k, i64 T) {
    u128 scale = 1;
    for (int i = 0; i < 24; ++i) scale *= 10;
    u128 acc = 0;
    for (i64 e = (std::max<i64>(T, 0) / k + 1) * k; e <= kTailLimit; e += k) {
        u128 g = gl2_u128_if_squarefree(e);
        if (g == 0) continue;
        acc += (scale + g - 1) / g;
    }
    mpq_class table_part(mpz_from_u128(acc), pow10_24());
    table_part.canonicalize();

    // remainder over e = k m > 10^6: 1/|GL2(Z/e)| <= (5/3) / (e^3 phi(e))
    // because prod_p (1 - 1/p^2) > 3/5, and phi(km) >= phi(k) phi(m)
    mpq_class lead(mpz_class(5), 3 * mpz_class(k) * mpz_class(k) * k * euler_phi(k));
    lead.canonicalize();
    i64 M0 = kTailLimit / k;
    mpq_class msum;
    if (M0 >= 7) {
        // phi(m) > sqrt(m) for m >= 7, so the m-sum is below
        // sum_{m > M0} m^{-7/2} <= (2/5) M0^{-5/2} <= 2 / (5 M0^2 isqrt(M0))
        i64 r = (i64)isqrt_u64((u64)M0);
        msum = mpq_class(mpz_class(2), 5 * mpz_class(M0) * M0 * r);
    } else {
        // crude but certified: sum_{m >= 1} 1/(m^3 phi(m)) < 13/11
        // (first seven terms plus the m^{-7/2} integral tail)
        msum = mpq_class(13, 11);
    }
    msum.canonicalize();
    return table_part + lead * msum;
}

}  // namespace

mpq_class tail_bound(i64 Y, i64 f, i64 M) {
    if (Y < 1 || f < 1 || M < 1) fail_pre("tail_bound: arguments must be positive");

    i64 radM = 1;
    for (auto [p, e] : factorize(M)) radM *= p;

    // split f by the primes of M
    i64 f1 = 1, f2 = f;
    for (auto [p, e] : factorize(M)) {
        while (f2 % p == 0) {
            f1 *= p;
            f2 /= p;
        }
    }

    mpq_class total = 0;
    for (i64 d : divisors(radM))
        for (i64 k : divisors(f2))
            total += euler_phi(k) * sk_sum(k, Y / d);
    total /= mpz_class(euler_phi(f1)) * euler_phi(f2);
    return total;
}

namespace {

// histogram of (alpha beta + s)^2 + D (gamma beta)^2 over (Z/n)^3, no parity
// restriction.  Group beta by e = gcd(beta, n): alpha beta then covers each
// multiple of e exactly e times, and likewise gamma beta, so each class
// contributes a convolution of two short value lists.
std::vector<i64> hist_plain(i64 n, i64 s, i64 D) {
    std::vector<i64> H(n, 0);
    if (n == 1) {
        H[0] = 1;
        return H;
    }
    i64 Dn = ((D % n) + n) % n;
    for (i64 e : divisors(n)) {
        i64 r = n / e;
        i64 weight = e * e * euler_phi(r);
        std::vector<i64> u(r), v(r);
        for (i64 k = 0; k < r; ++k) {
            i64 t = (s + e * k) % n;
            u[k] = mulmod(t, t, n);
            i64 w = (e * k) % n;
            v[k] = mulmod(Dn, mulmod(w, w, n), n);
        }
        for (i64 k1 = 0; k1 < r; ++k1)
            for (i64 k2 = 0; k2 < r; ++k2) {
                i64 w = u[k1] + v[k2];
                if (w >= n) w -= n;
                H[w] += weight;
            }
    }
    return H;
}

// same histogram over (Z/t)^3 restricted to alpha = gamma mod 2; t is a
// power of 2 small enough to walk directly
std::vector<i64> hist_brute_parity(i64 t, i64 s, i64 D) {
    std::vector<i64> H(t, 0);
    if (t == 1) {
        H[0] = 1;
        return H;
    }
    i64 Dt = ((D % t) + t) % t;
    for (i64 al = 0; al < t; ++al)
        for (i64 be = 0; be < t; ++be) {
            i64 ab = (al * be + s) % t;
            i64 base = ab * ab % t;
            for (i64 ga = al & 1; ga < t; ga += 2) {
                i64 gb = ga * be % t;
                ++H[(base + Dt * (gb * gb % t)) % t];
            }
        }
    return H;
}

}  // namespace

NormFormSpec norm_form_spec(i64 D, i64 f) {
    if (D < 1 || moebius(D) == 0)
        fail_pre("norm_form_spec: D must be positive and squarefree");
    if (f < 1) fail_pre("norm_form_spec: modulus must be positive");
    NormFormSpec sp;
    sp.D = D;
    sp.f = f;
    if (D % 4 == 3) {
        sp.s = 2;
        sp.parity = f % 2 == 0;
        if (f > INT64_MAX / 4) fail_unsupported("norm_form_spec: modulus too large");
        sp.fprime = (f % 2 == 0 ? 4 : 1) * f;
    } else {
        sp.s = 1;
        sp.fprime = f;
        sp.parity = false;
    }
    return sp;
}

std::vector<i64> gd_histogram(i64 D, i64 f) {
    NormFormSpec sp = norm_form_spec(D, f);
    i64 n = sp.fprime;
    if (n > kGdCap) fail_unsupported("gd_histogram: working modulus too large");
    if (!sp.parity) return hist_plain(n, sp.s, D);

    // parity couples only the 2-power component; split by CRT
    i64 t = n & -n;
    i64 modd = n / t;
    if (t > kGdParityCap)
        fail_unsupported("gd_histogram: 2-part too large for the parity walk");
    std::vector<i64> h2 = hist_brute_parity(t, sp.s % t, D);
    std::vector<i64> hm = hist_plain(modd, sp.s, D);
    std::vector<i64> H(n);
    for (i64 w = 0; w < n; ++w) H[w] = h2[w % t] * hm[w % modd];
    return H;
}

i64 gd_count(i64 D, i64 f, i64 a) {
    NormFormSpec sp = norm_form_spec(D, f);
    i64 an = ((a % f) + f) % f;
    if (std::gcd(an, f) != 1 && f > 1)
        fail_pre("gd_count: residue not coprime to modulus");
    std::vector<i64> H = gd_histogram(D, f);
    i64 target = D % 4 == 3 ? (4 * an) % sp.fprime : an % sp.fprime;
    return H[target];
}

i64 gd_bound(i64 D, i64 f) {
    if (D < 1 || moebius(D) == 0)
        fail_pre("gd_bound: D must be positive and squarefree");
    if (f < 1) fail_pre("gd_bound: modulus must be positive");
    MultPack mp = mult_pack(f);
    i64 c = (D % 4 == 3 && f % 2 == 0) ? 49 : 2;
    i128 out = (i128)c * mp.tau * f * f;
    for (int i = 0; i < mp.omega; ++i) out *= 4;
    if (out > INT64_MAX) fail_unsupported("gd_bound overflows");
    return (i64)out;
}

CmGateResult cm_gate(const CurveProfile& pr, i64 f, i64 a) {
    if (!pr.cm) fail_pre("cm_gate: model has no complex multiplication");
    if (f < 1) fail_pre("cm_gate: modulus must be positive");
    i64 an = ((a % f) + f) % f;
    if (std::gcd(an, f) != 1 && f > 1)
        fail_pre("cm_gate: residue not coprime to modulus");

    static const std::set<i64> treated = {1, 2, 3, 7, 11, 19, 43, 67, 163};
    if (!pr.cm_maximal || !treated.count(pr.cm_D)) return CmGateResult::OutOfScope;

    i64 dK = quad_disc_of(-pr.cm_D);
    const TwoTorsionField& k2 = pr.k2;

    // a quadratic field of discriminant e poses no obstruction when the
    // progression either does not pin sigma_a on it, or pins it to the
    // nontrivial class
    auto free_quad = [&](i64 e) {
        return f % std::llabs(e) != 0 || kronecker(e, an) == -1;
    };

    bool free_k2;
    switch (k2.kind) {
        case K2Kind::Trivial:
            free_k2 = false;  // K2 = Q is itself the obstruction
            break;
        case K2Kind::Quadratic:
        case K2Kind::S3:
            free_k2 = free_quad(k2.d2);
            break;
        case K2Kind::CyclicCubic:
            free_k2 = f % k2.f2 != 0 ||
                      !std::binary_search(k2.cubic_kernel.begin(),
                                          k2.cubic_kernel.end(), an % k2.f2);
            break;
        default:
            fail_internal("cm_gate: bad kind");
    }
    bool free_K = free_quad(dK);

    bool quad_layer = k2.kind == K2Kind::Quadratic || k2.kind == K2Kind::S3;

    // K2^ab equal to the CM field: one obstruction field instead of two
    if (quad_layer && k2.d2 == dK && free_k2) return CmGateResult::PositiveCertified;

    // otherwise the two fields must be disjoint and gamma must be
    // multiplicative across the compositum
    bool disjoint = !quad_layer || k2.d2 != dK;
    bool multiplicative = true;
    if (quad_layer && k2.d2 != dK) {
        // third quadratic character of the biquadratic compositum
        i128 core_wide = (i128)k2.D * (-pr.cm_D);
        if (core_wide > INT64_MAX || core_wide < INT64_MIN)
            fail_unsupported("cm_gate: discriminant combination too large");
        i64 core = squarefree_part((i64)core_wide);
        i64 e3 = quad_disc_of(core);
        auto fixed_quad = [&](i64 e) {
            return !(f % std::llabs(e) == 0 && kronecker(e, an) == -1);
        };
        multiplicative = !(fixed_quad(k2.d2) && fixed_quad(dK) && !fixed_quad(e3));
    }

    if (disjoint && multiplicative && free_k2 && free_K)
        return CmGateResult::PositiveCertified;
    return CmGateResult::NotImplied;
}

}  // namespace cyclix
