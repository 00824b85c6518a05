#include "cyclix/arith.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace cyclix {

namespace {
constexpr i64 kSieveLimit = 1'000'000;
constexpr i64 kI64Max = INT64_MAX;
}  // namespace

const std::vector<i64>& small_primes() {
    static const std::vector<i64> primes = [] {
        std::vector<char> comp(kSieveLimit + 1, 0);
        std::vector<i64> ps;
        for (i64 i = 2; i <= kSieveLimit; ++i) {
            if (comp[i]) continue;
            ps.push_back(i);
            for (i64 j = i * i; j <= kSieveLimit; j += i) comp[j] = 1;
        }
        return ps;
    }();
    return primes;
}

i64 mulmod(i64 a, i64 b, i64 m) {
    if (m <= 0) fail_pre("mulmod: modulus must be positive");
    a %= m; if (a < 0) a += m;
    b %= m; if (b < 0) b += m;
    return (i64)((u128)(u64)a * (u64)b % (u64)m);
}

i64 powmod(i64 base, i64 exp, i64 m) {
    if (m <= 0) fail_pre("powmod: modulus must be positive");
    if (exp < 0) fail_pre("powmod: negative exponent");
    if (m == 1) return 0;
    i64 r = 1;
    base %= m; if (base < 0) base += m;
    while (exp > 0) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

i64 inv_mod(i64 a, i64 m) {
    if (m <= 0) fail_pre("inv_mod: modulus must be positive");
    a %= m; if (a < 0) a += m;
    // extended euclid on (a, m)
    i64 old_r = a, r = m;
    i64 old_s = 1, s = 0;
    while (r != 0) {
        i64 q = old_r / r;
        i64 t = old_r - q * r; old_r = r; r = t;
        t = old_s - q * s; old_s = s; s = t;
    }
    if (old_r != 1 && !(m == 1 && old_r == 0)) fail_pre("inv_mod: not invertible");
    old_s %= m; if (old_s < 0) old_s += m;
    return old_s;
}

bool is_prime(i64 n) {
    if (n < 2) return false;
    for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    if (n < 41 * 41) return true;
    // Miller-Rabin with the first 12 primes as bases: deterministic far
    // beyond the i64 range (up to ~3.3e24)
    i64 d = n - 1;
    int s = std::countr_zero((u64)d);
    d >>= s;
    for (i64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        i64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

namespace {

// Brent's variant of Pollard rho; n odd composite with no factor < 41
i64 pollard_brent(i64 n) {
    u64 seed = 0x9e3779b97f4a7c15ull ^ (u64)n;
    auto rng = [&seed]() {
        seed ^= seed << 13; seed ^= seed >> 7; seed ^= seed << 17;
        return seed;
    };
    for (int attempt = 0; attempt < 64; ++attempt) {
        i64 c = (i64)(rng() % (u64)(n - 1)) + 1;
        auto step = [&](i64 x) {
            return (i64)(((u128)(u64)x * (u64)x + (u64)c) % (u64)n);
        };
        i64 x = (i64)(rng() % (u64)n), y = x, ys = x, d = 1, q = 1;
        const i64 batch = 128;
        for (i64 r = 1; d == 1; r <<= 1) {
            x = y;
            for (i64 i = 0; i < r; ++i) y = step(y);
            for (i64 k = 0; k < r && d == 1; k += batch) {
                ys = y;
                i64 lim = std::min(batch, r - k);
                for (i64 i = 0; i < lim; ++i) {
                    y = step(y);
                    q = mulmod(q, std::llabs(x - y), n);
                }
                d = std::gcd(q, n);
            }
        }
        if (d == n) {
            // batching overshot; replay one step at a time
            do {
                ys = step(ys);
                d = std::gcd(std::llabs(x - ys), n);
            } while (d == 1);
        }
        if (d != n) return d;
    }
    fail_internal("pollard_brent: no factor found");
}

void factor_into(i64 n, std::vector<std::pair<i64, int>>& out) {
    if (n == 1) return;
    if (is_prime(n)) { out.emplace_back(n, 1); return; }
    i64 d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

}  // namespace

std::vector<std::pair<i64, int>> factorize(i64 n) {
    if (n == 0) fail_pre("factorize(0)");
    u64 m = (n < 0) ? (u64)(-(n + 1)) + 1 : (u64)n;  // |n| without overflow
    std::vector<std::pair<i64, int>> out;
    for (i64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (m % (u64)p == 0) {
            int e = 0;
            while (m % (u64)p == 0) { m /= (u64)p; ++e; }
            out.emplace_back(p, e);
        }
        if ((u64)p * (u64)p > m) break;
    }
    if (m > 1) {
        std::vector<std::pair<i64, int>> rest;
        factor_into((i64)m, rest);
        std::sort(rest.begin(), rest.end());
        // merge equal primes from the recursive split
        for (auto& [p, e] : rest) {
            if (!out.empty() && out.back().first == p) out.back().second += e;
            else out.emplace_back(p, e);
        }
    }
    return out;
}

MultPack mult_pack(i64 n) {
    if (n < 1) fail_pre("mult_pack: n must be >= 1");
    MultPack mp;
    mp.mu = 1; mp.phi = 1; mp.tau = 1; mp.sigma = 1; mp.omega = 0;
    if (n > 1) mp.factors = factorize(n);
    for (auto& [p, e] : mp.factors) {
        mp.omega += 1;
        mp.mu = (e > 1) ? 0 : -mp.mu;
        mp.tau *= (e + 1);
        i64 pe = 1, sig = 1, phi = p - 1;
        for (int i = 1; i <= e; ++i) {
            pe *= p;
            sig += pe;
            if (i > 1) phi *= p;
        }
        mp.phi *= phi;
        u128 sg = (u128)mp.sigma * (u128)sig;
        if (sg > (u128)kI64Max) fail_unsupported("mult_pack: sigma overflow");
        mp.sigma = (i64)sg;
    }
    return mp;
}

i64 euler_phi(i64 n) { return mult_pack(n).phi; }
i64 moebius(i64 n) { return mult_pack(n).mu; }

std::vector<i64> divisors(i64 n) {
    if (n < 1) fail_pre("divisors: n must be >= 1");
    std::vector<i64> ds{1};
    for (auto& [p, e] : mult_pack(n).factors) {
        size_t base = ds.size();
        i64 pe = 1;
        for (int i = 1; i <= e; ++i) {
            pe *= p;
            for (size_t j = 0; j < base; ++j) ds.push_back(ds[j] * pe);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

i64 h_function(i64 n) {
    if (n < 1) fail_pre("h_function: n must be >= 1");
    // multiplicative: the local factor at p^e is sum_{j<=e} p^floor(j/2)
    u128 h = 1;
    for (auto& [p, e] : mult_pack(n).factors) {
        u128 local = 0, pw = 1;
        for (int j = 0; j <= e; ++j) {
            local += pw;
            if (j % 2 == 1) pw *= (u128)p;
        }
        h *= local;
        if (h > (u128)kI64Max) fail_unsupported("h_function: overflow");
    }
    return (i64)h;
}

i64 squarefree_part(i64 n) {
    if (n == 0) fail_pre("squarefree_part(0)");
    i64 sign = n < 0 ? -1 : 1;
    i64 s = 1;
    for (auto& [p, e] : factorize(n)) {
        if (e % 2 == 1) s *= p;
    }
    return sign * s;
}

int kronecker(i64 a, i64 n) {
    if (a == 0 && n == 0) fail_pre("kronecker(0,0)");
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int sign = 1;
    if (n < 0) {
        if (a < 0) sign = -sign;
        n = -n;
    }
    if (n % 2 == 0) {
        if (a % 2 == 0) return 0;
        int t = std::countr_zero((u64)n);
        n >>= t;
        i64 am = ((a % 8) + 8) % 8;
        if ((t & 1) && (am == 3 || am == 5)) sign = -sign;
    }
    // Jacobi loop on odd positive n
    a %= n; if (a < 0) a += n;
    while (a != 0) {
        int z = std::countr_zero((u64)a);
        a >>= z;
        if ((z & 1) && (n % 8 == 3 || n % 8 == 5)) sign = -sign;
        if ((a % 4 == 3) && (n % 4 == 3)) sign = -sign;
        std::swap(a, n);
        a %= n;
    }
    return (n == 1) ? sign : 0;
}

std::optional<std::pair<i64, i64>> crt_solve(
    const std::vector<std::pair<i64, i64>>& congruences) {
    i64 r = 0, m = 1;
    for (auto& [ri_raw, mi] : congruences) {
        if (mi <= 0) fail_pre("crt_solve: modulus must be positive");
        i64 ri = ri_raw % mi; if (ri < 0) ri += mi;
        i64 g = std::gcd(m, mi);
        if ((ri - r) % g != 0) return std::nullopt;
        i64 mg = mi / g;
        if ((i128)(m / g) * mi > (i128)kI64Max) {
            fail_unsupported("crt_solve: combined modulus overflows");
        }
        i64 l = (m / g) * mi;
        // x = r + m*k with (m/g) k = (ri - r)/g mod mg; m/g and mg are coprime
        i64 k = mulmod((ri - r) / g, 1, mg);
        k = mulmod(k, inv_mod(m / g, mg), mg);
        r = (i64)(((i128)m * k + r) % l);
        if (r < 0) r += l;
        m = l;
    }
    return std::make_pair(r, m);
}

std::optional<i64> mod_sqrt(i64 a, i64 p) {
    if (p < 2 || !is_prime(p) || p == 2) fail_pre("mod_sqrt: p must be an odd prime");
    a %= p; if (a < 0) a += p;
    if (a == 0) return 0;
    if (powmod(a, (p - 1) / 2, p) != 1) return std::nullopt;
    if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
    // Tonelli-Shanks
    i64 q = p - 1;
    int s = std::countr_zero((u64)q);
    q >>= s;
    i64 z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    i64 m = s;
    i64 c = powmod(z, q, p);
    i64 t = powmod(a, q, p);
    i64 r = powmod(a, (q + 1) / 2, p);
    while (t != 1) {
        i64 t2 = t;
        int i = 0;
        while (t2 != 1) { t2 = mulmod(t2, t2, p); ++i; }
        i64 b = powmod(c, 1LL << (m - i - 1), p);
        r = mulmod(r, b, p);
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        m = i;
    }
    return r;
}

u64 isqrt_u64(u64 n) {
    if (n == 0) return 0;
    u64 r = (u64)std::sqrt((double)n);
    while (r > 0 && (u128)r * r > n) --r;
    while ((u128)(r + 1) * (r + 1) <= (u128)n) ++r;
    return r;
}

std::vector<i64> primes_in_range(i64 lo, i64 hi) {
    if (hi >= (i64)1e12) fail_unsupported("primes_in_range: hi too large");
    std::vector<i64> out;
    if (hi < 2 || lo > hi) return out;
    lo = std::max<i64>(lo, 2);
    const auto& sp = small_primes();
    const i64 block = 1 << 20;
    std::vector<char> comp;
    for (i64 s = lo; s <= hi; s += block) {
        i64 e = std::min(hi, s + block - 1);
        comp.assign(e - s + 1, 0);
        for (i64 p : sp) {
            if (p * p > e) break;
            i64 start = std::max(p * p, ((s + p - 1) / p) * p);
            for (i64 j = start; j <= e; j += p) comp[j - s] = 1;
        }
        for (i64 v = s; v <= e; ++v) {
            if (!comp[v - s]) out.push_back(v);
        }
    }
    return out;
}

std::vector<i64> primes_in_ap(i64 f, i64 a, i64 x) {
    if (f < 1) fail_pre("primes_in_ap: f must be >= 1");
    i64 an = a % f; if (an < 0) an += f;
    if (std::gcd(an, f) != 1) fail_pre("primes_in_ap: gcd(a, f) must be 1");
    std::vector<i64> out;
    for (i64 p : primes_in_range(2, x)) {
        if (p % f == an) out.push_back(p);
    }
    return out;
}

}  // namespace cyclix
