#pragma once

// Elementary number theory over machine integers: primality, factorization,
// Kronecker symbols, CRT, prime sieves, and the divisor-type sums the
// density estimates need.  Everything 64-bit here; the density module pulls
// in GMP where values can outgrow that.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "cyclix/common.hpp"

namespace cyclix {

// primes below 10^6, computed once
const std::vector<i64>& small_primes();

// deterministic for the full i64 range (trial division + fixed-base Miller-Rabin)
bool is_prime(i64 n);

// prime factorization of |n|, ascending primes; n != 0
std::vector<std::pair<i64, int>> factorize(i64 n);

// one-pass bundle of the usual multiplicative data of n >= 1
struct MultPack {
    i64 mu;      // Moebius
    i64 phi;     // Euler totient
    i64 tau;     // number of divisors
    i64 sigma;   // sum of divisors
    int omega;   // number of distinct prime factors
    std::vector<std::pair<i64, int>> factors;
};
MultPack mult_pack(i64 n);

i64 euler_phi(i64 n);
i64 moebius(i64 n);

// all positive divisors of n >= 1, ascending
std::vector<i64> divisors(i64 n);

// H(n) = sum over d | n of (largest b with b^2 | d); n >= 1
i64 h_function(i64 n);

// squarefree s with n = s * m^2, sign preserved; n != 0
i64 squarefree_part(i64 n);

// Kronecker symbol (a|n), extended to all n (Jacobi on odd n > 0,
// the (a|2) rule on even parts, (a|-1) = sign handling, (a|0) = [|a|=1]).
// (0,0) is rejected.
int kronecker(i64 a, i64 n);

// x = r_i mod m_i for all i; returns (x, lcm) with 0 <= x < lcm,
// or nullopt when the congruences conflict.  lcm must fit in i64.
std::optional<std::pair<i64, i64>> crt_solve(
    const std::vector<std::pair<i64, i64>>& congruences);

// modular arithmetic; moduli up to 2^62
i64 mulmod(i64 a, i64 b, i64 m);
i64 powmod(i64 base, i64 exp, i64 m);
i64 inv_mod(i64 a, i64 m);  // gcd(a, m) = 1 required

// square root of a mod odd prime p, if one exists (Tonelli-Shanks)
std::optional<i64> mod_sqrt(i64 a, i64 p);

// floor(sqrt(n))
u64 isqrt_u64(u64 n);

// primes in [lo, hi], segmented sieve; hi < 10^12
std::vector<i64> primes_in_range(i64 lo, i64 hi);

// primes p <= x with p = a mod f; gcd(a, f) = 1 required
std::vector<i64> primes_in_ap(i64 f, i64 a, i64 x);

}  // namespace cyclix
