#pragma once

// Density machinery for cyclic reductions in a progression: the curve
// profile (entanglement modulus, CM data), rigorous rational brackets for
// the non-CM density, the companion positive lower bound, truncation tail
// bounds, norm-form counts for the CM analysis, and the CM certification
// gate.  All certified values are exact rationals; no floating point.

#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "cyclix/common.hpp"
#include "cyclix/curve.hpp"
#include "cyclix/galois2.hpp"

namespace cyclix {

struct CurveProfile {
    CurveModel model;
    TwoTorsionField k2;
    i64 ent_mod = 30;    // squarefree entanglement modulus, 30 | ent_mod,
                         // every bad prime divides it
    mpq_class j;         // j-invariant, exact
    bool cm = false;
    bool cm_maximal = false;
    i64 cm_D = 0;        // CM by an order in Q(sqrt(-D)); 0 when not CM
};

// profile with ent_mod = rad(30 * |disc_g|); the override variant accepts any
// valid replacement modulus (squarefree, divisible by 30 and by every bad
// prime)
CurveProfile make_profile(const CurveModel& m);
CurveProfile make_profile(const CurveModel& m, i64 me_override);

// |GL_2(Z/d)|
mpz_class gl2_degree(i64 d);

enum class DensityMode {
    TruncatedSeries,    // bracket of the Euler-truncated series
    LowerBoundFormula,  // one-sided bound promoted to [bound, 1]
};

struct DensityEstimate {
    std::string model_id;  // "A,B,C"
    i64 f = 1, a = 1;
    i64 Y = 0;             // Euler truncation point
    mpq_class value_lo, value_hi;
    mpq_class tail;        // certified bracket width, value_hi - value_lo
    // (d, gamma) for each divisor d of the entanglement modulus
    std::vector<std::pair<i64, int>> gamma_trace;
    DensityMode mode = DensityMode::TruncatedSeries;

    friend bool operator==(const DensityEstimate& l, const DensityEstimate& r) {
        return l.model_id == r.model_id && l.f == r.f && l.a == r.a &&
               l.Y == r.Y && l.value_lo == r.value_lo &&
               l.value_hi == r.value_hi && l.tail == r.tail &&
               l.gamma_trace == r.gamma_trace && l.mode == r.mode;
    }
};

// rigorous bracket for the conjectural density of cyclic good primes
// p = a mod f within the family model: exact Euler factors up to Y plus a
// certified tail, times the exact entanglement sum over divisors of ent_mod.
// Throws unsupported when the entanglement resolution exceeds what the
// subgroup engine can enumerate.
DensityEstimate delta_noncm(const CurveProfile& pr, i64 f, i64 a, i64 Y);

// positive lower bound for the same density, uniform in the residue a;
// needs gcd(f, ent_mod) = 1, a nontrivial 2-torsion field, and no CM
mpq_class lower_bound_noncm(const CurveProfile& pr, i64 f);

// certified bound on the truncation residue sum_{e > Y} of the inclusion-
// exclusion over composite torsion moduli with entanglement modulus M;
// monotone decreasing in Y
mpq_class tail_bound(i64 Y, i64 f, i64 M);

struct NormFormSpec {
    i64 D = 1;       // positive squarefree core
    i64 f = 1;
    i64 s = 1;       // shift in (alpha beta + s)^2 + D (gamma beta)^2
    i64 fprime = 1;  // working modulus
    bool parity = false;  // restrict to alpha = gamma mod 2
};
NormFormSpec norm_form_spec(i64 D, i64 f);

// #{(alpha, beta, gamma) mod f' : form = a' mod f', parity when applicable}
i64 gd_count(i64 D, i64 f, i64 a);

// the full histogram over residues w mod f'
std::vector<i64> gd_histogram(i64 D, i64 f);

// proven upper bound c * 4^omega(f) * tau(f) * f^2
i64 gd_bound(i64 D, i64 f);

enum class CmGateResult {
    PositiveCertified,  // the CM criterion applies: positive density
    NotImplied,         // criterion conditions fail for this (f, a)
    OutOfScope,         // non-maximal order or D outside the treated list
};

// CM counterpart of the density question; profile must be a CM curve
CmGateResult cm_gate(const CurveProfile& pr, i64 f, i64 a);

}  // namespace cyclix
