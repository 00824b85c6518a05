#pragma once

// The field K2 = Q(E[2]) generated by the 2-torsion of y^2 = g(x):
// splitting type of g, conductor of the maximal abelian subfield, the
// cyclicity-obstruction character gamma, and constructive twist classes b.
// The gate at the bottom combines these with the density estimates to
// decide what the theory says about cyclic reductions in a progression.

#include <string>
#include <vector>

#include "cyclix/common.hpp"
#include "cyclix/curve.hpp"

namespace cyclix {

enum class K2Kind {
    Trivial,      // g splits over Q, K2 = Q
    Quadratic,    // one rational root, K2 real or imaginary quadratic
    CyclicCubic,  // irreducible, square discriminant, K2 cyclic of degree 3
    S3,           // irreducible, nonsquare discriminant, [K2:Q] = 6
};

struct TwoTorsionField {
    K2Kind kind = K2Kind::Trivial;
    i64 disc_g = 0;  // discriminant of the cubic
    i64 f2 = 1;      // conductor of the maximal abelian subfield K2^ab
    i64 D = 0;       // squarefree core of the quadratic layer (Quadratic/S3)
    i64 d2 = 0;      // discriminant of that quadratic field (Quadratic/S3)
    std::vector<i64> roots;         // rational roots of g, ascending
    std::vector<i64> cubic_kernel;  // split classes mod f2 (CyclicCubic)
};

// splitting analysis of the 2-torsion field; the model must be nonsingular
TwoTorsionField classify_k2(const CurveModel& m);

// [K2 : Q] and [K2^ab : Q]
i64 k2_degree(const TwoTorsionField& k2);
i64 k2_ab_degree(const TwoTorsionField& k2);

// conductor of the cyclic cubic field cut out by an irreducible g with
// square discriminant (the squarefree-index-free square root of the field
// discriminant); rejects other cubics
i64 cubic_conductor(const CurveModel& m);

// gamma_{a,f}(K2^ab): 1 when the class of a mod f acts trivially on
// K2^ab intersected with the f-th cyclotomic field, else 0.
// Requires gcd(a, f) = 1.
int gamma_ab2(const TwoTorsionField& k2, i64 f, i64 a);

// a residue b mod f2 with gamma_{b,f2} = 0, gcd(b, f2) = 1 and
// gcd(b - 1, odd part of f2) = 1; rejects trivial K2 (no such b exists)
i64 find_b(const TwoTorsionField& k2);

struct CongruentB {
    bool exceptional = false;  // no valid b exists in the congruence class
    i64 b = 0;
};

// same as find_b but constrained to b = a mod m for a proper divisor
// m | f2; quadratic-type K2 only.  The empty case is exactly the
// exceptional configuration f2 = 3m with kronecker(-d2/3, a) = -1.
CongruentB find_b_congruent(const TwoTorsionField& k2, i64 m, i64 a);

enum class GateVerdict {
    FinitelyMany,
    InfinitelyManyUnconditional,
    PositiveDensityConditional,
    Undetermined,
};

struct GateResult {
    GateVerdict verdict = GateVerdict::Undetermined;
    std::vector<std::string> reasons;  // stable tags, see gate.cpp

    friend bool operator==(const GateResult&, const GateResult&) = default;
};

// what the theory concludes about primes p = a mod f with E(F_p) cyclic;
// gcd(a, f) = 1 required
GateResult cyclicity_gate(const CurveModel& m, i64 f, i64 a);

}  // namespace cyclix
