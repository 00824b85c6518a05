#pragma once

// Reduction of an integral model y^2 = x^3 + A x^2 + B x + C modulo odd
// primes of good reduction: point counts, the invariant-factor shape of
// the point group, and rationality of full q-torsion.

#include <string>
#include <vector>

#include "cyclix/common.hpp"

namespace cyclix {

struct CurveModel {
    i64 A = 0, B = 0, C = 0;
    bool operator==(const CurveModel&) const = default;
};

// canonical "A,B,C" label, used to tag reports and estimates
std::string model_id(const CurveModel& m);

// discriminant of the cubic x^3 + A x^2 + B x + C
i64 disc_g(const CurveModel& m);

// curve discriminant of the model, 16 * disc_g
i64 disc_E(const CurveModel& m);

// p is assumed prime; good means p odd and p does not divide disc_E
bool good_reduction(const CurveModel& m, i64 p);

// below this prime the two-curve BSGS cannot always pin the group order
// uniquely, so the character sum must be used
constexpr i64 kBsgsFloor = 456;

// #E(F_p), point at infinity included; p odd prime of good reduction.
// Character sum for p <= p0, baby-step giant-step over the curve and its
// quadratic twist above; p0 >= kBsgsFloor required.
i64 count_points(const CurveModel& m, i64 p, i64 p0 = 10000);

// always the O(p) character sum; kept public so tests can cross-check the
// two counting paths on either side of the switchover
i64 count_points_charsum(const CurveModel& m, i64 p);

struct GroupStructure {
    i64 p = 0;
    i64 N = 0;    // group order
    i64 a_p = 0;  // trace of Frobenius, p + 1 - N
    i64 d1 = 1;   // E(F_p) = Z/d1 x Z/d2 with d1 | d2 and d1 | p - 1
    i64 d2 = 1;
    bool is_cyclic = true;  // d1 == 1
};

// exact invariant factors of E(F_p); p odd prime of good reduction
GroupStructure group_structure(const CurveModel& m, i64 p, i64 p0 = 10000);

// convenience wrapper: d1 == 1
bool is_cyclic(const CurveModel& m, i64 p);

// whether E[q] is F_p-rational; q prime != p, p odd prime of good
// reduction.  For odd q this works modulo the q-th division polynomial,
// so q is capped (far above anything the cyclicity question needs).
bool full_q_torsion(const CurveModel& m, i64 p, i64 q);

// n-th division polynomial mod p for odd n (a polynomial in x alone),
// coefficients low to high
std::vector<i64> division_poly_x(const CurveModel& m, i64 n, i64 p);

}  // namespace cyclix
