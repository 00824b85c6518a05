#include <numeric>

#include "cyclix/arith.hpp"
#include "cyclix/density.hpp"
#include "cyclix/galois2.hpp"

namespace cyclix {

// Reason tags, stable strings for JSON consumers:
//   rational_full_2torsion   g splits over Q; reductions are never cyclic
//   f2_divides_f             the progression pins the action on K2^ab
//   gamma_ab2                that pinned action decides (fixing or moving)
//   s3_nonabelian            K2^ab is pinned trivial but K2 is nonabelian,
//                            so no finiteness follows
//   odd_prime_in_gcd_a1_f    the gcd(a-1, f) obstruction is absent (its odd
//                            part is 1), enabling the unconditional sieve
//   exceptional_3m           the one congruence configuration the sieve
//                            cannot reach: f2 = 3 gcd(f, f2) with
//                            kronecker(-d2/3, a) = -1
//   density_lower_positive   a certified positive lower density

GateResult cyclicity_gate(const CurveModel& m, i64 f, i64 a) {
    if (f < 1) fail_pre("cyclicity_gate: modulus must be positive");
    i64 an = ((a % f) + f) % f;
    if (std::gcd(an, f) != 1)
        fail_pre("cyclicity_gate: residue not coprime to modulus");

    TwoTorsionField k2 = classify_k2(m);
    GateResult res;

    // full rational 2-torsion: Z/2 x Z/2 embeds at every odd good prime
    if (k2.kind == K2Kind::Trivial) {
        res.verdict = GateVerdict::FinitelyMany;
        res.reasons = {"rational_full_2torsion"};
        return res;
    }

    bool divides = f % k2.f2 == 0;
    int gamma = gamma_ab2(k2, f, an);

    // abelian K2 visible in the progression and fixed by it: the 2-part of
    // the obstruction is forced at every prime of the class
    if (k2.kind != K2Kind::S3 && divides && gamma == 1) {
        res.verdict = GateVerdict::FinitelyMany;
        res.reasons = {"f2_divides_f", "gamma_ab2"};
        return res;
    }

    std::vector<std::string> carried;
    if (k2.kind == K2Kind::S3 && divides && gamma == 1)
        carried.push_back("s3_nonabelian");

    i64 godd = std::gcd(an - 1, f);
    while (godd % 2 == 0) godd /= 2;

    if (godd == 1) {
        // no odd prime is forced to divide p - 1 across the class, so the
        // unconditional sieve applies unless the 2-torsion layer blocks it
        if (k2.kind == K2Kind::CyclicCubic) {
            // the fixed-and-visible case already returned above
            res.verdict = GateVerdict::InfinitelyManyUnconditional;
            res.reasons = carried;
            res.reasons.push_back("odd_prime_in_gcd_a1_f");
            if (divides && gamma == 0) res.reasons.push_back("gamma_ab2");
            return res;
        }
        if (k2.kind == K2Kind::Quadratic || k2.kind == K2Kind::S3) {
            if (!divides) {
                i64 mm = std::gcd(f, k2.f2);
                bool exceptional =
                    k2.f2 == 3 * mm && kronecker(-k2.d2 / 3, an) == -1;
                if (!exceptional) {
                    res.verdict = GateVerdict::InfinitelyManyUnconditional;
                    res.reasons = carried;
                    res.reasons.push_back("odd_prime_in_gcd_a1_f");
                    return res;
                }
                carried.push_back("exceptional_3m");
            } else if (gamma == 0) {
                res.verdict = GateVerdict::InfinitelyManyUnconditional;
                res.reasons = carried;
                res.reasons.push_back("odd_prime_in_gcd_a1_f");
                res.reasons.push_back("gamma_ab2");
                return res;
            }
        }
    }

    // nothing unconditional: fall back to the density layer
    CurveProfile pr = make_profile(m);
    res.reasons = carried;
    if (pr.cm) {
        if (cm_gate(pr, f, an) == CmGateResult::PositiveCertified) {
            res.verdict = GateVerdict::PositiveDensityConditional;
            res.reasons.push_back("density_lower_positive");
        } else {
            res.verdict = GateVerdict::Undetermined;
        }
        return res;
    }
    try {
        DensityEstimate est = delta_noncm(pr, f, an, 200);
        if (est.value_lo > 0) {
            res.verdict = GateVerdict::PositiveDensityConditional;
            res.reasons.push_back("density_lower_positive");
        } else {
            res.verdict = GateVerdict::Undetermined;
        }
    } catch (const Error& e) {
        if (e.kind != ErrKind::unsupported) throw;
        res.verdict = GateVerdict::Undetermined;
    }
    return res;
}

}  // namespace cyclix
