"""End-to-end smoke of the python bindings against known values.

The heavy verification lives in the C++ suites; here we check that every
exposed surface round-trips through python with exact types intact.
"""

from fractions import Fraction

import pytest

import cyclix


BRAU = cyclix.CurveModel(1, 4, 4)


def test_arith_helpers():
    assert cyclix.h_function(49) == 9
    assert cyclix.kronecker(-7, 5) == -1
    assert cyclix.squarefree_part(-45) == -5
    assert cyclix.euler_phi(30) == 8
    assert cyclix.moebius(30) == -1
    assert cyclix.primes_in_range(2, 11) == [2, 3, 5, 7, 11]
    assert cyclix.primes_in_ap(4, 3, 30) == [3, 7, 11, 19, 23]


def test_curve_groups():
    assert cyclix.disc_g(BRAU) == -400
    assert cyclix.disc_E(BRAU) == -6400
    g = cyclix.group_structure(BRAU, 3)
    assert (g.p, g.N, g.d1 * g.d2) == (3, g.N, g.N)
    assert g.is_cyclic == (g.d1 == 1)
    # both counting paths agree across the switchover
    for p in (457, 461):
        assert cyclix.count_points(BRAU, p, p0=456) == cyclix.count_points(
            BRAU, p, p0=10000
        )


def test_k2_classification():
    k2 = cyclix.classify_k2(BRAU)
    assert k2.kind == cyclix.K2Kind.Quadratic
    assert (k2.f2, k2.D, k2.d2) == (4, -1, -4)
    assert cyclix.k2_degree(k2) == 2
    assert cyclix.find_b(k2) == 3
    assert cyclix.gamma_ab2(k2, 4, 1) == 1
    assert cyclix.gamma_ab2(k2, 4, 3) == 0

    exc = cyclix.find_b_congruent(cyclix.classify_k2(cyclix.CurveModel(1, -5, 0)), 7, 5)
    assert exc.exceptional


def test_gate_verdicts():
    finite = cyclix.cyclicity_gate(BRAU, 4, 1)
    assert finite.verdict == cyclix.GateVerdict.FinitelyMany
    assert "f2_divides_f" in finite.reasons
    infinite = cyclix.cyclicity_gate(BRAU, 4, 3)
    assert infinite.verdict == cyclix.GateVerdict.InfinitelyManyUnconditional


def test_density_is_exact_fractions():
    prof = cyclix.make_profile(BRAU)
    assert not prof.cm
    assert prof.ent_mod == 30
    assert prof.j == Fraction(21296, 25)

    est = cyclix.delta_noncm(prof, 1, 1, Y=200)
    assert isinstance(est.value_lo, Fraction)
    assert Fraction(0) < est.value_lo <= est.value_hi < Fraction(1)
    assert est.tail == est.value_hi - est.value_lo
    assert dict(est.gamma_trace)[1] == 1

    dead = cyclix.delta_noncm(prof, 4, 1, Y=200)
    assert dead.value_lo == Fraction(0)
    assert dead.value_hi == Fraction(0)

    low = cyclix.lower_bound_noncm(prof, 1)
    assert Fraction(0) < low <= est.value_hi


def test_gd_and_cm():
    assert cyclix.gd_count(7, 15, 2) <= cyclix.gd_bound(7, 15)
    cm = cyclix.make_profile(cyclix.CurveModel(0, 0, -2))
    assert cm.cm and cm.cm_D == 3 and cm.cm_maximal
    assert cyclix.cm_gate(cm, 5, 1) == cyclix.CmGateResult.PositiveCertified


def test_survey_and_compare(tmp_path):
    rep = cyclix.run_survey(BRAU, 4, 3, 20000, with_density=True, workers=2)
    assert 0 < rep.pi_cyclic < rep.pi_ap
    assert rep.has_density
    diag = cyclix.compare(rep, rep.density)
    assert diag.status == cyclix.CompareStatus.Consistent
    assert rep.ratio == pytest.approx(rep.pi_cyclic / rep.pi_ap)

    # the obstructed class really is empty, and the finiteness check agrees
    assert cyclix.run_survey(BRAU, 4, 1, 20000).pi_cyclic == 0
    assert cyclix.verify_finiteness(BRAU, 4, 1, 20000) == []

    out = tmp_path / "sum.json"
    cyclix.export_json(rep, str(out))
    back = cyclix.import_json(str(out))
    assert back.pi_cyclic == rep.pi_cyclic
    assert back.density.value_lo == rep.density.value_lo

    assert cyclix.li(100000.0) == pytest.approx(9628.763, abs=1e-2)


def test_error_mapping():
    with pytest.raises(ValueError):
        cyclix.cyclicity_gate(BRAU, 4, 2)  # gcd(a, f) != 1
    with pytest.raises(ValueError):
        cyclix.h_function(0)
    with pytest.raises(NotImplementedError):
        cyclix.disc_E(cyclix.CurveModel(1, 1250003, 0))  # 16 disc_g overflows
