from __future__ import annotations

import pytest

from defcalc import cohomology, deformation, s3rep
from defcalc.errors import BudgetExceeded, PrecisionError, PreconditionError
from defcalc.matgroup import Mat2, build_sigma, conj_act, enumerate_gamma
from defcalc.ring import RingSpec, substitution_hom

DUAL = RingSpec(5, 1, ("e",), 2)
Z25 = RingSpec(5, 2)
CUBIC = RingSpec(5, 1, ("x",), 3)


def pruned_lift_search(rho, R):
    """Scalar search: filter each generator by its own relation, then pairs."""
    one = Mat2.identity(R)
    s0, t0 = (Mat2.from_ints(R, m) for m in rho.images)
    gamma = list(enumerate_gamma(R))
    ss = [s0 * g for g in gamma if (s0 * g) ** 2 == one]
    ts = [t0 * g for g in gamma if (t0 * g) ** 3 == one]
    return sorted((s.key() + t.key()) for s in ss for t in ts if (s * t) ** 2 == one)


def cocycle_count(p: int) -> int:
    ad = cohomology.module_from_rep(s3rep.adjoint_rep(s3rep.standard_rep(p)))
    return p ** cohomology.cohomology_dim(ad, 1).cocycle_dim


def test_residual_is_a_homomorphism():
    assert deformation.s3_residual(5).is_homomorphism()
    assert deformation.s3_residual(7).is_homomorphism()
    with pytest.raises(PreconditionError):
        deformation.s3_residual(3)


def test_lifts_over_residue_field():
    lifts = deformation.enumerate_lifts(deformation.s3_residual(5), RingSpec(5))
    assert len(lifts) == 1
    assert len(deformation.strict_equiv_classes(lifts, RingSpec(5))) == 1


@pytest.mark.parametrize("R", [DUAL, Z25])
def test_lift_count_matches_oracles(R):
    rho = deformation.s3_residual(5)
    lifts = deformation.enumerate_lifts(rho, R)
    assert len(lifts) == cocycle_count(5) == 125
    assert [sum((m.key() for m in l), ()) for l in lifts] == pruned_lift_search(rho, R)


@pytest.mark.parametrize("R", [DUAL, Z25])
def test_single_strict_class(R):
    lifts = deformation.enumerate_lifts(deformation.s3_residual(5), R)
    classes = deformation.strict_equiv_classes(lifts, R)
    assert len(classes) == 1
    assert sum(c.orbit_size for c in classes) == len(lifts)
    rep = classes[0].representative
    assert min(deformation._lift_key(l) for l in lifts) == deformation._lift_key(rep)
    assert tuple(m.residue() for m in rep) == tuple(
        tuple(x % 5 for row in img for x in row) for img in deformation.s3_residual(5).images
    )


def test_threads_do_not_change_lifts():
    rho = deformation.s3_residual(5)
    a = deformation.enumerate_lifts(rho, DUAL, threads=1)
    b = deformation.enumerate_lifts(rho, DUAL, threads=4)
    assert [deformation._lift_key(l) for l in a] == [deformation._lift_key(l) for l in b]


def test_trivial_group_has_one_lift():
    for R in (RingSpec(5), DUAL, CUBIC):
        lifts = deformation.enumerate_lifts(deformation.trivial_residual(5), R)
        assert lifts == [()]
        assert len(deformation.strict_equiv_classes(lifts, R)) == 1


def test_lift_budget():
    with pytest.raises(BudgetExceeded):
        deformation.enumerate_lifts(deformation.s3_residual(5), DUAL, budget=1000)


def test_datum_invariants():
    datum = deformation.build_datum(5)
    assert datum.ring.nvars == 8
    assert all(g.is_gamma() for g in datum.generators)
    assert len(datum.conjugates) == 12
    assert datum.is_s3_stable()
    assert datum.subgroup.rank == 12


def test_boston_trivial_point():
    datum = deformation.build_datum(5)
    one = Mat2.identity(DUAL)
    phi = deformation.boston_point_to_hom(datum, deformation.BostonPoint((one, one)))
    assert all(phi(c) == one for _, _, c in datum.conjugates)


def test_boston_identity_point():
    datum = deformation.build_datum(5)
    phi = deformation.boston_point_to_hom(datum, deformation.BostonPoint(datum.generators))
    assert all(phi(c) == c for _, _, c in datum.conjugates)


def test_boston_worked_example():
    datum = deformation.build_datum(5)
    e = DUAL.gen("e")
    A = Mat2(DUAL.one, e, 0 * e, DUAL.one)
    phi = deformation.boston_point_to_hom(datum, deformation.BostonPoint((A, Mat2.identity(DUAL))))
    sigma = build_sigma(DUAL)
    X = datum.generators[0]
    for a in s3rep.ELEMENTS:
        assert phi(conj_act(a, X, datum.sigma)) == sigma[a] * A * sigma[a].inverse()
    assert phi.equivariance_failures() == []
    assert phi.sends_generators_to_point()


def test_boston_precision_mismatch():
    datum = deformation.build_datum(5)
    with pytest.raises(PrecisionError):
        deformation.verify_step1_bijection(datum, CUBIC, mode="sampled")
    with pytest.raises(PrecisionError):
        deformation.verify_step1_bijection(datum, Z25)


def test_step1_residue_field():
    r = deformation.verify_step1_bijection(deformation.build_datum(5), RingSpec(5))
    assert r.passed and r.total_points == 1


def test_step1_sampled_deeper_truncation():
    datum = deformation.build_datum(5, 1, 3)
    r = deformation.verify_step1_bijection(datum, CUBIC, mode="sampled", samples=40, seed=2)
    assert r.passed and r.mode == "sampled"
    assert r.surjectivity_method.startswith("sampled")


def test_step1_exhaustive_z25():
    datum = deformation.build_datum(5, 2, 2)
    r = deformation.verify_step1_bijection(datum, Z25)
    assert r.passed and r.distinct_homs == 5**8


def test_step1_detects_a_broken_lift(monkeypatch):
    """Replace sigma by a non-matching lift; equivariance must fail with a witness."""
    datum = deformation.build_datum(5)
    real = deformation.build_sigma

    def twisted(spec):
        sig = real(spec)
        swapped = dict(sig.matrices)
        swapped[s3rep.TRANSPOSITION] = sig[s3rep.THREE_CYCLE]
        return type(sig)(spec, swapped)

    monkeypatch.setattr(deformation, "build_sigma", twisted)
    r = deformation.verify_step1_bijection(datum, DUAL, mode="sampled", samples=10)
    assert not r.passed and r.witness["failure"] == "equivariance"


def test_functoriality():
    datum = deformation.build_datum(5, 1, 3)
    target = RingSpec(5, 1, ("x",), 2)
    q = substitution_hom(CUBIC, target, [target.gen("x")])
    assert deformation.verify_functoriality(datum, CUBIC, target, q, samples=6)


@pytest.mark.parametrize("p", [5, 7])
def test_tangent_dimension(p):
    t = deformation.tangent_dim(p)
    assert t.route_count == t.route_linear_algebra == 8


def test_tangent_dimension_one_generator():
    t = deformation.tangent_dim(5, ("X",))
    assert t.route_count == t.route_linear_algebra == 4


@pytest.mark.parametrize("R", [RingSpec(5), DUAL, Z25])
def test_universality(R):
    k, N = deformation.dominating_precision([R])
    u = deformation.universality_check(deformation.build_datum(5, k, N), R)
    assert u.passed
    assert u.assignments == u.deformations_via_step1 == R.maximal_ideal_size**8


def test_universality_single_point_over_field():
    u = deformation.universality_check(deformation.build_datum(5), RingSpec(5))
    assert (u.assignments, u.deformations_via_step1) == (1, 1)


def test_counterexample_report_rejects_p3():
    with pytest.raises(PreconditionError):
        deformation.counterexample_report(3)


def test_counterexample_report_small():
    rep = deformation.counterexample_report(7, rings=[RingSpec(7), RingSpec(7, 1, ("e",), 2)])
    assert rep.passed
    assert rep.results["tangent_dim"]["route_count"] == 8
    assert rep.results["h2"]["status"] == "cited, not computed"
