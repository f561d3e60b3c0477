"""Koszul and torsion-free solvers, decomposition, Levi-Civita predicates."""

import random
from fractions import Fraction

import pytest

from algebroids import (
    AdmissibilityError,
    AlgebroidData,
    Connection,
    Metric,
    Scalar,
    check_admissible,
    check_levicivita_props,
    curvature,
    decompose_connection,
    koszul_residual,
    make_example,
    non_metricity,
    solve_koszul,
    solve_torsion_free,
    torsion,
)
from algebroids.fixtures import (
    random_almost_dull_not_almost_lie,
    random_anticommutable,
    random_constant_metric,
)

from conftest import scal


def polar_metric(tangent2):
    names = tangent2.coords
    return Metric(
        [[tangent2.one(), tangent2.zero()], [tangent2.zero(), scal("x1^2", names)]]
    )


# -- Koszul solver -----------------------------------------------------------


def test_koszul_polar_metric_exact(tangent2):
    names = tangent2.coords
    space = solve_koszul(tangent2, polar_metric(tangent2))
    assert space.status == "unique"
    got = space.particular.coeff
    assert set(got) == {(0, 1, 1), (1, 0, 1), (1, 1, 0)}
    assert got[(0, 1, 1)].equals(scal("-x1", names))
    assert got[(1, 0, 1)].equals(scal("1/x1", names))
    assert got[(1, 1, 0)].equals(scal("1/x1", names))
    assert curvature(tangent2, space.particular) == {}
    assert space.denominator_loci(names) == ["x1"]


def test_koszul_constant_metric_unique_zero(tangent2):
    g = Metric([[tangent2.one(), tangent2.zero()], [tangent2.zero(), tangent2.one()]])
    space = solve_koszul(tangent2, g)
    assert space.status == "unique"
    assert space.particular.coeff == {}


def test_koszul_courant_solution_space(courant1):
    # the elimination oracle fixes the homogeneous rank: the lowered system
    # 3 G_bcd + G_cbd - G_dbc = 0 forces G = 0, so the space is a single
    # point here rather than a positive-dimensional family
    space = solve_koszul(courant1.algebroid, courant1.metric)
    assert space.status == "unique"
    assert space.particular.coeff == {}
    A = courant1.algebroid
    assert not torsion(A, space.particular, "modified")
    assert not non_metricity(A, space.particular, courant1.metric)


def test_koszul_members_on_random_fixture_respect_biconditional():
    # on arbitrary anti-commutable data a solution of the compatibility
    # system need not be admissible, and then it is not Levi-Civita; the
    # predicate biconditional must hold either way
    fx = random_anticommutable(41, dim=2, rank=3)
    A = fx.algebroid
    g = random_constant_metric(random.Random(41), A.dim, A.rank)
    space = solve_koszul(A, g)
    if space.status == "infeasible":
        pytest.skip("no Koszul connection for this fixture")
    members = [space.particular]
    rng = random.Random(5)
    for _ in range(2):
        members.append(
            space.member([Fraction(rng.randint(-2, 2), 3) for _ in range(space.dim)])
        )
    for m in members:
        assert koszul_residual(A, m, g) == {}
        assert check_levicivita_props(A, m, g, samples=1).passed
        if check_admissible(A, m).passed:
            assert not torsion(A, m, "modified")
            assert not non_metricity(A, m, g)


def test_koszul_backward_direction(tangent2):
    # torsion-free and metric-compatible implies zero residual
    g = polar_metric(tangent2)
    space = solve_koszul(tangent2, g)
    assert koszul_residual(tangent2, space.particular, g) == {}


# -- torsion-free solver -------------------------------------------------------


def test_torsion_free_tangent_lie_space(tangent2):
    space = solve_torsion_free(tangent2)
    assert space.status == "affine"
    # free parameters: one per output slot and unordered index pair
    assert space.dim == 2 * 3
    assert space.particular.coeff == {}


def test_torsion_free_infeasible_hand_case():
    names = ("x1", "x2")
    one = Scalar.one(2)
    zero = Scalar.zero(2)
    A = AlgebroidData(
        dim=2, rank=2, coords=names,
        anchor=((one, zero), (zero, one)),
        gamma={(0, 0, 1): one, (0, 1, 0): one},
        loc={},
    )
    space = solve_torsion_free(A)
    assert space.status == "infeasible"
    assert space.witness is not None and not space.witness.is_zero()


def test_torsion_free_members_admissible():
    fx = random_anticommutable(42, dim=2, rank=3)
    A = fx.algebroid
    space = solve_torsion_free(A)
    assert space.status in ("unique", "affine")
    members = [space.particular]
    if space.dim:
        w = [Fraction(0)] * space.dim
        w[0] = Fraction(1, 2)
        members.append(space.member(w))
    for m in members:
        assert not torsion(A, m, "modified")
        assert check_admissible(A, m).passed


def test_torsion_free_infeasible_on_generated_family():
    for seed in range(5):
        A = random_almost_dull_not_almost_lie(seed, dim=2, rank=3)
        assert solve_torsion_free(A).status == "infeasible"


# -- decomposition ---------------------------------------------------------


def test_decompose_levicivita_connection_is_its_own_part(tangent2):
    g = polar_metric(tangent2)
    conn = solve_koszul(tangent2, g).particular
    lc, contortion, disformation, report = decompose_connection(tangent2, conn, g)
    assert report.passed
    assert contortion == {} and disformation == {}
    for idx, v in conn.coeff.items():
        assert lc.at(*idx, tangent2.dim).equals(v)


def test_decompose_classical_split_oracle(tangent2):
    # transcription of the classical frame decomposition as the oracle
    names = tangent2.coords
    g = Metric([[tangent2.one(), tangent2.zero()], [tangent2.zero(), tangent2.one()]])
    conn = Connection.of(2, {(0, 1, 0): scal("x2", names)})
    lc, contortion, disformation, report = decompose_connection(tangent2, conn, g)
    assert report.passed
    assert lc.coeff == {}
    T = torsion(tangent2, conn, "modified")
    Q = non_metricity(tangent2, conn, g)
    half = Scalar.constant(2, Fraction(1, 2))
    zero = tangent2.zero()
    for a in range(2):
        for b in range(2):
            for c in range(2):
                want_t = zero
                want_q = zero
                for d in range(2):
                    gi = g.inv_at(a, d)
                    if gi.is_zero():
                        continue
                    qt = (
                        -Q.get((b, d, c), zero)
                        + Q.get((d, c, b), zero)
                        - Q.get((c, b, d), zero)
                    )
                    tt = zero
                    for e in range(2):
                        tt = tt - g.at(e, c) * T.get((e, b, d), zero)
                        tt = tt + g.at(e, d) * T.get((e, b, c), zero)
                        tt = tt - g.at(e, b) * T.get((e, c, d), zero)
                    want_q = want_q + gi * qt
                    want_t = want_t + gi * tt
                assert contortion.get((a, b, c), zero).equals(half * want_t)
                assert disformation.get((a, b, c), zero).equals(half * want_q)


def test_decompose_reconstruction_random_fixtures():
    for seed in (43, 44):
        fx = random_anticommutable(seed, dim=2, rank=3)
        A = fx.algebroid
        g = random_constant_metric(random.Random(seed), A.dim, A.rank)
        _, _, _, report = decompose_connection(A, fx.connection, g)
        assert report.passed


def test_decompose_requires_admissible(courant2):
    A = courant2.algebroid
    bad = Connection.of(4, {(0, 0, 0): A.one()})
    with pytest.raises(AdmissibilityError):
        decompose_connection(A, bad, courant2.metric)


# -- Levi-Civita predicates --------------------------------------------------


def test_levicivita_props_halfplane(tangent2):
    names = tangent2.coords
    g = Metric(
        [[scal("1/x2^2", names), tangent2.zero()], [tangent2.zero(), scal("1/x2^2", names)]]
    )
    conn = solve_koszul(tangent2, g).particular
    report = check_levicivita_props(tangent2, conn, g, samples=2)
    assert report.passed
    assert any("admissible=True" in a for a in report.assumptions)


def test_levicivita_props_torsional_connection_consistent(tangent2):
    names = tangent2.coords
    g = Metric([[tangent2.one(), tangent2.zero()], [tangent2.zero(), tangent2.one()]])
    conn = Connection.of(2, {(0, 1, 0): scal("x2", names)})
    report = check_levicivita_props(tangent2, conn, g, samples=2)
    assert report.passed  # biconditional consistent: both sides false
    assert any("torsion_free=False" in a for a in report.assumptions)
    assert any("koszul=False" in a for a in report.assumptions)


def test_levicivita_props_courant(courant1):
    conn = solve_koszul(courant1.algebroid, courant1.metric).particular
    report = check_levicivita_props(
        courant1.algebroid, conn, courant1.metric, samples=2
    )
    assert report.passed
