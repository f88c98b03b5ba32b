"""Heisenberg group calculus and the polynomial orbit representation.

All algebra here is exact over Fractions; equality assertions are literal.
"""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobiusflow.errors import DomainError
from mobiusflow.mobius import mobius_sieve, mertens
from mobiusflow.nilflow import (HeisenbergAffine, HeisenbergElement, NilObservable,
                                compile_poly_orbit, coord_first_from_second,
                                coord_second_from_first, correlate_nil, heis_inv,
                                heis_mul, make_automorphism, nil_orbit_iter,
                                nil_step, reduce_to_fundamental)

fractions_st = st.fractions(min_value=-30, max_value=30, max_denominator=12)


def elements_st():
    return st.builds(HeisenbergElement, fractions_st, fractions_st, fractions_st)


QU_BLOCKS = [((1, 0), (1, 1)), ((1, 2), (0, 1)), ((0, -1), (1, 0)),
             ((-1, 0), (0, -1)), ((0, 1), (1, 0)), ((1, 0), (0, 1))]


def test_identity_and_central_discrepancy():
    a = HeisenbergElement(1, 0, 0)
    b = HeisenbergElement(0, 1, 0)
    e = HeisenbergElement.identity()
    assert heis_mul(a, e).coords() == a.coords()
    assert heis_mul(e, a).coords() == a.coords()
    ab, ba = heis_mul(a, b), heis_mul(b, a)
    # exp(X1)exp(X2) = exp(X2)exp(X1) exp(X3): commutators are central
    assert heis_mul(ba, HeisenbergElement(0, 0, 1)).coords() == ab.coords()


@settings(max_examples=120, deadline=None)
@given(elements_st(), elements_st(), elements_st())
def test_associativity_exact(x, y, z):
    assert heis_mul(heis_mul(x, y), z).coords() == heis_mul(x, heis_mul(y, z)).coords()


@settings(max_examples=60, deadline=None)
@given(elements_st())
def test_inverse_exact(x):
    assert heis_mul(x, heis_inv(x)).coords() == (0, 0, 0)
    assert heis_mul(heis_inv(x), x).coords() == (0, 0, 0)


def test_coordinate_maps_trivials():
    assert coord_first_from_second((0, 0, 0)) == (0, 0, 0)
    v = Fraction(7, 3)
    assert coord_first_from_second((v, 0, 0)) == (v, 0, 0)
    assert coord_second_from_first((v, 0, 0)) == (v, 0, 0)


@settings(max_examples=80, deadline=None)
@given(elements_st())
def test_coordinate_roundtrip_exact(x):
    u = coord_first_from_second(x.coords())
    assert coord_second_from_first(u) == x.coords()


@settings(max_examples=60, deadline=None)
@given(elements_st())
def test_reduction_idempotent_and_lattice(x):
    r = reduce_to_fundamental(x)
    assert all(0 <= c < 1 for c in r.coords())
    assert reduce_to_fundamental(r).coords() == r.coords()
    gamma = heis_mul(heis_inv(x), r)
    assert gamma.is_lattice()


def test_trivial_affine_map():
    T = HeisenbergAffine(g=HeisenbergElement.identity(),
                         dsigma=make_automorphism(((1, 0), (0, 1))))
    x = HeisenbergElement(Fraction(1, 3), Fraction(2, 5), Fraction(1, 7))
    assert nil_step(T, x).coords() == reduce_to_fundamental(x).coords()


def test_translation_orbit_is_power():
    g = HeisenbergElement(Fraction(1, 3), Fraction(1, 5), Fraction(2, 7))
    T = HeisenbergAffine(g=g, dsigma=make_automorphism(((1, 0), (0, 1))))
    x = HeisenbergElement(Fraction(1, 9), 0, 0)
    acc = x
    for n in range(1, 30):
        acc = heis_mul(g, acc)
        assert nil_orbit_iter(T, x, n).coords() == reduce_to_fundamental(acc).coords()


def test_compile_pure_translation():
    T = HeisenbergAffine(g=HeisenbergElement(1, 0, 0),
                         dsigma=make_automorphism(((1, 0), (0, 1))))
    rep = compile_poly_orbit(T, HeisenbergElement.identity(), 0)
    assert rep.factors == ((0, 1, Fraction(1)),)   # exp(X1)^n


def test_compile_trivial_orbit():
    T = HeisenbergAffine(g=HeisenbergElement.identity(),
                         dsigma=make_automorphism(((1, 0), (0, 1))))
    rep = compile_poly_orbit(T, HeisenbergElement.identity(), 0)
    assert rep.factors == ()
    assert rep.evaluate(5).coords() == (0, 0, 0)


def test_factor_count_independent_of_n():
    ds = make_automorphism(((1, 0), (1, 1)), e=1)
    T = HeisenbergAffine(g=HeisenbergElement(Fraction(1, 2), Fraction(1, 3), 0),
                         dsigma=ds)
    rep = compile_poly_orbit(T, HeisenbergElement.identity(), 0)
    k = rep.k
    for n in (0, 3, 50, 700):
        rep.evaluate(n)
    assert rep.k == k


def test_shear_rep_equals_iteration_exactly():
    ds = make_automorphism(((1, 0), (1, 1)))
    T = HeisenbergAffine(g=HeisenbergElement(1, 0, 0), dsigma=ds)
    x = HeisenbergElement.identity()
    rep = compile_poly_orbit(T, x, 0)
    for n in range(0, 60):
        assert rep.evaluate_reduced(n).coords() == nil_orbit_iter(T, x, n).coords()


def test_random_quasiunipotent_reps_exact():
    rng = random.Random(5)

    def rand_el():
        return HeisenbergElement(*[Fraction(rng.randint(-12, 12), rng.randint(1, 8))
                                   for _ in range(3)])
    for S in QU_BLOCKS:
        ds = make_automorphism(S, e=rng.randint(-2, 2), f=rng.randint(-2, 2))
        T = HeisenbergAffine(g=rand_el(), dsigma=ds)
        x = reduce_to_fundamental(rand_el())
        for l in range(T.nu):
            rep = compile_poly_orbit(T, x, l)
            for n in range(l, 60, T.nu):
                assert rep.evaluate_reduced(n).coords() == \
                    nil_orbit_iter(T, x, n).coords(), (S, l, n)


def test_lattice_preservation_guard():
    # a naive integer shear misses the half-integer central correction
    bad = ((1, 0, 0), (1, 1, 0), (0, 0, 1))
    with pytest.raises(DomainError, match="lattice"):
        HeisenbergAffine(g=HeisenbergElement.identity(), dsigma=bad)


def test_bracket_guard():
    bad = ((1, 0, 1), (0, 1, 0), (0, 0, 1))
    with pytest.raises(DomainError, match="center"):
        HeisenbergAffine(g=HeisenbergElement.identity(), dsigma=bad)


def test_entropy_guard():
    with pytest.raises(DomainError, match="quasi-unipotent"):
        HeisenbergAffine(g=HeisenbergElement.identity(),
                         dsigma=make_automorphism(((2, 1), (1, 1))))


def test_residue_guard():
    T = HeisenbergAffine(g=HeisenbergElement(1, 0, 0),
                         dsigma=make_automorphism(((0, -1), (1, 0))))
    assert T.nu == 4
    with pytest.raises(DomainError):
        compile_poly_orbit(T, HeisenbergElement.identity(), 4)
    rep = compile_poly_orbit(T, HeisenbergElement.identity(), 1)
    with pytest.raises(DomainError):
        rep.evaluate(2)


@pytest.fixture(scope="module")
def table():
    return mobius_sieve(50_000)


def test_correlate_constant_is_mertens(table):
    ds = make_automorphism(((1, 0), (1, 1)))
    T = HeisenbergAffine(g=HeisenbergElement(Fraction(1, 3), Fraction(1, 7), 0),
                         dsigma=ds)
    x = HeisenbergElement.identity()
    series = correlate_nil(T, x, NilObservable.character(0, 0, 0), table, [100, 5000])
    assert series.sums[0].real == pytest.approx(mertens(table, 100))
    assert series.sums[1].real == pytest.approx(mertens(table, 5000))


def test_correlate_pure_rotation_cross_module(table):
    """sigma = id, g = (a, 0, 0): the nil correlator must reproduce the
    linear-phase Mobius sum of the rotation factor."""
    from mobiusflow.correlate import PolyPhase, poly_exp_sum
    a = Fraction(5, 17)
    T = HeisenbergAffine(g=HeisenbergElement(a, 0, 0),
                         dsigma=make_automorphism(((1, 0), (0, 1))))
    series = correlate_nil(T, HeisenbergElement.identity(),
                           NilObservable.character(1, 0, 0), table, [20_000])
    want = poly_exp_sum(PolyPhase((0.0, float(a)), 1, 0), table, 20_000)
    assert abs(series.sums[0] - want) < 1e-7


def test_correlate_horizontal_vs_iteration_oracle(table):
    ds = make_automorphism(((1, 0), (1, 1)), e=1, f=0)
    T = HeisenbergAffine(g=HeisenbergElement(Fraction(1, 3), Fraction(1, 7),
                                             Fraction(2, 5)), dsigma=ds)
    x = HeisenbergElement(Fraction(1, 11), Fraction(3, 13), 0)
    obs = NilObservable.character(1, 2, 0)
    series = correlate_nil(T, x, obs, table, [1500])
    mu = table.mu_array()
    p = reduce_to_fundamental(x)
    brute = 0j
    for n in range(1, 1501):
        p = nil_step(T, p)
        brute += int(mu[n]) * obs.value(p)
    assert abs(series.sums[0] - brute) < 1e-7


def test_correlate_central_vs_iteration_oracle(table):
    ds = make_automorphism(((1, 0), (1, 1)))
    T = HeisenbergAffine(g=HeisenbergElement(Fraction(1, 3), Fraction(1, 7),
                                             Fraction(2, 5)), dsigma=ds)
    x = HeisenbergElement.identity()
    obs = NilObservable.character(1, 1, 1)
    series = correlate_nil(T, x, obs, table, [800])
    mu = table.mu_array()
    p = reduce_to_fundamental(x)
    brute = 0j
    for n in range(1, 801):
        p = nil_step(T, p)
        brute += int(mu[n]) * obs.value(p)
    assert abs(series.sums[0] - brute) < 1e-9


def test_correlate_decay_trend():
    big = mobius_sieve(10**6)
    ds = make_automorphism(((1, 0), (1, 1)), e=0, f=1)
    T = HeisenbergAffine(g=HeisenbergElement(Fraction(1, 3), Fraction(1, 7),
                                             Fraction(2, 5)), dsigma=ds)
    x = HeisenbergElement(Fraction(1, 11), Fraction(3, 13), 0)
    series = correlate_nil(T, x, NilObservable.character(1, 2, 0), big,
                           [1000, 10**6])
    assert series.normalized[1] < series.normalized[0]
