"""Correlators against scalar oracles, the bilinear criterion, and the
lemma verifiers."""

import cmath
import math

import numpy as np
import pytest

from mobiusflow.analytic import AnalyticSeries
from mobiusflow.cfrac import AlphaSpec, cf_expand, classify_case
from mobiusflow.correlate import (CorrelationSeries, PolyPhase, bsz_test,
                                  character_phase_array, mobius_correlate,
                                  phi_polys, poly_exp_sum, poly_lower_bound_check,
                                  poly_mod1_array, vdc_sum_check,
                                  ftilde_third_derivative)
from mobiusflow.errors import DomainError
from mobiusflow.flows import Character, SkewFlow, TorusPoint, UnipotentAffine, character_phase
from mobiusflow.mobius import mertens, mobius_sieve
from mobiusflow.polyutil import Poly

RNG = np.random.default_rng(99)
SQRT2 = AlphaSpec.sqrt2_minus_1()


@pytest.fixture(scope="module")
def table():
    return mobius_sieve(10**6)


@pytest.fixture(scope="module")
def skew():
    h = AnalyticSeries.geometric(1.5)
    return SkewFlow(1, 1, 1, SQRT2, h), TorusPoint(0.3, 0.7)


def test_poly_mod1_array_exact():
    from fractions import Fraction
    poly = Poly([Fraction(1, 7), Fraction(3, 11), Fraction(1, 13), Fraction(2, 17)])
    got = poly_mod1_array(poly, 5, 4000)
    for t in (0, 1, 777, 3999):
        want = float(poly.eval(5 + t) % 1)
        d = abs(got[t] - want) % 1.0
        assert min(d, 1 - d) < 1e-9


def test_trivial_character_is_mertens(table, skew):
    flow, p = skew
    series = mobius_correlate(flow, p, Character(0, 0), table, [100, 1000])
    assert series.sums[0].real == pytest.approx(mertens(table, 100))
    assert series.sums[1].real == pytest.approx(mertens(table, 1000))


def test_rotation_factor_reduces_to_linear_sum(table):
    """h = 0, c = 0, b = (1,0): a pure linear-phase Mobius sum."""
    flow = SkewFlow(1, 0, 1, SQRT2, AnalyticSeries.from_entries([], tau=1.0))
    p = TorusPoint(0.37, 0.0)
    N = 30_000
    series = mobius_correlate(flow, p, Character(1, 0), table, [N])
    alpha = float(SQRT2.frac_fraction(1))
    want = poly_exp_sum(PolyPhase((p.x1, alpha), 1, 0), table, N)
    assert abs(series.sums[0] - want) < 1e-7


def test_correlator_matches_scalar_oracle(table, skew):
    flow, p = skew
    b = Character(3, 2)
    N = 400
    mu = table.mu_array()
    want = sum(int(mu[n]) * cmath.exp(2j * cmath.pi * character_phase(flow, p, b, n))
               for n in range(1, N + 1))
    series = mobius_correlate(flow, p, b, table, [N])
    assert abs(series.sums[0] - want) < 1e-8


def test_phase_array_matches_scalar(skew):
    flow, p = skew
    b = Character(0, 1)
    ph = character_phase_array(flow, p, b, 1500)
    for n in (1, 2, 100, 1499):
        want = character_phase(flow, p, b, n)
        d = abs(ph[n - 1] - want) % 1.0
        assert min(d, 1.0 - d) < 1e-9


def test_thread_count_determinism(table, skew):
    flow, p = skew
    b = Character(0, 1)
    cps = [10**4, 10**5]
    runs = [mobius_correlate(flow, p, b, table, cps, threads=t).sums
            for t in (1, 4, 8)]
    assert runs[0] == runs[1] == runs[2]


def test_checkpoint_beyond_sieve(table, skew):
    flow, p = skew
    with pytest.raises(DomainError):
        mobius_correlate(flow, p, Character(0, 1), table, [table.limit + 1])


def test_correlation_series_trivial_bound():
    with pytest.raises(DomainError):
        CorrelationSeries(checkpoints=(10,), sums=(11.0 + 0j,))
    with pytest.raises(DomainError):
        CorrelationSeries(checkpoints=(10, 10), sums=(1.0, 1.0))


def test_unipotent_correlator_matches_character_values(table):
    from fractions import Fraction
    from mobiusflow.flows import character_value
    aff = UnipotentAffine(matrix=((1, 1), (0, 1)),
                          translation=(Fraction(1, 3), 0))
    x = (Fraction(1, 7), Fraction(2, 5))
    v = (1, 2)
    N = 500
    mu = table.mu_array()
    want = sum(int(mu[n]) * character_value(aff, x, v, n) for n in range(1, N + 1))
    series = mobius_correlate(aff, x, v, table, [N])
    assert abs(series.sums[0] - want) < 1e-8


def test_poly_exp_sum_trivials(table):
    assert poly_exp_sum(PolyPhase((0.0,), 1, 0), table, 100).real == \
        pytest.approx(mertens(table, 100))
    # 9-term hand-checkable sum with phi(n) = n/3
    mu = table.mu_array()
    want = sum(int(mu[n]) * cmath.exp(2j * cmath.pi * (n / 3.0)) for n in range(1, 10))
    got = poly_exp_sum(PolyPhase((0.0, 1.0 / 3.0), 1, 0), table, 9)
    assert abs(got - want) < 1e-12


def test_poly_exp_sum_residue_classes(table):
    phase = PolyPhase((0.1, 0.37), nu=3, residue=2)
    mu = table.mu_array()
    want = sum(int(mu[n]) * cmath.exp(2j * cmath.pi * ((0.1 + 0.37 * n) % 1))
               for n in range(1, 301) if n % 3 == 2)
    got = poly_exp_sum(phase, table, 300)
    assert abs(got - want) < 1e-10


def test_poly_exp_sum_quadratic_decay(table):
    phase = PolyPhase((0.0, 0.0, math.sqrt(2)), 1, 0)
    r3 = abs(poly_exp_sum(phase, table, 10**3)) / 10**3
    r5 = abs(poly_exp_sum(phase, table, 10**5)) / 10**5
    assert r5 < r3


# ---------------------------------------------------------------------------
# Bilinear criterion


def rotation_sequence(theta):
    def f(n):
        return np.exp(2j * np.pi * np.mod(np.asarray(n, dtype=np.float64) * theta, 1.0))
    return f


def test_bsz_constant_sequence_fails_hypothesis(table):
    f = lambda n: np.ones(np.asarray(n).shape, dtype=np.complex128)
    rep = bsz_test(f, tau=0.25, M=2000, N=10**5, table=table)
    assert not rep["hypothesis_holds"]
    assert rep["worst_bilinear_ratio"] == pytest.approx(1.0)


def test_bsz_rotation_hypothesis_holds(table):
    theta = math.sqrt(2) - 1
    rep = bsz_test(rotation_sequence(theta), tau=0.25, M=4000, N=10**5, table=table)
    assert rep["hypothesis_holds"]
    assert rep["conclusion_holds"]


def test_bsz_bilinear_matches_geometric_closed_form(table):
    """|sum_{m<=M} e(d m theta)| = |sin(pi M d theta)| / |sin(pi d theta)|."""
    theta = math.sqrt(2) - 1
    M = 3000
    ms = np.arange(1, M + 1)
    for d in (1, 3, 10):
        direct = abs(np.sum(np.exp(2j * np.pi * np.mod(d * ms * theta, 1.0))))
        closed = abs(math.sin(math.pi * M * d * theta)
                     / math.sin(math.pi * d * theta))
        assert direct == pytest.approx(closed, abs=1e-6)


def test_bsz_implication_on_constructed_instances(table):
    """Whenever the bilinear hypothesis verifies, the conclusion must hold."""
    thetas = [math.sqrt(2) - 1, math.sqrt(3) - 1, math.pi - 3]
    for theta in thetas:
        for tau in (0.2, 0.3):
            rep = bsz_test(rotation_sequence(theta), tau=tau, M=2500, N=10**5,
                           table=table)
            if rep["hypothesis_holds"]:
                assert rep["conclusion_holds"], (theta, tau)


def test_bsz_tau_domain(table):
    with pytest.raises(DomainError):
        bsz_test(rotation_sequence(0.3), tau=0.5, M=100, N=1000, table=table)


# ---------------------------------------------------------------------------
# Sharp-scale dilation polynomials


def _context():
    alpha = AlphaSpec.quadratic([0, 2, 64], [1])
    h = AnalyticSeries.geometric(2.0)
    cf = cf_expand(alpha, 40)
    rep = classify_case(cf, h, 10**4, d1=2, b2=1, B=2)
    return h, rep


def test_phi_polys_single_coefficient():
    from fractions import Fraction
    h, rep = _context()
    v = 0.4 + 0.2j
    single = AnalyticSeries.from_entries([(rep.m_J, v)], tau=1.0)
    single.tau2 = 1.0
    pp = phi_polys(rep, single, d1=3, d2=2, x1=0.0)
    # window holds only m = 1: phi_D = 9v e(d1 x) - ... => two frequencies
    assert len(pp.phi_D) == 2
    assert pp.phi_D[3] == pytest.approx(27 * v)
    assert pp.phi_D[2] == pytest.approx(-8 * v)
    assert pp.Phi == pytest.approx(abs(v))


def test_phi_polys_triangle_inequality():
    h, rep = _context()
    pp = phi_polys(rep, h, d1=3, d2=1, x1=0.3)
    assert pp.norm_phi_D >= (3**3 - 1**3) * pp.Phi - 1e-12
    assert (3**3 - 1**3) * pp.Phi >= pp.Phi


def test_phi_tail_bound_pointwise():
    h, rep = _context()
    pp = phi_polys(rep, h, d1=2, d2=1, x1=0.3)
    for x in RNG.random(100):
        diff = abs(pp.eval_phi(x) - pp.eval_phi_D(x))
        assert diff <= pp.tail_bound + 1e-12


def test_ftilde_third_derivative_trivials():
    h, rep = _context()
    assert ftilde_third_derivative(rep, h, 2, 2, 0.3, 0.11) == 0


# ---------------------------------------------------------------------------
# Lemma verifiers


def test_poly_lower_bound_monomial():
    rep = poly_lower_bound_check([0, 1.0], delta=0.3, samples=500)
    assert rep["min_ratio"] == pytest.approx(3.0 / 0.3, rel=1e-9)
    assert rep["pass"]


def test_poly_lower_bound_z_minus_one():
    rep = poly_lower_bound_check([-1.0, 1.0], delta=0.1, samples=5000)
    assert rep["pass"]
    # off the disc |z - 1| >= delta; the norm is sqrt(2)
    assert rep["min_abs_off_discs"] >= 0.1 - 1e-9


def test_poly_lower_bound_random_batch():
    for _ in range(20):
        deg = int(RNG.integers(1, 9))
        coeffs = RNG.normal(size=deg + 1) + 1j * RNG.normal(size=deg + 1)
        coeffs /= max(1.0, float(np.max(np.abs(coeffs))))
        rep = poly_lower_bound_check(coeffs, delta=0.05, samples=2000)
        assert rep["pass"], coeffs


def test_vdc_cubic_phase():
    rep = vdc_sum_check(lambda x: 1e-6 * x**3, lambda x: 6e-6,
                        Lambda=6e-6, eta=1.0, a=0.0, b=1000.0)
    assert rep["precondition_ok"]
    assert rep["pass"]


def test_vdc_degenerate_rejected():
    with pytest.raises(DomainError):
        vdc_sum_check(lambda x: 1.0, lambda x: 0.0, Lambda=0.0, eta=1.0,
                      a=0.0, b=100.0)


def test_vdc_precondition_violation_reported():
    rep = vdc_sum_check(lambda x: 1e-6 * x**3, lambda x: 6e-6,
                        Lambda=1e-3, eta=1.0, a=0.0, b=100.0)
    assert not rep["precondition_ok"]


def test_vdc_on_dilation_difference_phase():
    """Third-derivative window of the two-dilation phase, sampled off the
    cut polynomial's root discs, then fed through the summation bound."""
    h, rep = _context()
    d1, d2, x1, b2 = 2, 1, 0.31, 1
    pp = phi_polys(rep, h, d1, d2, x1)
    theta = float(rep.theta_J_signed)
    delta = rep.delta

    def E3(x):
        return (b2 * ftilde_third_derivative(rep, h, d1, d2, x1, x * theta)
                * theta**3).real

    # sample x in (0, 1/|theta|) with e(x theta) off the root discs of phi_D
    roots = np.roots(np.array([pp.phi_D.get(f, 0j)
                               for f in range(max(pp.phi_D) , min(pp.phi_D) - 1, -1)]))
    xs = []
    for x in np.linspace(1.0, 1.0 / abs(theta) - 1.0, 400):
        z = cmath.exp(2j * cmath.pi * (x * theta))
        if all(abs(z - r) >= delta for r in roots):
            xs.append(float(x))
    vals = np.array([abs(E3(x)) for x in xs])
    upper = (2 * math.pi) ** 3 * d1**3 * theta**2 * rep.Phi_J / (2 * math.pi)
    # paper-shaped envelope: beta theta^2 Phi_J below, d1^3 theta^2 Phi_J above
    lower = rep.beta * theta**2 * rep.Phi_J
    assert vals.min() >= lower / 10.0
    assert vals.max() <= abs(upper) * 10.0 * (2 * math.pi)
    Lam, eta = vals.min(), vals.max() / vals.min()
    sub = [x for x in xs if 1.0 < x < 130.0]
    r = vdc_sum_check(lambda x: (b2 * 0.0) + _E_value(rep, h, d1, d2, x1, x, theta, b2),
                      lambda x: E3(x), Lambda=Lam, eta=eta,
                      a=min(sub), b=max(sub))
    assert r["pass"]


def _E_value(rep, h, d1, d2, x1, x, theta, b2):
    from mobiusflow.analytic import ScaleFunction
    sf = ScaleFunction.from_report(rep, h, x1)
    return (b2 * sf.tilde_value(x * theta, d1, d2)).real
