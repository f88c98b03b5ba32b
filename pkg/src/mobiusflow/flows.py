"""Zero-entropy flows on tori: analytic skew products and affine maps.

The skew product

    T(x, y) = (a x + alpha, c x + d y + h(x))        a, c, d in Z, ad = +-1

is iterated either step by step or through the closed orbit form (for the
normalized case a = d = 1)

    y1(n) = x1 + n alpha
    y2(n) = c n(n-1)/2 alpha + c n x1 + x2 + sum_{j<n} h(x1 + j alpha),

where the quadratic term uses the exact integer n(n-1)/2 before any mod-1
reduction.  Affine maps x -> Wx + b with quasi-unipotent integer W reduce,
by doubling the variables to linearize the translation, to polynomial
character phases: psi(W^n x) = e(phi(n)) on each residue class n = q nu + l,
with deg phi bounded by the nilpotency order.

Finite cyclic factors are modeled as rational coordinates (C_M embeds in the
circle as {k/M}); full generality of finite abelian factors is not modeled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .analytic import AnalyticSeries, birkhoff_sum_direct, birkhoff_sum_fourier
from .cfrac import AlphaSpec
from .errors import DomainError
from .polyutil import Poly, binomial_poly

MAX_QUASIUNIPOTENT_ORDER = 2520


def _frac1(x: Fraction) -> Fraction:
    return x % 1


@dataclass(frozen=True)
class TorusPoint:
    """Point of the 2-torus, coordinates reduced to [0, 1)."""

    x1: float
    x2: float

    def __post_init__(self):
        object.__setattr__(self, "x1", float(self.x1) % 1.0)
        object.__setattr__(self, "x2", float(self.x2) % 1.0)

    def close_to(self, other: "TorusPoint", tol: float) -> bool:
        def circ(a, b):
            d = abs(a - b) % 1.0
            return min(d, 1.0 - d)
        return circ(self.x1, other.x1) <= tol and circ(self.x2, other.x2) <= tol


@dataclass(frozen=True)
class Character:
    """Torus character x -> e(b1 x1 + b2 x2); b2 != 0 is the nontrivial regime."""

    b1: int
    b2: int


@dataclass(eq=False)
class SkewFlow:
    """Triangular skew product with zero entropy (ad = +-1)."""

    a: int
    c: int
    d: int
    alpha: AlphaSpec
    h: AnalyticSeries

    def __post_init__(self):
        if self.a * self.d not in (1, -1):
            raise DomainError(f"need ad = +-1, got a={self.a}, d={self.d}")
        if not self.h.is_real:
            raise DomainError("skew product needs a real-valued h")

    @property
    def normalized(self) -> bool:
        return self.a == 1 and self.d == 1


def skew_step(flow: SkewFlow, p: TorusPoint) -> TorusPoint:
    """One application of T; h is evaluated at the incoming x1."""
    from .analytic import eval_series
    hval = eval_series(flow.h, p.x1).real
    x1 = (flow.a * p.x1 + flow.alpha.frac_float(1)) % 1.0
    x2 = (flow.c * p.x1 + flow.d * p.x2 + hval) % 1.0
    return TorusPoint(x1, x2)


def skew_orbit_iter(flow: SkewFlow, p: TorusPoint, n: int) -> TorusPoint:
    for _ in range(n):
        p = skew_step(flow, p)
    return p


def skew_orbit_closed(flow: SkewFlow, p: TorusPoint, n: int,
                      birkhoff_mode: str = "direct") -> TorusPoint:
    """Orbit at time n from the closed form (normalized flows only)."""
    if n < 0:
        raise DomainError("orbit time must be >= 0")
    if not flow.normalized:
        raise DomainError("closed orbit form assumes the normalized case a = d = 1; iterate instead")
    if n == 0:
        return p
    alpha = flow.alpha
    x1f = Fraction(p.x1)
    y1 = float((x1f + alpha.frac_fraction(n)) % 1)

    quad = alpha.frac_fraction(flow.c * (n * (n - 1) // 2))
    lin = _frac1(flow.c * n * x1f)
    if birkhoff_mode == "direct":
        bsum = birkhoff_sum_direct(flow.h, p.x1, alpha, n)
    elif birkhoff_mode == "fourier":
        bsum = birkhoff_sum_fourier(flow.h, p.x1, alpha, n)
    else:
        raise DomainError(f"unknown birkhoff_mode {birkhoff_mode!r}")
    y2 = (float(quad) + float(lin) + p.x2 + bsum.real) % 1.0
    return TorusPoint(y1, y2)


def character_phase(flow: SkewFlow, p: TorusPoint, b: Character, n: int,
                    birkhoff_mode: str = "direct") -> float:
    """<b, orbit(n)> mod 1.

    With b2 = 0 the phase depends only on the rotation factor and no h
    evaluation is performed.
    """
    if n < 0:
        raise DomainError("orbit time must be >= 0")
    alpha = flow.alpha
    x1f = Fraction(p.x1)
    if b.b2 == 0:
        return float((b.b1 * (x1f + alpha.frac_fraction(n))) % 1)
    if not flow.normalized:
        raise DomainError("character phases use the normalized closed form")
    # P(n) = b1 (x1 + n alpha) + b2 (c n(n-1)/2 alpha + c n x1 + x2)
    poly_part = (b.b1 * x1f
                 + alpha.frac_fraction(b.b1 * n + b.b2 * flow.c * (n * (n - 1) // 2))
                 + b.b2 * flow.c * n * x1f
                 + b.b2 * Fraction(p.x2)) % 1
    if birkhoff_mode == "direct":
        bsum = birkhoff_sum_direct(flow.h, p.x1, alpha, n)
    else:
        bsum = birkhoff_sum_fourier(flow.h, p.x1, alpha, n)
    return (float(poly_part) + b.b2 * bsum.real) % 1.0


# ---------------------------------------------------------------------------
# Affine maps with quasi-unipotent linear part


def _mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    m = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(m)) for j in range(m)] for i in range(m)]


def _mat_vec(A, v):
    return [sum(A[i][k] * v[k] for k in range(len(v))) for i in range(len(A))]


def _identity(m: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(m)] for i in range(m)]


def _mat_det(A) -> int:
    # Bareiss fraction-free elimination, exact over Z.
    m = len(A)
    M = [list(map(int, row)) for row in A]
    sign = 1
    prev = 1
    for k in range(m - 1):
        if M[k][k] == 0:
            for r in range(k + 1, m):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[m - 1][m - 1]


def _is_nilpotent(M, order: int) -> bool:
    P = M
    for _ in range(order):
        if all(all(e == 0 for e in row) for row in P):
            return True
        P = _mat_mul(P, M)
    return all(all(e == 0 for e in row) for row in P)


@dataclass(eq=False)
class UnipotentAffine:
    """Affine toral map x -> Wx + b with quasi-unipotent W in GL_m(Z).

    nu is the least exponent with W^nu = I + N, N nilpotent of order k
    (N^{k+1} = 0); both are computed and validated at construction.
    """

    matrix: tuple
    translation: tuple
    nu: int = field(init=False)
    nilpotent: tuple = field(init=False)
    nilpotency_order: int = field(init=False)

    def __post_init__(self):
        W = [list(map(int, row)) for row in self.matrix]
        m = len(W)
        if any(len(row) != m for row in W):
            raise DomainError("matrix must be square")
        if len(self.translation) != m:
            raise DomainError("translation dimension mismatch")
        if _mat_det(W) not in (1, -1):
            raise DomainError("matrix must lie in GL_m(Z) (det = +-1)")
        self.matrix = tuple(tuple(row) for row in W)
        self.translation = tuple(Fraction(t) for t in self.translation)

        P = W
        nu = None
        for j in range(1, MAX_QUASIUNIPOTENT_ORDER + 1):
            M = [[P[i][k] - (1 if i == k else 0) for k in range(m)] for i in range(m)]
            if _is_nilpotent(M, m):
                nu = j
                N = M
                break
            P = _mat_mul(P, W)
        if nu is None:
            raise DomainError("matrix is not quasi-unipotent (positive entropy)")
        self.nu = nu
        self.nilpotent = tuple(tuple(row) for row in N)
        k = 0
        Npow = N
        while not all(all(e == 0 for e in row) for row in Npow):
            k += 1
            Npow = _mat_mul(Npow, N)
        self.nilpotency_order = k

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    def step(self, x: Sequence[Fraction]) -> list[Fraction]:
        v = _mat_vec(self.matrix, [Fraction(t) for t in x])
        return [_frac1(v[i] + self.translation[i]) for i in range(self.dimension)]

    def orbit_point(self, x: Sequence[Fraction], n: int) -> list[Fraction]:
        p = [Fraction(t) for t in x]
        for _ in range(n):
            p = self.step(p)
        return p

    def doubled(self) -> tuple:
        """Linearization: Wtilde (x, b) = (Wx + b, b) on T^{2m}."""
        m = self.dimension
        top = [list(self.matrix[i]) + [1 if j == i else 0 for j in range(m)]
               for i in range(m)]
        bot = [[0] * m + [1 if j == i else 0 for j in range(m)] for i in range(m)]
        return top + bot


@dataclass(frozen=True)
class PhasePolynomial:
    """phi with psi(T^n x) = e(phi(n)) on the residue class n = l (mod nu)."""

    coeffs: tuple
    nu: int
    residue: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else 0

    def value_fraction(self, n: int) -> Fraction:
        if n % self.nu != self.residue:
            raise DomainError(f"n={n} is not {self.residue} mod {self.nu}")
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def value_mod1(self, n: int) -> float:
        return float(self.value_fraction(n) % 1)


def unipotent_phase_poly(aff: UnipotentAffine, x: Sequence, v: Sequence[int],
                         l: int) -> PhasePolynomial:
    """Exact polynomial phase of the character e(<v, .>) along the orbit.

    The translation is absorbed by doubling the variables; with
    Wt^nu = I + N the orbit at n = q nu + l is sum_t C(q, t) N^t Wt^l xt,
    a polynomial in q, rewritten in n.  Coefficients are exact Fractions
    (floats are converted exactly).
    """
    if not 0 <= l < aff.nu:
        raise DomainError(f"residue l={l} outside [0, {aff.nu})")
    if all(int(c) == 0 for c in v):
        return PhasePolynomial(coeffs=(Fraction(0),), nu=aff.nu, residue=l)
    m = aff.dimension
    Wt = UnipotentAffine(matrix=tuple(map(tuple, aff.doubled())),
                         translation=(0,) * (2 * m))
    xt = [Fraction(t) for t in x] + list(aff.translation)
    vt = [int(c) for c in v] + [0] * m

    nu = Wt.nu
    if nu != aff.nu:
        # lcm structure can differ only by the translation block, which is
        # identity: the doubled matrix shares nu with W.
        raise DomainError("internal: doubled matrix changed the unipotence exponent")
    Wl = _identity(2 * m)
    for _ in range(l):
        Wl = _mat_mul(Wl, [list(r) for r in Wt.matrix])
    base = _mat_vec(Wl, xt)

    N = [list(r) for r in Wt.nilpotent]
    poly = Poly()
    xi = base
    t = 0
    while True:
        val = sum(Fraction(vt[i]) * xi[i] for i in range(2 * m))
        if val:
            poly = poly + binomial_poly(t).scale(val)
        t += 1
        if t > Wt.nilpotency_order:
            break
        xi = [sum(Fraction(N[i][k]) * xi[k] for k in range(2 * m)) for i in range(2 * m)]

    # q = (n - l)/nu
    poly_n = poly.compose_linear(Fraction(1, nu), Fraction(-l, nu))
    return PhasePolynomial(coeffs=poly_n.coeffs or (Fraction(0),), nu=nu, residue=l)


def character_value(aff: UnipotentAffine, x: Sequence, v: Sequence[int], n: int) -> complex:
    """psi(T^n x) computed by exact matrix iteration (oracle path)."""
    p = aff.orbit_point(x, n)
    phase = sum(Fraction(int(vi)) * pi for vi, pi in zip(v, p)) % 1
    return complex(math.cos(2 * math.pi * float(phase)),
                   math.sin(2 * math.pi * float(phase)))
