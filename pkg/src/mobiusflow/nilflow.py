"""Affine flows on the 3-dimensional Heisenberg nilmanifold.

Model: G = upper unitriangular 3x3 real matrices with Lie algebra basis
X1 = E12, X2 = E23, X3 = E13, so [X1, X2] = X3 and X3 is central.  Points
are held in coordinates of the second kind, g = exp(v1 X1) exp(v2 X2)
exp(v3 X3), where the group law is polynomial:

    (v1, v2, v3) * (w1, w2, w3) = (v1+w1, v2+w2, v3+w3 - w1 v2)

and the lattice of integer-coordinate points is precisely the integer
matrices.  Coordinates of the first kind (single exponential) differ by the
degree-2 maps u3 = v3 + v1 v2 / 2 and back.

An affine map T = (left translation by g) o sigma with sigma an
automorphism fixing the lattice is iterated exactly over rationals.  When
the differential of sigma is quasi-unipotent, the time-n point is a
finite product b_1^{h_1(n)} ... b_k^{h_k(n)} with k independent of n: the
factors are generator exponentials and the exponents are monomials whose
exact rational coefficients come from binomial expansion of the unipotent
part plus discrete antiderivatives.  This representation is what the
Mobius correlator evaluates (random access in n, no orbit recursion).

Fundamental domain: v1, v2, v3 in [0, 1), reduced in the order v1, v2 then
v3 (the central correction is applied last).  Character observables
e(p v1 + q v2) are lattice-invariant; a central factor e(r v3) is evaluated
on the canonical representative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError
from .mobius import MobiusTable
from .polyutil import Poly, prefix_sum_poly

MAX_NU = 24


@dataclass(frozen=True)
class HeisenbergElement:
    """Group element in coordinates of the second kind (exact rationals)."""

    v1: Fraction
    v2: Fraction
    v3: Fraction

    def __init__(self, v1, v2, v3):
        object.__setattr__(self, "v1", Fraction(v1))
        object.__setattr__(self, "v2", Fraction(v2))
        object.__setattr__(self, "v3", Fraction(v3))

    @classmethod
    def identity(cls) -> "HeisenbergElement":
        return cls(0, 0, 0)

    def coords(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.v1, self.v2, self.v3)

    def is_lattice(self) -> bool:
        return all(c.denominator == 1 for c in self.coords())

    def floats(self) -> tuple[float, float, float]:
        return (float(self.v1), float(self.v2), float(self.v3))


def heis_mul(a: HeisenbergElement, b: HeisenbergElement) -> HeisenbergElement:
    """Product ab in second-kind coordinates (polynomial group law)."""
    return HeisenbergElement(a.v1 + b.v1, a.v2 + b.v2, a.v3 + b.v3 - b.v1 * a.v2)


def heis_inv(a: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(-a.v1, -a.v2, -a.v3 - a.v1 * a.v2)


def coord_first_from_second(v: Sequence) -> tuple[Fraction, Fraction, Fraction]:
    """psi_exp o psi^{-1}: (v1, v2, v3) -> (v1, v2, v3 + v1 v2 / 2)."""
    v1, v2, v3 = (Fraction(t) for t in v)
    return (v1, v2, v3 + v1 * v2 / 2)


def coord_second_from_first(u: Sequence) -> tuple[Fraction, Fraction, Fraction]:
    """psi o psi_exp^{-1}: (u1, u2, u3) -> (u1, u2, u3 - u1 u2 / 2)."""
    u1, u2, u3 = (Fraction(t) for t in u)
    return (u1, u2, u3 - u1 * u2 / 2)


def reduce_to_fundamental(x: HeisenbergElement) -> HeisenbergElement:
    """Canonical representative of x Gamma with coordinates in [0, 1).

    Right-multiplies by a lattice element; v1 and v2 are reduced first, the
    central coordinate picks up the integer shear correction and is reduced
    last.  Idempotent, and the result differs from x by a lattice element.
    """
    g1 = -(x.v1 // 1)
    g2 = -(x.v2 // 1)
    v3_tmp = x.v3 - g1 * x.v2
    g3 = -(v3_tmp // 1)
    return HeisenbergElement(x.v1 + g1, x.v2 + g2, v3_tmp + g3)


# ---------------------------------------------------------------------------
# Automorphisms and affine maps


def _mat_of_fractions(rows) -> tuple:
    return tuple(tuple(Fraction(e) for e in row) for row in rows)


def _fmat_mul(A, B):
    n = len(A)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n))
                 for i in range(n))


def _fmat_vec(A, v):
    return tuple(sum(A[i][k] * v[k] for k in range(len(v))) for i in range(len(A)))


def _fmat_identity(n=3):
    return tuple(tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n))


def _fmat_inv3(A):
    a, b, c = A[0]
    d, e, f = A[1]
    g, h, i = A[2]
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if det == 0:
        raise DomainError("automorphism differential is singular")
    cof = (
        (e * i - f * h, c * h - b * i, b * f - c * e),
        (f * g - d * i, a * i - c * g, c * d - a * f),
        (d * h - e * g, b * g - a * h, a * e - b * d),
    )
    return tuple(tuple(cof[i][j] / det for j in range(3)) for i in range(3))


def make_automorphism(S: Sequence[Sequence[int]], e: int = 0, f: int = 0):
    """Differential matrix for the lattice automorphism induced by S in GL2(Z).

    The abelianized action is S; the central direction scales by det S, and
    the mixed row carries the half-integer corrections that keep the integer
    lattice invariant: w1 = e + s11 s21 / 2, w2 = f + s12 s22 / 2.
    """
    (s11, s12), (s21, s22) = ((int(S[0][0]), int(S[0][1])),
                              (int(S[1][0]), int(S[1][1])))
    det = s11 * s22 - s12 * s21
    if det not in (1, -1):
        raise DomainError("S must lie in GL2(Z)")
    w1 = Fraction(e) + Fraction(s11 * s21, 2)
    w2 = Fraction(f) + Fraction(s12 * s22, 2)
    return ((Fraction(s11), Fraction(s12), Fraction(0)),
            (Fraction(s21), Fraction(s22), Fraction(0)),
            (w1, w2, Fraction(det)))


@dataclass(eq=False)
class HeisenbergAffine:
    """T(x Gamma) = g sigma(x) Gamma with sigma(exp X) = exp(dsigma X).

    dsigma is given in the basis (X1, X2, X3); rational entries are allowed
    (lattice-preserving shears need half-integer central corrections).
    Validated: bracket compatibility, lattice invariance both ways, and
    quasi-unipotence (zero entropy).
    """

    g: HeisenbergElement
    dsigma: tuple
    nu: int = field(init=False)
    nilpotent: tuple = field(init=False)

    def __post_init__(self):
        A = _mat_of_fractions(self.dsigma)
        if len(A) != 3 or any(len(r) != 3 for r in A):
            raise DomainError("dsigma must be 3x3")
        det2 = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        if A[0][2] != 0 or A[1][2] != 0 or A[2][2] != det2:
            raise DomainError("dsigma must fix the center: column 3 = (0, 0, det of upper block)")
        if det2 not in (1, -1):
            raise DomainError("abelianized automorphism must lie in GL2(Z)")
        self.dsigma = A
        self.g = self.g if isinstance(self.g, HeisenbergElement) else HeisenbergElement(*self.g)

        Ainv = _fmat_inv3(A)
        for M, name in ((A, "sigma"), (Ainv, "sigma^-1")):
            for gen in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                img = coord_second_from_first(_fmat_vec(M, coord_first_from_second(gen)))
                if any(c.denominator != 1 for c in img):
                    raise DomainError(f"{name} does not preserve the integer lattice")

        P = A
        nu = None
        for j in range(1, MAX_NU + 1):
            Nmat = tuple(tuple(P[i][k] - (1 if i == k else 0) for k in range(3))
                         for i in range(3))
            N2 = _fmat_mul(Nmat, Nmat)
            N3 = _fmat_mul(N2, Nmat)
            if all(all(e == 0 for e in row) for row in N3):
                nu = j
                self.nilpotent = Nmat
                break
            P = _fmat_mul(P, A)
        if nu is None:
            raise DomainError("dsigma is not quasi-unipotent (positive entropy)")
        self.nu = nu

    def sigma(self, x: HeisenbergElement) -> HeisenbergElement:
        u = coord_first_from_second(x.coords())
        return HeisenbergElement(*coord_second_from_first(_fmat_vec(self.dsigma, u)))


def nil_step(T: HeisenbergAffine, x: HeisenbergElement) -> HeisenbergElement:
    """One application: the canonical representative of g sigma(x) Gamma."""
    return reduce_to_fundamental(heis_mul(T.g, T.sigma(x)))


def nil_orbit_iter(T: HeisenbergAffine, x: HeisenbergElement, n: int) -> HeisenbergElement:
    p = reduce_to_fundamental(x)
    for _ in range(n):
        p = nil_step(T, p)
    return p


# ---------------------------------------------------------------------------
# Polynomial orbit representation


@dataclass(frozen=True)
class PolyOrbitRep:
    """T^n(x Gamma) = b_1^{h_1(n)} ... b_k^{h_k(n)} Gamma on n = l (mod nu).

    Factors are generator exponentials: each entry is (axis, degree, c)
    meaning exp(c X_axis)^(n^degree); the coordinate polynomials Z_axis(n)
    are kept alongside for direct evaluation.  k never depends on n.
    """

    nu: int
    residue: int
    factors: tuple
    coord_polys: tuple

    @property
    def k(self) -> int:
        return len(self.factors)

    def evaluate(self, n: int) -> HeisenbergElement:
        """Unreduced group element at time n (n = residue mod nu, n >= 0)."""
        if n < 0 or n % self.nu != self.residue:
            raise DomainError(f"n={n} is not {self.residue} (mod {self.nu})")
        acc = HeisenbergElement.identity()
        for axis, degree, c in self.factors:
            exponent = c * n**degree
            coords = [Fraction(0)] * 3
            coords[axis] = exponent
            acc = heis_mul(acc, HeisenbergElement(*coords))
        return acc

    def evaluate_reduced(self, n: int) -> HeisenbergElement:
        return reduce_to_fundamental(self.evaluate(n))


def _residue_polys(A, Nmat, nu: int, u_vec) -> list[tuple[Poly, Poly, Poly]]:
    """Second-kind coords of sigma^j(y) as polynomials in t, j = t nu + r."""
    N2 = _fmat_mul(Nmat, Nmat)
    out = []
    Ar = _fmat_identity()
    for r in range(nu):
        base = _fmat_vec(Ar, u_vec)
        w = []
        for i in range(3):
            c0 = base[i]
            c1 = sum(Nmat[i][k] * base[k] for k in range(3))
            c2h = sum(N2[i][k] * base[k] for k in range(3))
            # (I + tN + t(t-1)/2 N^2) base, exact in t
            w.append(Poly([c0, c1 - c2h / 2, c2h / 2]))
        s3 = w[2] - w[0] * w[1].scale(Fraction(1, 2))
        out.append((w[0], w[1], s3))
        Ar = _fmat_mul(A, Ar)
    return out


def _wrong_order_guard(nu: int, r: int, l: int) -> int:
    return 1 if r < l else 0


def compile_poly_orbit(T: HeisenbergAffine, x: HeisenbergElement, l: int) -> PolyOrbitRep:
    """Exact polynomial form of the orbit on the residue class n = l (mod nu).

    Writes sigma^j(g) in second-kind coordinates as residue-wise polynomials
    in j, accumulates the ordered product with discrete antiderivatives, and
    appends sigma^n(x).  Everything is Fraction-exact, so the equality with
    step-by-step iteration is literal (acceptance checks use ==).
    """
    if not 0 <= l < T.nu:
        raise DomainError(f"residue l={l} outside [0, {T.nu})")
    nu = T.nu
    A, Nmat = T.dsigma, T.nilpotent
    u_g = coord_first_from_second(T.g.coords())
    u_x = coord_first_from_second(x.coords())

    g_polys = _residue_polys(A, Nmat, nu, u_g)  # (a_r(t), b_r(t), c_r(t))

    # Prefix sums over j < n, n = q nu + l: residue r contributes t in
    # [0, q + [r < l]).  All returned as polynomials in q.
    def residue_sum(polys_idx: int) -> Poly:
        total = Poly()
        for r in range(nu):
            P = prefix_sum_poly(g_polys[r][polys_idx])
            total = total + P.compose_linear(1, _wrong_order_guard(nu, r, l))
        return total

    V1 = residue_sum(0)
    V2 = residue_sum(1)
    sum_c = residue_sum(2)

    # B(j) = sum_{i<j} b_i for j = t nu + r: polynomial in t per residue.
    B_at = []
    for r in range(nu):
        acc = Poly()
        for rp in range(nu):
            P = prefix_sum_poly(g_polys[rp][1])
            acc = acc + P.compose_linear(1, 1 if rp < r else 0)
        B_at.append(acc)

    # sum_{j<n} a_j B(j), again residue by residue.
    sum_aB = Poly()
    for r in range(nu):
        prod = g_polys[r][0] * B_at[r]
        P = prefix_sum_poly(prod)
        sum_aB = sum_aB + P.compose_linear(1, _wrong_order_guard(nu, r, l))
    V3 = sum_c - sum_aB

    # sigma^n(x) for n = q nu + l: first A^l, then (I + qN + q(q-1)/2 N^2).
    Al = _fmat_identity()
    for _ in range(l):
        Al = _fmat_mul(A, Al)
    base = _fmat_vec(Al, u_x)
    N2 = _fmat_mul(Nmat, Nmat)
    sx = []
    for i in range(3):
        c0 = base[i]
        c1 = sum(Nmat[i][k] * base[k] for k in range(3))
        c2h = sum(N2[i][k] * base[k] for k in range(3))
        sx.append(Poly([c0, c1 - c2h / 2, c2h / 2]))
    sx3 = sx[2] - sx[0] * sx[1].scale(Fraction(1, 2))

    # group law: (V1,V2,V3) * (sx1,sx2,sx3) with the -w1 v2 correction.
    Z1 = V1 + sx[0]
    Z2 = V2 + sx[1]
    Z3 = V3 + sx3 - sx[0] * V2

    Zn = [P.compose_linear(Fraction(1, nu), Fraction(-l, nu)) for P in (Z1, Z2, Z3)]
    factors = []
    for axis, P in enumerate(Zn):
        for degree, c in enumerate(P.coeffs):
            if c:
                factors.append((axis, degree, c))
    return PolyOrbitRep(nu=nu, residue=l, factors=tuple(factors),
                        coord_polys=tuple(Zn))


# ---------------------------------------------------------------------------
# Observables and the correlator


@dataclass(frozen=True)
class NilObservable:
    """Finite sum of character terms w * e(p v1 + q v2 + r v3).

    Horizontal characters (r = 0) are genuine functions on the quotient;
    central terms are evaluated on the canonical representative.
    """

    terms: tuple

    @classmethod
    def character(cls, p: int, q: int, r: int = 0, weight: complex = 1.0) -> "NilObservable":
        return cls(terms=((complex(weight), int(p), int(q), int(r)),))

    @classmethod
    def from_json(cls, spec: dict) -> "NilObservable":
        p, q = spec.get("horizontal", (0, 0))
        r = spec.get("central", 0)
        return cls.character(p, q, r)

    @property
    def is_horizontal(self) -> bool:
        return all(t[3] == 0 for t in self.terms)

    def value(self, x: HeisenbergElement) -> complex:
        v1, v2, v3 = reduce_to_fundamental(x).floats()
        total = 0j
        for w, p, q, r in self.terms:
            ph = (p * v1 + q * v2 + r * v3) % 1.0
            total += w * complex(math.cos(2 * math.pi * ph), math.sin(2 * math.pi * ph))
        return total


def correlate_nil(T: HeisenbergAffine, x: HeisenbergElement, f: NilObservable,
                  table: MobiusTable, checkpoints: Sequence[int],
                  threads: int = 1) -> "CorrelationSeries":
    """S(N_i) = sum_{n<=N_i} mu(n) f(T^n x Gamma) via the polynomial orbit form.

    Horizontal observables ride the exact-anchored polynomial mod-1 path
    (fast, vectorized); central terms fall back to exact per-n evaluation
    of the reduced representative.
    """
    from .correlate import CorrelationSeries, poly_mod1_array

    checkpoints = sorted(int(c) for c in checkpoints)
    N = checkpoints[-1]
    if N > table.limit:
        raise DomainError(f"checkpoint {N} beyond sieve limit {table.limit}")
    mu = table.mu_array()
    reps = [compile_poly_orbit(T, x, l) for l in range(T.nu)]

    values = np.zeros(N + 1, dtype=np.complex128)
    if f.is_horizontal:
        for l, rep in enumerate(reps):
            Z1, Z2, Z3 = rep.coord_polys
            n_start = l if l >= 1 else T.nu
            count = (N - n_start) // T.nu + 1 if N >= n_start else 0
            if count == 0:
                continue
            t_start = (n_start - l) // T.nu
            acc = np.zeros(count, dtype=np.complex128)
            for w, p, q, _ in f.terms:
                poly = Z1.scale(p) + Z2.scale(q)
                ph = poly_mod1_array(poly.compose_linear(T.nu, l), t_start, count)
                acc += w * np.exp(2j * np.pi * ph)
            values[n_start::T.nu][:count] = acc
    else:
        for n in range(1, N + 1):
            rep = reps[n % T.nu]
            values[n] = f.value(rep.evaluate(n))

    sums = []
    for cp in checkpoints:
        sums.append(complex(np.dot(mu[1:cp + 1].astype(np.float64), values[1:cp + 1])))
    meta = {"flow": f"heisenberg(nu={T.nu})", "observable": str(f.terms),
            "threads": threads, "N": N}
    return CorrelationSeries(checkpoints=tuple(checkpoints), sums=tuple(sums), metadata=meta)
