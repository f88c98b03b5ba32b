"""Mobius-weighted exponential sums and the analytic verifiers.

The central object is S(N) = sum_{n<=N} mu(n) e(<b, orbit(n)>) evaluated at
checkpoints.  Orbit phases come from closed forms, never from sequential
iteration: rotation and quadratic parts through exact fixed-denominator
reduction with per-chunk anchors, Birkhoff parts through the geometric
prefix formula per Fourier mode.  Work is split into fixed-size chunks
combined in a fixed order, so results are bit-identical for any worker
count.

Also here: the bilinear-criterion test (small correlations against prime
dilations force small multiplicative-weighted sums), the polynomial
lower-bound verifier on the unit circle, the third-derivative van der
Corput bound, and the dilation-difference polynomials of the sharp-scale
analysis.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .analytic import (AnalyticSeries, CaseReport, ScaleFunction, e2pi,
                       e2pi_m1, scale_window)
from .cfrac import AlphaSpec
from .errors import DomainError, PrecisionError
from .flows import Character, SkewFlow, TorusPoint, UnipotentAffine, unipotent_phase_poly
from .mobius import MobiusTable
from .polyutil import Poly

CHUNK = 8192
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CorrelationSeries:
    """Partial sums S(N_i) at increasing checkpoints, with provenance."""

    checkpoints: tuple
    sums: tuple
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.checkpoints, self.checkpoints[1:])):
            raise DomainError("checkpoints must be strictly increasing")
        for cp, s in zip(self.checkpoints, self.sums):
            if abs(s) > cp * (1 + 1e-12):
                raise DomainError(f"|S({cp})| = {abs(s)} exceeds the trivial bound")

    @property
    def normalized(self) -> tuple:
        return tuple(abs(s) / cp for cp, s in zip(self.checkpoints, self.sums))

    def rows(self):
        for cp, s in zip(self.checkpoints, self.sums):
            yield cp, s.real, s.imag, abs(s) / cp


@dataclass(frozen=True)
class PolyPhase:
    """Real polynomial phase on a residue class: coefficients low-to-high."""

    coefficients: tuple
    nu: int = 1
    residue: int = 0

    def __post_init__(self):
        if not 0 <= self.residue < self.nu:
            raise DomainError("need 0 <= residue < nu")
        if len(self.coefficients) < 1:
            raise DomainError("need at least a constant coefficient")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def as_poly(self) -> Poly:
        return Poly([Fraction(c) for c in self.coefficients])


# ---------------------------------------------------------------------------
# Exact-anchored mod-1 evaluation of polynomial sequences


def poly_mod1_array(poly: Poly, t0: int, count: int, target_err: float = 1e-9
                    ) -> np.ndarray:
    """frac(poly(t)) for t = t0..t0+count-1 as float64, error < target_err.

    Within blocks of length L the value is the binomial combination
    sum_k C(s, k) D_k of exact finite differences D_k reduced mod 1, so the
    roundoff is about C(L, deg) * 2^-52; L is chosen accordingly and the
    differences are recomputed exactly at every block anchor.
    """
    deg = max(poly.degree, 0)
    if deg == 0:
        v = float(poly.eval(0) % 1) if poly.coeffs else 0.0
        return np.full(count, v)
    L = 1
    while L < 1 << 16:
        err = math.comb(2 * L, deg) * (deg + 1) * 2.0**-52
        if err > target_err:
            break
        L *= 2
    L = max(L, deg + 1)
    out = np.empty(count, dtype=np.float64)
    pos = 0
    while pos < count:
        u = t0 + pos
        take = min(L, count - pos)
        vals = [poly.eval(u + i) for i in range(deg + 1)]
        diffs = []
        level = vals
        for _ in range(deg + 1):
            diffs.append(float(level[0] % 1))
            level = [level[i + 1] - level[i] for i in range(len(level) - 1)]
        s = np.arange(take, dtype=np.float64)
        acc = np.full(take, diffs[0])
        binom = np.ones(take, dtype=np.float64)
        for k in range(1, deg + 1):
            binom = binom * (s - (k - 1)) / k
            acc += binom * diffs[k]
        out[pos:pos + take] = np.mod(acc, 1.0)
        pos += take
    return out


# ---------------------------------------------------------------------------
# Skew-product phase assembly


class _RotationTrack:
    """frac(alpha * (b1 n + b2 c n(n-1)/2)) via per-chunk exact anchors.

    Within a chunk at base u the multiplier is K(u) + j(b1 + b2 c u) +
    b2 c j(j-1)/2, so three mod-1 numbers A0(u), A1(u), A2 reconstruct the
    phase to ~C(L,2)*2^-52.
    """

    def __init__(self, alpha: AlphaSpec, b1: int, b2c: int, nmax: int):
        self.alpha = alpha
        self.b1 = b1
        self.b2c = b2c
        bits = max(nmax, 2).bit_length()
        self.center = alpha._phase_center(3 * bits + 8)
        self.A2 = float((Fraction(self.b2c) * self.center) % 1)

    def _k(self, n: int) -> int:
        return self.b1 * n + self.b2c * (n * (n - 1) // 2)

    def chunk(self, u: int, j: np.ndarray) -> np.ndarray:
        A0 = float((self._k(u) * self.center) % 1)
        A1 = float(((self.b1 + self.b2c * u) * self.center) % 1)
        return A0 + j * A1 + (j * (j - 1.0) / 2.0) * self.A2


class _LinearTrack:
    """frac(c * n) for a float coefficient c, anchored exactly per chunk."""

    def __init__(self, c: float):
        self.cf = Fraction(c) % 1
        self.step = float(self.cf)

    def chunk(self, u: int, j: np.ndarray) -> np.ndarray:
        base = float((u * self.cf) % 1)
        return base + j * self.step


class _ModeTrack:
    """One Fourier mode's geometric Birkhoff prefix r(n) = (e(n d)-1)/(e(d)-1)."""

    def __init__(self, coeff: complex, delta: Fraction, nmax: int):
        self.coeff = coeff
        self.delta = delta
        self.df = float(delta)
        den = e2pi_m1(delta)
        if self.df == 0.0 or abs(self.df) < 1e-250 or den == 0:
            self.ramp = True
        else:
            self.ramp = False
            self.inv_den = 1.0 / den

    def chunk(self, u: int, j: np.ndarray) -> np.ndarray:
        n = u + j
        if self.ramp:
            return self.coeff * n
        anchor = float((u * self.delta) % 1)
        ph = np.mod(anchor + j * self.df, 1.0)
        return self.coeff * ((np.exp(2j * np.pi * ph) - 1.0) * self.inv_den)


class _SkewPhaseContext:
    """Streams <b, orbit(n)> mod 1 for the normalized skew product.

    A mode whose total phase contribution |2 coeff / (e(delta)-1)| stays
    below MODE_FLOOR for every n is dropped; the summed bound on what was
    dropped is recorded in `dropped_bound`.
    """

    MODE_FLOOR = 1e-18

    def __init__(self, flow: SkewFlow, p: TorusPoint, b: Character, nmax: int):
        if not flow.normalized:
            raise DomainError("correlator needs the normalized skew form a = d = 1")
        alpha, h = flow.alpha, flow.h
        self.b = b
        self.const = (b.b1 * p.x1 + b.b2 * p.x2) % 1.0
        self.rot = _RotationTrack(alpha, b.b1, b.b2 * flow.c, nmax)

        lin_coeff = b.b2 * flow.c * p.x1
        self.modes: list[_ModeTrack] = []
        self.dropped_bound = 0.0
        ramp_real = h.coeff(0).real
        for m, c in h.items():
            if m <= 0:
                continue
            delta = alpha.frac_signed_fraction(m)
            coeff = c * e2pi(m * p.x1)
            mode = _ModeTrack(coeff, delta, nmax)
            if mode.ramp:
                if mode.df == 0.0:
                    ramp_real += 2.0 * coeff.real
                    continue
                if abs(coeff) * nmax < self.MODE_FLOOR:
                    self.dropped_bound += 2.0 * abs(coeff) * nmax
                    continue
            elif 2.0 * abs(coeff) * abs(mode.inv_den) < self.MODE_FLOOR:
                self.dropped_bound += 2.0 * abs(coeff) * abs(mode.inv_den)
                continue
            self.modes.append(mode)
        self.lin = _LinearTrack(lin_coeff + b.b2 * ramp_real)
        self.b2 = b.b2

    def chunk(self, u: int, L: int) -> np.ndarray:
        j = np.arange(L, dtype=np.float64)
        birkhoff = np.zeros(L, dtype=np.complex128)
        for mode in self.modes:
            birkhoff += mode.chunk(u, j)
        phases = (self.const + self.rot.chunk(u, j) + self.lin.chunk(u, j)
                  + self.b2 * (2.0 * birkhoff.real))
        return np.mod(phases, 1.0)


def character_phase_array(flow: SkewFlow, p: TorusPoint, b: Character, N: int,
                          chunk: int = CHUNK) -> np.ndarray:
    """Phases <b, orbit(n)> mod 1 for n = 1..N, assembled chunk-wise."""
    if b.b2 == 0:
        ctx_modes_free = _RotationTrack(flow.alpha, b.b1, 0, N)
        out = np.empty(N, dtype=np.float64)
        base = (b.b1 * p.x1) % 1.0
        for u in range(1, N + 1, chunk):
            L = min(chunk, N + 1 - u)
            j = np.arange(L, dtype=np.float64)
            out[u - 1:u - 1 + L] = np.mod(base + ctx_modes_free.chunk(u, j), 1.0)
        return out
    ctx = _SkewPhaseContext(flow, p, b, N)
    out = np.empty(N, dtype=np.float64)
    for u in range(1, N + 1, chunk):
        L = min(chunk, N + 1 - u)
        out[u - 1:u - 1 + L] = ctx.chunk(u, L)
    return out


# ---------------------------------------------------------------------------
# Checkpointed mu-weighted summation with deterministic chunking


def _pieces(N: int, checkpoints: Sequence[int], chunk: int) -> list[tuple[int, int]]:
    cuts = {0, N}
    cuts.update(int(c) for c in checkpoints)
    cuts.update(range(0, N, chunk))
    cuts = sorted(c for c in cuts if 0 <= c <= N)
    return [(a + 1, b) for a, b in zip(cuts, cuts[1:])]


def _weighted_sums(phase_chunk: Callable[[int, int], np.ndarray], mu: np.ndarray,
                   N: int, checkpoints: Sequence[int], threads: int,
                   chunk: int) -> list[complex]:
    """sum mu(n) e(phase(n)) snapshotted at the checkpoints.

    The piece layout depends only on (N, checkpoints, chunk); threads only
    parallelize piece evaluation, and the reduction runs in piece order.
    """
    pieces = _pieces(N, checkpoints, chunk)

    def piece_sum(ab: tuple[int, int]) -> complex:
        a, b = ab
        ph = phase_chunk(a, b - a + 1)
        z = np.exp(2j * np.pi * ph)
        return complex(np.dot(mu[a:b + 1].astype(np.float64), z))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            sums = list(ex.map(piece_sum, pieces))
    else:
        sums = [piece_sum(p) for p in pieces]

    out = []
    running = 0j
    want = iter(sorted(int(c) for c in checkpoints))
    nxt = next(want, None)
    for (a, b), s in zip(pieces, sums):
        running += s
        while nxt is not None and b == nxt:
            out.append(running)
            nxt = next(want, None)
    return out


def mobius_correlate(flow, x, b, table: MobiusTable, checkpoints: Sequence[int],
                     threads: int = 1, chunk: int = CHUNK) -> CorrelationSeries:
    """S(N_i) = sum_{n<=N_i} mu(n) e(<b, orbit(n)>) at each checkpoint.

    flow: a SkewFlow (normalized) with x a TorusPoint and b a Character, or
    a UnipotentAffine with x a coordinate sequence and b an integer vector.
    """
    checkpoints = sorted(int(c) for c in checkpoints)
    if not checkpoints:
        raise DomainError("need at least one checkpoint")
    N = checkpoints[-1]
    if N > table.limit:
        raise DomainError(f"checkpoint {N} beyond sieve limit {table.limit}")
    mu = table.mu_array()

    if isinstance(flow, SkewFlow):
        if not isinstance(b, Character):
            b = Character(*b)
        p = x if isinstance(x, TorusPoint) else TorusPoint(*x)
        if b.b2 == 0 or not flow.h.support():
            # pure rotation factor: linear-phase sum
            ctx = _RotationTrack(flow.alpha, b.b1, b.b2 * flow.c, N)
            base = (b.b1 * p.x1 + b.b2 * p.x2) % 1.0
            lin = _LinearTrack(b.b2 * flow.c * p.x1)

            def phase_chunk(u, L):
                j = np.arange(L, dtype=np.float64)
                return np.mod(base + ctx.chunk(u, j) + lin.chunk(u, j), 1.0)
        else:
            sctx = _SkewPhaseContext(flow, p, b, N)
            phase_chunk = sctx.chunk
        meta_flow = f"skew(c={flow.c}, alpha={flow.alpha.label}, h={flow.h.label})"
    elif isinstance(flow, UnipotentAffine):
        v = (b.b1, b.b2) if isinstance(b, Character) else tuple(int(t) for t in b)
        if len(v) != flow.dimension:
            raise DomainError("observable vector dimension mismatch")
        polys = [unipotent_phase_poly(flow, x, v, l).coeffs for l in range(flow.nu)]
        tpolys = [Poly(c).compose_linear(flow.nu, l) for l, c in enumerate(polys)]

        def phase_chunk(u, L):
            out = np.empty(L, dtype=np.float64)
            ns = np.arange(u, u + L)
            for l in range(flow.nu):
                sel = np.nonzero(ns % flow.nu == l)[0]
                if sel.size:
                    t_start = (u + int(sel[0]) - l) // flow.nu
                    out[sel] = poly_mod1_array(tpolys[l], t_start, sel.size)
            return out
        meta_flow = f"unipotent_affine(dim={flow.dimension}, nu={flow.nu})"
    else:
        raise DomainError(f"unsupported flow type {type(flow).__name__}")

    sums = _weighted_sums(phase_chunk, mu, N, checkpoints, threads, chunk)
    meta = {"flow": meta_flow, "observable": str(b), "threads": threads,
            "chunk": chunk, "N": N}
    return CorrelationSeries(checkpoints=tuple(checkpoints), sums=tuple(sums),
                             metadata=meta)


def poly_exp_sum(phase: PolyPhase, table: MobiusTable, N: int,
                 threads: int = 1, chunk: int = CHUNK) -> complex:
    """sum_{n<=N, n = l (mod nu)} mu(n) e(phi(n)) with exact mod-1 phases."""
    if N > table.limit:
        raise DomainError(f"N={N} beyond sieve limit {table.limit}")
    mu = table.mu_array()
    nu, l = phase.nu, phase.residue
    tpoly = phase.as_poly().compose_linear(nu, l)
    n_start = l if l >= 1 else nu
    t_start = (n_start - l) // nu
    count = (N - n_start) // nu + 1 if N >= n_start else 0
    if count == 0:
        return 0j
    total = 0j
    mu_sel = mu[n_start::nu][:count]
    pos = 0
    while pos < count:
        take = min(chunk, count - pos)
        ph = poly_mod1_array(tpoly, t_start + pos, take)
        z = np.exp(2j * np.pi * ph)
        total += complex(np.dot(mu_sel[pos:pos + take].astype(np.float64), z))
        pos += take
    return total


def mertens_residue(table: MobiusTable, N: int, nu: int = 1, l: int = 0) -> int:
    mu = table.mu_array()
    n_start = l if l >= 1 else nu
    return int(mu[n_start::nu][: (N - n_start) // nu + 1].sum(dtype=np.int64))


# ---------------------------------------------------------------------------
# Bilinear criterion (small prime-dilation correlations force small sums)


def bsz_test(f: Callable[[np.ndarray], np.ndarray], tau: float, M: int, N: int,
             table: MobiusTable, prime_cap: int = 10_000) -> dict:
    """Check the bilinear hypothesis and the multiplicative-sum conclusion.

    Hypothesis: |sum_{m<=M} f(p1 m) conj(f(p2 m))| <= tau M for all primes
    p1 != p2 <= e^{1/tau} (the prime range is capped at prime_cap, recorded).
    Conclusion: |sum_{n<=N} mu(n) f(n)| <= 2 sqrt(tau log(1/tau)) N.
    """
    if not 0.0 < tau < 1.0 / math.e:
        raise DomainError("tau must lie in (0, 1/e)")
    bound = math.exp(1.0 / tau)
    capped = bound > prime_cap
    pbound = min(int(bound), prime_cap)
    sieve = np.ones(pbound + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(pbound**0.5) + 1):
        if sieve[i]:
            sieve[i * i:: i] = False
    primes = np.nonzero(sieve)[0]
    if primes.size < 2:
        raise DomainError(f"prime range e^(1/tau)={bound:.1f} holds fewer than two primes")

    ms = np.arange(1, M + 1, dtype=np.int64)
    cache: dict[int, np.ndarray] = {}

    def fp(p: int) -> np.ndarray:
        if p not in cache:
            vals = np.asarray(f(p * ms), dtype=np.complex128)
            if np.max(np.abs(vals)) > 1.0 + 1e-9:
                raise DomainError("sequence oracle must satisfy |f| <= 1")
            cache[p] = vals
        return cache[p]

    worst_pair, worst_abs = None, -1.0
    hypothesis_holds = True
    for i in range(len(primes)):
        fi = fp(int(primes[i]))
        for k in range(i + 1, len(primes)):
            s = abs(np.dot(fi, np.conj(fp(int(primes[k])))))
            if s > worst_abs:
                worst_abs, worst_pair = s, (int(primes[i]), int(primes[k]))
            if s > tau * M:
                hypothesis_holds = False

    mu = table.mu_array()
    if N > table.limit:
        raise DomainError(f"N={N} beyond sieve limit {table.limit}")
    ns = np.arange(1, N + 1, dtype=np.int64)
    fn = np.asarray(f(ns), dtype=np.complex128)
    msum = complex(np.dot(mu[1:N + 1].astype(np.float64), fn))
    conclusion_bound = 2.0 * math.sqrt(tau * math.log(1.0 / tau))
    return {
        "tau": tau, "M": M, "N": N,
        "prime_bound": pbound, "prime_count": int(primes.size), "capped": capped,
        "worst_pair": worst_pair,
        "worst_bilinear_ratio": worst_abs / M,
        "hypothesis_holds": hypothesis_holds,
        "mobius_sum_ratio": abs(msum) / N,
        "conclusion_bound": conclusion_bound,
        "conclusion_holds": abs(msum) / N <= conclusion_bound,
    }


# ---------------------------------------------------------------------------
# Sharp-scale dilation polynomials (case C machinery)


@dataclass(frozen=True)
class PhiPolys:
    """phi and its cut phi_D as frequency->coefficient maps, with norms."""

    phi: dict
    phi_D: dict
    Phi: float
    norm_phi_D: float
    norm_parts: tuple
    tail_bound: float
    D: int
    d1: int
    d2: int

    def eval_phi(self, x: float) -> complex:
        return sum(c * e2pi(f * x) for f, c in self.phi.items())

    def eval_phi_D(self, x: float) -> complex:
        return sum(c * e2pi(f * x) for f, c in self.phi_D.items())


def phi_polys(report: CaseReport, h: AnalyticSeries, d1: int, d2: int,
              x1: float) -> PhiPolys:
    """Build phi(x) = sum m^2 h_hat(m m_J) e(m m_J x1) (d1^3 e(d1 m x) - d2^3 e(d2 m x))
    over the top-scale window, its |m| <= D cut, and the norm data.

    Phi = (sum_{|m|<=D} m^4 |h_hat(m m_J)|^2)^(1/2); each one-dilation part
    has Fourier norm d_l^3 Phi, and the triangle inequality gives
    ||phi_D||_2 >= (d1^3 - d2^3) Phi >= Phi.  The tail |phi - phi_D| is
    bounded by (d1^3 + d2^3) * sum_{|m|>D} m^2 |h_hat(m m_J)|.
    """
    if not d1 > d2 >= 1:
        raise DomainError("need d1 > d2 >= 1")
    if report.J == 0:
        raise DomainError("no sharp scale available")
    mJ, MJ, D = report.scales[-1], report.M[-1], report.D
    window = scale_window(h, mJ, MJ)
    phi: dict[int, complex] = {}
    phi_D: dict[int, complex] = {}
    Phi2 = 0.0
    tail = 0.0
    for m, hm in window:
        base = (m * m) * hm * e2pi(m * mJ * x1)
        for dl, sign in ((d1, 1.0), (d2, -1.0)):
            f = dl * m
            w = sign * dl**3 * base
            phi[f] = phi.get(f, 0j) + w
            if abs(m) <= D:
                phi_D[f] = phi_D.get(f, 0j) + w
        if abs(m) <= D:
            Phi2 += float(abs(m))**4 * abs(hm)**2
        else:
            tail += (d1**3 + d2**3) * (m * m) * abs(hm)
    Phi = math.sqrt(Phi2)
    norm_phi_D = math.sqrt(sum(abs(c)**2 for c in phi_D.values()))
    return PhiPolys(phi=phi, phi_D=phi_D, Phi=Phi, norm_phi_D=norm_phi_D,
                    norm_parts=(d1**3 * Phi, d2**3 * Phi), tail_bound=tail,
                    D=D, d1=d1, d2=d2)


def ftilde_third_derivative(report: CaseReport, h: AnalyticSeries, d1: int,
                            d2: int, x1: float, x: float) -> complex:
    """Third derivative of the dilation difference f_J(d1 x) - f_J(d2 x)."""
    sf = ScaleFunction.from_report(report, h, x1)
    return sf.tilde_third_derivative(x, d1, d2)


# ---------------------------------------------------------------------------
# Lemma verifiers


def poly_lower_bound_check(coefficients: Sequence[complex], delta: float,
                           samples: int = 10_000) -> dict:
    """min |P(z)| / ((delta/3)^n ||P||_2) over circle points off the root discs.

    The claim under test: the ratio is always >= 1.
    """
    coeffs = np.asarray(list(coefficients), dtype=np.complex128)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    n = len(coeffs) - 1
    if n < 1:
        raise DomainError("degree must be >= 1")
    if not 0.0 < delta < 0.5:
        raise DomainError("delta must lie in (0, 1/2)")
    norm2 = float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))
    try:
        roots = np.roots(coeffs[::-1])
    except np.linalg.LinAlgError as exc:
        raise PrecisionError(f"root finder failed: {exc}") from exc
    if not np.all(np.isfinite(roots)):
        raise PrecisionError("root finder returned non-finite roots")
    z = np.exp(2j * np.pi * np.arange(samples) / samples)
    keep = np.ones(samples, dtype=bool)
    for r in roots:
        keep &= np.abs(z - r) >= delta
    if not keep.any():
        raise DomainError("every sample point fell inside an excluded disc")
    vals = np.polyval(coeffs[::-1], z[keep])
    floor = (delta / 3.0) ** n * norm2
    min_abs = float(np.min(np.abs(vals)))
    return {
        "degree": n,
        "norm2": norm2,
        "floor": floor,
        "min_abs_off_discs": min_abs,
        "min_ratio": min_abs / floor,
        "samples_kept": int(keep.sum()),
        "pass": min_abs >= floor,
    }


def vdc_sum_check(F_value: Callable[[float], float],
                  F_third: Callable[[float], float],
                  Lambda: float, eta: float, a: float, b: float,
                  derivative_samples: int = 200,
                  implied_constant: float = 10.0) -> dict:
    """Compare |sum_{a<n<b} e(F(n))| with the third-derivative bound.

    Bound: implied_constant * (eta^(1/2) Lambda^(1/6) (b-a) +
    Lambda^(-1/6) (b-a)^(1/2)), valid when Lambda <= |F'''| <= eta Lambda
    on (a, b).  The derivative window is checked by sampling; violations are
    reported, not raised.
    """
    if b - a < 1:
        raise DomainError("need b - a >= 1")
    if Lambda <= 0 or eta < 1:
        raise DomainError("need Lambda > 0 and eta >= 1")
    xs = np.linspace(a + 1e-9 * (b - a), b - 1e-9 * (b - a), derivative_samples)
    d3 = np.array([abs(F_third(float(x))) for x in xs])
    precondition_ok = bool(np.all(d3 >= Lambda * (1 - 1e-9))
                           and np.all(d3 <= eta * Lambda * (1 + 1e-9)))
    total = 0j
    n = math.floor(a) + 1
    while n < b:
        if n > a:
            total += cmath.exp(2j * math.pi * (F_value(float(n)) % 1.0))
        n += 1
    bound = implied_constant * (math.sqrt(eta) * Lambda ** (1 / 6) * (b - a)
                                + Lambda ** (-1 / 6) * math.sqrt(b - a))
    return {
        "precondition_ok": precondition_ok,
        "d3_min": float(d3.min()), "d3_max": float(d3.max()),
        "sum_abs": abs(total),
        "bound": bound,
        "ratio": abs(total) / bound,
        "pass": abs(total) <= bound,
    }
