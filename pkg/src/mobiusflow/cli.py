"""Command-line entry point: batch experiments emitting CSV/JSON.

Subcommands: sieve, cfrac, classify, correlate, expsum, bsz, furstenberg,
nilflow, verify.  Exit codes: 0 ok, 2 usage, 3 domain error, 4 capacity or
precision error, 5 internal error (including a failed lemma-check suite).

Every artifact write is atomic (temp file + rename) and carries a
provenance block (config hash, package version, thread count) in a sidecar
.provenance.json, or on stderr when writing to stdout.  The default thread
count comes from MOBIUSFLOW_THREADS.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
from fractions import Fraction
from typing import Optional

import numpy as np

from . import __version__
from .analytic import AnalyticSeries
from .cfrac import (AlphaSpec, cf_expand, classify_case, partition_Q,
                    two_series_partial_sums, with_partition, caseC_condition_rhs_logs)
from .correlate import (PolyPhase, bsz_test, mobius_correlate, poly_exp_sum,
                        poly_lower_bound_check, vdc_sum_check)
from .errors import CapacityError, DomainError, MobiusflowError, PrecisionError
from .flows import Character, SkewFlow, TorusPoint, UnipotentAffine
from .mobius import mobius_sieve
from . import furstenberg as fb
from . import nilflow as nf

ENV_THREADS = "MOBIUSFLOW_THREADS"


# ---------------------------------------------------------------------------
# Spec parsing


def alpha_from_string(spec: str) -> AlphaSpec:
    s = spec.strip()
    if s in ("sqrt2-1", "sqrt2m1"):
        return AlphaSpec.sqrt2_minus_1()
    if s == "golden":
        return AlphaSpec.golden_frac()
    if s.startswith("rational:"):
        p, q = s.split(":", 1)[1].split("/")
        return AlphaSpec.rational(int(p), int(q))
    if s.startswith("quotients:"):
        return AlphaSpec.from_quotients([int(a) for a in s.split(":", 1)[1].split(",")])
    if s.startswith("furstenberg:"):
        tau, K = s.split(":", 1)[1].split(",")
        return fb.build_alpha(float(tau), int(K))
    raise DomainError(f"cannot parse alpha spec {spec!r}")


def alpha_from_json(d: dict) -> AlphaSpec:
    kind = d.get("type")
    if kind == "rational":
        return AlphaSpec.rational(int(d["p"]), int(d["q"]))
    if kind == "quadratic":
        return AlphaSpec.quadratic(d.get("initial", [0]), d["period"])
    if kind == "quotients":
        return AlphaSpec.from_quotients([int(a) for a in d["quotients"]])
    if kind == "furstenberg":
        return fb.build_alpha(float(d["tau"]), int(d["depth"]))
    raise DomainError(f"unknown alpha type {kind!r}")


def series_from_json(d: dict) -> AnalyticSeries:
    kind = d.get("type")
    if kind == "coeffs":
        entries = [(int(m), complex(re, im)) for m, re, im in d["entries"]]
        return AnalyticSeries.from_entries(entries, tau=float(d["tau"]),
                                           tau2=d.get("tau2"))
    if kind == "geometric":
        return AnalyticSeries.geometric(float(d["tau"]), M=d.get("M"))
    if kind == "furstenberg":
        sysm = fb.FurstenbergSystem.build(float(d["tau"]), int(d["depth"]))
        return sysm.combined
    raise DomainError(f"unknown series type {kind!r}")


def flow_from_json(d: dict):
    kind = d.get("type")
    if kind == "skew":
        return SkewFlow(int(d.get("a", 1)), int(d["c"]), int(d.get("d", 1)),
                        alpha_from_json(d["alpha"]), series_from_json(d["h"]))
    if kind == "unipotent_affine":
        return UnipotentAffine(matrix=tuple(map(tuple, d["matrix"])),
                               translation=tuple(_num(t) for t in d["translation"]))
    if kind == "heisenberg":
        g = nf.HeisenbergElement(*[_num(t) for t in d["g"]])
        ds = tuple(tuple(_num(e) for e in row) for row in d["dsigma"])
        return nf.HeisenbergAffine(g=g, dsigma=ds)
    raise DomainError(f"unknown flow type {kind!r}")


def _num(v):
    if isinstance(v, str) and "/" in v:
        return Fraction(v)
    return v


def _parse_checkpoints(s: str) -> list[int]:
    out = []
    for part in s.split(","):
        part = part.strip()
        out.append(int(float(part)))
    return sorted(set(out))


# ---------------------------------------------------------------------------
# Output plumbing


def _provenance(payload: dict, threads: int) -> dict:
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return {"config_sha256": hashlib.sha256(blob).hexdigest(),
            "version": __version__, "threads": threads}


def _emit(text: str, path: Optional[str], provenance: dict) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stderr.write(json.dumps({"provenance": provenance}) + "\n")
        return
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-artifact-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    side = path + ".provenance.json"
    with open(side + ".tmp", "w") as fh:
        json.dump({"provenance": provenance}, fh, indent=2)
    os.replace(side + ".tmp", side)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_sieve(args, threads: int) -> int:
    table = mobius_sieve(args.limit)
    lines = ["n,mu"]
    lines.extend(f"{n},{mu}" for n, mu in table)
    _emit("\n".join(lines) + "\n", args.emit_csv,
          _provenance({"cmd": "sieve", "limit": args.limit}, threads))
    return 0


def cmd_cfrac(args, threads: int) -> int:
    alpha = alpha_from_string(args.alpha)
    cf = cf_expand(alpha, args.depth)
    flat, sharp = partition_Q(cf, args.partition_b)
    lines = ["k,a_k,l_k,q_k,set"]
    for k in range(cf.depth + 1):
        q = cf.denominators[k]
        tag = "sharp" if q in sharp else ("flat" if q in flat else "undecided")
        lines.append(f"{k},{cf.quotients[k]},{cf.numerators[k]},{q},{tag}")
    _emit("\n".join(lines) + "\n", args.out,
          _provenance({"cmd": "cfrac", "alpha": args.alpha, "depth": args.depth,
                       "B": args.partition_b}, threads))
    return 0


def cmd_classify(args, threads: int) -> int:
    alpha = alpha_from_string(args.alpha)
    if args.h.startswith("{"):
        h = series_from_json(json.loads(args.h))
    else:
        with open(args.h) as fh:
            h = series_from_json(json.load(fh))
    depth = args.depth if args.depth else (alpha.available_depth() or 60)
    cf = cf_expand(alpha, depth)
    report = classify_case(cf, h, args.n, d1=args.d1, b2=args.b2,
                           B=args.partition_b)
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out,
          _provenance({"cmd": "classify", "alpha": args.alpha, "n": str(args.n)},
                      threads))
    return 0


def cmd_correlate(args, threads: int) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    flow = flow_from_json(cfg)
    checkpoints = _parse_checkpoints(args.checkpoints)
    table = mobius_sieve(checkpoints[-1])
    b = tuple(int(t) for t in args.b.split(","))
    if isinstance(flow, (SkewFlow,)):
        x = TorusPoint(*(cfg.get("x", [0.0, 0.0])))
        series = mobius_correlate(flow, x, Character(*b), table, checkpoints,
                                  threads=threads)
    elif isinstance(flow, UnipotentAffine):
        x = tuple(_num(t) for t in cfg.get("x", [0] * flow.dimension))
        series = mobius_correlate(flow, x, b, table, checkpoints, threads=threads)
    else:
        x = nf.HeisenbergElement(*[_num(t) for t in cfg.get("x", [0, 0, 0])])
        obs = nf.NilObservable.character(*b) if len(b) == 3 else \
            nf.NilObservable.character(b[0], b[1], 0)
        series = nf.correlate_nil(flow, x, obs, table, checkpoints, threads=threads)
    lines = ["N,re,im,abs_over_N"]
    lines.extend(f"{n},{re!r},{im!r},{a!r}" for n, re, im, a in series.rows())
    _emit("\n".join(lines) + "\n", args.out,
          _provenance({"cmd": "correlate", "config": cfg, "b": args.b,
                       "checkpoints": checkpoints}, threads))
    return 0


def cmd_expsum(args, threads: int) -> int:
    coeffs = tuple(float(c) for c in args.coeffs.split(","))
    phase = PolyPhase(coefficients=coeffs, nu=args.nu, residue=args.residue)
    table = mobius_sieve(args.n)
    s = poly_exp_sum(phase, table, args.n, threads=threads)
    out = {"N": args.n, "re": s.real, "im": s.imag, "abs_over_N": abs(s) / args.n}
    _emit(json.dumps(out, indent=2) + "\n", args.out,
          _provenance({"cmd": "expsum", "coeffs": coeffs, "nu": args.nu,
                       "l": args.residue, "N": args.n}, threads))
    return 0


def _bsz_sequence(spec: str):
    if spec == "constant":
        return lambda n: np.ones(np.asarray(n).shape, dtype=np.complex128)
    if spec.startswith("rotation:"):
        arg = spec.split(":", 1)[1]
        theta = math.sqrt(2) - 1 if arg in ("sqrt2-1", "sqrt2m1") else float(arg)
        return lambda n: np.exp(2j * np.pi * np.mod(np.asarray(n, dtype=np.float64) * theta, 1.0))
    raise DomainError(f"cannot parse sequence spec {spec!r}")


def cmd_bsz(args, threads: int) -> int:
    f = _bsz_sequence(args.f)
    table = mobius_sieve(args.n)
    report = bsz_test(f, args.tau, args.m, args.n, table)
    _emit(json.dumps(report, indent=2) + "\n", args.out,
          _provenance({"cmd": "bsz", "tau": args.tau, "m": args.m, "n": args.n,
                       "f": args.f}, threads))
    return 0


def cmd_furstenberg(args, threads: int) -> int:
    sysm = fb.FurstenbergSystem.build(args.tau, args.depth)
    rng = np.random.default_rng(args.seed)
    report = {
        "tau": args.tau,
        "depth": args.depth,
        "metadata": sysm.metadata,
        "quotients": [str(a) for a in sysm.alpha.quotient_seq],
        "q": [str(v) for v in sysm.q],
        "ratios": sysm.ratio_report(),
        "h_coefficients": sysm.h.to_json(),
        "coefficient_check": fb.verify_combined_coefficients(
            sysm, off_support_samples=rng.integers(3, 40, size=8).tolist()),
        "coboundary_residual_G": fb.coboundary_check(sysm, rng.random(64), "G"),
        "coboundary_residual_g": fb.coboundary_check(sysm, rng.random(64), "g"),
        "correction_tails": fb.correction_tail_report(sysm),
    }
    _emit(json.dumps(report, indent=2, default=str) + "\n", args.emit_json,
          _provenance({"cmd": "furstenberg", "tau": args.tau, "depth": args.depth,
                       "seed": args.seed}, threads))
    return 0


def cmd_nilflow(args, threads: int) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    T = flow_from_json(cfg)
    if not isinstance(T, nf.HeisenbergAffine):
        raise DomainError("nilflow expects a heisenberg config")
    x = nf.HeisenbergElement(*[_num(t) for t in cfg.get("x", [0, 0, 0])])
    obs_spec = json.loads(args.observable) if args.observable.startswith("{") else None
    if obs_spec:
        obs = nf.NilObservable.from_json(obs_spec)
    else:
        parts = [int(t) for t in args.observable.split(",")]
        obs = nf.NilObservable.character(*parts)
    checkpoints = _parse_checkpoints(args.checkpoints)
    table = mobius_sieve(checkpoints[-1])
    series = nf.correlate_nil(T, x, obs, table, checkpoints, threads=threads)
    lines = ["N,re,im,abs_over_N"]
    lines.extend(f"{n},{re!r},{im!r},{a!r}" for n, re, im, a in series.rows())
    _emit("\n".join(lines) + "\n", args.out,
          _provenance({"cmd": "nilflow", "config": cfg,
                       "observable": args.observable}, threads))
    return 0


def cmd_verify(args, threads: int) -> int:
    """Numeric checks of the supporting lemmas; any failure exits 5."""
    rng = np.random.default_rng(args.seed)
    results = {}

    # Two convergent series along the expansion of sqrt(2)-1.
    alpha = AlphaSpec.sqrt2_minus_1()
    cf = with_partition(cf_expand(alpha, 24), 8)
    h = AnalyticSeries.geometric(1.0, M=300)
    sums = two_series_partial_sums(cf, h, 1000)
    tail1 = sum(v for q, v in sums["series1"] if q >= 32)
    tail2 = sum(v for q, v in sums["series2"] if q >= 32)
    results["two_series"] = {
        "series1_total": sums["series1_total"],
        "series2_total": sums["series2_total"],
        "tail_from_q32": tail1 + tail2,
        "pass": tail1 + tail2 < 1e-6,
    }

    # Bilinear criterion implication on a rotation sequence.
    table = mobius_sieve(50_000)
    rep = bsz_test(_bsz_sequence("rotation:sqrt2-1"), tau=0.25, M=4000, N=50_000,
                   table=table)
    results["bilinear_criterion"] = {
        "hypothesis_holds": rep["hypothesis_holds"],
        "conclusion_holds": rep["conclusion_holds"],
        "pass": (not rep["hypothesis_holds"]) or rep["conclusion_holds"],
    }

    # Polynomial lower bound on random instances.
    worst = math.inf
    for _ in range(25):
        deg = int(rng.integers(1, 9))
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        coeffs /= max(1.0, np.max(np.abs(coeffs)))
        r = poly_lower_bound_check(coeffs, delta=0.05, samples=4000)
        worst = min(worst, r["min_ratio"])
    results["poly_lower_bound"] = {"min_ratio": worst, "pass": worst >= 1.0}

    # Third-derivative exponential-sum bound on a cubic phase.
    v = vdc_sum_check(lambda x: 1e-6 * x**3, lambda x: 6e-6, Lambda=6e-6, eta=1.0,
                      a=0.0, b=1000.0)
    results["third_derivative_bound"] = {"ratio": v["ratio"], "pass": v["pass"]}

    # Cut-condition right side grows along lacunary scales.
    sysm = fb.FurstenbergSystem.build(1.0, 4)
    cf2 = cf_expand(sysm.alpha, fb._denominators(sysm.alpha).__len__() - 1)
    report = classify_case(cf2, sysm.combined, 10**6, d1=2, b2=1, B=4)
    logs = caseC_condition_rhs_logs(report, sysm.combined, [q for q in sysm.q if q >= 2])
    results["cut_condition_growth"] = {
        "rhs_logs": logs,
        "pass": logs[-1] > logs[-2] > logs[-3]
                and logs[-1] > 3 * math.log(report.d1),
    }

    ok = all(v["pass"] for v in results.values())
    results["all_pass"] = ok
    _emit(json.dumps(results, indent=2) + "\n", args.out,
          _provenance({"cmd": "verify", "seed": args.seed}, threads))
    return 0 if ok else 5


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mobiusflow",
                                 description="Mobius-correlation experiments for "
                                             "zero-entropy torus and nilmanifold flows")
    ap.add_argument("--threads", type=int, default=None,
                    help=f"worker threads (default: ${ENV_THREADS} or 1)")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("sieve", help="emit mu(n) as CSV")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--emit-csv", default="-")
    p.set_defaults(fn=cmd_sieve)

    p = sub.add_parser("cfrac", help="quotients, convergents and flat/sharp split")
    p.add_argument("--alpha", required=True)
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--partition-b", type=int, default=8)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_cfrac)

    p = sub.add_parser("classify", help="scale report and case label")
    p.add_argument("--alpha", required=True)
    p.add_argument("--h", required=True, help="series JSON (inline or path)")
    p.add_argument("--n", type=lambda s: int(float(s)), required=True)
    p.add_argument("--d1", type=int, default=2)
    p.add_argument("--b2", type=int, default=1)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--partition-b", type=int, default=None)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("correlate", help="Mobius correlation sums at checkpoints")
    p.add_argument("--config", required=True)
    p.add_argument("--b", required=True, help="observable, e.g. 0,1")
    p.add_argument("--checkpoints", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_correlate)

    p = sub.add_parser("expsum", help="polynomial-phase Mobius sum")
    p.add_argument("--coeffs", required=True, help="low-to-high, e.g. 0,0.3,0.01")
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--residue", type=int, default=0)
    p.add_argument("--n", type=lambda s: int(float(s)), required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_expsum)

    p = sub.add_parser("bsz", help="bilinear-criterion report")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=lambda s: int(float(s)), required=True)
    p.add_argument("--f", required=True, help="constant | rotation:THETA")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_bsz)

    p = sub.add_parser("furstenberg", help="build and verify the lacunary system")
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit-json", default="-")
    p.set_defaults(fn=cmd_furstenberg)

    p = sub.add_parser("nilflow", help="Heisenberg-orbit correlation sums")
    p.add_argument("--config", required=True)
    p.add_argument("--observable", required=True, help="p,q[,r] or JSON")
    p.add_argument("--checkpoints", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_nilflow)

    p = sub.add_parser("verify", help="run the lemma-check suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv: Optional[list] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command is None:
        ap.print_help()
        return 2
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get(ENV_THREADS, "1"))
    try:
        return args.fn(args, threads)
    except (CapacityError, PrecisionError) as exc:
        print(f"error (capacity/precision): {exc}", file=sys.stderr)
        return 4
    except DomainError as exc:
        print(f"error (domain): {exc}", file=sys.stderr)
        return 3
    except MobiusflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5
    except OSError as exc:
        print(f"error (io): {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
