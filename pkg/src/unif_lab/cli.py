"""Batch command-line front end.

Every subcommand is a pure function of its flags: fixed flags and seed give
byte-identical output, and --threads resizes worker pools without touching
any reported number (chunking is fixed, reduction order is fixed).  Timing
lines (bench) go to stderr so stdout stays reproducible.

Exit codes: 0 success, 2 usage error, 3 numeric-contract violation
(e.g. a box average more negative than truncation noise), 4 a `verify`
suite found a violated inequality.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import duality, ergodic_weights, generators, nilmanifold, uniformity
from .errors import (GeneratorSpecError, NegativityViolation,
                     SupBoundViolation, UnifLabError)
from .seq_core import INTERVAL, DomainMode, IntervalSpec, cyclic
from .uniformity import BoxParams, NormReport

USAGE_EXIT = 2
CONTRACT_EXIT = 3
VERIFY_EXIT = 4


# ---------------------------------------------------------------------------
# Argument helpers
# ---------------------------------------------------------------------------

def _parse_range(text: str) -> IntervalSpec:
    """'lo:hi' -> IntervalSpec(lo, hi - lo)."""
    try:
        lo_s, hi_s = text.split(":")
        lo, hi = int(lo_s), int(hi_s)
    except ValueError:
        raise GeneratorSpecError(f"bad range {text!r}, expected lo:hi") from None
    if hi <= lo:
        raise GeneratorSpecError(f"empty range {text!r}")
    return IntervalSpec(lo, hi - lo)


def _parse_grid(text: str) -> List[float]:
    """'lo:hi:steps' -> evenly spaced floats; or 'a,b,c' explicit."""
    if ":" in text:
        try:
            lo_s, hi_s, n_s = text.split(":")
            lo, hi, n = float(lo_s), float(hi_s), int(n_s)
        except ValueError:
            raise GeneratorSpecError(
                f"bad grid {text!r}, expected lo:hi:steps") from None
        if n < 1:
            raise GeneratorSpecError("grid needs at least one step")
        return [lo + (hi - lo) * i / max(n - 1, 1) for i in range(n)]
    return [float(s) for s in text.split(",") if s]


def _mode_from_args(args) -> DomainMode:
    if args.mode == "cyclic":
        if args.N is None:
            raise GeneratorSpecError("cyclic mode needs --N")
        return cyclic(args.N)
    return INTERVAL


def _box_params(args) -> BoxParams:
    mode = _mode_from_args(args)
    if mode.is_cyclic:
        n = mode.modulus
        lo = args.lo if args.lo is not None else 0
        length = args.len if args.len is not None else n
        h = args.H if args.H is not None else n
        return BoxParams(args.k, h, IntervalSpec(lo, length), mode)
    if args.len is None:
        raise GeneratorSpecError("interval mode needs --len")
    if args.H is None:
        raise GeneratorSpecError("interval mode needs --H")
    return BoxParams(args.k, args.H, IntervalSpec(args.lo or 0, args.len),
                     INTERVAL)


def _fmt(x: float) -> str:
    return repr(float(x))


def _norm_json(op: str, params: Dict, rep: NormReport) -> Dict:
    mode = rep.params.mode
    return {
        "op": op,
        "params": params,
        "value": rep.value,
        "powered": rep.powered,
        "diagnostics": {
            "h_tail": rep.h_tail,
            "mode": mode.describe(),
            "N": mode.modulus,
            "H": rep.params.H,
        },
    }


def _emit(args, text: str) -> None:
    data = text if text.endswith("\n") else text + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data)


def _emit_json(args, obj) -> None:
    _emit(args, json.dumps(obj))


def _csv_lines(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(c) for c in row))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_norm(args) -> int:
    a = generators.parse_generator(args.gen)
    p = _box_params(args)
    rep = uniformity.box_norm(a, p, path=args.path)
    params = {"gen": args.gen, "k": p.k, "H": p.H, "lo": p.interval.lo,
              "len": p.interval.length, "path": args.path}
    _emit_json(args, _norm_json("norm", params, rep))
    return 0


def _cmd_unorm(args) -> int:
    a = generators.parse_generator(args.gen)
    rng = _parse_range(args.range)
    rep = uniformity.uniformity_norm_proxy(
        a, rng, args.window, args.stride, args.k,
        args.H if args.H is not None else args.window,
        per_window=args.per_window)
    params = {"gen": args.gen, "range": args.range, "window": args.window,
              "stride": args.stride, "k": args.k,
              "per_window": args.per_window,
              "argmax_lo": rep.params.interval.lo}
    _emit_json(args, _norm_json("unorm", params, rep))
    return 0


def _cmd_gen(args) -> int:
    a = generators.parse_generator(args.gen)
    rng = _parse_range(args.range)
    vals = a.sample(rng.lo, rng.hi)
    if args.json:
        obj = {"op": "gen", "params": {"gen": args.gen, "range": args.range},
               "values": [[float(v.real), float(v.imag)] for v in vals]}
        _emit_json(args, obj)
    else:
        rows = ((n, _fmt(v.real), _fmt(v.imag))
                for n, v in zip(range(rng.lo, rng.hi), vals))
        _emit(args, _csv_lines(("n", "re", "im"), rows))
    return 0


def _cmd_dual(args) -> int:
    if args.trig:
        poly = generators.parse_trig_terms(args.trig)
        obj = {"op": "dual", "params": {"trig": args.trig},
               "hk2": duality.hk_norm_k2(poly),
               "dual2": duality.dual_norm_k2(poly)}
        _emit_json(args, obj)
        return 0
    if not args.gen or args.N is None:
        raise GeneratorSpecError("dual needs --trig or (--gen and --N)")
    a = generators.parse_generator(args.gen)
    rep = duality.dft_coefficients(a, args.N)
    if args.csv:
        rows = []
        for j, (_, coef) in enumerate(rep.coefficients.terms):
            rows.append((j, _fmt(coef.real), _fmt(coef.imag), _fmt(abs(coef))))
        _emit(args, _csv_lines(("bin", "re", "im", "magnitude"), rows))
    else:
        obj = {"op": "dual", "params": {"gen": args.gen, "N": args.N},
               "hk2": rep.hk2, "dual2": rep.dual2}
        _emit_json(args, obj)
    return 0


def _cmd_dualfn(args) -> int:
    a = generators.parse_generator(args.gen)
    p = _box_params(args)
    d = duality.dual_function(a, p)
    vals = d.sample(p.interval.lo, p.interval.hi)
    rows = ((n, _fmt(v.real), _fmt(v.imag))
            for n, v in zip(range(p.interval.lo, p.interval.hi), vals))
    _emit(args, _csv_lines(("n", "re", "im"), rows))
    return 0


def _cmd_search(args) -> int:
    a = generators.parse_generator(args.gen)
    grid = _parse_grid(args.grid) if args.grid else None
    hits = duality.inverse_search(a, args.N, kind=args.dict, grid=grid,
                                  top=args.top)
    obj = {"op": "search",
           "params": {"gen": args.gen, "N": args.N, "dict": args.dict,
                      "grid": args.grid or "", "top": args.top},
           "hits": [{"spec": spec, "corr": corr} for spec, corr in hits]}
    _emit_json(args, obj)
    return 0


def _parse_system(text: str) -> ergodic_weights.DynSystem:
    kind, _, rest = text.partition(":")
    if kind == "rot":
        return ergodic_weights.rotation(float(rest))
    if kind == "skew":
        return ergodic_weights.skew(float(rest))
    if kind == "heis":
        parts = [float(p) for p in rest.split(",")]
        if len(parts) != 3:
            raise GeneratorSpecError("heis system needs tau as a,b,c")
        return ergodic_weights.heis_system(nilmanifold.HeisElem(*parts))
    raise GeneratorSpecError(f"unknown system {text!r}")


def _parse_x0(sys_: ergodic_weights.DynSystem, text: Optional[str]):
    if sys_.kind == "rotation":
        return float(text) if text else 0.0
    if sys_.kind == "skew":
        if not text:
            return (0.0, 0.0)
        parts = [float(p) for p in text.split(",")]
        return (parts[0], parts[1])
    if not text:
        return nilmanifold.IDENTITY_POINT
    parts = [float(p) % 1.0 for p in text.split(",")]
    return nilmanifold.HeisPoint(*parts)


def _cmd_weighted(args) -> int:
    w = generators.parse_generator(args.w)
    sys_ = _parse_system(args.system)
    fs = [ergodic_weights.named_observable(sys_, name)
          for name in args.obs.split(",") if name]
    x0 = _parse_x0(sys_, args.x0)
    params = {"w": args.w, "system": args.system, "obs": args.obs,
              "x0": args.x0 or ""}
    if args.grid:
        ns = [int(v) for v in args.grid.split(",")]
        rep = ergodic_weights.cauchy_scan(w, sys_, fs, x0, ns,
                                          threshold=args.threshold)
        obj = {"op": "weighted", "params": {**params, "grid": args.grid},
               "values": [[v.real, v.imag] for v in rep.values],
               "deltas": list(rep.deltas),
               "converged": rep.converged,
               "threshold": rep.threshold}
        _emit_json(args, obj)
        return 0
    if args.N is None:
        raise GeneratorSpecError("weighted needs --N or --grid")
    val = ergodic_weights.weighted_multiple_average(w, sys_, fs, x0, args.N)
    obj = {"op": "weighted", "params": {**params, "N": args.N},
           "value": [val.real, val.imag], "abs": abs(val)}
    _emit_json(args, obj)
    return 0


def _cmd_ww(args) -> int:
    phi = generators.parse_generator(args.gen)
    freqs, mags = ergodic_weights.wiener_wintner_scan(phi, args.N)
    rows = ((_fmt(t), _fmt(m)) for t, m in zip(freqs, mags))
    _emit(args, _csv_lines(("t_bin", "magnitude"), rows))
    return 0


def _cmd_heis(args) -> int:
    tau_vals = [float(v) for v in args.tau.split(",")]
    if len(tau_vals) != 3:
        raise GeneratorSpecError("--tau needs three components a,b,c")
    tau = nilmanifold.HeisElem(*tau_vals)
    if args.x0:
        parts = [float(v) % 1.0 for v in args.x0.split(",")]
        x0 = nilmanifold.HeisPoint(*parts)
    else:
        x0 = nilmanifold.IDENTITY_POINT
    f = nilmanifold.named_character(args.f)
    rng = _parse_range(args.range)
    seq = nilmanifold.nilsequence(tau, x0, f, rng)
    ns = np.arange(rng.lo, rng.hi, dtype=np.int64)
    vals = seq.eval(ns)
    if args.check_closed_form:
        if not (tau.y == 1.0 and tau.z == 0.0 and x0 == nilmanifold.IDENTITY_POINT
                and args.f == "ez"):
            raise GeneratorSpecError(
                "--check-closed-form needs tau=(alpha,1,0), identity x0, f=ez")
        alpha = tau.x
        phases = (-(ns * (ns + 1) // 2).astype(np.float64) * alpha) % 1.0
        ref = np.exp(2j * np.pi * phases)
        dev = float(np.max(np.abs(vals - ref)))
        obj = {"op": "heis-check",
               "params": {"tau": args.tau, "f": args.f, "range": args.range},
               "max_abs_dev": dev, "ok": dev <= 1e-6}
        _emit_json(args, obj)
        return 0
    rows = ((n, _fmt(v.real), _fmt(v.imag)) for n, v in zip(ns, vals))
    _emit(args, _csv_lines(("n", "re", "im"), rows))
    return 0


# --- verify ---------------------------------------------------------------

_SUITES: Dict[str, Callable[..., uniformity.SuiteReport]] = {
    "vdc": uniformity.run_vdc_suite,
    "csg": uniformity.run_csg_suite,
    "subadd": uniformity.run_subadditivity_suite,
    "mono": uniformity.run_monotonicity_suite,
    "recur": uniformity.run_recursion_suite,
    "pairing": duality.run_pairing_suite,
    "direct": duality.run_direct_bound_suite,
}

_CHUNK = 24  # fixed chunk size so results never depend on --threads


def _suite_kwargs(args) -> Dict:
    """Map verify flags onto each suite's parameters (defaults per suite)."""
    name = args.suite
    kw: Dict = {}
    if name == "vdc":
        kw["length"] = args.len if args.len is not None else 8192
        kw["h"] = args.H if args.H is not None else 64
    elif name in ("csg", "subadd", "mono", "recur", "pairing"):
        kw["n"] = args.N if args.N is not None else 1024
        kw["h"] = args.H if args.H is not None else 32
        if name == "pairing" and args.k is not None:
            kw["k"] = args.k
    elif name == "direct":
        kw["n"] = args.N if args.N is not None else 4096
    return kw


def _run_suite(name: str, trials: int, seed: int, threads: int,
               kwargs: Dict) -> uniformity.SuiteReport:
    fn = _SUITES[name]
    if threads <= 1 or trials <= _CHUNK:
        return fn(trials, seed=seed, **kwargs)
    chunks = [(i, min(_CHUNK, trials - i)) for i in range(0, trials, _CHUNK)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(
            lambda c: fn(c[1], seed=seed + c[0], **kwargs), chunks))
    violations = sum(p.violations for p in parts)
    worst = max(p.worst_slack for p in parts)
    return uniformity.SuiteReport(name, trials, violations, worst)


def _cmd_verify(args) -> int:
    seed = args.seed
    if args.gen:
        # `--gen rad:SEED` re-bases the driving sign sequences on SEED
        if not args.gen.startswith("rad:"):
            raise GeneratorSpecError(
                "verify draws its own seeded corpus; only rad:SEED is "
                "accepted as a --gen override")
        seed = int(args.gen.split(":", 1)[1])
    kwargs = _suite_kwargs(args)
    rep = _run_suite(args.suite, args.trials, seed, args.threads, kwargs)
    obj = {"op": "verify", "params": {"suite": args.suite,
                                      "trials": args.trials,
                                      "seed": seed, **kwargs},
           "violations": rep.violations, "worst_slack": rep.worst_slack,
           "ok": rep.ok}
    _emit_json(args, obj)
    return 0 if rep.ok else VERIFY_EXIT


# --- bench ----------------------------------------------------------------

def run_bench(n: int, h: int, k: int = 2, seed: int = 0) -> Dict:
    """Direct vs FFT box-norm timing at k = 2, cyclic.

    Returns values, their difference, and wall times; timings land on stderr
    in the CLI so stdout stays byte-reproducible.
    """
    if k != 2:
        raise ValueError("bench compares the k=2 paths")
    a = generators.rademacher_seq(seed)
    p = BoxParams(2, h, IntervalSpec(0, n), cyclic(n))
    t0 = time.perf_counter()
    direct = uniformity.box_norm(a, p, path="direct", with_tail=False)
    t1 = time.perf_counter()
    fft = uniformity.box_norm(a, p, path="fft", with_tail=False)
    t2 = time.perf_counter()
    diff = abs(direct.value - fft.value)
    return {
        "N": n, "H": h, "k": k, "seed": seed,
        "direct_value": direct.value, "fft_value": fft.value,
        "max_abs_diff": diff, "agree_1e9": diff <= 1e-9,
        "direct_seconds": t1 - t0, "fft_seconds": t2 - t1,
        "speedup": (t1 - t0) / max(t2 - t1, 1e-12),
    }


def _cmd_bench(args) -> int:
    res = run_bench(args.N, args.H, args.k, args.seed)
    sys.stderr.write(
        f"direct: {res['direct_seconds']:.3f}s  fft: {res['fft_seconds']:.3f}s"
        f"  speedup: {res['speedup']:.1f}x\n")
    obj = {"op": "bench",
           "params": {"N": res["N"], "H": res["H"], "k": res["k"],
                      "seed": res["seed"]},
           "direct_value": res["direct_value"],
           "fft_value": res["fft_value"],
           "max_abs_diff": res["max_abs_diff"],
           "agree_1e9": res["agree_1e9"]}
    _emit_json(args, obj)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(sp, *names) -> None:
    if "gen" in names:
        sp.add_argument("--gen", required=True, help="generator spec string")
    if "box" in names:
        sp.add_argument("--k", type=int, default=2)
        sp.add_argument("--H", type=int, default=None)
        sp.add_argument("--N", type=int, default=None)
        sp.add_argument("--mode", choices=("interval", "cyclic"),
                        default="cyclic")
        sp.add_argument("--lo", type=int, default=None)
        sp.add_argument("--len", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--out", default=None, help="write output to a file")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--csv", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="unif-lab",
        description="Finite-truncation uniformity norms on bounded sequences")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("norm", help="box norm of a generated sequence")
    _add_common(sp, "gen", "box")
    sp.add_argument("--path", default="auto",
                    choices=("auto", "fast", "direct", "fft", "spectral"))
    sp.set_defaults(fn=_cmd_norm)

    sp = sub.add_parser("unorm", help="sliding-window uniformity-norm proxy")
    _add_common(sp, "gen")
    sp.add_argument("--range", required=True, help="search range lo:hi")
    sp.add_argument("--window", type=int, required=True)
    sp.add_argument("--stride", type=int, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--H", type=int, default=None)
    sp.add_argument("--per-window", dest="per_window",
                    choices=("cyclic", "interval"), default="cyclic")
    sp.set_defaults(fn=_cmd_unorm)

    sp = sub.add_parser("gen", help="dump sequence samples")
    _add_common(sp, "gen")
    sp.add_argument("--range", required=True, help="lo:hi")
    sp.set_defaults(fn=_cmd_gen)

    sp = sub.add_parser("dual", help="k=2 spectrum / dual-norm calculus")
    _add_common(sp)
    sp.add_argument("--gen", default=None)
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--trig", default=None,
                    help="closed-form norms of a trig polynomial")
    sp.set_defaults(fn=_cmd_dual)

    sp = sub.add_parser("dualfn", help="dual function samples as CSV")
    _add_common(sp, "gen", "box")
    sp.set_defaults(fn=_cmd_dualfn)

    sp = sub.add_parser("search", help="empirical correlation search")
    _add_common(sp, "gen")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--dict", choices=("fourier", "quad", "heis"),
                    default="fourier")
    sp.add_argument("--grid", default=None, help="lo:hi:steps or a,b,c")
    sp.add_argument("--top", type=int, default=10)
    sp.set_defaults(fn=_cmd_search)

    sp = sub.add_parser("weighted", help="weighted multiple ergodic average")
    _add_common(sp)
    sp.add_argument("--w", required=True, help="weight generator spec")
    sp.add_argument("--system", required=True, help="rot:a | skew:a | heis:a,b,c")
    sp.add_argument("--obs", required=True, help="comma list, e.g. ex,ex")
    sp.add_argument("--x0", default=None)
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--grid", default=None, help="comma list of N values")
    sp.add_argument("--threshold", type=float, default=0.01)
    sp.set_defaults(fn=_cmd_weighted)

    sp = sub.add_parser("ww", help="Wiener-Wintner frequency scan (CSV)")
    _add_common(sp, "gen")
    sp.add_argument("--N", type=int, required=True)
    sp.set_defaults(fn=_cmd_ww)

    sp = sub.add_parser("heis", help="Heisenberg nilsequence tools")
    _add_common(sp)
    sp.add_argument("--tau", required=True, help="a,b,c")
    sp.add_argument("--x0", default=None, help="x,y,z")
    sp.add_argument("--f", default="ez")
    sp.add_argument("--range", required=True, help="lo:hi")
    sp.add_argument("--check-closed-form", dest="check_closed_form",
                    action="store_true")
    sp.set_defaults(fn=_cmd_heis)

    sp = sub.add_parser("verify", help="seeded inequality suites (exit 4 on violation)")
    sp.add_argument("suite", choices=sorted(_SUITES))
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--gen", default=None, help="rad:SEED seed override")
    sp.add_argument("--len", type=int, default=None)
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--H", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    _add_common(sp)
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("bench", help="direct vs FFT timing (timings on stderr)")
    _add_common(sp)
    sp.add_argument("--N", type=int, default=1 << 16)
    sp.add_argument("--H", type=int, default=256)
    sp.add_argument("--k", type=int, default=2)
    sp.set_defaults(fn=_cmd_bench)

    return ap


# flags whose values may begin with '-' (ranges, coordinates); merged to
# --flag=value so argparse does not mistake the value for an option
_DASH_VALUE_FLAGS = {"--range", "--tau", "--x0", "--lo", "--grid"}


def _normalize_argv(argv: Sequence[str]) -> List[str]:
    out: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _DASH_VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_normalize_argv(list(argv)))
    try:
        return args.fn(args)
    except (NegativityViolation, SupBoundViolation) as exc:
        sys.stderr.write(f"numeric contract violation: {exc}\n")
        return CONTRACT_EXIT
    except UnifLabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT


def main(argv: Optional[Sequence[str]] = None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
