"""Command-line interface.

Subcommands: lax, conserved, simulate, backlund, canonical, verify.
Exit codes: 0 success, 1 verification failure, 2 bad input or flags.

Points are passed as inline JSON or a path to a JSON file; rationals are
encoded as "p/q" strings, floats as plain numbers.  The environment
variable TODA_BN_SEED provides the default seed for `verify`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from . import backlund as bk
from . import conserved as cv
from . import dynamics as dy
from . import lax as lx
from .errors import TodaError
from .linalg import format_scalar
from .verify import VerifySuiteConfig, run_suite


class CliError(Exception):
    """Bad input reported to the user (exit code 2)."""


def _load_json_arg(arg: str):
    text = arg
    if not arg.lstrip().startswith(("{", "[")):
        try:
            with open(arg, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise CliError(f"cannot read {arg!r}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise CliError(f"malformed JSON: {e}") from e


def _parse_phase_point(arg: str, n_flag: int | None = None) -> lx.PhasePoint:
    obj = _load_json_arg(arg)
    if not isinstance(obj, dict) or not {"n", "z", "Q"} <= set(obj):
        raise CliError('expected a phase point {"n": .., "z": [..], "Q": [..]}')
    try:
        x = lx.PhasePoint.from_json_obj(obj)
    except (TodaError, ValueError, ZeroDivisionError) as e:
        raise CliError(f"bad phase point: {e}") from e
    if n_flag is not None and x.n != n_flag:
        raise CliError(f"--n {n_flag} does not match point rank {x.n}")
    return x


def _emit(payload: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_lax(args) -> int:
    x = _parse_phase_point(args.point, args.n)
    L = lx.build_lax(x)
    rep = lx.gamma_membership(L)
    _emit(_json_dumps({"n": x.n, "L": L.to_json_obj(),
                       "in_gamma": rep.in_gamma}), args.out)
    return 0


def cmd_conserved(args) -> int:
    x = _parse_phase_point(args.point, args.n)
    f = cv.conserved_values(x)
    payload = {"F": [format_scalar(v) for v in f]}
    if x.mode == "exact" and x.n <= cv.MAX_SYMBOLIC_RANK:
        payload["routes_agree"] = (f == cv.conserved_values_by_path(x))
    else:
        payload["routes_agree"] = None
    _emit(_json_dumps(payload), args.out)
    return 0


def _parse_init(arg: str, n_flag: int | None) -> lx.PhasePoint:
    stripped = arg.lstrip()
    if not stripped.startswith(("{", "[")) and not os.path.exists(arg):
        # bare comma list of 2n floats: canonical (q_1..q_n, p_1..p_n)
        try:
            values = [float(v) for v in arg.split(",")]
        except ValueError as e:
            raise CliError(f"cannot parse --init {arg!r}: {e}") from e
        if len(values) % 2:
            raise CliError("canonical list needs an even number of values")
        n = len(values) // 2
        if n_flag is not None and n != n_flag:
            raise CliError(f"--n {n_flag} does not match init of rank {n}")
        return dy.to_phase(dy.CanonicalPoint(tuple(values[:n]), tuple(values[n:])))
    obj = _load_json_arg(arg)
    if isinstance(obj, dict) and {"q", "p"} <= set(obj):
        c = dy.CanonicalPoint(tuple(obj["q"]), tuple(obj["p"]))
        return dy.to_phase(c)
    return _parse_phase_point(arg, n_flag)


def cmd_simulate(args) -> int:
    x0 = _parse_init(args.init, args.n).to_float()
    if args.h <= 0:
        raise CliError("--h must be positive")
    traj = dy.integrate(x0, T=args.T, h=args.h)
    n = x0.n
    header = ["t"] + [f"z_{i + 1}" for i in range(n)] + \
        [f"Q_{i + 1}" for i in range(n)] + ["drift"]
    lines = [",".join(header)]
    for t, s, drift in zip(traj.times, traj.states, traj.drifts):
        row = [repr(t)] + [repr(v) for v in s.z] + [repr(v) for v in s.Q] + [repr(drift)]
        lines.append(",".join(row))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_backlund(args) -> int:
    x = _parse_phase_point(args.point, args.n)
    if args.steps < 0:
        raise CliError("--steps must be >= 0")
    routes = ("map", "conjugate") if args.route == "both" else (args.route,)
    payload = {"route": args.route, "steps": []}
    points = {r: x for r in routes}
    for k in range(args.steps + 1):
        entry = {"step": k}
        for r in routes:
            p = points[r]
            entry[r] = {"point": p.to_json_obj(),
                        "F": [format_scalar(v) for v in cv.conserved_values(p)]}
        if len(routes) == 2:
            entry["routes_agree"] = points["map"] == points["conjugate"]
        payload["steps"].append(entry)
        if k < args.steps:
            for r in routes:
                points[r] = (bk.backlund_map(points[r]) if r == "map"
                             else bk.backlund_conjugate(points[r]))
    _emit(_json_dumps(payload), args.out)
    return 0


def cmd_canonical(args) -> int:
    obj = _load_json_arg(args.point)
    if isinstance(obj, dict) and {"q", "p"} <= set(obj):
        c = dy.CanonicalPoint(tuple(obj["q"]), tuple(obj["p"]))
        x = dy.to_phase(c)
        payload = {"point": x.to_json_obj(),
                   "H_phase": dy.hamiltonian(x),
                   "H_canonical": dy.hamiltonian_canonical(c)}
    elif isinstance(obj, dict) and {"n", "z", "Q"} <= set(obj):
        x = lx.PhasePoint.from_json_obj(obj)
        c = dy.from_phase(x)
        payload = {"q": list(c.q), "p": list(c.p),
                   "H_phase": float(dy.hamiltonian(x)),
                   "H_canonical": dy.hamiltonian_canonical(c)}
    else:
        raise CliError('expected {"q": [..], "p": [..]} or a phase point')
    _emit(_json_dumps(payload), args.out)
    return 0


def cmd_verify(args) -> int:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("TODA_BN_SEED", "7"))
    cfg = VerifySuiteConfig(n_max=args.n_max, trials=args.trials,
                            seed=seed, mode=args.mode)
    results = run_suite(cfg)
    ok = all(r.passed for r in results)
    lines = [json.dumps(r.to_json_obj()) for r in results]
    lines.append(json.dumps({
        "overall": "pass" if ok else "fail",
        "seed": seed, "n_max": cfg.n_max, "trials": cfg.trials, "mode": cfg.mode,
        "identities": len(results),
        "failed": [r.name for r in results if not r.passed],
    }))
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="toda-bn",
        description="Type-Bn relativistic Toda chain: Lax matrices, conserved "
                    "quantities, flows, Backlund maps, and a dual-route "
                    "verification suite.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_point(p, init=False):
        if init:
            p.add_argument("--init", required=True,
                           help="phase point JSON, canonical {q,p} JSON, "
                                "a file with either, or a bare comma list "
                                "q_1..q_n,p_1..p_n")
        else:
            p.add_argument("--point", required=True,
                           help="inline JSON or path to a JSON file")
        p.add_argument("--n", type=int, default=None, help="expected rank (checked)")
        p.add_argument("--out", default=None, help="write output to this file")

    p = sub.add_parser("lax", help="build the Lax matrix at a point")
    add_point(p)
    p.set_defaults(fn=cmd_lax)

    p = sub.add_parser("conserved", help="conserved quantities F_0..F_2n at a point")
    add_point(p)
    p.set_defaults(fn=cmd_conserved)

    p = sub.add_parser("simulate", help="integrate the flow with fixed-step RK4")
    add_point(p, init=True)
    p.add_argument("--T", type=float, required=True, help="final time")
    p.add_argument("--h", type=float, default=1e-3, help="step size")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("backlund", help="iterate the discrete-time map")
    add_point(p)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--route", choices=("map", "conjugate", "both"), default="map")
    p.set_defaults(fn=cmd_backlund)

    p = sub.add_parser("canonical", help="convert between canonical and phase coordinates")
    add_point(p)
    p.set_defaults(fn=cmd_canonical)

    p = sub.add_parser("verify", help="run the randomized identity suite")
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: TODA_BN_SEED or 7)")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--mode", choices=("rational", "float", "both"), default="both")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TodaError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
