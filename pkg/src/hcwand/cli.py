"""Command line: ``hcwand {solve,scan,curve,verify,simulate}``.

Exit status: 0 success, 1 usage error, 2 verification failure, 3 simulation
divergence.  ``--config FILE`` reads ``key=value`` lines (keys are long flag
names without dashes); flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import bipartite, exact, scan, ti, treesim
from .model import BIPARTITE, ActivityProfile, PeriodicBoundaryLaw, build_reduced_system

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_DIVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _param(args) -> float | None:
    if args.mode == "ti-q4":
        return args.lambda2
    if args.mode in ("bip-q4-I3", "bip-q4-I4"):
        return args.gamma
    return None


def _config(args, keys) -> dict:
    # "lam" is stored under the flag name "lambda"
    return {("lambda" if key == "lam" else key): getattr(args, key.replace("-", "_")) for key in keys}


# -- solve -----------------------------------------------------------------


def _descriptors(mode: str, values, param) -> dict:
    if mode == "ti-q2":
        return {"law": list(ti.assemble_ti_vector(values, 2).values)}
    if mode == "ti-q4":
        return {"law": list(ti.assemble_ti_vector(values, 4, param).values)}
    if mode == "bip-q2":
        a, c = values
        return {"even": [1.0, a], "odd": [1.0, c]}
    a, c = values
    return {"even": [1.0, a, param, a], "odd": [1.0, c, param, c]}


def cmd_solve(args) -> int:
    if args.k is None or args.lam is None:
        raise UsageError("solve needs --k and --lambda")
    param = _param(args)
    sols = scan.solve_point(args.mode, args.k, args.lam, param)
    items = [
        {"values": list(v), "residual": r, **_descriptors(args.mode, v, param)}
        for v, r in zip(sols.solutions, sols.residuals)
    ]
    report = {
        "config": _config(args, ("mode", "k", "lam", "lambda2", "gamma")),
        "lambda_cr": sols.lambda_cr,
        "regime": sols.regime,
        "count": sols.count,
        "central_derivative": sols.central_derivative,
        "non_normalisable": True,
        "solutions": items,
    }
    if args.format == "csv":
        rows = [
            (i, sols.regime, ";".join(map(repr, it["values"])), it["residual"], sols.lambda_cr)
            for i, it in enumerate(items)
        ]
        _write(_csv(("index", "regime", "values", "residual", "lambda_cr"), rows), args.out)
    else:
        _write(_json(report), args.out)
    return EXIT_OK


# -- scan ------------------------------------------------------------------


def scan_report(result: scan.ScanResult, config: dict) -> dict:
    return {
        "config": config,
        "rows": [r.as_dict() for r in result.rows],
        "critical": result.critical.as_dict(),
    }


def cmd_scan(args) -> int:
    if None in (args.k, args.lambda_min, args.lambda_max):
        raise UsageError("scan needs --k, --lambda-min and --lambda-max")
    result = scan.scan(args.mode, args.k, args.lambda_min, args.lambda_max, args.steps, _param(args))
    config = _config(args, ("mode", "k", "lambda-min", "lambda-max", "steps", "lambda2", "gamma"))
    if args.format == "csv":
        text = _csv(scan.CSV_FIELDS, [[r.as_dict()[f] for f in scan.CSV_FIELDS] for r in result.rows])
        _write(text, args.out)
        c = result.critical
        if c.closed_form is not None:
            sys.stderr.write(f"critical: closed_form={c.closed_form!r} empirical={c.empirical!r} rel_err={c.rel_err!r}\n")
    else:
        _write(_json(scan_report(result, config)), args.out)
    return EXIT_OK


# -- curve -----------------------------------------------------------------


def cmd_curve(args) -> int:
    if args.k is None or args.lambda2 is None:
        raise UsageError("curve needs --k and --lambda2")
    res = scan.lambda_curve(args.k, args.lambda2, args.t_max, args.steps)
    rows = [(p.t, p.lam, p.a, p.c) for p in res.points]
    if args.format == "csv":
        _write(_csv(("t", "lambda", "a", "c"), rows), args.out)
    else:
        _write(
            _json(
                {
                    "config": _config(args, ("k", "lambda2", "t-max", "steps")),
                    "rows": [dict(zip(("t", "lambda", "a", "c"), r)) for r in rows],
                    "minimum": {"t": res.t_min, "lambda": res.lam_min, "closed_form": res.lam_min_closed},
                }
            ),
            args.out,
        )
    return EXIT_OK


# -- verify ----------------------------------------------------------------


def cmd_verify(args) -> int:
    if args.k_min < 2 or args.k_max < args.k_min:
        raise UsageError(f"bad k range {args.k_min}..{args.k_max}")
    results = exact.verify_all(args.k_max, args.k_min)
    rows = [(r.k, r.name, "pass" if r.passed else "FAIL", r.detail) for r in results]
    if args.format == "json":
        text = _json({"config": {"k_min": args.k_min, "k_max": args.k_max},
                      "checks": [dict(zip(("k", "check", "status", "detail"), r)) for r in rows]})
    else:
        text = _csv(("k", "check", "status", "detail"), rows)
    _write(text, args.out)
    failed = [r for r in results if not r.passed]
    sys.stderr.write(f"verify k={args.k_min}..{args.k_max}: {len(results) - len(failed)}/{len(results)} checks pass\n")
    return EXIT_VERIFY if failed else EXIT_OK


# -- simulate --------------------------------------------------------------


def simulation_targets(mode: str, k: int, lam: float, param: float | None):
    """``(name, root-level law, next-level law)`` candidates and the activities."""
    if mode in ("ti-q2", "bip-q2"):
        acts = ActivityProfile.q2(lam)
        s = bipartite.solve_bip_q2(k, lam)
        laws = {"ti": ((1.0, s.solutions[0][0]),) * 2}
        if s.count == 3:
            (a1, a2) = s.solutions[1]
            laws["cycle"] = ((1.0, a1), (1.0, a2))
            laws["cycle-swapped"] = ((1.0, a2), (1.0, a1))
    else:
        acts = ActivityProfile.q4(lam, param)
        t4 = ti.enumerate_ti_q4(k, lam, param)
        laws = {}
        for i, (a, c) in enumerate(t4.solutions):
            name = "ti" if i == 0 else f"ti-offdiagonal-{i}"
            laws[name] = ((1.0, a, param, c),) * 2
        i4 = bipartite.solve_bip_q4_I4(k, lam, param)
        if i4.count == 3:
            a1, a2 = i4.solutions[1]
            laws["cycle"] = ((1.0, a1, param, a1), (1.0, a2, param, a2))
            laws["cycle-swapped"] = ((1.0, a2, param, a2), (1.0, a1, param, a1))
    targets = [(n, PeriodicBoundaryLaw(u), PeriodicBoundaryLaw(v)) for n, (u, v) in laws.items()]
    return acts, targets


def simulate(
    mode: str,
    k: int,
    lam: float,
    param: float | None,
    depth: int,
    M: int,
    boundary: str,
    seed: int,
    clip: float = treesim.DEFAULT_CLIP,
) -> dict:
    acts, targets = simulation_targets(mode, k, lam, param)
    ti_target = targets[0][1]
    rec = treesim.run(k, depth, M, acts, boundary, ti_target, seed, clip)
    root, child = rec.level_pair()
    r = rec.radius(depth)
    best = None
    for name, u, v in targets:
        dev = max(
            treesim.deviation(treesim.TruncatedLaw(root), u, r),
            treesim.deviation(treesim.TruncatedLaw(child), v, r),
        )
        if best is None or dev < best[1]:
            best = (name, dev)
    q = acts.period
    z = root[r : r + q]
    zt = child[r : r + q]
    system = build_reduced_system(k, q, acts, BIPARTITE)
    res18 = float(np.max(np.abs(system.residual(np.concatenate((z[1:], zt[1:]))))))
    return {
        "metrics": rec.metrics,
        "clipped": rec.clipped,
        "edge_clips": rec.edge_clips,
        "root_period": list(map(float, z)),
        "next_period": list(map(float, zt)),
        "nearest_target": best[0],
        "target_deviation": best[1],
        "pair_residual": res18,
        "converged": best[1] < treesim.CONVERGED,
    }


def cmd_simulate(args) -> int:
    if args.k is None or args.lam is None:
        raise UsageError("simulate needs --k and --lambda")
    report = simulate(
        args.mode, args.k, args.lam, _param(args), args.depth, args.truncate, args.boundary, args.seed, args.clip
    )
    report = {"config": _config(args, ("mode", "k", "lam", "lambda2", "gamma", "depth", "truncate", "boundary", "seed", "clip")), **report}
    if args.format == "csv":
        rows = [(i, m) for i, m in enumerate(report["metrics"])]
        _write(_csv(("level", "metric"), rows), args.out)
    else:
        _write(_json(report), args.out)
    if report["clipped"]:
        sys.stderr.write("simulation diverged: entries left the clip range\n")
        return EXIT_DIVERGED
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hcwand", description="Periodic boundary laws of the hard-core wand model on Cayley trees.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, point=True):
        p.add_argument("--config", help="key=value file supplying any flag")
        p.add_argument("--mode", choices=scan.MODES, default="ti-q2")
        p.add_argument("--k", type=int)
        if point:
            p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--lambda2", type=float)
        p.add_argument("--gamma", type=float)
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"), default="json")

    common(sub.add_parser("solve", help="all solutions at one parameter point"))
    p = sub.add_parser("scan", help="solution counts over a lambda range")
    common(p, point=False)
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--steps", type=int, default=201)

    p = sub.add_parser("curve", help="lambda(t) table for the q=4 TI problem")
    common(p, point=False)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=401)

    p = sub.add_parser("verify", help="exact polynomial and binomial checks")
    p.add_argument("--config")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=12)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("simulate", help="finite-depth tree recursion")
    common(p)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--truncate", type=int, default=treesim.DEFAULT_TRUNCATE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--boundary", choices=treesim.BOUNDARIES, default="perturbed")
    p.add_argument("--clip", type=float, default=treesim.DEFAULT_CLIP, help="overflow guard bound")
    return parser


def _config_tokens(path: str) -> list[str]:
    tokens = []
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        tokens += [f"--{key}", value]
    return tokens


def _expand_config(argv: list[str]) -> list[str]:
    if not argv or "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    path = None
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif a.startswith("--config="):
            path = a.split("=", 1)[1]
    if path is None:
        raise UsageError("--config needs a file")
    return [argv[0], *_config_tokens(path), *argv[1:]]


COMMANDS = {
    "solve": cmd_solve,
    "scan": cmd_scan,
    "curve": cmd_curve,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_expand_config(argv))
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
