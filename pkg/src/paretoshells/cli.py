"""Command-line entry point.

Exit codes: 0 success, 2 a validator or certificate failed (details in the
JSON report), 1 usage or I/O error.  Every run writes ``run.json`` (the
resolved options) and ``run.args`` (one argument per line) to its output
directory; ``paretoshells @DIR/run.args`` repeats the run.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .csvio import read_points, write_points
from .errors import HypothesisError, ParetoShellError, PreconditionError
from .invariance import (
    ObjectivePair,
    check_invariance,
    dominance_agreement,
    geud_pair,
    same_linear_order_probe,
    time_geud,
)
from .monotone import ShiftSchedule, construct_upper_shell_budget, probe_problem, shift_candidates
from .oracle import grid_enumerate, no_upper_shell_certificate
from .problem import ProblemSpec, RelaxationDescriptor, load_problem
from .problems import bundled_names, load_bundled
from .relaxation import DEFAULT_RELAXATION, run_two_sided
from .sampler import SamplerConfig, run_sampler
from .shells import check_lower_shell, check_upper_approximation, check_upper_shell_oracle

OUT_ENV = "PARETOSHELLS_OUT"
EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _dump(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def load_problem_arg(value: str) -> ProblemSpec:
    """A path to a JSON document, or the name of a bundled problem."""
    path = Path(value)
    if path.is_file():
        return load_problem(path)
    name = path.stem if path.suffix == ".json" else value
    if name in bundled_names():
        return load_bundled(name)
    raise UsageError(f"no such problem file or bundled problem: {value!r} (bundled: {', '.join(bundled_names())})")


def parse_relax_box(text: str):
    """``"lo:hi"`` (every dimension), ``"lo:hi,lo:hi"``, ``"1.5"``, ``"1.5@lower"`` or ``"none"``."""
    text = text.strip()
    if text.lower() == "none":
        return {}
    if ":" in text:
        try:
            box = tuple(tuple(float(v) for v in part.split(":")) for part in text.split(","))
        except ValueError:
            raise UsageError(f"bad --relax-box {text!r}") from None
        if any(len(iv) != 2 for iv in box):
            raise UsageError(f"bad --relax-box {text!r}")
        return {"box": box}
    scale, _, anchor = text.partition("@")
    try:
        return {"box_scale": float(scale), "box_anchor": anchor or "center"}
    except ValueError:
        raise UsageError(f"bad --relax-box {text!r}") from None


def relaxation_from_args(args, default: RelaxationDescriptor = DEFAULT_RELAXATION) -> RelaxationDescriptor:
    if args.relax_box is None and args.relax_constraints is None:
        return default
    kw = {}
    box = args.relax_box if args.relax_box is not None else _box_default_text(default)
    kw.update(parse_relax_box(box))
    rho = args.relax_constraints if args.relax_constraints is not None else default.constraint_scale
    if rho is not None:
        kw["constraint_scale"] = rho
    return RelaxationDescriptor(**kw)


def _box_default_text(r: RelaxationDescriptor) -> str:
    if r.box is not None:
        return ",".join(f"{lo}:{hi}" for lo, hi in r.box)
    if r.box_scale is not None:
        return f"{r.box_scale}@{r.box_anchor}"
    return "none"


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUT_ENV) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _expand(argv) -> list[str]:
    out = []
    for a in argv:
        if a.startswith("@"):
            out.extend(_expand(Path(a[1:]).read_text().splitlines()))
        else:
            out.append(a)
    return out


def _write_descriptor(out: Path, args, argv) -> None:
    argv = _expand(argv)
    opts = {k: v for k, v in vars(args).items() if k != "func"}
    _dump(out / "run.json", {"command": args.command, "options": opts, "argv": list(argv), "version": __version__})
    (out / "run.args").write_text("".join(f"{a}\n" for a in argv))


# -- subcommands --------------------------------------------------------------


def _oracle_for(p: ProblemSpec, step):
    if p.binary:
        return grid_enumerate(p)
    if step is None:
        raise UsageError("--step is required for continuous problems")
    return grid_enumerate(p, step)


def cmd_validate(args, out: Path) -> int:
    p = load_problem_arg(args.problem)
    points = read_points(args.set, p)
    if not points:
        raise UsageError(f"{args.set} holds no points")
    tol = 0.0 if args.tol is None else args.tol
    if args.role == "lower_shell":
        report = check_lower_shell(points, p, tol)
    elif args.role == "upper_approximation":
        if not args.lower:
            raise UsageError("--lower is required for role upper_approximation")
        try:
            report = check_upper_approximation(points, read_points(args.lower, p), p, tol)
        except PreconditionError as exc:
            if exc.report is None:
                raise
            _dump(out / "report.json", {"error": str(exc), "lower_shell": exc.report.to_dict(), "passed": False})
            print(f"invalid lower shell: {exc}")
            return EXIT_FAIL
    else:
        report = check_upper_shell_oracle(points, _oracle_for(p, args.step), p, tol=args.tol)
    (out / "report.json").write_text(report.to_json())
    print(report)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_derive(args, out: Path) -> int:
    p = load_problem_arg(args.problem)
    r = relaxation_from_args(args)
    res = run_two_sided(
        p, r, budget=args.budget, seed=args.seed, population=args.population,
        mutation_scale=args.mutation_scale, mode=args.mode, jobs=args.jobs,
    )
    write_points(out / "S_L.csv", res.lower_shell, p)
    write_points(out / "S_L_relaxed.csv", res.relaxed_shell, res.relaxed)
    write_points(out / "theta.csv", res.theta.theta, p)
    lower = check_lower_shell(res.lower_shell, p)
    doc = {
        "problem": p.name,
        "relaxation": r.to_dict(),
        "metrics": res.metrics,
        "lower_shell": lower.to_dict(),
        "upper_approximation": res.report.to_dict() if res.report is not None else None,
        "passed": lower.passed and (res.report is None or res.report.passed),
    }
    if res.report is None:
        doc["note"] = "theta is empty; no upper approximation to validate"
    _dump(out / "report.json", doc)
    print(lower)
    print(res.report if res.report is not None else "theta: empty")
    print(f"|S_L|={len(res.lower_shell)} |S'_L|={len(res.relaxed_shell)} |theta|={len(res.theta)}")
    return EXIT_OK if doc["passed"] else EXIT_FAIL


def _seeds(args, p: ProblemSpec):
    if args.seeds == "exact" or (args.seeds == "auto" and (p.binary or args.step is not None)):
        return _oracle_for(p, args.step).efficient_set, "oracle efficient set"
    cfg = SamplerConfig(budget=args.budget, population=min(100, args.budget), seed=args.seed)
    return run_sampler(p, cfg).shell, "sampled lower shell"


def cmd_construct(args, out: Path) -> int:
    p = load_problem_arg(args.problem)
    doc = {"problem": p.name, "mode": args.mode}
    try:
        seeds, source = _seeds(args, p)
        if args.mode == "budget":
            shell = construct_upper_shell_budget(p, seeds, ShiftSchedule(), args.seed, args.constraint, args.trials)
        else:
            shell = shift_candidates(seeds, p, ShiftSchedule(), args.seed, args.trials)
    except HypothesisError as exc:
        doc.update({"refused": True, "reason": str(exc), "probes": {k: v.to_dict() for k, v in exc.verdicts.items()}})
        _dump(out / "report.json", doc)
        print(f"refused: {exc}")
        return EXIT_FAIL
    verdicts = probe_problem(p, args.trials, args.seed)
    doc.update({"refused": False, "seeds": source, "seed_count": len(seeds), "size": len(shell)})
    doc["probes"] = {k: v.to_dict() for k, v in verdicts.items()}
    name = "upper_shell.csv" if args.mode == "budget" else "candidates.csv"
    write_points(out / name, shell, p)
    passed = True
    if args.mode == "budget" and shell and (p.binary or args.step is not None):
        report = check_upper_shell_oracle(shell, _oracle_for(p, args.step), p)
        doc["oracle_check"] = report.to_dict()
        passed = report.passed
        print(report)
    doc["passed"] = passed
    _dump(out / "report.json", doc)
    print(f"{name}: {len(shell)} points from {len(seeds)} seeds ({source})")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_oracle(args, out: Path) -> int:
    p = load_problem_arg(args.problem)
    oracle = grid_enumerate(p, None if p.binary else args.step)
    write_points(out / "front.csv", oracle.efficient_set, p)
    _dump(out / "oracle.json", oracle.summary())
    print(f"{p.name}: {oracle.lattice_size} lattice points, {len(oracle.front)} efficient, tau={oracle.tau.tolist()}")
    if not args.certify_no_upper_shell:
        return EXIT_OK
    if args.step is None and not p.binary:
        raise UsageError("--step is required for the certificate")
    r = relaxation_from_args(args)
    cert = no_upper_shell_certificate(p, r, args.step, oracle=oracle)
    doc = cert.to_dict()
    doc["relaxation"] = r.to_dict()
    _dump(out / "certificate.json", doc)
    print(
        f"certificate {'granted' if cert.granted else 'refused'}: "
        f"{cert.outside_points - cert.survivor_count}/{cert.outside_points} outside points fail US-4 or US-5"
    )
    return EXIT_OK if cert.granted else EXIT_FAIL


def cmd_invariance(args, out: Path) -> int:
    doc = {}
    ok = True
    if args.geud:
        for repl in ("linear", "moment"):
            v = same_linear_order_probe(geud_pair(args.v, args.a, replacement=repl), args.trials, args.seed)
            doc[f"geud_{repl}"] = v.to_dict()
            print(f"{v.name}: agreement {v.agreement:.4f}")
        ok = doc["geud_linear"]["violation_count"] == 0
    if args.problem:
        if not args.replace:
            raise UsageError("--replace l=EXPR is required with --problem")
        p = load_problem_arg(args.problem)
        l, _, expr = args.replace.partition("=")
        try:
            l = int(l) - 1
        except ValueError:
            raise UsageError("--replace expects l=EXPR with a 1-based objective index") from None
        if not 0 <= l < p.k:
            raise UsageError(f"objective index out of range 1..{p.k}")
        sense = args.sense or p.senses[l]
        q = p.with_objective(l, expr, sense)
        lo, hi = p.box_lo, p.box_hi
        pair = ObjectivePair(p.max_objectives[l], q.max_objectives[l], (lo, hi), f"f{l + 1} replacement")
        order = same_linear_order_probe(pair, args.trials, args.seed)
        agree = dominance_agreement(p, q, args.trials, args.seed)
        doc["order_probe"] = order.to_dict()
        doc["dominance_agreement"] = agree.to_dict()
        print(f"order agreement {order.agreement:.4f}, dominance-verdict agreement {agree.agreement:.4f}")
        ok = ok and order.passed and agree.passed
        if args.set:
            shell = read_points(args.set, p)
            S_L = read_points(args.lower, p) if args.lower else None
            role = "upper_approximation" if S_L is not None else "lower_shell"
            rep = check_invariance(shell, role, p, q, S_L=S_L)
            doc["shell"] = rep.to_dict()
            print(rep)
            ok = ok and rep.passed
    if not doc:
        raise UsageError("nothing to do: pass --problem/--replace and/or --geud")
    doc["passed"] = ok
    _dump(out / "invariance.json", doc)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bench(args, out: Path) -> int:
    res = time_geud(args.v, args.a, args.evaluations, args.seed)
    _dump(out / "bench.json", res)
    print(f"gEUD power/linear time ratio {res['ratio']:.2f} (reference {res['reference_ratio']:g}, informational)")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _add_common(sp, problem_required=True):
    sp.add_argument("--problem", required=problem_required, help="problem JSON path or bundled name")
    sp.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")


def _add_relax(sp):
    sp.add_argument("--relax-box", help="lo:hi[,lo:hi...] | SCALE[@center|lower|upper] | none")
    sp.add_argument("--relax-constraints", type=float, help="constraint bound scale rho >= 1")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="paretoshells",
        description="Two-sided discrete approximations of Pareto fronts.",
        fromfile_prefix_chars="@",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("validate", help="check a point set against a shell definition")
    _add_common(sp)
    sp.add_argument("--role", required=True, choices=["lower_shell", "upper_approximation", "upper_shell"])
    sp.add_argument("--set", required=True, help="CSV with x_1..x_n columns")
    sp.add_argument("--lower", help="lower shell CSV (upper_approximation)")
    sp.add_argument("--step", type=float, help="grid step for the upper_shell oracle")
    sp.add_argument("--tol", type=float, help="dominance tolerance (default 0; oracle tau for upper_shell)")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("derive", help="lower shell plus upper approximation via relaxation")
    _add_common(sp)
    _add_relax(sp)
    sp.add_argument("--budget", type=int, default=100_000, help="evaluations per sampler run")
    sp.add_argument("--population", type=int, default=100)
    sp.add_argument("--mutation-scale", type=float, default=0.1)
    sp.add_argument("--mode", choices=["evolutionary", "pure_random"], default="evolutionary")
    sp.set_defaults(func=cmd_derive)

    sp = sub.add_parser("construct", help="upper shell from monotone shifts")
    _add_common(sp)
    sp.add_argument("--mode", choices=["budget", "shift"], default="budget")
    sp.add_argument("--trials", type=int, default=10_000, help="monotonicity probe trials")
    sp.add_argument("--seeds", choices=["auto", "exact", "sampled"], default="auto")
    sp.add_argument("--step", type=float, help="grid step for exact seeds on continuous problems")
    sp.add_argument("--budget", type=int, default=10_000, help="sampler budget for sampled seeds")
    sp.add_argument("--constraint", type=int, help="0-based index of the budget constraint")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("oracle", help="grid or exhaustive efficient set; optional no-upper-shell certificate")
    _add_common(sp)
    _add_relax(sp)
    sp.add_argument("--step", type=float)
    sp.add_argument("--certify-no-upper-shell", action="store_true")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("invariance", help="order-equivalent objective replacement")
    _add_common(sp, problem_required=False)
    sp.add_argument("--replace", help="l=EXPR, 1-based objective index")
    sp.add_argument("--sense", choices=["max", "min"])
    sp.add_argument("--trials", type=int, default=10_000)
    sp.add_argument("--set", help="shell CSV to re-validate under both problems")
    sp.add_argument("--lower", help="lower shell CSV; makes --set an upper approximation")
    sp.add_argument("--geud", action="store_true", help="probe the gEUD function pair")
    sp.add_argument("--v", type=int, default=100)
    sp.add_argument("--a", type=float, default=3.0)
    sp.set_defaults(func=cmd_invariance)

    sp = sub.add_parser("bench", help="time the power-mean gEUD against the linear one")
    sp.add_argument("--out")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--v", type=int, default=100)
    sp.add_argument("--a", type=float, default=3.0)
    sp.add_argument("--evaluations", type=int, default=20_000)
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        out = _out_dir(args)
        _write_descriptor(out, args, argv)
        return args.func(args, out)
    except (UsageError, ParetoShellError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
