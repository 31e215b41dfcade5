"""Command-line front end.

Exit codes: 0 success, 1 some check failed, 2 usage error, 3 missing or malformed
input file, 4 expression syntax error, 5 evaluation error (budget, hypothesis,
exponent or arithmetic). Outputs are written only after every computation has
succeeded, so a failing run leaves no partial files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .capacity import CapacityView, choquet
from .errors import BudgetExceeded, EvalError, ExprError, FormatError, LabError, ModelError, PreconditionViolated
from .expr import compile_expr, coordinates_used, parse
from .model import RandomVar
from .modelio import load_model
from .reports import DEFAULT_TOL, read_jsonl, to_jsonl
from .sequence import SEMANTICS, eval_lower, eval_upper
from .slln import band_report, parse_policy, run_trajectories
from .generators import derive_seeds
from .suites import GROUPS, SUITES, SuiteConfig, run_suite, suite_names

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FILE, EXIT_PARSE, EXIT_EVAL = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str | None = None
    phi: str | None = None
    semantics: str | None = None
    horizon: int | None = None
    suite: str | None = None
    trials: int | None = None
    seed: int = 0
    tolerance: float | None = None
    out: str | None = None
    steps: int = 100_000
    policy: tuple[str, ...] = ()
    tail_fraction: float = 0.2
    workers: int = 1
    inputs: tuple[str, ...] = ()

    def validate(self) -> None:
        if self.trials is not None and self.trials < 1:
            raise UsageError("--trials must be >= 1")
        if self.tolerance is not None and not self.tolerance >= 0:
            raise UsageError("--tolerance must be >= 0")
        if self.steps < 1:
            raise UsageError("--steps must be >= 1")
        if not 0 < self.tail_fraction <= 1:
            raise UsageError("--tail-fraction must lie in (0, 1]")
        if self.workers < 1:
            raise UsageError("--workers must be >= 1")
        if self.horizon is not None and self.horizon < 1:
            raise UsageError("--horizon must be >= 1")
        if self.command in ("eval", "simulate", "choquet") and not self.model:
            raise UsageError(f"{self.command} needs --model")
        if self.command == "eval" and not self.phi:
            raise UsageError("eval needs --phi")
        if self.command == "verify":
            if not self.suite:
                raise UsageError("verify needs --suite")
            try:
                suite_names(self.suite)
            except KeyError as exc:
                raise UsageError(str(exc.args[0])) from None
        if self.command == "report" and not self.inputs:
            raise UsageError("report needs at least one JSONL file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sublinear-lab", allow_abbrev=False, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *flags):
        if "model" in flags:
            p.add_argument("--model", help="model JSON file")
        if "seed" in flags:
            p.add_argument("--seed", type=int, default=0)
        if "out" in flags:
            p.add_argument("--out", help="output path")
        if "tolerance" in flags:
            p.add_argument("--tolerance", type=float)
        if "trials" in flags:
            p.add_argument("--trials", type=int)
        if "workers" in flags:
            p.add_argument("--workers", type=int, default=1, help="worker threads; never changes output")
        return p

    e = common(sub.add_parser("eval", allow_abbrev=False, help="upper and lower expectation of an expression"), "model")
    e.add_argument("--phi", help="expression in x1..xn")
    e.add_argument("--semantics", choices=SEMANTICS)
    e.add_argument("--horizon", type=int, help="defaults to the model's horizon or the highest coordinate used")

    v = common(
        sub.add_parser("verify", allow_abbrev=False, help="run a named verification suite"),
        "model", "seed", "out", "tolerance", "trials", "workers",
    )
    v.add_argument("--suite", help=f"one of {', '.join(sorted(SUITES) + sorted(GROUPS))}")

    s = common(
        sub.add_parser("simulate", allow_abbrev=False, help="running-mean trajectories"),
        "model", "seed", "out", "tolerance", "trials", "workers",
    )
    s.add_argument("--steps", type=int, default=100_000)
    s.add_argument("--policy", action="append", help="repeatable; e.g. fixed:0, iid, periodic:100, doubling, greedy:0.2, schedule:0,1")
    s.add_argument("--tail-fraction", type=float, default=0.2)

    c = common(sub.add_parser("choquet", allow_abbrev=False, help="Choquet integrals of the model variable"), "model", "out")
    c.add_argument("--phi", help="optional transform of the variable, written in x1")

    r = common(sub.add_parser("report", allow_abbrev=False, help="merge JSONL reports into a summary table"), "out")
    r.add_argument("inputs", nargs="*", help="JSONL report files")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {k: v for k, v in vars(ns).items() if v is not None}
    if "policy" in kw:
        kw["policy"] = tuple(kw["policy"])
    if "inputs" in kw:
        kw["inputs"] = tuple(kw["inputs"])
    return RunConfig(**kw)


def _fmt(v: float) -> str:
    return format(float(v), ".12g")


def _cmd_eval(cfg: RunConfig):
    doc = load_model(cfg.model)
    ast = parse(cfg.phi, 10**6)
    n = cfg.horizon or doc.horizon or max(1, coordinates_used(ast))
    model = doc.sequence(n, cfg.semantics)
    f = compile_expr(cfg.phi, n)
    up, lo = eval_upper(model, f), eval_lower(model, f)
    return EXIT_OK, f"upper: {_fmt(up)}\nlower: {_fmt(lo)}\n", None


def _cmd_verify(cfg: RunConfig):
    doc = load_model(cfg.model) if cfg.model else None
    suite_cfg = SuiteConfig(
        trials=cfg.trials or 200, seed=cfg.seed, tol=DEFAULT_TOL if cfg.tolerance is None else cfg.tolerance, workers=cfg.workers
    )
    reports = run_suite(cfg.suite, suite_cfg, doc)
    text = to_jsonl(reports)
    failed = sum(not r.passed for r in reports)
    summary = f"{cfg.suite}: {len(reports) - failed}/{len(reports)} passed\n"
    code = EXIT_OK if failed == 0 else EXIT_FAIL
    if cfg.out:
        return code, summary, {cfg.out: text}
    return code, text + summary, None


def _cmd_simulate(cfg: RunConfig):
    doc = load_model(cfg.model)
    try:
        policies = [parse_policy(p) for p in (cfg.policy or ("fixed:0",))]
        for p in policies:
            p.validate(doc.marginal)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    delta = 0.02 if cfg.tolerance is None else cfg.tolerance
    seeds = derive_seeds(cfg.seed, cfg.trials or 1)
    trajs = run_trajectories(doc.marginal, doc.x, policies, cfg.steps, seeds, cfg.tail_fraction, cfg.workers)
    reports = [band_report(t, doc.marginal, doc.x, delta) for t in trajs]
    failed = sum(not r.passed for r in reports)
    summary = f"slln_band: {len(reports) - failed}/{len(reports)} trajectories inside the band (delta={delta:g})\n"
    files = None
    if cfg.out:
        files = {os.path.join(cfg.out, "reports.jsonl"): to_jsonl(reports)}
        for i, t in enumerate(trajs):
            stem = os.path.join(cfg.out, f"traj_{i // len(seeds):02d}_{i % len(seeds):04d}")
            files[stem + ".csv"] = t.csv_text()
            files[stem + ".json"] = json.dumps(t.metadata()) + "\n"
    return (EXIT_OK if failed == 0 else EXIT_FAIL), summary, files


def _cmd_choquet(cfg: RunConfig):
    doc = load_model(cfg.model)
    x = doc.x
    if cfg.phi:
        f = compile_expr(cfg.phi, 1)
        x = RandomVar(x.space, f(x.values))
    up = choquet(CapacityView(doc.marginal, "upper"), x).value
    lo = choquet(CapacityView(doc.marginal, "lower"), x).value
    text = f"choquet_upper: {_fmt(up)}\nchoquet_lower: {_fmt(lo)}\n"
    return EXIT_OK, text, ({cfg.out: text} if cfg.out else None)


def _cmd_report(cfg: RunConfig):
    rows = []
    for path in cfg.inputs:
        with open(path) as fh:
            rows += read_jsonl(fh.read())
    table: dict[str, list] = {}
    for row in rows:
        table.setdefault(row["name"], []).append(row)
    lines = [f"{'name':<32} {'count':>6} {'passed':>6} {'failed':>6} {'min_slack':>12}"]
    failed_any = False
    for name in sorted(table):
        rs = table[name]
        bad = sum(not r["pass"] for r in rs)
        failed_any |= bad > 0
        lines.append(f"{name:<32} {len(rs):>6} {len(rs) - bad:>6} {bad:>6} {min(r['slack'] for r in rs):>12.4g}")
    text = "\n".join(lines) + "\n"
    return (EXIT_FAIL if failed_any else EXIT_OK), text, ({cfg.out: text} if cfg.out else None)


COMMANDS = {"eval": _cmd_eval, "verify": _cmd_verify, "simulate": _cmd_simulate, "choquet": _cmd_choquet, "report": _cmd_report}


def _write_files(files: dict[str, str]) -> None:
    for path, text in files.items():
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)


def run_command(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg.validate()
        code, text, files = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (OSError, FormatError, ModelError) as exc:
        err.write(f"input error: {exc}\n")
        return EXIT_FILE
    except EvalError as exc:
        err.write(f"evaluation error: {exc}\n")
        return EXIT_EVAL
    except ExprError as exc:
        err.write(f"expression error: {exc}\n")
        return EXIT_PARSE
    except (BudgetExceeded, PreconditionViolated, LabError, np.linalg.LinAlgError) as exc:
        err.write(f"evaluation error: {exc}\n")
        return EXIT_EVAL
    if files:
        try:
            _write_files(files)
        except OSError as exc:
            err.write(f"output error: {exc}\n")
            return EXIT_FILE
    out.write(text)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)  # exits with status 2 on bad usage
    return run_command(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
