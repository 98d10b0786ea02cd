"""Command line front end: run suites directly or evaluate programs.

Exit codes: 0 when every suite passes, 1 when any law is violated,
2 on a parse/type/usage error, 3 when a configured bound is exceeded
under --strict-bounds.  Reports are deterministic: the JSON emitted
for equal (source, config, seed) is byte-identical, with wall-clock
timings zeroed unless --timings asks for them.
"""

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass

from .dsl import MODEL_ALIASES, SUITE_NAMES, build_env, parse
from .enrichment import get_enrichment
from .errors import BoundExceededError, DslError, DslTypeError, HoptError
from .report import Bounds, LawReport
from .suites import run_declared_tower, run_suite

VERSION = "0.1.0"

_BOUND_KEYS = ("max_size", "expr_len", "enum_cap", "samples", "seed",
               "depth", "karoubi_cap", "member_cap")


@dataclass
class RunConfig:
    """Bounds and output knobs shared by a whole invocation."""

    max_size: int = 3
    samples: int = 8
    seed: int = 0
    depth: int = 4
    karoubi_cap: int = 4
    member_cap: int = 20_000
    format: str = "text"
    strict_bounds: bool = False
    parallelism: int = 1
    timings: bool = False
    report_dir: str = None

    def bounds(self, options=None):
        base = Bounds(max_size=self.max_size, samples=self.samples,
                      seed=self.seed, depth=self.depth,
                      karoubi_cap=self.karoubi_cap,
                      member_cap=self.member_cap)
        if not options:
            return base
        fields = base.as_dict()
        for key, value in options.items():
            if key in _BOUND_KEYS:
                if not isinstance(value, int) or value < 0:
                    raise DslTypeError(
                        f"option {key} needs a nonnegative integer")
                fields[key] = value
        return Bounds(**fields)

    def as_dict(self):
        return {
            "max_size": self.max_size, "samples": self.samples,
            "seed": self.seed, "depth": self.depth,
            "karoubi_cap": self.karoubi_cap,
            "member_cap": self.member_cap, "format": self.format,
            "strict_bounds": self.strict_bounds,
            "parallelism": self.parallelism, "timings": self.timings,
        }


class _StrictBound(Exception):
    def __init__(self, original):
        super().__init__(str(original))
        self.original = original


def _execute(key, E, model_name, config, options, source=None):
    """One registry run with bound handling and run metadata."""
    bounds = config.bounds(options)
    extra = {k: v for k, v in options.items() if k not in _BOUND_KEYS}
    started = time.monotonic()
    try:
        if key == "tower" and "layers" in extra:
            reports = run_declared_tower(
                E, extra["layers"], bounds,
                mu_level=extra.get("mu_level"))
        else:
            reports = run_suite(key, E, bounds, extra)
    except BoundExceededError as e:
        if config.strict_bounds:
            raise _StrictBound(e)
        rep = LawReport(key, model_name, bounds.as_dict())
        rep.note(f"bound exceeded, suite skipped: {e}")
        reports = [rep]
    elapsed = int((time.monotonic() - started) * 1000)
    for rep in reports:
        run = {
            "suite": key,
            "model": model_name,
            "options": {k: options[k] for k in sorted(options)},
        }
        if source is not None:
            run["source"] = source
        rep.bounds["run"] = run
        rep.elapsed_ms = elapsed if config.timings else 0
    return reports


def run_program(program, config, source=None):
    """Execute declarations then checks; returns (reports, exit code)."""
    env = build_env(program)
    reports = []
    for stmt in env.checks:
        options = dict(stmt.options)
        if "tower" in options:
            name = options.pop("tower")
            if name not in env.towers:
                raise DslTypeError(f"unknown tower {name!r}",
                                   stmt.line)
            options["layers"] = env.towers[name]
        try:
            reports.extend(_execute(stmt.suite, env.E, env.kind,
                                    config, options, source=source))
        except _StrictBound as e:
            e.reports = reports
            raise
    return reports, (0 if all(r.passed for r in reports) else 1)


def render_report(reports, config, fmt=None):
    """Serialize finished reports; JSON is key-sorted and stable."""
    payload = {
        "version": VERSION,
        "seed": config.seed,
        "config": config.as_dict(),
        "suites": [r.as_dict() for r in reports],
    }
    if (fmt or config.format) == "json":
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    lines = [f"hopt {VERSION}  seed={config.seed}"]
    total = failed = 0
    for rep in reports:
        lines.append(rep.summary_line())
        total += rep.cases_total
        failed += rep.cases_failed
        for v in rep.violations[:5]:
            lines.append(f"    {v.law} @ {v.instance}: "
                         f"{v.lhs} != {v.rhs}")
        if len(rep.violations) > 5:
            lines.append(f"    ... {len(rep.violations) - 5} more")
    lines.append(f"{len(reports)} suites, {total} cases, "
                 f"{failed} failures")
    return "\n".join(lines) + "\n"


def write_report_files(reports, config, outdir):
    """Drop report.json, summary.csv, and two PNG figures in outdir."""
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "report.json"), "w",
              encoding="utf-8") as fh:
        fh.write(render_report(reports, config, "json"))
    with open(os.path.join(outdir, "summary.csv"), "w", newline="",
              encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "model", "cases_total",
                         "cases_failed", "status"])
        for rep in reports:
            writer.writerow([rep.suite, rep.model, rep.cases_total,
                             rep.cases_failed, rep.status])
    if reports:
        _write_figures(reports, outdir)


def _write_figures(reports, outdir):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    labels = [f"{r.suite}\n{r.model}" for r in reports]
    xs = range(len(labels))
    for fname, values, title, good in (
            ("cases.png", [r.cases_total for r in reports],
             "cases examined per suite", None),
            ("violations.png", [r.cases_failed for r in reports],
             "violations per suite", 0)):
        fig, ax = plt.subplots(
            figsize=(max(6.0, 1.1 * len(labels)), 4.0))
        colors = ["#2a9d4e" if r.passed else "#c0392b"
                  for r in reports]
        ax.bar(xs, values, color=colors)
        ax.set_xticks(list(xs))
        ax.set_xticklabels(labels, fontsize=8)
        ax.set_ylabel("count")
        ax.set_title(f"{title} (red = failing suite)")
        fig.tight_layout()
        fig.savefig(os.path.join(outdir, fname), dpi=120)
        plt.close(fig)


def _resolve_model(name):
    kind = MODEL_ALIASES.get(name)
    if kind is None:
        raise DslTypeError(f"unknown model {name!r}")
    return kind, get_enrichment(kind)


def _replay(spec, config):
    """Re-run one reported violation and confirm it reproduces."""
    path, sep, case = spec.partition("#")
    if not sep or not case.isdigit():
        raise DslTypeError("--replay needs FILE#CASE with a numeric "
                           "case index")
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    flat = [(entry, viol) for entry in payload.get("suites", ())
            for viol in entry.get("violations", ())]
    index = int(case)
    if index >= len(flat):
        raise DslTypeError(
            f"case {index} out of range; report has {len(flat)} "
            "violations")
    entry, viol = flat[index]
    run = entry["bounds"].get("run", {})
    key = run.get("suite", entry["suite"])
    model_name = run.get("model", entry["model"])
    options = dict(run.get("options", {}))
    bound_fields = {k: v for k, v in entry["bounds"].items()
                    if k in _BOUND_KEYS}
    if "source" in run:
        E = build_env(parse(run["source"])).E
    else:
        _, E = _resolve_model(model_name)
    if "layers" in options:
        reports = run_declared_tower(E, options["layers"],
                                     Bounds(**bound_fields),
                                     mu_level=options.get("mu_level"))
    else:
        reports = run_suite(key, E, Bounds(**bound_fields), options)
    wanted = (viol["law"], viol["instance"], viol["lhs"], viol["rhs"])
    for rep in reports:
        for got in rep.violations:
            if (got.law, got.instance) == wanted[:2]:
                same = (got.lhs, got.rhs) == wanted[2:]
                print(f"replayed {got.law} @ {got.instance}: "
                      f"{got.lhs} != {got.rhs}")
                print("reproduced identically" if same
                      else "MISMATCH against the report")
                return 0 if same else 1
    print(f"violation {wanted[0]} @ {wanted[1]} did not reproduce")
    return 1


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _build_parser():
    p = argparse.ArgumentParser(
        prog="hopt",
        description="Exhaustive law checking for enriched monoidal "
                    "categories over finite models")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--max-size", type=_positive, default=None)
        sp.add_argument("--depth", type=_positive, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--samples", type=_positive, default=None)
        sp.add_argument("--format", choices=("json", "text"),
                        default="text")
        sp.add_argument("--strict-bounds", action="store_true")
        sp.add_argument("--report-dir", default=None)
        sp.add_argument("--timings", action="store_true")

    pc = sub.add_parser("check", help="run one suite on one model")
    pc.add_argument("--model", default="finset")
    pc.add_argument("--suite", choices=sorted(SUITE_NAMES))
    pc.add_argument("--replay", metavar="FILE#CASE", default=None)
    common(pc)

    pe = sub.add_parser("eval-file", help="evaluate a program file")
    pe.add_argument("path")
    common(pe)
    return p


def _config_from(args):
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("HOPT_SEED", "0"))
    cfg = RunConfig(seed=seed, format=args.format,
                    strict_bounds=args.strict_bounds,
                    timings=args.timings,
                    report_dir=args.report_dir)
    if args.max_size is not None:
        cfg.max_size = args.max_size
    if args.depth is not None:
        cfg.depth = args.depth
    if args.samples is not None:
        cfg.samples = args.samples
    return cfg


def main(argv=None):
    args = _build_parser().parse_args(argv)
    config = _config_from(args)
    try:
        if args.command == "check":
            if args.replay is not None:
                return _replay(args.replay, config)
            if args.suite is None:
                print("hopt check: --suite is required",
                      file=sys.stderr)
                return 2
            model_name, E = _resolve_model(args.model)
            try:
                reports = _execute(args.suite, E, model_name,
                                   config, {})
                code = 0 if all(r.passed for r in reports) else 1
            except _StrictBound as e:
                print(f"bound exceeded: {e}", file=sys.stderr)
                return 3
        else:
            with open(args.path, encoding="utf-8") as fh:
                source = fh.read()
            try:
                reports, code = run_program(parse(source), config,
                                            source=source)
            except _StrictBound as e:
                print(f"bound exceeded: {e}", file=sys.stderr)
                reports, code = e.reports, 3
    except DslError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except HoptError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(render_report(reports, config))
    if config.report_dir:
        write_report_files(reports, config, config.report_dir)
    return code


if __name__ == "__main__":
    sys.exit(main())
