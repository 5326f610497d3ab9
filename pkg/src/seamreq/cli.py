"""Command-line front end.

Exit codes: 0 success (everything proved), 1 verification failure, 2 usage or
semantic error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import re
import sys
import warnings

from . import __version__
from . import docgen, inference, smtlib, trace
from . import vcgen
from .config import ConfigError, ProjectConfig, load_config
from .model import ResolveError, SeamreqError
from .report import (
    Report,
    diagnostic_dict,
    outcome_dict,
    outcome_table,
    render_report,
)
from .resolve import expand_paths, load_project

log = logging.getLogger("seamreq")

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_CLASS_NAME = re.compile(r"^[A-Z][A-Z0-9_]*$")


class UsageError(SeamreqError):
    code = "UsageError"


class _Context:
    def __init__(self, args):
        self.args = args
        self.config = load_config(args.config) if args.config else ProjectConfig()
        self.seed = args.seed if args.seed is not None else self.config.seed
        jobs = args.jobs if args.jobs is not None else self.config.jobs
        self.jobs = jobs if jobs else vcgen.default_jobs()
        self.timing = args.timing

    def project(self, paths):
        patterns = list(paths) or self.config.source_patterns()
        if not patterns:
            raise UsageError("no source files given (pass paths or --config)")
        files = expand_paths(patterns)
        if not files:
            raise UsageError("no source files matched " + " ".join(patterns))
        return load_project(files)


def _split_names(items):
    """Class names are upper-case identifiers that are not existing paths."""
    names, paths = [], []
    for it in items:
        if _CLASS_NAME.match(it) and not os.path.exists(it):
            names.append(it)
        else:
            paths.append(it)
    return names, paths


def _all_proved(outcomes, allow_skipped=False) -> bool:
    ok = {vcgen.Verdict.PROVED} | ({vcgen.Verdict.SKIPPED} if allow_skipped else set())
    return all(o.verdict in ok for o in outcomes)


def _summary(outcomes) -> str:
    counts = {}
    for o in outcomes:
        counts[o.verdict.value] = counts.get(o.verdict.value, 0) + 1
    return ", ".join(f"{n} {v.lower()}" for v, n in counts.items()) or "nothing to verify"


# --------------------------------------------------------------------------
# Subcommands; each returns (report, text)


def cmd_check(ctx: _Context):
    project = ctx.project(ctx.args.paths)
    reqs = {name: [d.ref for d in project.flatten(name)] for name in project.requirement_classes}
    payload = {"classes": list(project.classes), "requirement_classes": reqs}
    n_drivers = sum(len(v) for v in reqs.values())
    text = (f"ok: {len(project.classes)} operational classes, "
            f"{len(reqs)} requirement classes, {n_drivers} drivers\n")
    return Report("check", payload), text


def cmd_verify(ctx: _Context):
    names, paths = _split_names(ctx.args.items)
    project = ctx.project(paths)
    names = names or list(ctx.config.requirements) or list(project.requirement_classes)
    for n in names:
        if n not in project.requirement_classes:
            raise UsageError(f"unknown requirement class {n}")
    classes, text, every = [], [], []
    for n in names:
        outcomes = vcgen.verify_requirement_class(n, project, jobs=ctx.jobs, seed=ctx.seed)
        every.extend(outcomes)
        classes.append({"name": n, "outcomes": [outcome_dict(o, ctx.timing) for o in outcomes]})
        text.append(f"{n}\n{outcome_table(outcomes, ctx.timing)}  {_summary(outcomes)}\n")
    code = EXIT_OK if _all_proved(every) else EXIT_FAILED
    return Report("verify", {"requirement_classes": classes}, exit_code=code), "\n".join(text)


def cmd_verify_impl(ctx: _Context):
    names, paths = _split_names(ctx.args.items)
    project = ctx.project(paths)
    names = names or list(project.classes)
    for n in names:
        if n not in project.classes:
            raise UsageError(f"unknown class {n}")
    classes, text, every = [], [], []
    for n in names:
        outcomes = vcgen.verify_class(n, project, seed=ctx.seed)
        every.extend(outcomes)
        classes.append({"name": n, "outcomes": [outcome_dict(o, ctx.timing) for o in outcomes]})
        text.append(f"{n}\n{outcome_table(outcomes, ctx.timing)}  {_summary(outcomes)}\n")
    code = EXIT_OK if _all_proved(every, allow_skipped=True) else EXIT_FAILED
    return Report("verify-impl", {"classes": classes}, exit_code=code), "\n".join(text)


def cmd_infer(ctx: _Context):
    a = ctx.args
    project = ctx.project(a.paths)
    if a.requirement_class not in project.requirement_classes:
        raise UsageError(f"unknown requirement class {a.requirement_class}")
    cls_name, _, command = a.feature.rpartition(".")
    owners = [c for c in project.classes.values() if c.command(command)]
    if cls_name:
        owners = [c for c in owners if c.name == cls_name]
    if not owners:
        raise UsageError(f"unknown command {a.feature}")
    result = inference.infer_contract(a.requirement_class, command, project)
    payload = {
        "requirement_class": a.requirement_class,
        "command": command,
        "assertions": [{"driver": x.driver, "assertion": x.text} for x in result.assertions],
        "errors": [{"driver": e.driver, "code": e.code, "message": e.message} for e in result.errors],
        "skipped": [{"driver": d, "note": n} for d, n in result.skipped],
    }
    lines = [x.text for x in result.assertions]
    for e in result.errors:
        lines.append(f"-- {e.driver}: {e.code}: {e.message}")
    text = "\n".join(lines) + "\n" if lines else ""
    return Report("infer", payload, exit_code=EXIT_OK if result.ok else EXIT_FAILED), text


def _verdict_map(project, ctx) -> dict:
    out = {}
    for name in project.requirement_classes:
        for o in vcgen.verify_requirement_class(name, project, jobs=ctx.jobs, seed=ctx.seed):
            out.setdefault(o.owner, o.verdict.value)
    return out


def cmd_trace(ctx: _Context):
    a = ctx.args
    project = ctx.project(a.paths)
    matrix = trace.build_matrix(project)
    if a.direction == "down":
        if not a.name:
            raise UsageError("trace down needs a driver name")
        try:
            d = trace.find_driver(project, a.name)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        rows = [{"driver": d.ref, "feature": f} for f in sorted(matrix.down[d.ref])]
    elif a.direction == "up":
        if not a.name:
            raise UsageError("trace up needs a feature CLASS.name")
        try:
            verdicts = _verdict_map(project, ctx) if a.verdicts else None
            hits = trace.impact(project, a.name, verdicts)
        except trace.UnknownFeature as exc:
            raise UsageError(str(exc)) from None
        rows = [{"feature": a.name, "driver": r, "verdict": v} for r, v in hits.items()]
    else:
        rows = [{"driver": d, "feature": f} for d, f in matrix.rows("down")]
    lines = []
    for r in rows:
        v = f"  {r['verdict']}" if r.get("verdict") else ""
        lines.append(f"{r['driver']}  {r['feature']}{v}")
    payload = {"direction": a.direction, "name": a.name, "rows": rows}
    return Report("trace", payload), "\n".join(lines) + ("\n" if lines else "")


def cmd_doc(ctx: _Context):
    a = ctx.args
    project = ctx.project(a.paths)
    if a.requirement_class not in project.requirement_classes:
        raise UsageError(f"unknown requirement class {a.requirement_class}")
    verdicts = None
    if a.verdicts:
        outcomes = vcgen.verify_requirement_class(a.requirement_class, project, jobs=ctx.jobs, seed=ctx.seed)
        verdicts = {o.owner: o.verdict.value for o in outcomes}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        doc = docgen.build(a.requirement_class, project, verdicts)
    for w in caught:
        log.warning("%s", w.message)
    text = docgen.render(doc, a.doc_format)
    payload = {
        "title": doc.title,
        "header": doc.header,
        "items": [{"label": i.label, "driver": i.driver, "text": i.text, "verdict": i.verdict}
                  for i in doc.items],
        "document": text,
    }
    return Report("doc", payload), text


def cmd_export_smt(ctx: _Context):
    a = ctx.args
    project = ctx.project(a.paths)
    try:
        d = trace.find_driver(project, a.driver)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    script = smtlib.export_obligation(vcgen.driver_obligation(d, project))
    return Report("export-smt", {"driver": d.ref, "script": script}), script


HANDLERS = {
    "check": cmd_check,
    "verify": cmd_verify,
    "verify-impl": cmd_verify_impl,
    "infer": cmd_infer,
    "trace": cmd_trace,
    "doc": cmd_doc,
    "export-smt": cmd_export_smt,
}


# --------------------------------------------------------------------------


def _common(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", default=dflt(None), help="project config file")
    p.add_argument("--seed", type=int, default=dflt(None), help="solver random seed")
    p.add_argument("--jobs", type=int, default=dflt(None),
                   help="parallel obligations (default: number of CPUs)")
    p.add_argument("--format", choices=("text", "structured"), default=dflt("text"),
                   help="output format")
    p.add_argument("--output", default=dflt(None), help="write output to this file")
    p.add_argument("--timing", action="store_true", default=dflt(False),
                   help="include per-obligation timing (reports then differ between runs)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seamreq", parents=[_common(False)],
        description="Verify, infer, trace and document requirements written as specification drivers.")
    parser.add_argument("--version", action="version", version=f"seamreq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    common = [_common(True)]

    p = sub.add_parser("check", parents=common, help="parse and resolve sources")
    p.add_argument("paths", nargs="*")

    p = sub.add_parser("verify", parents=common, help="verify requirement classes against contracts")
    p.add_argument("items", nargs="*", metavar="CLASS|PATH",
                   help="requirement class names and source paths")

    p = sub.add_parser("verify-impl", parents=common, help="verify command bodies against their contracts")
    p.add_argument("items", nargs="*", metavar="CLASS|PATH")

    p = sub.add_parser("infer", parents=common, help="infer a command postcondition from drivers")
    p.add_argument("requirement_class")
    p.add_argument("feature", help="command name, optionally CLASS.command")
    p.add_argument("paths", nargs="*")

    p = sub.add_parser("trace", parents=common, help="trace drivers to features and back")
    p.add_argument("direction", choices=("up", "down", "matrix"))
    p.add_argument("name", nargs="?", help="driver (down) or CLASS.feature (up)")
    p.add_argument("paths", nargs="*")
    p.add_argument("--verdicts", action="store_true", help="annotate upward traces with verdicts")

    p = sub.add_parser("doc", parents=common, help="generate the requirements document")
    p.add_argument("requirement_class")
    p.add_argument("paths", nargs="*")
    p.add_argument("--doc-format", choices=("text", "markdown"), default="text")
    p.add_argument("--verdicts", action="store_true", help="add PROVED/FAILED badges")

    p = sub.add_parser("export-smt", parents=common, help="export a driver obligation as SMT-LIB")
    p.add_argument("driver")
    p.add_argument("paths", nargs="*")
    return parser


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="seamreq: %(levelname)s: %(message)s")
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    # options may sit between positionals; trailing source paths land here
    rest = "paths" if hasattr(args, "paths") else "items" if hasattr(args, "items") else None
    stray = [e for e in extra if e.startswith("-")]
    if stray or (extra and rest is None):
        parser.error("unrecognized arguments: " + " ".join(stray or extra))
    if extra:
        setattr(args, rest, [*getattr(args, rest), *extra])
    if args.command == "trace" and args.direction == "matrix" and args.name:
        # ``trace matrix a.sreq`` puts the first path into ``name``
        args.paths = [args.name, *args.paths]
        args.name = None
    if args.jobs is not None and args.jobs < 1:
        parser.error("--jobs must be at least 1")
    ctx = None
    try:
        ctx = _Context(args)
        report, text = HANDLERS[args.command](ctx)
    except OSError as exc:
        print(f"seamreq: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ResolveError as exc:
        diags = [diagnostic_dict(d) for d in exc.diagnostics]
        text = "".join(f"{d}\n" for d in exc.diagnostics)
        report = Report(args.command, {}, tuple(diags), EXIT_USAGE)
        if args.format == "text":
            sys.stderr.write(text)
            text = ""
    except (ConfigError, UsageError, vcgen.VcError) as exc:
        diag = {"code": exc.code, "message": str(exc), "file": "", "line": 0, "column": 0}
        report = Report(args.command, {}, (diag,), EXIT_USAGE)
        text = ""
        if args.format == "text":
            print(f"seamreq: {exc.code}: {exc}", file=sys.stderr)

    out = render_report(report) if args.format == "structured" else text
    try:
        _write(args.output, out)
        report_path = ctx.config.report_path() if ctx is not None else None
        if report_path:
            _write(report_path, render_report(report))
    except OSError as exc:
        print(f"seamreq: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
