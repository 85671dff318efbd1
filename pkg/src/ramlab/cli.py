"""Command-line driver: ``ramlab run <jobfile>`` and ``ramlab verify``.

Exit codes: 0 all verifications pass, 2 parse error, 3 computation error,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .approx import DEFAULT_CONFIRMATIONS, ambient_stream, default_xi
from .asnf import as_normal_form
from .errors import ParseError, RamlabError
from .extcheck import ExtensionSpec, composite_immediate_check, extension_invariants, layerwise_immediate_check
from .fieldcore.fmt import parse_element, parse_poly, parse_precision
from .fieldcore.models import IteratedSeriesField, PadicField, SeriesField
from .fieldcore.roots import hensel_lift
from .kummer import ValueMonomialSystem, kummer_normal_form_p2, replay_trace, value_sim_terminates
from .ordval import GroupDescriptor, Value, parse_value
from .suites import SUITES, run_suite

EXIT_OK, EXIT_PARSE, EXIT_COMPUTE, EXIT_VERIFY = 0, 2, 3, 4

TASKS = ("nf-as", "nf-kummer", "nf-kummer-sim", "ext-invariants", "hensel", "verify")
BLOCKS = ("model", "stream", "task")


# -- job files -----------------------------------------------------------------


@dataclass
class JobFile:
    blocks: dict = field(default_factory=dict)  # name -> {key: (value, line)}
    path: str = "<job>"

    def get(self, block, key, default=None, required=False):
        entry = self.blocks.get(block, {}).get(key)
        if entry is None:
            if required:
                raise ParseError(f"{self.path}: [{block}] needs '{key}'")
            return default
        return entry[0]

    def line(self, block, key):
        entry = self.blocks.get(block, {}).get(key)
        return entry[1] if entry else 0

    def fail(self, block, key, message):
        raise ParseError(f"{self.path}:{self.line(block, key)}: {message}")


def parse_job(text: str, path: str = "<job>") -> JobFile:
    job = JobFile(path=path)
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"{path}:{n}: unterminated block header {line!r}")
            current = line[1:-1].strip()
            if current not in BLOCKS:
                raise ParseError(f"{path}:{n}: unknown block [{current}]")
            if current in job.blocks:
                raise ParseError(f"{path}:{n}: duplicate block [{current}]")
            job.blocks[current] = {}
            continue
        if current is None:
            raise ParseError(f"{path}:{n}: '{line}' outside any block")
        if "=" not in line:
            raise ParseError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError(f"{path}:{n}: empty key")
        if key in job.blocks[current]:
            raise ParseError(f"{path}:{n}: duplicate key '{key}'")
        job.blocks[current][key] = (value, n)
    if "task" not in job.blocks:
        raise ParseError(f"{path}: missing [task] block")
    name = job.get("task", "name", required=True)
    if name not in TASKS:
        job.fail("task", "name", f"unknown task '{name}' (expected one of {', '.join(TASKS)})")
    return job


def _int(job, block, key, default=None, positive=False):
    v = job.get(block, key, default)
    if v is None:
        return None
    try:
        out = int(v)
    except (TypeError, ValueError):
        job.fail(block, key, f"'{key}' must be an integer, got {v!r}")
    if positive and out <= 0:
        job.fail(block, key, f"'{key}' must be positive")
    return out


def _parse(job, block, key, fn):
    try:
        return fn(job.get(block, key, required=True))
    except ParseError as exc:
        job.fail(block, key, str(exc))


def build_model(job: JobFile):
    if "model" not in job.blocks:
        raise ParseError(f"{job.path}: task needs a [model] block")
    kind = job.get("model", "kind", required=True)
    p = _int(job, "model", "p", positive=True)
    if p is None:
        job.fail("model", "kind", "[model] needs 'p'")
    k = _int(job, "model", "k", 1, positive=True)
    try:
        if kind == "series":
            return SeriesField(p, k)
        if kind == "perfect-hull":
            return SeriesField.perfect_hull(p, k)
        if kind == "rational-series":
            return SeriesField(p, k, GroupDescriptor.rationals())
        if kind == "padic":
            return PadicField(p, _int(job, "model", "prec", 20, positive=True))
        if kind == "iterated":
            return IteratedSeriesField(p, k)
    except RamlabError as exc:
        job.fail("model", "kind", str(exc))
    job.fail("model", "kind", f"unknown model kind '{kind}'")


def build_stream(job: JobFile, model):
    if "stream" not in job.blocks:
        raise ParseError(f"{job.path}: task needs a [stream] block")
    kind = job.get("stream", "kind", required=True)
    if kind == "default-xi":
        if not isinstance(model, SeriesField):
            job.fail("stream", "kind", "default-xi needs a series model")
        terms = _int(job, "stream", "terms", 12, positive=True)
        return ambient_stream(default_xi(model, terms))
    if kind == "ambient":
        xi = _parse(job, "stream", "xi", lambda s: parse_element(s, model))
        return ambient_stream(xi)
    job.fail("stream", "kind", f"unknown stream kind '{kind}'")


def _entries(job):
    text = job.get("task", "entries", "")
    out = {}
    for part in filter(None, (s.strip() for s in text.split(","))):
        if ":" not in part:
            job.fail("task", "entries", f"entry {part!r} is not 'index : value'")
        i, v = part.split(":", 1)
        try:
            out[int(i)] = parse_value(v.strip())
        except (ValueError, ParseError) as exc:
            job.fail("task", "entries", f"bad entry {part!r}: {exc}")
    return out


# -- tasks ---------------------------------------------------------------------


def _task_echo(job):
    return {k: v for k, (v, _) in sorted(job.blocks.get("task", {}).items())} | {
        "model": {k: v for k, (v, _) in sorted(job.blocks.get("model", {}).items())},
        "stream": {k: v for k, (v, _) in sorted(job.blocks.get("stream", {}).items())},
    }


def _prepare(job, opts):
    """Parse everything a task needs; returns a thunk doing the computation."""
    name = job.get("task", "name")
    S = opts.confirmations or _int(job, "task", "confirmations", DEFAULT_CONFIRMATIONS, positive=True)
    if name == "verify":
        suite = job.get("task", "suite", "all")
        if suite != "all" and suite not in SUITES:
            job.fail("task", "suite", f"unknown suite '{suite}'")
        seed = _int(job, "task", "seed", 1)
        size = _int(job, "task", "size", 20, positive=True)
        return lambda: _verify_payload(suite, seed, size)
    if name == "nf-kummer-sim":
        p = _int(job, "task", "p", 2, positive=True)
        vp = parse_value(job.get("task", "vp", "1"))
        entries = _entries(job)
        return lambda: _sim_payload(p, vp, entries)
    model = build_model(job)
    if name == "nf-as":
        f = _parse(job, "task", "f", lambda s: parse_poly(s, model))
        at = build_stream(job, model)
        return lambda: _as_payload(f, at, S)
    if name == "nf-kummer":
        f = _parse(job, "task", "f", lambda s: parse_poly(s, model))
        at = build_stream(job, model)
        prec = opts.prec if opts.prec is not None else job.get("task", "prec", "12")
        prec = _parse_prec(job, prec, model)
        return lambda: _kummer_payload(f, at, S, prec)
    if name == "ext-invariants":
        P = _parse(job, "task", "minpoly", lambda s: parse_poly(s, model))
        declared = None
        if job.get("task", "e") is not None or job.get("task", "f") is not None:
            declared = {"e": _int(job, "task", "e", 1),
                        "f": _int(job, "task", "f", 1),
                        "residue_separable": job.get("task", "residue_separable", "yes") in ("yes", "true", "1")}
        return lambda: _ext_payload(model, P, declared)
    if name == "hensel":
        P = _parse(job, "task", "poly", lambda s: parse_poly(s, model))
        r0 = _int(job, "task", "residue_root", 0)
        target = _parse_prec(job, opts.prec if opts.prec is not None else job.get("task", "prec", "20"), model)
        return lambda: _hensel_payload(P, r0, target)
    raise AssertionError(name)  # pragma: no cover


def _parse_prec(job, text, model):
    try:
        v = parse_precision(str(text), model)
    except (ParseError, ValueError) as exc:
        job.fail("task", "prec", f"bad precision {text!r}: {exc}")
    if not v > 0:
        job.fail("task", "prec", "precision must be positive")
    return v


def _verify_payload(suite, seed, size):
    rep = run_suite(suite, seed, size)
    if suite == "all":
        ver = {name: r["passed"] == r["total"] for name, r in rep["suites"].items()}
    else:
        ver = {suite: rep["passed"] == rep["total"]}
    return rep, ver


def _sim_payload(p, vp, entries):
    rep = value_sim_terminates(ValueMonomialSystem(p, vp, entries))
    out = rep["final"]
    result = {"final": out.to_json(), "merges": rep["merges"], "initial_count": rep["initial_count"]}
    ver = {"count_never_increased": rep["count_never_increased"], "fold_law": rep["fold_law"]}
    return result, ver


def _as_payload(f, at, S):
    nf = as_normal_form(f, at, S)
    return nf.to_json(), nf.verify()


def _kummer_payload(f, at, S, prec):
    nf = kummer_normal_form_p2(f, at, S, prec)
    ver = nf.verify()
    if nf.sim_input is not None:
        ver["value_trace_matches_simulator"] = replay_trace(nf.sim_input, nf.value_trace) == nf.value_trace
    return nf.to_json(), ver


def _ext_payload(model, P, declared):
    spec = ExtensionSpec(model, P, declared)
    if isinstance(model, IteratedSeriesField):
        direct, layered = composite_immediate_check(spec), layerwise_immediate_check(spec)
        return ({"composite": direct.to_json(), "layerwise": layered.to_json()},
                {"routes_agree": direct.immediate == layered.immediate})
    inv = extension_invariants(spec)
    ver = {"degree_is_e_f_defect": inv.degree == inv.e * inv.f * inv.defect}
    return inv.to_json(), ver


def _hensel_payload(P, r0, target):
    r = hensel_lift(P, r0, target)
    return {"root": str(r)}, {"residual_below_precision": P(r).value_lower_bound() >= target}


# -- reports -------------------------------------------------------------------


def _dump(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_default) + "\n"


def _default(o):
    if isinstance(o, (Value, Fraction)):
        return str(o)
    raise TypeError(type(o).__name__)


def _emit(report, opts):
    text = _dump(report)
    if opts.json:
        with open(opts.json, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _finish(task, thunk, opts):
    report = {"tool": "ramlab", "version": __version__, "task": task}
    try:
        result, ver = thunk()
    except RamlabError as exc:
        report.update(status="error", error={"reason": exc.reason, "message": str(exc)})
        _emit(report, opts)
        return EXIT_COMPUTE
    ok = bool(ver) and all(ver.values())
    report.update(result=result, verification=ver, status="ok" if ok else "verification-failed")
    _emit(report, opts)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_run(opts) -> int:
    try:
        with open(opts.jobfile, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"ramlab: cannot read {opts.jobfile}: {exc.strerror}", file=sys.stderr)
        return EXIT_PARSE
    try:
        job = parse_job(text, opts.jobfile)
        thunk = _prepare(job, opts)
    except RamlabError as exc:
        print(f"ramlab: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    return _finish(_task_echo(job), thunk, opts)


def cmd_verify(opts) -> int:
    task = {"name": "verify", "suite": opts.suite, "seed": opts.seed, "size": opts.size}
    return _finish(task, lambda: _verify_payload(opts.suite, opts.seed, opts.size), opts)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ramlab", description="Normal forms and witnesses for valued fields.")
    ap.add_argument("--version", action="version", version=f"ramlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--prec", default=None, help="working precision (overrides the job file)")
        p.add_argument("--confirmations", type=int, default=None, help="stabilization confirmations S")
        p.add_argument("--json", default=None, help="also write the report to this path")

    run = sub.add_parser("run", help="run a job file")
    run.add_argument("jobfile")
    common(run)
    ver = sub.add_parser("verify", help="run a seeded property suite")
    ver.add_argument("--suite", required=True, choices=sorted(SUITES) + ["all"])
    ver.add_argument("--seed", type=int, default=1)
    ver.add_argument("--size", type=int, default=20)
    common(ver)
    return ap


def main(argv=None) -> int:
    opts = build_parser().parse_args(argv)
    if opts.confirmations is not None and opts.confirmations < 1:
        print("ramlab: --confirmations must be positive", file=sys.stderr)
        return EXIT_PARSE
    if opts.command == "run":
        return cmd_run(opts)
    return cmd_verify(opts)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
