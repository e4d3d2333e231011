"""``foliation-lab`` command-line interface.

Usage: ``foliation-lab <mode> <input.json> [options]``.  The report is
written to stdout as JSON with sorted keys (or as plain text with
``--text``).  Exit codes: 0 success, 1 an inequality evaluated false,
2 invalid input, 3 genericity failure, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import logging
import os
import sys
import time
from fractions import Fraction
from typing import Any

from . import germ, projective
from .errors import FoliationLabError, InputError
from .forms import PolyForm, parse_one_form
from .groebner import INFINITE, limits
from .poly import QQ, Field, PolyRing

MODES = ("check", "singular", "degz2", "delta", "bounds", "germ", "witness", "thma")

ENV_BUDGETS = {
    "max_pairs": "FOLIATION_LAB_MAX_PAIRS",
    "max_degree": "FOLIATION_LAB_MAX_DEGREE",
    "local_cap": "FOLIATION_LAB_LOCAL_CAP",
    "retries": "FOLIATION_LAB_RETRIES",
}

log = logging.getLogger("foliation_lab")


class Failed(Exception):
    """A checked inequality came out false; carries the full report."""

    def __init__(self, report: dict):
        super().__init__("inequality violated")
        self.report = report


# --------------------------------------------------------------------------
# input documents
# --------------------------------------------------------------------------

def parse_field(spec) -> Field:
    if spec is None:
        return QQ
    if isinstance(spec, dict):
        if set(spec) != {"fp"}:
            raise InputError(f"bad field descriptor {spec!r}")
        return Field(int(spec["fp"]))
    if isinstance(spec, str):
        return Field.parse(spec)
    raise InputError(f"bad field descriptor {spec!r}")


def load_document(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: the document must be a JSON object")
    return doc


def corpus_names() -> list[str]:
    """Names of the example documents shipped with the package."""
    root = importlib.resources.files("foliation_lab") / "corpus"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def corpus_path(name: str) -> str:
    if name not in corpus_names():
        raise InputError(f"no corpus document named {name!r}")
    return str(importlib.resources.files("foliation_lab") / "corpus" / f"{name}.json")


def load_corpus(name: str) -> dict:
    return load_document(corpus_path(name))


def _ring(doc: dict, field: Field, default_names) -> PolyRing:
    names = doc.get("vars")
    if names is None:
        names = default_names
    if not isinstance(names, list) or not all(isinstance(v, str) for v in names):
        raise InputError("'vars' must be a list of variable names")
    return PolyRing(tuple(names), field)


def _form(doc: dict, ring: PolyRing) -> PolyForm:
    form = doc.get("form")
    if isinstance(form, str):
        return parse_one_form(form, ring)
    if isinstance(form, list):
        if len(form) != ring.nvars:
            raise InputError(f"'form' has {len(form)} coefficients but there are {ring.nvars} variables")
        if not all(isinstance(c, str) for c in form):
            raise InputError("form coefficients must be polynomial strings")
        return PolyForm.one_form(ring, [ring.parse(c) for c in form])
    raise InputError("'form' must be a list of coefficient strings or a differential expression")


def _n(doc: dict) -> int:
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError("'n' must be a positive integer")
    return n


def foliation_from_document(doc: dict, field: Field) -> projective.ProjFoliation:
    n = _n(doc)
    if "generator" in doc:
        gen = doc["generator"]
        if not isinstance(gen, dict) or "kind" not in gen:
            raise InputError("'generator' must be an object with a 'kind'")
        return projective.generate(gen["kind"], {k: v for k, v in gen.items() if k != "kind"}, field, n)
    ring = _ring(doc, field, [f"x{i}" for i in range(n + 1)])
    if ring.nvars != n + 1:
        raise InputError(f"P^{n} needs {n + 1} variables, got {ring.nvars}")
    return projective.validate(_form(doc, ring), n)


def germ_from_document(doc: dict, field: Field) -> PolyForm:
    n = _n(doc)
    default = ["x", "y"] if n == 2 else [f"x{i}" for i in range(1, n + 1)]
    ring = _ring(doc, field, default)
    if ring.nvars != n:
        raise InputError(f"a germ in {n} variables needs {n} names, got {ring.nvars}")
    return _form(doc, ring)


# --------------------------------------------------------------------------
# modes
# --------------------------------------------------------------------------

def _plane(doc: dict):
    plane = doc.get("plane")
    if plane is not None and not (isinstance(plane, list) and all(isinstance(r, list) for r in plane)):
        raise InputError("'plane' must be a matrix (list of rows)")
    return plane


def _summary(F: projective.ProjFoliation) -> dict:
    return {"n": F.n, "d": F.d, "form": [str(A) for A in F.coefficients()]}


def mode_check(doc, field, opts) -> dict:
    F = foliation_from_document(doc, field)
    return {**_summary(F), "valid": True, "descent": True, "homogeneous": True, "integrable": True}


def mode_singular(doc, field, opts) -> dict:
    F = foliation_from_document(doc, field)
    locus = projective.singular_ideal(F)
    G = locus.ideal.groebner()
    return {**_summary(F), "groebner_basis": [str(g) for g in G.polys],
            "projective_dimension": locus.projective_dimension}


def mode_degz2(doc, field, opts) -> dict:
    F = foliation_from_document(doc, field)
    v = projective.deg_z2(F, opts.seed, opts.retries, _plane(doc))
    return {**_summary(F), "deg_z2": v.value, "certificate": v.certificate()}


def mode_delta(doc, field, opts) -> dict:
    F = foliation_from_document(doc, field)
    v = projective.delta_global(F, opts.seed, opts.retries, _plane(doc))
    return {**_summary(F), "delta": v.value, "certificate": v.certificate()}


def mode_bounds(doc, field, opts) -> dict:
    F = foliation_from_document(doc, field)
    report = projective.verify_bounds(F, opts.seed, opts.retries, _plane(doc))
    out = {**_summary(F), **report.as_dict()}
    if not report.passed:
        raise Failed(out)
    return out


def mode_witness(doc, field, opts) -> dict:
    F = foliation_from_document(doc, field)
    w = projective.first_integral_witness(F, opts.seed, opts.retries, _plane(doc))
    out = {**_summary(F), "witness": None if w is None else w.as_dict()}
    if w is not None and not (w.wedge_vanishes and w.radial_identity):
        raise Failed(out)
    return out


def mode_germ(doc, field, opts) -> dict:
    eta = germ_from_document(doc, field)
    out: dict[str, Any] = {"n": eta.ring.nvars, "form": str(eta)}
    if eta.ring.nvars == 2:
        inv = germ.invariants(eta)
        out.update(inv.as_dict())
        return out
    if "plane" in doc:
        report = germ.key_lemma_check(eta, doc["plane"])
    else:
        report = germ.key_lemma_trial(eta, projective.substream(opts.seed, "plane"), opts.retries)
    out["sandwich"] = report.as_dict()
    if not report.passed:
        raise Failed(out)
    return out


def mode_thma(doc, field, opts) -> dict:
    n = _n(doc)
    nums = dict(doc)
    if "HN" not in nums:
        if "d" not in nums:
            raise InputError("thma needs HN, KH, NH (or d for projective space)")
        nums.update(projective.pn_intersection_numbers(n, int(nums["d"])))
    if "c2H" not in nums and "deg_z2" in nums and "d" in nums:
        c = projective.chern_data(n, int(nums["d"]), int(nums["deg_z2"]), int(nums.get("delta", 0)))
        nums["c2H"] = c.c2_tf
    missing = [k for k in ("HN", "KH", "NH", "c2H", "delta") if k not in nums]
    if missing:
        raise InputError(f"thma is missing {', '.join(missing)}")
    report = projective.theorem_a_report(n, nums["HN"], nums["KH"], nums["NH"], nums["c2H"], nums["delta"],
                                         nums.get("disc"), nums.get("square"))
    out = report.as_dict()
    if not report.passed:
        raise Failed(out)
    return out


HANDLERS = {
    "check": mode_check, "singular": mode_singular, "degz2": mode_degz2, "delta": mode_delta,
    "bounds": mode_bounds, "germ": mode_germ, "witness": mode_witness, "thma": mode_thma,
}


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float):
        return "infinite" if v == INFINITE else str(v)
    return v


def emit_report(report: dict, as_text: bool = False) -> str:
    report = _jsonable(report)
    if not as_text:
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else k, v[k])
        else:
            lines.append(f"{prefix}: {json.dumps(v, sort_keys=True, ensure_ascii=False)}")
    walk("", report)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def _env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"environment variable {name} must be an integer") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="foliation-lab", description="Singularity invariants of "
                                 "codimension-one foliations and checks of their bounds.")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("input", help="input JSON document")
    ap.add_argument("--field", help="q or fp:P (overrides the document)")
    ap.add_argument("--seed", default="0", help="seed for all random choices (default 0)")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="text", action="store_false", help="JSON output (default)")
    fmt.add_argument("--text", dest="text", action="store_true", help="plain text output")
    ap.set_defaults(text=False)
    ap.add_argument("--max-pairs", type=int, help="S-pair budget per Groebner basis")
    ap.add_argument("--max-degree", type=int, help="degree budget for bases and Hilbert functions")
    ap.add_argument("--retries", type=int, help="plane retries before a genericity failure")
    ap.add_argument("--local-cap", type=int, help="largest power of the maximal ideal for local lengths")
    ap.add_argument("--no-timing", action="store_true", help="omit the timing field")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    start = time.perf_counter()
    report: dict[str, Any] = {"mode": args.mode, "seed": args.seed}
    code = 0
    try:
        budgets = {k: getattr(args, k) if getattr(args, k) is not None else _env_int(env)
                   for k, env in ENV_BUDGETS.items()}
        args.retries = budgets.pop("retries") or projective.DEFAULT_RETRIES
        doc = load_document(args.input)
        field = parse_field(args.field if args.field is not None else doc.get("field"))
        report["input"] = doc
        report["field"] = field.describe()
        with limits(**budgets) as lim:
            report["budgets"] = {"max_pairs": lim.max_pairs, "max_degree": lim.max_degree,
                                 "local_cap": lim.local_cap, "retries": args.retries}
            report["result"] = HANDLERS[args.mode](doc, field, args)
        report["status"] = "ok"
    except Failed as e:
        code = 1
        report["result"] = e.report
        report["status"] = "inequality_violated"
        print("foliation-lab: an inequality evaluated false; the report holds the reproduction data",
              file=sys.stderr)
    except FoliationLabError as e:
        code = e.exit_code
        report["status"] = "error"
        report["error"] = {"type": type(e).__name__, "message": str(e)}
        print(f"foliation-lab: {type(e).__name__}: {e}", file=sys.stderr)
    except (KeyError, TypeError, ValueError) as e:
        code = 2
        report["status"] = "error"
        report["error"] = {"type": "InputError", "message": f"malformed input: {e!r}"}
        print(f"foliation-lab: malformed input: {e!r}", file=sys.stderr)
    if not args.no_timing:
        report["timing_ms"] = int((time.perf_counter() - start) * 1000)
    report["exit_code"] = code
    out.write(emit_report(report, args.text))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
