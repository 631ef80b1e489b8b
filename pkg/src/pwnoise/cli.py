"""
Command line front end.

Every command writes one JSON report to stdout and logs to stderr. Exit
codes: 0 all checks pass, 1 a check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from pathlib import Path

from . import suites, wick
from .chaos import ChaosVector
from .model import CellModel, ModelError, validate_assumptions
from .symtensor import KernelError

SCHEMA_VERSION = 1

log = logging.getLogger("pwnoise")


class UsageError(Exception):
    pass


def _json(obj) -> str:
    """JSON text with floats written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return format(obj, ".17g")
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalars
        return _json(obj.item())
    if hasattr(obj, "tolist"):
        return _json(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _read_json(path: str) -> tuple[dict, dict]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc
    return data, {"path": str(path), "sha256": hashlib.sha256(raw).hexdigest()}


def _load_model(path: str) -> tuple[CellModel, dict]:
    data, meta = _read_json(path)
    try:
        return CellModel.from_dict(data), meta
    except ModelError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _config_density(model: CellModel, data: dict):
    """Density vector from {"counts": {id: int}} or {"density": {id: real}}; missing cells are 0."""
    if "counts" in data:
        vals = data["counts"]
        for v in vals.values():
            if not (isinstance(v, int) and v >= 0):
                raise UsageError(f"counts must be nonnegative integers, got {v!r}")
        scale = 1.0 / model.nu
    elif "density" in data:
        vals = data["density"]
        scale = None
    else:
        raise UsageError('configuration needs a "counts" or "density" object')
    x = [0.0] * model.size
    for cid, v in vals.items():
        x[model.index(cid)] = float(v)
    return [a * s for a, s in zip(x, scale)] if scale is not None else x


def cmd_validate(args) -> dict:
    model, meta = _load_model(args.model)
    ps = range(1, (args.p or 3) + 1)
    rep = validate_assumptions(model, ps)
    return {"inputs": [meta], "outputs": rep.to_dict(), "pass": rep.passed}


def cmd_eval(args) -> dict:
    model, mmeta = _load_model(args.model)
    cdata, cmeta = _read_json(args.chaos)
    xdata, xmeta = _read_json(args.config)
    inputs = [mmeta, cmeta, xmeta]
    try:
        phi = ChaosVector.from_dict(model, cdata)
        x = _config_density(model, xdata)
    except (KeyError, KernelError) as exc:
        # unknown cell ids and degree clashes mean the files do not fit the model
        return {"inputs": inputs, "outputs": {"error": f"model mismatch: {exc}"}, "pass": False}
    recursion = wick.evaluate(phi, x)
    factorized = wick.evaluate_factorized(phi, x)
    tol = args.tol if args.tol is not None else 1e-6
    delta = abs(recursion - factorized)
    return {
        "inputs": inputs,
        "outputs": {"recursion": recursion, "factorized": factorized, "discrepancy": delta, "tol": tol},
        "pass": delta <= tol,
    }


def cmd_suite(args) -> dict:
    if args.name not in suites.SUITES:
        raise UsageError(f"unknown suite {args.name!r}; choose from {sorted(suites.SUITES)}")
    model, meta = _load_model(args.model)
    out = suites.run(
        args.name,
        model,
        seed=args.seed,
        trunc=args.trunc,
        kappa=args.kappa,
        p=args.p,
        samples=args.samples,
        tol=args.tol,
    )
    return {"inputs": [meta], "outputs": out, "pass": bool(out["pass"])}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pwnoise", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--model", required=True, help="model JSON file")
        sp.add_argument("--trunc", type=int)
        sp.add_argument("--kappa", type=float)
        sp.add_argument("--p", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int)
        sp.add_argument("--tol", type=float)

    sp = sub.add_parser("validate", help="check the standing assumptions of a model")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("eval", help="evaluate a chaos vector at a configuration")
    common(sp)
    sp.add_argument("--chaos", required=True)
    sp.add_argument("--config", required=True)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("suite", help="run a named verification suite")
    sp.add_argument("name", help=", ".join(suites.SUITES))
    common(sp)
    sp.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    t0 = time.perf_counter()
    try:
        body = args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        report = {"schema_version": SCHEMA_VERSION, "command": args.command, "error": str(exc), "pass": False}
        print(_json(report))
        return 2
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command if args.command != "suite" else f"suite:{args.name}",
        **body,
        "wall_time": time.perf_counter() - t0,
    }
    print(_json(report))
    log.info("%s: %s", report["command"], "pass" if report["pass"] else "FAIL")
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
