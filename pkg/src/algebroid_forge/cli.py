"""Command-line client for the verification service.

The subcommands build the same pydantic requests the HTTP endpoints accept
and execute them in-process by default; pass ``--server URL`` to talk to a
running instance instead. Exit status: 0 when every selected check passes
(for catalog runs, when every verdict matches its expected value), 1 on a
failing check or mismatch, 2 on malformed input.

Catalog-run JSON reports zero out elapsed_ms so identical inputs and seeds
produce byte-identical bytes; single-model check reports carry wall time.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from pydantic import ValidationError

from .catalog import catalog_names
from .checks import CHECK_NAMES
from .hamiltonian import SynthesisError
from .models import CheckReportModel, ModelError, ModelSpec
from .service import (CatalogRunRequest, CheckRequest, SynthRequest,
                      WeilRequest, do_catalog_run, do_check, do_synth, do_weil)

EXIT_OK, EXIT_FAIL, EXIT_BAD_INPUT = 0, 1, 2


def _json_default(o):
    import numpy as np

    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, default=_json_default)


def _load_model(path: str) -> ModelSpec:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ModelError(f"cannot read model file {path}: {err}")
    try:
        return ModelSpec.model_validate(raw)
    except ValidationError as err:
        raise ModelError(f"model file {path} is not valid: {err}")


class _Remote:
    def __init__(self, base: str):
        import httpx

        self.base = base.rstrip("/")
        self.client = httpx.Client(timeout=300.0)

    def post(self, path: str, payload: dict) -> dict:
        resp = self.client.post(self.base + path, json=payload)
        if resp.status_code >= 400:
            detail = resp.json().get("detail", resp.text)
            raise ModelError(f"server rejected the request: {detail}")
        return resp.json()


def _print_report(report: CheckReportModel, fmt: str) -> None:
    if fmt == "json":
        print(_canonical_json(report.model_dump(exclude_none=True)))
        return
    print(f"model: {report.model}   seed={report.seed} samples={report.samples} "
          f"tol={report.tol:g}")
    for c in report.checks:
        if c.verdict == "skipped":
            print(f"  {c.name:<20} SKIP   ({c.skipped_reason})")
        elif c.verdict == "pass":
            kind = "" if c.exact is None else (" [exact]" if c.exact else " [numeric]")
            print(f"  {c.name:<20} PASS{kind}")
        else:
            extra = f" residual={c.residual_max:.3g}" if c.residual_max else ""
            witness = f"  {c.witness}" if c.witness else ""
            print(f"  {c.name:<20} FAIL{extra}{witness}")
    print(f"elapsed: {report.elapsed_ms} ms")


def _cmd_check(args) -> int:
    model = _load_model(args.model)
    checks = args.checks.split(",") if args.checks else None
    if checks:
        unknown = set(checks) - set(CHECK_NAMES)
        if unknown:
            raise ModelError(f"unknown checks: {sorted(unknown)}; "
                             f"known: {', '.join(CHECK_NAMES)}")
    req = CheckRequest(model=model, checks=checks, samples=args.samples,
                       seed=args.seed, tol=args.tol)
    if args.server:
        data = _Remote(args.server).post("/check", req.model_dump())
        report = CheckReportModel.model_validate(data)
    else:
        report = do_check(req)
    _print_report(report, args.format)
    failing = [c for c in report.checks if c.verdict == "fail"]
    return EXIT_FAIL if failing else EXIT_OK


def _cmd_weil(args) -> int:
    model = _load_model(args.model)
    req = WeilRequest(model=model, samples=args.samples, seed=args.seed,
                      tol=args.tol)
    if args.server:
        data = _Remote(args.server).post("/weil", req.model_dump())
    else:
        data = do_weil(req).model_dump()
    if args.format == "json":
        print(_canonical_json(data))
    else:
        print(f"model: {data['model']}")
        print(f"extension: {data['extension']}")
        for key in ("(3,0)", "(2,1)", "(1,2)"):
            status = "PASS" if data["bidegree_passed"][key] else "FAIL"
            print(f"  bidegree {key}: {status}  residual={data['residuals'][key]:.3g}")
        print(f"  extension property: {'PASS' if data['extension_property'] else 'FAIL'}")
        if data["closed"]:
            print(f"  closed extension; basic={data['basic']}")
        else:
            print("  extension is not closed")
    return EXIT_OK if data["closed"] else EXIT_FAIL


def _cmd_synth(args) -> int:
    model = _load_model(args.model)
    v_ref = [s.strip() for s in args.vref.split(",")]
    req = SynthRequest(model=model, v_ref=v_ref)
    if args.server:
        data = _Remote(args.server).post("/synth", req.model_dump())
        out = data["model"]
    else:
        out = do_synth(req).model.model_dump(exclude_none=True)
    print(_canonical_json(out))
    return EXIT_OK


def _cmd_catalog(args) -> int:
    if args.action == "list":
        names = catalog_names()
        if args.format == "json":
            print(_canonical_json({"models": names}))
        else:
            for n in names:
                print(n)
        return EXIT_OK
    req = CatalogRunRequest(name=args.name, samples=args.samples,
                            seed=args.seed, tol=args.tol)
    if args.server:
        data = _Remote(args.server).post("/catalog/run", req.model_dump())
    else:
        data = do_catalog_run(req).model_dump(exclude_none=True)
    if args.format == "json":
        print(_canonical_json(data))
    else:
        for entry in data["results"]:
            status = "ok" if entry["matches"] else "MISMATCH"
            print(f"{entry['model']:<28} {status}")
            for check, pair in entry["mismatches"].items():
                print(f"    {check}: expected {pair['expected']}, "
                      f"got {pair['actual']}")
        print("catalog:", "ok" if data["ok"] else "MISMATCH")
    return EXIT_OK if data["ok"] else EXIT_FAIL


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("algebroid_forge.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forge",
        description="certify or refute hamiltonian structures on chart-level "
                    "Lie algebroid models")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_checks=False):
        p.add_argument("--samples", type=int, default=None,
                       help="override the model's sample count")
        p.add_argument("--seed", type=int, default=None,
                       help="override the model's sampling seed")
        p.add_argument("--tol", type=float, default=None,
                       help="override the model's tolerance")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--server", default=None,
                       help="base URL of a running service; default runs "
                            "in-process")
        if with_checks:
            p.add_argument("--checks", default=None,
                           help="comma-separated subset of: "
                                + ",".join(CHECK_NAMES))

    p_check = sub.add_parser("check", help="run checks on a model file")
    p_check.add_argument("model")
    common(p_check, with_checks=True)
    p_check.set_defaults(func=_cmd_check)

    p_weil = sub.add_parser("weil", help="build the graded extension and "
                                         "test closedness by bidegree")
    p_weil.add_argument("model")
    common(p_weil)
    p_weil.set_defaults(func=_cmd_weil)

    p_synth = sub.add_parser("synth", help="synthesize a connection making "
                                           "the model's momentum candidate a "
                                           "momentum section")
    p_synth.add_argument("model")
    p_synth.add_argument("--vref", required=True,
                         help="comma-separated reference vector field "
                              "components")
    p_synth.add_argument("--format", choices=("text", "json"), default="json")
    p_synth.add_argument("--server", default=None)
    p_synth.set_defaults(func=_cmd_synth)

    p_cat = sub.add_parser("catalog", help="list or run the built-in examples")
    p_cat.add_argument("action", choices=("list", "run"))
    p_cat.add_argument("name", nargs="?", default=None)
    common(p_cat)
    p_cat.set_defaults(func=_cmd_catalog)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ModelError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except SynthesisError as err:
        print(f"synthesis failed: {err}", file=sys.stderr)
        return EXIT_FAIL
    except KeyError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
