"""Command-line client for the verification service.

All verbs build the same request models the HTTP service consumes; without
``--server`` the requests go through an in-process test client, with it
they are POSTed to a running instance.  ``derham serve`` starts the
service.

Exit codes: 0 all checks passed, 1 some check failed, 2 configuration or
input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import pathlib
import sys

from .reports import emit_csv, emit_json, emit_markdown


class _Client:
    """Uniform access to the service, in-process or over HTTP."""

    def __init__(self, server: str | None):
        self.server = server
        if server is None:
            import warnings
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DeprecationWarning)
                from fastapi.testclient import TestClient
            from .service import create_app
            self._client = TestClient(create_app())
        else:
            import httpx
            self._client = httpx.Client(base_url=server, timeout=3600.0)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code >= 400:
            detail = resp.json().get("detail", resp.text)
            raise SystemExit(f"error ({resp.status_code}): {detail}")
        return resp.json()


def _load_json(path: str) -> dict:
    try:
        return json.loads(pathlib.Path(path).read_text())
    except (OSError, json.JSONDecodeError) as err:
        print(f"cannot read {path}: {err}", file=sys.stderr)
        raise SystemExit(2)


def _write_output(data, out: str | None, default_name: str):
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if out:
        path = pathlib.Path(out)
        if path.is_dir() or not path.suffix:
            path.mkdir(parents=True, exist_ok=True)
            path = path / default_name
        path.write_text(text)
        print(f"wrote {path}")
    else:
        print(text, end="")


def _bump_payload(args) -> dict | None:
    if getattr(args, "bump", None):
        return _load_json(args.bump)
    return None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="derham",
        description="Poincare/Bogovskii operator toolkit: verification "
                    "suites, operator evaluation, and the HTTP service.")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs "
                             "in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    p_poi = sub.add_parser("poincare", help="exact Poincare operator verbs")
    poi_sub = p_poi.add_subparsers(dest="verb", required=True)
    p = poi_sub.add_parser("apply", help="apply R_l to a polynomial form")
    p.add_argument("--form", required=True, help="JSON file with the form")
    p.add_argument("--bump", help="JSON file with the bump spec")
    p.add_argument("--out")
    p = poi_sub.add_parser("homotopy-check", help="exact homotopy identity")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bump")
    p.add_argument("--out")
    p = poi_sub.add_parser("qspace-check", help="polynomial space preservation")
    p.add_argument("--p", type=int, default=2, dest="order")
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--out")

    p_bog = sub.add_parser("bogovskii", help="numeric Bogovskii operator verbs")
    bog_sub = p_bog.add_subparsers(dest="verb", required=True)
    p = bog_sub.add_parser("eval", help="evaluate T (or numeric R) at points")
    p.add_argument("--fixture", required=True, help="JSON fixture spec")
    p.add_argument("--points", required=True,
                   help="JSON file with a list of points")
    p.add_argument("--operator", choices=["T", "R"], default="T")
    p.add_argument("--bump")
    p.add_argument("--out")
    p = bog_sub.add_parser("homotopy-check")
    p.add_argument("--n", type=int, default=2, choices=[2, 3])
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bump")
    p.add_argument("--out")
    p = bog_sub.add_parser("adjoint-check")
    p.add_argument("--pairs", type=int, default=4)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bump")
    p.add_argument("--out")

    p_ker = sub.add_parser("kernel", help="kernel G_l scans")
    ker_sub = p_ker.add_subparsers(dest="verb", required=True)
    p = ker_sub.add_parser("g-scan")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--pairs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bump")
    p.add_argument("--out")

    p_sym = sub.add_parser("symbol", help="order -1 symbol scans")
    sym_sub = p_sym.add_subparsers(dest="verb", required=True)
    p = sym_sub.add_parser("scan")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--directions", type=int, default=8)
    p.add_argument("--xi-points", type=int, default=40, dest="xi_points")
    p.add_argument("--xi-max", type=float, default=1e3, dest="xi_max")
    p.add_argument("--out")

    p_glue = sub.add_parser("glue", help="composite operators on box unions")
    glue_sub = p_glue.add_subparsers(dest="verb", required=True)
    for verb in ("homotopy-check", "support-check", "commutation-check"):
        p = glue_sub.add_parser(verb)
        p.add_argument("--domain", choices=["l", "u", "box"], default="l")
        p.add_argument("--l", type=int, default=1)
        p.add_argument("--points", type=int, default=5)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("suite", help="algebra, forms, bump, poincare, "
                                     "bogovskii, kernel, symbol, glue, or all")
    p_ver.add_argument("--n", type=int, default=None)
    p_ver.add_argument("--l", type=int, default=None)
    p_ver.add_argument("--degree", type=int, default=4)
    p_ver.add_argument("--count", type=int, default=20)
    p_ver.add_argument("--points", type=int, default=8)
    p_ver.add_argument("--pairs", type=int, default=4)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--config", help="JSON config file (RunConfig schema)")
    p_ver.add_argument("--out", help="output directory for reports")
    p_ver.add_argument("--format", choices=["json", "csv", "markdown"],
                       default="json")

    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # argparse exits with 2 on usage errors already
        raise

    if args.command == "serve":
        import uvicorn
        from .service import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    if args.command == "verify":
        return _cmd_verify(args)

    client = _Client(args.server)
    try:
        return _dispatch(client, args)
    except SystemExit as err:
        if isinstance(err.code, str):
            print(err.code, file=sys.stderr)
            return 2
        raise


def _dispatch(client: _Client, args) -> int:
    if args.command == "poincare":
        if args.verb == "apply":
            payload = {"form": _load_json(args.form)}
            if args.bump:
                payload["bump"] = _load_json(args.bump)
            data = client.post("/poincare/apply", payload)
            _write_output(data, args.out, "poincare_apply.json")
            return 0
        if args.verb == "homotopy-check":
            payload = {"n": args.n, "degree": args.degree, "count": args.count,
                       "seed": args.seed}
            if args.bump:
                payload["bump"] = _load_json(args.bump)
            data = client.post("/poincare/homotopy-check", payload)
            _write_output(data, args.out, "poincare_homotopy.json")
            return 0 if data["all_zero"] else 1
        if args.verb == "qspace-check":
            payload = {"p": args.order}
            if args.l is not None:
                payload["l_values"] = [args.l]
            data = client.post("/poincare/qspace-check", payload)
            _write_output(data, args.out, "poincare_qspace.json")
            return 0 if data["all_preserved"] else 1

    if args.command == "bogovskii":
        if args.verb == "eval":
            payload = {"fixture": _load_json(args.fixture),
                       "points": _load_json(args.points),
                       "operator": args.operator}
            if args.bump:
                payload["bump"] = _load_json(args.bump)
            data = client.post("/bogovskii/eval", payload)
            _write_output(data, args.out, "bogovskii_eval.json")
            return 0
        if args.verb == "homotopy-check":
            payload = {"n": args.n, "points": args.points, "seed": args.seed}
            if args.l is not None:
                payload["l"] = args.l
            if args.bump:
                payload["bump"] = _load_json(args.bump)
            data = client.post("/bogovskii/homotopy-check", payload)
            _emit_residual_csv(data.get("cases", []), args.out,
                               "bogovskii_homotopy")
            _write_output(data, args.out, "bogovskii_homotopy.json")
            return 0 if data["passed"] else 1
        if args.verb == "adjoint-check":
            payload = {"pairs": args.pairs, "seed": args.seed}
            if args.l is not None:
                payload["l"] = args.l
            if args.bump:
                payload["bump"] = _load_json(args.bump)
            data = client.post("/bogovskii/adjoint-check", payload)
            _write_output(data, args.out, "bogovskii_adjoint.json")
            return 0 if data["passed"] else 1

    if args.command == "kernel":
        payload = {"n": args.n, "pairs": args.pairs, "seed": args.seed}
        if args.l is not None:
            payload["l"] = args.l
        if args.bump:
            payload["bump"] = _load_json(args.bump)
        data = client.post("/kernel/g-scan", payload)
        _emit_residual_csv(data.get("rows", []), args.out, "kernel_gscan")
        _write_output(data, args.out, "kernel_gscan.json")
        return 0 if data["passed"] else 1

    if args.command == "symbol":
        payload = {"n": args.n, "l": args.l, "j": args.j,
                   "directions": args.directions, "xi_points": args.xi_points,
                   "xi_max": args.xi_max}
        data = client.post("/symbol/scan", payload)
        if args.out:
            outdir = pathlib.Path(args.out)
            outdir.mkdir(parents=True, exist_ok=True)
            path = outdir / "symbol_scan.csv"
            with path.open("w", newline="") as fh:
                rows = data["rows"]
                if rows:
                    writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
                    writer.writeheader()
                    writer.writerows(rows)
            print(f"wrote {path}")
        small = dict(data)
        small.pop("rows", None)
        _write_output(small, args.out, "symbol_scan.json")
        return 0 if data["all_plateau"] else 1

    if args.command == "glue":
        payload = {"domain": args.domain, "l": args.l, "points": args.points,
                   "seed": args.seed}
        path = {"homotopy-check": "/glue/homotopy-check",
                "support-check": "/glue/support-check",
                "commutation-check": "/glue/commutation-check"}[args.verb]
        data = client.post(path, payload)
        _write_output(data, args.out, f"glue_{args.verb.replace('-', '_')}.json")
        return 0 if data["passed"] else 1

    print(f"unhandled command {args.command}", file=sys.stderr)
    return 2


def _emit_residual_csv(rows, out, name):
    if not out or not rows:
        return
    outdir = pathlib.Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{name}.csv"
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path}")


def _cmd_verify(args) -> int:
    from pydantic import ValidationError

    from .reports import Report, write_report
    from .service.models import RunConfig
    from .suites import SUITES, run_suite

    base = {}
    if args.config:
        base = _load_json(args.config)
    suites = sorted(SUITES) if args.suite == "all" else [args.suite]
    for s in suites:
        if s not in SUITES:
            print(f"unknown suite {s!r}; choose from {sorted(SUITES)} or 'all'",
                  file=sys.stderr)
            return 2
    overall = 0
    for suite in suites:
        payload = dict(base)
        payload["suite"] = suite
        for key in ("n", "l", "degree", "count", "points", "pairs", "seed"):
            val = getattr(args, key)
            if val is not None:
                payload[key] = val
        try:
            config = RunConfig.model_validate(payload)
        except ValidationError as err:
            print(f"invalid config: {err}", file=sys.stderr)
            return 2
        rep = run_suite(suite, config.to_suite_config())
        summary = rep.summary()
        status = "PASS" if rep.passed else "FAIL"
        print(f"[{status}] suite={suite} checks={summary['checks']} "
              f"failures={summary['failures']} "
              f"max_residual={summary['max_residual']:.3g} "
              f"elapsed={rep.elapsed_s:.1f}s")
        if args.out:
            path = write_report(rep, args.out, args.format)
            print(f"  wrote {path}")
        if not rep.passed:
            overall = 1
    return overall


if __name__ == "__main__":
    sys.exit(main())
