"""Command-line front end: a thin client over the service operations.

Every subcommand builds the same request model the HTTP endpoint consumes
and either runs the handler in-process (default) or posts it to a running
server (--server URL).  Reports print as JSON (deterministic: sorted keys,
no timestamps) or as CSV for sweep-style outputs.  When --out is given, a
manifest JSON with the resolved parameters, package version, and wall time
is written next to the output; feeding that manifest back through --config
reproduces the run.

Exit codes: 0 ok, 2 usage error, 3 resource budget exceeded, 4 witness
verification failure.
"""

import argparse
import csv
import io
import json
import os
import signal
import sys
import time
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version

from pydantic import ValidationError

from .budget import ResourceBudgetError, VerificationError
from .service import models as sm
from .service.ops import OPERATIONS, build_weight_table

USAGE_EXIT, RESOURCE_EXIT, VERIFY_EXIT = 2, 3, 4


def _pkg_version() -> str:
    try:
        return version("tuplesieve")
    except PackageNotFoundError:
        return "0.0.0"


def _parse_int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip() != ""]


def _parse_float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip() != ""]


def _parse_pairs(text: str) -> list[list[int]]:
    """'1,0:1,2' -> [[1, 0], [1, 2]]"""
    out = []
    for chunk in text.split(":"):
        nums = _parse_int_list(chunk)
        if len(nums) != 2:
            raise ValueError(f"each pair needs two integers, got {chunk!r}")
        out.append(nums)
    return out


# Flag definitions per subcommand: (flag, dest, parser, help)
_I, _F, _S = int, float, str
_COMMANDS: dict[str, list[tuple[str, str, object, str]]] = {
    "tuples admissible": [("--offsets", "offsets", _parse_int_list, "comma-separated offsets, e.g. 0,4,6,10,12,16")],
    "tuples residues": [("--offsets", "offsets", _parse_int_list, "comma-separated offsets"),
                        ("--p", "p", _I, "prime modulus")],
    "tuples singular": [("--offsets", "offsets", _parse_int_list, "comma-separated offsets"),
                        ("--tol", "tol", _F, "certified truncation error target")],
    "tuples narrowest": [("--k", "k", _I, "tuple size (k <= 10)"),
                         ("--diameter-cap", "diameter_cap", _I, "largest diameter to search")],
    "tuples gallagher": [("--k", "k", _I, "tuple size"), ("--h", "h", _I, "window length"),
                         ("--tol", "tol", _F, "per-tuple singular series tolerance")],
    "sums table": [("--kind", "kind", _S, "lambda_R | lambda_lower_R | gpy | selberg | moment"),
                   ("--start", "start", _I, "interval start (exclusive)"),
                   ("--end", "end", _I, "interval end (inclusive)"),
                   ("--R", "R", _F, "truncation level"),
                   ("--offsets", "offsets", _parse_int_list, "tuple offsets for gpy/selberg"),
                   ("--ell", "ell", _I, "extra exponent for the gpy weight"),
                   ("--restriction", "restriction", _I, "zero entries sharing a factor with primes <= w"),
                   ("--moment-k", "moment_k", _I, "moment order (<= 3)"),
                   ("--window", "window", _I, "window length for the moment weight"),
                   ("--threads", "threads", _I, "worker threads"),
                   ("--max-values", "max_values", _I, "values to inline in the report")],
    "corr pair": [("--N", "N", _parse_int_list, "range end(s), comma-separated for sweeps"),
                  ("--shift", "shift", _I, "nonzero shift"),
                  ("--R", "R", _F, "truncation level"),
                  ("--theta", "theta", _parse_float_list, "R = N^theta exponent(s)"),
                  ("--tol", "tol", _F, "singular series tolerance"),
                  ("--threads", "threads", _I, "worker threads")],
    "corr self": [("--N", "N", _parse_int_list, "range end(s)"),
                  ("--R", "R", _F, "truncation level"),
                  ("--theta", "theta", _parse_float_list, "R = N^theta exponent(s)"),
                  ("--threads", "threads", _I, "worker threads")],
    "corr gpy-pair": [("--N", "N", _parse_int_list, "range end(s)"),
                      ("--R", "R", _F, "truncation level"),
                      ("--theta", "theta", _parse_float_list, "R = N^theta exponent(s)"),
                      ("--tuple1", "offsets1", _parse_int_list, "first offset tuple"),
                      ("--ell1", "ell1", _I, "first extra exponent"),
                      ("--tuple2", "offsets2", _parse_int_list, "second offset tuple"),
                      ("--ell2", "ell2", _I, "second extra exponent"),
                      ("--threads", "threads", _I, "worker threads")],
    "corr gpy-theta": [("--N", "N", _parse_int_list, "range end(s)"),
                       ("--R", "R", _F, "truncation level"),
                       ("--theta", "theta", _parse_float_list, "R = N^theta exponent(s)"),
                       ("--tuple1", "offsets1", _parse_int_list, "first offset tuple"),
                       ("--ell1", "ell1", _I, "first extra exponent"),
                       ("--tuple2", "offsets2", _parse_int_list, "second offset tuple"),
                       ("--ell2", "ell2", _I, "second extra exponent"),
                       ("--h0", "h0", _I, "offset of the prime log factor"),
                       ("--threads", "threads", _I, "worker threads")],
    "corr hl": [("--tuple", "offsets", _parse_int_list, "offset tuple"),
                ("--N", "N", _parse_int_list, "range end(s)"),
                ("--tol", "tol", _F, "singular series tolerance"),
                ("--threads", "threads", _I, "worker threads")],
    "corr second-moment": [("--N", "N", _parse_int_list, "range end(s)"),
                           ("--lambda", "lambda_param", _F, "window length multiplier"),
                           ("--threads", "threads", _I, "worker threads")],
    "detect first-moment": [("--N", "N", _I, "range start; sums run over (N, 2N]"),
                            ("--lambda", "lambda_param", _F, "window length multiplier"),
                            ("--R", "R", _F, "truncation level"),
                            ("--theta", "theta", _F, "R = N^theta exponent"),
                            ("--threads", "threads", _I, "worker threads")],
    "detect mollified": [("--N", "N", _I, "range start"),
                         ("--lambda", "lambda_param", _F, "window length multiplier"),
                         ("--rho", "rho", _F, "penalty multiplier"),
                         ("--C", "C", _F, "mollifier shift"),
                         ("--R", "R", _F, "truncation level"),
                         ("--theta", "theta", _F, "R = N^theta exponent"),
                         ("--threads", "threads", _I, "worker threads"),
                         ("--witness-cap", "witness_cap", _I, "most witnesses to list")],
    "detect gpy": [("--N", "N", _I, "range start"), ("--h", "h", _I, "window length"),
                   ("--k", "k", _I, "tuple size"), ("--ell", "ell", _I, "extra exponent"),
                   ("--r", "r", _I, "prime count the penalty charges for"),
                   ("--R", "R", _F, "truncation level"),
                   ("--theta", "theta", _F, "R = N^theta exponent"),
                   ("--threads", "threads", _I, "worker threads"),
                   ("--witness-cap", "witness_cap", _I, "most witnesses to list")],
    "detect gs": [("--tuple", "offsets", _parse_int_list, "offset tuple"),
                  ("--ell", "ell", _I, "extra exponent"),
                  ("--r", "r", _I, "prime count the penalty charges for"),
                  ("--N", "N", _I, "range start"),
                  ("--R", "R", _F, "truncation level"),
                  ("--theta", "theta", _F, "R = N^theta exponent"),
                  ("--threads", "threads", _I, "worker threads"),
                  ("--witness-cap", "witness_cap", _I, "most witnesses to list")],
    "detect heathbrown": [("--pairs", "pairs", _parse_pairs, "linear forms a,b separated by colons, e.g. 1,0:1,2"),
                          ("--rho", "rho", _F, "divisor penalty multiplier"),
                          ("--x", "x", _I, "range end"),
                          ("--R", "R", _F, "truncation level (default x^0.25)"),
                          ("--threads", "threads", _I, "worker threads"),
                          ("--witness-cap", "witness_cap", _I, "most witnesses to list")],
    "detect gaps": [("--limit", "limit", _I, "sieve limit"),
                    ("--r", "r", _I, "gap step"),
                    ("--threshold", "threshold", _F, "normalized gap threshold"),
                    ("--max-rows", "max_rows", _I, "most rows to keep")],
    "dist theta": [("--N", "N", _I, "prime range end"), ("--q", "q", _I, "modulus"),
                   ("--a", "a", _I, "residue class")],
    "dist bv": [("--N", "N", _I, "prime range end"), ("--Q", "Q", _I, "largest modulus"),
                ("--A", "A", _F, "normalization exponent")],
    "dist probe": [("--N", "N", _I, "prime range end"),
                   ("--alphas", "alphas", _parse_float_list, "comma-separated exponents, Q = N^alpha"),
                   ("--A", "A", _F, "normalization exponent")],
    "e2 sieve": [("--limit", "limit", _I, "sieve limit"),
                 ("--max-values", "max_values", _I, "values to inline")],
    "e2 gaps": [("--limit", "limit", _I, "sieve limit"), ("--r", "r", _I, "gap step")],
}

_SWEEPABLE = {"corr pair", "corr self", "corr gpy-pair", "corr gpy-theta",
              "corr hl", "corr second-moment"}

# commands that take a truncation level; R = N^0.25 when neither flag is given
_THETA_DEFAULT = 0.25
_TRUNCATED = {"corr pair", "corr self", "corr gpy-pair", "corr gpy-theta",
              "detect first-moment", "detect mollified", "detect gpy", "detect gs"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tuplesieve",
        description="Prime tuple sieve workbench: weights, correlation sums, positivity detectors")
    parser.add_argument("--version", action="version", version=f"tuplesieve {_pkg_version()}")
    groups = parser.add_subparsers(dest="group", required=True)

    by_group: dict[str, list[str]] = {}
    for name in _COMMANDS:
        g, c = name.split(" ", 1)
        by_group.setdefault(g, []).append(c)

    subparser_map = {}
    for g, cmds in by_group.items():
        gp = groups.add_parser(g)
        sub = gp.add_subparsers(dest="command", required=True)
        for c in cmds:
            name = f"{g} {c}"
            op = OPERATIONS.get(name)
            cp = sub.add_parser(c, help=op.summary if op else None,
                                description=op.summary if op else None)
            for flag, dest, typ, hlp in _COMMANDS[name]:
                cp.add_argument(flag, dest=dest, type=typ, default=None, help=hlp)
            cp.add_argument("--config", default=None, help="JSON file of parameters (flags override)")
            cp.add_argument("--server", default=None, help="run against a server, e.g. http://localhost:8000")
            cp.add_argument("--format", choices=["json", "csv"], default="json")
            cp.add_argument("--out", default=None, help="write the report here instead of stdout")
            cp.add_argument("--manifest", default=None, help="manifest path (default <out>.manifest.json)")
            cp.add_argument("--time-cap", dest="time_cap", type=int, default=None,
                            help="abort with the resource exit code after this many seconds")
            if name == "sums table":
                cp.add_argument("--export", default=None, help="write the full table to this path")
                cp.add_argument("--export-format", choices=["csv", "binary"], default="csv")
            subparser_map[name] = cp

    serve = groups.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_config(path: str, command: str, allowed: set[str]) -> dict:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if isinstance(raw, dict) and "params" in raw:
        if raw.get("command") not in (None, command):
            raise ValueError(f"config is for {raw.get('command')!r}, not {command!r}")
        raw = raw["params"]
    if not isinstance(raw, dict):
        raise ValueError("config must be a JSON object")
    unknown = set(raw) - allowed
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _collect_params(name: str, args: argparse.Namespace) -> dict:
    dests = [dest for _, dest, _, _ in _COMMANDS[name]]
    params: dict = {}
    if args.config:
        params.update(_load_config(args.config, name, set(dests)))
    for dest in dests:
        val = getattr(args, dest, None)
        if val is not None:
            params[dest] = val
    # worker count defaults to the machine's parallelism; results never depend on it
    if "threads" in dests and "threads" not in params:
        params["threads"] = min(os.cpu_count() or 1, 64)
    if name in _TRUNCATED and "R" not in params and "theta" not in params:
        params["theta"] = [_THETA_DEFAULT] if name in _SWEEPABLE else _THETA_DEFAULT
    return params


def _expand_sweep(name: str, params: dict) -> list[dict]:
    """Cross the N and theta lists of a corr command into single requests."""
    ns = params.get("N")
    thetas = params.get("theta")
    if ns is None:
        raise ValueError("--N is required")
    if isinstance(ns, int):
        ns = [ns]
    if thetas is None or isinstance(thetas, float):
        thetas = [thetas]
    singles = []
    for n in ns:
        for th in thetas:
            p = dict(params)
            p["N"] = n
            if th is None:
                p.pop("theta", None)
            else:
                p["theta"] = th
            singles.append(p)
    return singles


def _dispatch(name: str, params: dict, server: str | None) -> dict:
    op = OPERATIONS[name]
    request = op.request_model(**params)
    if server is None:
        return op.handler(request).model_dump(mode="json")
    import httpx

    resp = httpx.post(server.rstrip("/") + op.path,
                      json=request.model_dump(mode="json"), timeout=600.0)
    if resp.status_code == 422:
        raise ValueError(resp.json().get("detail", resp.text))
    if resp.status_code == 507:
        raise ResourceBudgetError(resp.json().get("detail", resp.text))
    if resp.status_code == 500 and resp.headers.get("content-type", "").startswith("application/json") \
            and resp.json().get("code") == "verification":
        raise VerificationError(resp.json()["detail"])
    resp.raise_for_status()
    return resp.json()


def _merge_sweep(payloads: list[dict]) -> dict:
    if len(payloads) == 1:
        return payloads[0]
    reports = []
    for p in payloads:
        reports.extend(p.get("reports", [p]))
    return {"schema_version": sm.SCHEMA_VERSION, "reports": reports}


def _to_csv(name: str, payload: dict) -> str:
    """Frozen CSV layouts per report family (documented in the README)."""
    buf = io.StringIO()
    w = csv.writer(buf)
    if name.startswith("corr"):
        w.writerow(["kind", "N", "R", "empirical", "predicted_main", "ratio", "params"])
        for r in payload["reports"]:
            w.writerow([r["kind"], r["N"], r["R"], repr(r["empirical"]),
                        "" if r["predicted_main"] is None else repr(r["predicted_main"]),
                        "" if r["ratio"] is None else repr(r["ratio"]),
                        json.dumps(r["params"], sort_keys=True)])
    elif name == "detect gaps":
        w.writerow(["p_n", "p_next", "normalized_gap"])
        for a, b, c in payload["rows"]:
            w.writerow([int(a), int(b), repr(c)])
    elif name.startswith("detect"):
        w.writerow(["n", "event", "verified"])
        for wit in payload["witnesses"]:
            w.writerow([wit["n"], wit["event"], wit["verified"]])
    elif name == "dist probe":
        w.writerow(["alpha", "Q", "total", "normalized"])
        for r in payload["reports"]:
            w.writerow(["" if r["alpha"] is None else repr(r["alpha"]), r["Q"],
                        repr(r["total"]), repr(r["normalized"])])
    elif name == "dist bv":
        w.writerow(["alpha", "Q", "total", "normalized"])
        r = payload
        w.writerow(["" if r["alpha"] is None else repr(r["alpha"]), r["Q"],
                    repr(r["total"]), repr(r["normalized"])])
    elif name == "e2 gaps":
        w.writerow(["gap", "count"])
        for gap in sorted(payload["histogram"], key=int):
            w.writerow([gap, payload["histogram"][gap]])
    elif name == "e2 sieve":
        w.writerow(["value"])
        for v in payload["values"]:
            w.writerow([v])
    else:
        w.writerow(["key", "value"])
        for key in sorted(payload):
            w.writerow([key, json.dumps(payload[key], sort_keys=True)])
    return buf.getvalue()


def _write_manifest(path: str, name: str, params: dict, outputs: list[str],
                    elapsed: float) -> None:
    manifest = {
        "command": name,
        "params": params,
        "package": "tuplesieve",
        "version": _pkg_version(),
        "schema_version": sm.SCHEMA_VERSION,
        "outputs": outputs,
        "wall_time_s": round(elapsed, 6),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_command(name: str, args: argparse.Namespace) -> int:
    t0 = time.monotonic()
    time_cap = getattr(args, "time_cap", None)
    if time_cap is not None:
        if time_cap < 1:
            raise ValueError("--time-cap must be at least 1 second")

        def _alarm(signum, frame):
            raise ResourceBudgetError(f"run exceeded the {time_cap}s time cap")

        signal.signal(signal.SIGALRM, _alarm)
        signal.alarm(time_cap)
    params = _collect_params(name, args)
    if name in _SWEEPABLE:
        payloads = [_dispatch(name, p, args.server) for p in _expand_sweep(name, params)]
        payload = _merge_sweep(payloads)
    else:
        payload = _dispatch(name, params, args.server)

    export = getattr(args, "export", None)
    outputs = []
    if export:
        req = OPERATIONS[name].request_model(**params)
        table = build_weight_table(req)
        if args.export_format == "binary":
            table.to_binary(export)
        else:
            table.to_csv(export)
        outputs.append(export)

    text = json.dumps(payload, indent=2, sort_keys=True) + "\n" if args.format == "json" \
        else _to_csv(name, payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        outputs.insert(0, args.out)
        manifest_path = args.manifest or args.out + ".manifest.json"
        _write_manifest(manifest_path, name, params, outputs, time.monotonic() - t0)
    else:
        sys.stdout.write(text)
        if args.manifest:
            _write_manifest(args.manifest, name, params, outputs, time.monotonic() - t0)
    if time_cap is not None:
        signal.alarm(0)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.group == "serve":
        import uvicorn

        from .service.app import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0
    name = f"{args.group} {args.command}"
    try:
        return _run_command(name, args)
    except ValidationError as exc:
        errors = "; ".join(f"{'.'.join(str(p) for p in e['loc'])}: {e['msg']}" for e in exc.errors())
        print(f"error: invalid parameters: {errors}", file=sys.stderr)
        return USAGE_EXIT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except ResourceBudgetError as exc:
        print(f"error: resource budget: {exc}", file=sys.stderr)
        return RESOURCE_EXIT
    except VerificationError as exc:
        print(f"error: verification failed: {exc}", file=sys.stderr)
        return VERIFY_EXIT


if __name__ == "__main__":
    sys.exit(main())
