"""Thin command-line client for the case service.

The CLI validates nothing itself: it reads the case file, posts it to the
service (an in-process instance by default, a remote one with --server),
writes the returned report and files under --out, and maps the response
onto stable exit codes:

    0  success
    2  configuration error
    3  solver non-convergence
    4  verification failure

The environment variable SHELLSYM_SEED, when set, overrides the seed
recorded in the case file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .pipeline import canonical_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3
EXIT_VERIFICATION = 4

_STATUS_EXIT = {
    "ok": EXIT_OK,
    "non_convergence": EXIT_NONCONVERGENCE,
    "verification_failure": EXIT_VERIFICATION,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shellsym",
        description="Classify point symmetries of shallow-shell problems and "
                    "verify their plate-form equivalence.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="case JSON file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--server", default=None,
                       help="base URL of a running service; in-process if omitted")

    common(sub.add_parser("classify", help="admitted symmetry algebra"))
    common(sub.add_parser("transform", help="plate-form right-hand sides"))
    p_solve = sub.add_parser("solve", help="finite-difference Newton solve")
    common(p_solve)
    p_solve.add_argument("--system", choices=("marguerre", "vonkarman"),
                         default="marguerre")
    p_solve.add_argument("--manufactured", action="store_true",
                         help="convergence-order study on grids 33/65/129")
    p_verify = sub.add_parser("verify", help="verification campaigns")
    common(p_verify)
    p_verify.add_argument("--check",
                          choices=("equivalence", "reduction", "orbit"),
                          required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _load_config_dict(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as err:
        raise ValueError(f"cannot read config file: {err}") from err
    except json.JSONDecodeError as err:
        raise ValueError(f"config file is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ValueError("config file must contain a JSON object")
    seed_env = os.environ.get("SHELLSYM_SEED")
    if seed_env is not None:
        try:
            data["seed"] = int(seed_env)
        except ValueError as err:
            raise ValueError(f"SHELLSYM_SEED must be an integer: {err}") from err
    return data


def _make_client(server: str | None):
    if server:
        import httpx
        return httpx.Client(base_url=server, timeout=3600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    from .service import create_app
    return TestClient(create_app())


def _post(client, endpoint: str, payload: dict):
    response = client.post(endpoint, json=payload)
    if response.status_code in (400, 422):
        detail = response.json().get("detail", response.text)
        print(f"configuration error: {detail}", file=sys.stderr)
        return None
    response.raise_for_status()
    return response.json()


def _write_outputs(out_dir: str, body: dict) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    report_path.write_text(canonical_json(body["report"]))
    for name, content in body.get("files", {}).items():
        (out / name).write_text(content)
    return report_path


def _summarize(body: dict) -> str:
    report = body["report"]
    command = report.get("command", "?")
    if command == "classify":
        return report.get("summary", "")
    if command == "transform":
        return f"P = {report['P']}; K = {report['K']}"
    if command == "solve":
        if report.get("manufactured"):
            orders = ", ".join(f"{o:.2f}" for o in report["observed_orders"])
            return f"observed orders: {orders}"
        state = "converged" if report.get("converged") else "did not converge"
        return (f"{report['system']} solve {state} in "
                f"{report['iterations']} iterations "
                f"(residual {report['final_residual_inf']:.3e})")
    if command == "verify":
        verdict = "pass" if report.get("all_passed") else "FAIL"
        return f"{report['check']} check: {verdict}"
    return ""


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn
        from .service import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return EXIT_OK

    try:
        config = _load_config_dict(args.config)
    except ValueError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    payload: dict = {"config": config}
    if args.command == "solve":
        payload["system"] = args.system
        payload["manufactured"] = args.manufactured
    elif args.command == "verify":
        payload["check"] = args.check

    client = _make_client(args.server)
    try:
        body = _post(client, f"/{args.command}", payload)
    finally:
        client.close()
    if body is None:
        return EXIT_CONFIG

    report_path = _write_outputs(args.out, body)
    summary = _summarize(body)
    if summary:
        print(summary)
    print(f"report written to {report_path}")
    return _STATUS_EXIT.get(body["status"], EXIT_OK)


if __name__ == "__main__":
    sys.exit(main())
