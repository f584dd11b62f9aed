"""Command-line client.

Every subcommand builds the same request model the HTTP service accepts and
either runs it in-process or, with ``--server URL``, posts it to a running
``multiport serve`` instance. Output is identical either way.

Exit codes: 0 ok, 2 invalid input, 3 infeasible, 4 not found.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from . import __version__, service
from .core import DimensionError, PhaseError, PortError
from .fock import PhotonNumberError
from .formatting import report_csv, report_pretty, to_json

EXIT_INVALID = 2


class UsageError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(Fraction(x.strip())) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def _strings(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _load_config(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if p.suffix in (".yaml", ".yml"):
        import yaml

        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise UsageError("config file must hold a mapping")
    return {k.replace("-", "_"): v for k, v in data.items()}


# argparse dest -> (request field, converter)
_FIELDS = {
    "d": ("d", None),
    "phases": ("phases", _floats),
    "phases_complex": ("phases_complex", _strings),
    "input_port": ("input_port", None),
    "fock": ("fock", _ints),
    "max_photons": ("max_photons", None),
    "target": ("target", _floats),
    "two_photon_same_port": ("two_photon_same_port", None),
    "two_photon_two_port": ("two_photon_two_port", None),
    "two_modes": ("two_modes", _ints),
    "convention": ("convention", None),
    "tolerance": ("tolerance", None),
    "method": ("method", None),
    "restarts": ("restarts", None),
    "seed": ("seed", None),
    "max_iterations": ("max_iterations", None),
    "kind": ("kind", None),
    "step": ("step", None),
    "resolution": ("resolution", None),
    "max_points": ("max_points", None),
}


def build_payload(args: argparse.Namespace) -> dict[str, Any]:
    payload = _load_config(args.config)
    payload.pop("command", None)
    payload.pop("format", None)
    for dest, (name, conv) in _FIELDS.items():
        value = getattr(args, dest, None)
        if value is None:
            continue
        payload[name] = conv(value) if conv else value
    if "d" not in payload:
        if args.command == "check" and (payload.get("two_photon_same_port") or payload.get("two_photon_two_port")):
            payload["d"] = 3
        else:
            for key in ("phases", "phases_complex", "target", "fock"):
                if payload.get(key) is not None:
                    payload["d"] = len(payload[key])
                    break
    return payload


def run_local(command: str, payload: dict[str, Any]) -> tuple[dict[str, Any], int]:
    model, fn = service.COMMANDS[command]
    rep = fn(model(**payload))
    return rep.as_dict(), rep.exit_code


def run_remote(server: str, command: str, payload: dict[str, Any]) -> tuple[dict[str, Any], int]:
    import httpx

    resp = httpx.post(f"{server.rstrip('/')}/{command}", json=payload, timeout=None)
    if resp.status_code in (400, 422):
        raise UsageError(f"server rejected the request: {resp.json().get('detail')}")
    resp.raise_for_status()
    return resp.json(), int(resp.headers.get("X-Exit-Code", "0"))


def render(doc: dict[str, Any], fmt: str) -> str:
    if fmt == "csv":
        return report_csv(doc)
    if fmt == "pretty":
        return report_pretty(doc)
    return to_json(doc)


def _add_phase_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--phases", help="phase angles in radians, comma separated")
    p.add_argument("--phases-complex", help="unit-modulus complex phases, e.g. 1j,0.866-0.5j")


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, help="number of ports")
    common.add_argument("--format", choices=("json", "csv", "pretty"), help="default: csv for sweep, json otherwise")
    common.add_argument("--config", help="JSON or YAML file with request fields")
    common.add_argument("--server", help="URL of a running service; run locally when omitted")
    common.add_argument("--output", "-o", help="write to a file instead of stdout")

    parser = argparse.ArgumentParser(prog="multiport", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="single-photon or Fock-state propagation")
    _add_phase_args(p)
    p.add_argument("--input-port", type=int)
    p.add_argument("--fock", help="input occupations, e.g. 2,0,0")
    p.add_argument("--max-photons", type=int)

    p = sub.add_parser("multiphoton", parents=[common], help="full Fock-space output of a multi-photon input")
    _add_phase_args(p)
    p.add_argument("--fock", help="input occupations, e.g. 1,1,0")
    p.add_argument("--max-photons", type=int)

    p = sub.add_parser("check", parents=[common], help="feasibility of a target distribution")
    p.add_argument("--target", help="probabilities, comma separated (fractions like 1/9 allowed)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--two-photon-same-port", action="store_true", default=None)
    mode.add_argument("--two-photon-two-port", action="store_true", default=None)
    mode.add_argument("--two-modes", help="two mode indices, e.g. 0,1")
    p.add_argument("--convention", choices=("fock", "monomial"))
    p.add_argument("--tolerance", type=float)

    p = sub.add_parser("synthesize", parents=[common], help="phases realizing a target distribution")
    p.add_argument("--target", help="probabilities, comma separated")
    p.add_argument("--method", choices=("auto", "closed-form", "search"))
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--tolerance", type=float)

    p = sub.add_parser("sweep", parents=[common], help="grid experiments emitted as CSV")
    p.add_argument("--kind", choices=("simplex", "phase-grid", "magnitudes"))
    p.add_argument("--step", type=float)
    p.add_argument("--resolution", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-points", type=int)
    p.add_argument("--tolerance", type=float)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        import uvicorn

        uvicorn.run("multiport.api:app", host=args.host, port=args.port)
        return 0
    try:
        payload = build_payload(args)
        if args.server:
            doc, code = run_remote(args.server, args.command, payload)
        else:
            doc, code = run_local(args.command, payload)
    except ValidationError as exc:
        msgs = "; ".join(f"{'.'.join(map(str, e['loc'])) or 'request'}: {e['msg']}" for e in exc.errors())
        print(f"error: {msgs}", file=sys.stderr)
        return EXIT_INVALID
    except (UsageError, service.InvalidInput, DimensionError, PhaseError, PortError, PhotonNumberError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    fmt = args.format or ("csv" if args.command == "sweep" else "json")
    text = render(doc, fmt)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
