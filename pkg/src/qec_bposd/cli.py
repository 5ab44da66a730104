"""Command-line front end.

Subcommands: ``gen-code``, ``decode``, ``sweep`` and ``threshold``.

Decoder specs read ``<bp>[+<osd><w>]`` where ``<bp>`` is ``bp4`` or
``mbp4`` and ``<osd>`` is ``osd`` (hard-decision-history order) or
``mosd`` (marginal order). The trailing digit is the OSD order w, so
``bp4+osd2`` means BP4 followed by order-2 OSD4.

Exit codes: 0 success, 1 no threshold crossing, 2 usage error,
3 code validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bp4 import BpConfig
from .codes import (
    CodeParseError,
    CodeValidationError,
    StabilizerCode,
    load_code_file,
    make_code,
    save_code_file,
)
from .pauli import gf2_rank, pauli_weight, syndrome_of, tau_map, tau_unmap
from .simulator import (
    DecoderConfig,
    StopRule,
    decode_and_classify,
    estimate_threshold,
    sweep,
    to_csv,
)

EXIT_OK, EXIT_NO_CROSSING, EXIT_USAGE, EXIT_VALIDATION = 0, 1, 2, 3

DECODER_RE = re.compile(r"^(bp4|mbp4)(?:\+(osd|mosd)(\d+))?$")


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    """Everything needed to reproduce a sweep/threshold output."""

    command: str
    family: str | None
    distances: list[int]
    code_file: str | None
    decoder: str
    alpha: str | None
    max_iterations: int | None
    schedule: str
    eps: list[float]
    events: int
    max_trials: int
    seed: int
    outputs: list[str] = field(default_factory=list)
    version: str = __version__
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def parse_eps(text: str) -> list[float]:
    """Comma list and/or ``start:stop:step`` ranges (stop inclusive)."""
    out: list[float] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                start, stop, step = (float(x) for x in part.split(":"))
                if step <= 0:
                    raise UsageError("eps range step must be positive")
                count = int(np.floor((stop - start) / step + 1e-9)) + 1
                if count <= 0:
                    raise UsageError(f"empty epsilon range {part!r}")
                out.extend(round(start + i * step, 10) for i in range(count))
            else:
                out.append(float(part))
    except ValueError:
        raise UsageError(f"cannot parse epsilon list {text!r}") from None
    if not out or any(not 0.0 <= e <= 1.0 for e in out):
        raise UsageError(f"epsilons must lie in [0, 1]: {text!r}")
    return out


def decoder_config(spec: str, alpha: str | None, max_iterations: int, schedule: str) -> DecoderConfig:
    match = DECODER_RE.match(spec)
    if not match:
        raise UsageError(f"bad decoder spec {spec!r}; expected e.g. bp4, mbp4+osd2, bp4+mosd0")
    bp, osd, order = match.groups()
    if bp == "bp4" and alpha is None:
        bp_cfg = BpConfig(max_iterations=max_iterations, schedule=schedule)
    elif alpha == "eps":
        bp_cfg = BpConfig(max_iterations=max_iterations, schedule=schedule, alpha_mode="epsilon_scaled")
    else:
        try:
            value = float(alpha) if alpha is not None else 1.6
        except ValueError:
            raise UsageError(f"--alpha must be a number or 'eps', got {alpha!r}") from None
        try:
            bp_cfg = BpConfig(max_iterations=max_iterations, schedule=schedule, alpha_mode="fixed", alpha=value)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return DecoderConfig(
        bp=bp_cfg,
        osd_order=int(order) if order is not None else None,
        osd_mode="mosd4" if osd == "mosd" else "osd4",
    )


def _codes(args) -> list[StabilizerCode]:
    if args.code_file:
        return [load_code_file(args.code_file)]
    if not args.family:
        raise UsageError("give --family with --d, or --code-file")
    ds = parse_int_list(args.d) if args.d else []
    if not ds:
        raise UsageError("--d is required with --family")
    try:
        return [make_code(args.family, d) for d in ds]
    except ValueError as exc:
        if isinstance(exc, CodeValidationError):
            raise
        raise UsageError(str(exc)) from None


def _default_iterations(args) -> int:
    if args.max_iter is not None:
        return args.max_iter
    return 100 if args.code_file else 60


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QEC_BPOSD_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"QEC_BPOSD_SEED must be an integer, got {env!r}") from None
    return 0


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_code(args) -> int:
    codes = _codes(args)
    for code in codes:
        rank = gf2_rank(code.check)
        print(f"{code.name}: n={code.n} k={code.k} rank={rank}")
        if args.out:
            out = Path(args.out)
            if len(codes) > 1:
                out = out.with_name(f"{out.stem}_{code.name}{out.suffix}")
            save_code_file(code, out)
    return EXIT_OK


def cmd_decode(args) -> int:
    (code,) = _codes(args)[:1]
    cfg = decoder_config(args.decoder, args.alpha, _default_iterations(args), args.schedule)
    eps = parse_eps(args.eps)[0] if args.eps else cfg.bp.prior_epsilon
    cfg = cfg.for_epsilon(eps)
    error = None
    if args.error:
        try:
            error = tau_map(args.error)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if error.size != 2 * code.n:
            raise UsageError(f"error has {error.size // 2} qubits, code has {code.n}")
        syndrome = syndrome_of(code.check, error)
    elif args.syndrome is not None:
        bits = args.syndrome.strip()
        if not bits or set(bits) - {"0", "1"}:
            raise UsageError(f"syndrome must be a bitstring, got {args.syndrome!r}")
        if len(bits) != code.m:
            raise UsageError(f"syndrome has {len(bits)} bits, code has {code.m} checks")
        syndrome = np.array([b == "1" for b in bits], dtype=np.uint8)
    else:
        raise UsageError("give --syndrome or --error")
    result = decode_and_classify(code, cfg, error if error is not None else np.zeros(2 * code.n, np.uint8), syndrome)
    estimate = result.estimate
    print(f"converged={str(result.bp_converged).lower()} iters={result.iterations_used}")
    print(f"osd={'true' if result.osd_invoked else 'false'}")
    print(f"estimate={tau_unmap(estimate)} weight={pauli_weight(estimate)}")
    if error is not None:
        if not (result.bp_converged or result.osd_invoked):
            verdict = "decoder-failure"
        else:
            verdict = "logical-error" if result.logical_failure else "stabilizer-equivalent"
        print(f"residual={verdict}")
    return EXIT_OK


def _run_grid(args):
    codes = _codes(args)
    cfg = decoder_config(args.decoder, args.alpha, _default_iterations(args), args.schedule)
    eps = parse_eps(args.eps)
    stop = StopRule(min_logical_errors=args.events, max_trials=args.max_trials)
    seed = _seed(args)
    manifest = RunManifest(
        command=args.command,
        family=None if args.code_file else args.family,
        distances=[c.d for c in codes if c.d is not None],
        code_file=args.code_file,
        decoder=args.decoder,
        alpha=args.alpha,
        max_iterations=_default_iterations(args),
        schedule=args.schedule,
        eps=eps,
        events=args.events,
        max_trials=args.max_trials,
        seed=seed,
        outputs=[args.out] if args.out else [],
    )
    rows = sweep(codes, eps, cfg, stop, seed=seed, workers=args.workers)
    return manifest, rows


def _emit(args, manifest: RunManifest, rows, summary: str | None = None) -> None:
    if args.format == "json":
        payload = {"manifest": json.loads(manifest.to_json()), "results": [r.as_row() for r in rows]}
        if summary is not None:
            payload["summary"] = summary
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        text = to_csv(rows, json.loads(manifest.to_json()))
        if summary is not None:
            text += f"# {summary}\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_sweep(args) -> int:
    manifest, rows = _run_grid(args)
    _emit(args, manifest, rows)
    return EXIT_OK


def cmd_threshold(args) -> int:
    manifest, rows = _run_grid(args)
    try:
        est = estimate_threshold(rows)
    except ValueError as exc:
        _emit(args, manifest, rows)
        raise UsageError(str(exc)) from None
    pairs = " ".join(
        f"{a}-{b}:{'none' if v is None else f'{v:.5f}'}" for (a, b), v in est.pair_crossings.items()
    )
    if est.found:
        summary = f"threshold crossing={est.crossing:.5f} spread={est.spread:.5f} pairs={pairs}"
    else:
        summary = f"threshold no-crossing pairs={pairs}"
    _emit(args, manifest, rows, summary)
    print(summary, file=sys.stderr)
    return EXIT_OK if est.found else EXIT_NO_CROSSING


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qec-bposd", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log one line per point")
    sub = parser.add_subparsers(dest="command", required=True)

    def code_args(p):
        p.add_argument("--family", choices=["toric", "surface", "color666", "xzzx"])
        p.add_argument("--d", help="distance or comma list of distances")
        p.add_argument("--code-file", help="check-matrix text file")

    def decoder_args(p):
        p.add_argument("--decoder", default="bp4+osd2", help="e.g. bp4, mbp4+osd0, bp4+mosd2")
        p.add_argument("--alpha", help="MBP4 alpha: a number, or 'eps' for the epsilon-scaled rule")
        p.add_argument("--max-iter", type=int, help="BP iterations T (default 60, or 100 for --code-file)")
        p.add_argument("--schedule", choices=["serial", "parallel"], default="serial")

    p = sub.add_parser("gen-code", help="write a built-in code family in check-matrix format")
    code_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_code)

    p = sub.add_parser("decode", help="decode one syndrome or injected error")
    code_args(p)
    decoder_args(p)
    p.add_argument("--syndrome", help="bitstring, one bit per check")
    p.add_argument("--error", help="Pauli string to inject, e.g. IXIZ...")
    p.add_argument("--eps", help="prior error rate for BP (default 0.1)")
    p.set_defaults(func=cmd_decode)

    for name, func in (("sweep", cmd_sweep), ("threshold", cmd_threshold)):
        p = sub.add_parser(name, help=f"Monte Carlo {name}")
        code_args(p)
        decoder_args(p)
        p.add_argument("--eps", required=True, help="comma list and/or start:stop:step")
        p.add_argument("--events", type=int, default=100, help="stop after this many logical errors")
        p.add_argument("--max-trials", type=int, default=1_000_000)
        p.add_argument("--seed", type=int, help="base seed (falls back to $QEC_BPOSD_SEED, then 0)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CodeValidationError, CodeParseError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
