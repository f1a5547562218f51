"""Command-line entry point.

Exit codes: 0 when every check passes, 1 for a mathematical failure (a
witness that does not verify, a violated precondition), 2 for usage and
parse errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import ring as R
from . import serialize as S
from .clearing import full_prop35
from .errors import FormatError, InvalidLagError, PreconditionError, ShapeError, ShiftEquivError
from .matrix import Matrix, char_poly
from .sharp import badring_checks, badring_fixture, sharp_of
from .spectral import MODES, check_spectral_conditions, primitive_assembly
from .sse import (
    SSEChain,
    nilpotent_extension_move,
    reduce_nonneg_nilpotent,
    similarity_move,
    sse_to_se,
    verify_esse,
    verify_se,
    verify_sse_chain,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Run:
    """Collects verdicts, outputs and per-stage timings for one command."""

    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.verdicts: dict = {}
        self.output: dict = {}
        self.timings: dict = {}

    def stage(self, name: str):
        run = self

        class _Timer:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                run.timings[name] = int((time.perf_counter() - self.t0) * 1e6)

        return _Timer()

    def passed(self) -> bool:
        return all(v is True for v in self.verdicts.values() if isinstance(v, bool))

    def report(self) -> dict:
        return {
            "command": self.command,
            "inputs_digest": S.digest(self.inputs),
            "verdicts": S.jsonable(self.verdicts),
            "output": self.output,
            "timings": self.timings,
        }


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _positive_rational(text: str) -> Fraction:
    try:
        value = R.to_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive rational, got {text}")
    return value


def _rational(text: str) -> Fraction:
    try:
        return R.to_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"{text!r} is not a rational number")


# -- subcommands -----------------------------------------------------------------


def cmd_verify(args) -> Run:
    data = _load_json(args.file)
    run = Run(f"verify {args.kind}", {"kind": args.kind, "file": data})
    with run.stage("parse"):
        if args.kind == "sse":
            chain = S.decode_chain(data)
        else:
            if not isinstance(data, dict) or not {"A", "B"} <= data.keys():
                raise FormatError("witness file needs A and B")
            a, b = S.decode_matrix(data["A"]), S.decode_matrix(data["B"])
            w = S.decode_se(data) if args.kind == "se" else S.decode_esse(data)
    with run.stage("verify"):
        if args.kind == "sse":
            run.verdicts["verified"] = verify_sse_chain(chain)
            run.verdicts["lag"] = chain.lag
        else:
            try:
                ok = verify_se(a, b, w) if args.kind == "se" else verify_esse(a, b, w)
                run.verdicts["verified"] = ok
            except ShapeError as exc:
                run.verdicts["verified"] = False
                run.verdicts["shape_error"] = str(exc)
    return run


def cmd_clear(args) -> Run:
    data = _load_json(args.file)
    run = Run("clear", {"K": args.k, "file": data})
    m = S.decode_matrix(data)
    with run.stage("prop35"):
        result = full_prop35(m, args.k)
    run.verdicts.update(result.certificates)
    run.verdicts["steps_ok"] = all(s.ok for s in result.steps)
    run.verdicts["J"] = result.J
    run.output = S.encode_cleared(result, with_logs=not args.no_logs)
    return run


def cmd_spectra(args) -> Run:
    data = _load_json(args.file)
    run = Run("spectra", {"file": data, "mode": args.mode, "n_max": args.n_max, "k_max": args.k_max, "tol": str(args.tol)})
    delta = S.decode_spectrum(data)
    with run.stage("check"):
        report = check_spectral_conditions(delta, args.mode, args.n_max, args.k_max, args.tol)
    run.verdicts.update(
        perron_ok=report.perron_ok,
        coeffs_in_ring_ok=report.coeffs_in_ring_ok,
        trace_conditions_ok=report.trace_conditions_ok,
    )
    run.output = S.encode_spectral_report(report)
    return run


def cmd_badring(args) -> Run:
    run = Run("badring", {"tamper": args.tamper})
    with run.stage("fixture"):
        fixture = badring_fixture()
        if args.tamper:
            n = fixture.N.tolist()
            n[9][7] = n[9][7] + R.LaurentElement.monomial(0, 0, 1)
            fixture = type(fixture)(fixture.M, Matrix._raw(n, R.LAURENT), fixture.Nprime, fixture.annotations)
    with run.stage("checks"):
        run.verdicts.update(badring_checks(fixture))
    run.output = {"annotations": dict(fixture.annotations), "N": S.encode_matrix(fixture.N)}
    return run


def cmd_assemble(args) -> Run:
    c_data, m_data = _load_json(args.c_file), _load_json(args.m_file)
    run = Run("assemble", {"C": c_data, "M0": m_data, "eps": R.format_rational(args.eps)})
    c, m0 = S.decode_matrix(c_data), S.decode_matrix(m_data)
    with run.stage("assemble"):
        result = primitive_assembly(c, m0, args.eps)
    run.verdicts.update(result.identities)
    run.verdicts["chain_verified"] = verify_sse_chain(result.chain)
    run.verdicts["primitive"] = result.certificate.primitive
    run.output = S.encode_assembly(result)
    return run


def cmd_sharp(args) -> Run:
    data = _load_json(args.file)
    run = Run("sharp", {"file": data, "k": args.k})
    a = S.decode_polymatrix(data)
    with run.stage("sharp"):
        m = sharp_of(a, args.k)
    run.verdicts["size"] = m.rows
    run.output = {"M": S.encode_matrix(m)}
    return run


def cmd_reduce(args) -> Run:
    data = _load_json(args.file)
    run = Run("reduce-nilpotent", {"file": data})
    n = S.decode_matrix(data)
    with run.stage("reduce"):
        chain = reduce_nonneg_nilpotent(n)
    run.verdicts["verified"] = verify_sse_chain(chain)
    run.verdicts["ends_at_zero"] = chain.target == Matrix.zeros(1)
    run.verdicts["lag"] = chain.lag
    run.output = {"chain": S.encode_chain(chain)}
    return run


def _random_matrix(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> Matrix:
    return Matrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])


def random_chain(rng: random.Random, max_lag: int = 4) -> SSEChain:
    """Random SSE chain built from similarity and nilpotent-extension moves."""
    a = _random_matrix(rng, rng.randint(1, 3))
    current, steps = a, []
    for _ in range(rng.randint(1, max_lag)):
        n = current.rows
        if rng.random() < 0.5 or n >= 5:
            while True:
                u = _random_matrix(rng, n, -2, 2)
                if u.rank() == n:
                    break
            current, w = similarity_move(current, u)
        else:
            side = rng.choice(("upper", "lower"))
            x = Matrix([[rng.randint(-2, 2)] for _ in range(n)]) if side == "upper" else Matrix(
                [[rng.randint(-2, 2) for _ in range(n)]]
            )
            ext, w = nilpotent_extension_move(current, x, side)
            w = w.reversed()
            current = ext
        steps.append(w)
    return SSEChain.from_steps(a, steps)


def cmd_selfcheck(args) -> Run:
    rng = random.Random(args.seed)
    run = Run("selfcheck", {"seed": args.seed, "count": args.count})
    with run.stage("chains"):
        chains_ok = se_ok = spectra_ok = True
        for _ in range(args.count):
            chain = random_chain(rng)
            chains_ok &= verify_sse_chain(chain)
            se_ok &= verify_se(chain.source, chain.target, sse_to_se(chain))
            p, q = char_poly(chain.source), char_poly(chain.target)
            spectra_ok &= p.coeffs[p.lowest_degree():] == q.coeffs[q.lowest_degree():]
    run.verdicts.update(chains_verified=chains_ok, se_verified=se_ok, nonzero_spectra_agree=spectra_ok)
    return run


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the full report as JSON")
    common.add_argument("--out", metavar="FILE", help="also write the JSON report to FILE")

    parser = argparse.ArgumentParser(prog="shiftequiv", description="Exact shift-equivalence certificates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="verify an ESSE, SSE or SE witness file")
    p.add_argument("kind", choices=("esse", "sse", "se"))
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("clear", parents=[common], help="clear low-order traces of a nilpotent matrix")
    p.add_argument("file")
    p.add_argument("--k", type=_positive_int, default=1, help="number of traces to clear")
    p.add_argument("--no-logs", action="store_true", help="omit per-step operation logs")
    p.set_defaults(func=cmd_clear)

    p = sub.add_parser("spectra", parents=[common], help="check spectral conditions for a polynomial")
    p.add_argument("file")
    p.add_argument("--mode", choices=MODES, default="integer")
    p.add_argument("--n-max", type=_positive_int, default=12)
    p.add_argument("--k-max", type=_positive_int, default=12)
    p.add_argument("--tol", type=_positive_rational, default=Fraction(1, 10**6))
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("badring", parents=[common], help="run the checks on the bad-ring fixture")
    p.add_argument("--tamper", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_badring)

    p = sub.add_parser("assemble", parents=[common], help="assemble a primitive matrix from C and M0")
    p.add_argument("c_file")
    p.add_argument("m_file")
    p.add_argument("--eps", type=_rational, default=Fraction(1, 2))
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("sharp", parents=[common], help="block companion of a polynomial matrix")
    p.add_argument("file")
    p.add_argument("--k", type=_positive_int, default=None)
    p.set_defaults(func=cmd_sharp)

    p = sub.add_parser("reduce-nilpotent", parents=[common], help="SSE chain from a nonnegative nilpotent matrix to [0]")
    p.add_argument("file")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("selfcheck", parents=[common], help="randomized round-trip checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive_int, default=20)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def _summary(report: dict, ok: bool) -> str:
    lines = [f"{report['command']}: {'PASS' if ok else 'FAIL'}"]
    for key, value in report["verdicts"].items():
        lines.append(f"  {key}: {value}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = args.func(args)
    except (UsageError, FormatError, InvalidLagError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        report = {"command": args.command, "error": str(exc), "details": S.jsonable(exc.details)}
        if args.json:
            print(json.dumps(report, indent=2, sort_keys=True))
        return EXIT_FAIL
    except ShiftEquivError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    ok = run.passed()
    report = run.report()
    report["passed"] = ok
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text if args.json else _summary(report, ok))
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
