"""JSON encoding of matrices, witnesses, logs and reports.

Rationals are always written as ``"p/q"`` strings and Laurent elements as
term lists, so every document round-trips exactly.  Decoders raise
:class:`FormatError` for anything that does not match the layout.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from . import ring as R
from .clearing import ClearedResult, ClearingStepReport, ShrinkResult
from .errors import FormatError
from .matrix import Matrix, PolyMatrix
from .poly import Poly
from .sharp import ElOp, ElOpLog
from .spectral import AssemblyResult, PrimitivityCertificate, SpectralReport, SpectrumDescriptor
from .sse import ESSEWitness, SEWitness, SSEChain


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def rational(x) -> str:
    return R.format_rational(x)


def _require(data, keys, what):
    if not isinstance(data, dict):
        raise FormatError(f"{what} must be a JSON object")
    missing = [k for k in keys if k not in data]
    if missing:
        raise FormatError(f"{what} is missing {missing}")


# -- matrices -----------------------------------------------------------------


def encode_matrix(m: Matrix) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "ring": m.ring,
        "entries": [[R.encode_scalar(x) for x in row] for row in m],
    }


def decode_matrix(data) -> Matrix:
    """Accepts row-nested entries or a flat row-major list."""
    _require(data, ("rows", "cols", "entries"), "matrix")
    rows, cols = data["rows"], data["cols"]
    ring = data.get("ring", R.Q)
    if ring not in R.RINGS:
        raise FormatError(f"unknown ring {ring!r}")
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise FormatError("rows and cols must be positive integers")
    entries = data["entries"]
    if not isinstance(entries, list):
        raise FormatError("entries must be a list")
    nested = len(entries) == rows and all(
        isinstance(r, list) and len(r) == cols and not any(isinstance(x, dict) for x in r) for r in entries
    )
    if nested:
        grid = entries
    elif len(entries) == rows * cols:
        grid = [entries[i * cols : (i + 1) * cols] for i in range(rows)]
    else:
        raise FormatError(f"entries do not fit a {rows}x{cols} matrix")
    try:
        values = [[R.decode_scalar(x, ring) for x in row] for row in grid]
    except (TypeError, ValueError, KeyError, ZeroDivisionError) as exc:
        raise FormatError(f"bad matrix entry: {exc}") from exc
    return Matrix._raw(values, ring)


def encode_polymatrix(p: PolyMatrix) -> dict:
    return {"size": p.size, "ring": p.ring, "coeffs": [encode_matrix(c) for c in p.coeffs]}


def decode_polymatrix(data) -> PolyMatrix:
    _require(data, ("size", "coeffs"), "polynomial matrix")
    coeffs = [decode_matrix(c) for c in data["coeffs"]]
    size = data["size"]
    if any(c.shape != (size, size) for c in coeffs):
        raise FormatError(f"every coefficient must be {size}x{size}")
    ring = data.get("ring") or (coeffs[0].ring if coeffs else R.Q)
    return PolyMatrix(coeffs, size=size, ring=ring)


def encode_poly(p: Poly) -> list:
    return p.to_json()


# -- witnesses ----------------------------------------------------------------


def encode_esse(w: ESSEWitness) -> dict:
    return {"U": encode_matrix(w.U), "V": encode_matrix(w.V)}


def decode_esse(data) -> ESSEWitness:
    _require(data, ("U", "V"), "ESSE witness")
    return ESSEWitness(decode_matrix(data["U"]), decode_matrix(data["V"]))


def encode_chain(c: SSEChain) -> dict:
    return {"endpoints": [encode_matrix(m) for m in c.endpoints], "steps": [encode_esse(w) for w in c.steps]}


def decode_chain(data) -> SSEChain:
    _require(data, ("endpoints", "steps"), "SSE chain")
    return SSEChain(
        tuple(decode_matrix(m) for m in data["endpoints"]),
        tuple(decode_esse(w) for w in data["steps"]),
    )


def encode_se(w: SEWitness) -> dict:
    return {"U": encode_matrix(w.U), "V": encode_matrix(w.V), "lag": w.lag}


def decode_se(data) -> SEWitness:
    _require(data, ("U", "V", "lag"), "SE witness")
    lag = data["lag"]
    if isinstance(lag, bool) or not isinstance(lag, int):
        raise FormatError("lag must be an integer")
    return SEWitness(decode_matrix(data["U"]), decode_matrix(data["V"]), lag)


# -- operation logs -----------------------------------------------------------


def encode_op(op: ElOp) -> dict:
    out = {"kind": op.kind}
    if op.i is not None:
        out.update(i=op.i, j=op.j, p=op.p.to_json())
    return out


def decode_op(data, ring: str = R.Q) -> ElOp:
    _require(data, ("kind",), "operation")
    p = data.get("p")
    return ElOp(data["kind"], data.get("i"), data.get("j"), None if p is None else Poly.from_json(p, ring))


def encode_log(log: ElOpLog) -> dict:
    return {
        "initial": encode_polymatrix(log.initial),
        "ops": [encode_op(op) for op in log.ops],
        "final": encode_polymatrix(log.final),
    }


def decode_log(data) -> ElOpLog:
    _require(data, ("initial", "ops", "final"), "operation log")
    initial = decode_polymatrix(data["initial"])
    return ElOpLog(
        initial,
        tuple(decode_op(op, initial.ring) for op in data["ops"]),
        decode_polymatrix(data["final"]),
    )


# -- reports ------------------------------------------------------------------


def _scalar_or_str(x):
    if isinstance(x, Fraction):
        return rational(x)
    return x


def encode_step_report(r: ClearingStepReport, with_log: bool = True) -> dict:
    out = {
        "k": r.k,
        "input": encode_polymatrix(r.input),
        "output": encode_polymatrix(r.output),
        "degree_in": r.degree_in,
        "degree_out": r.degree_out,
        "degree_bound": r.degree_bound,
        "degree_bound_ok": r.degree_bound_ok,
        "norm_in": rational(r.norm_in),
        "norm_out": rational(r.norm_out),
        "norm_bound": rational(r.norm_bound),
        "norm_bound_ok": r.norm_bound_ok,
        "cleared_ok": r.cleared_ok,
        "replay_ok": r.replay_ok,
        "det_ok": r.det_ok,
        "discrepancies": list(r.discrepancies),
    }
    if with_log:
        out["log"] = encode_log(r.log)
    return out


def encode_shrink(s: ShrinkResult) -> dict:
    return {
        "V": encode_matrix(s.V),
        "conjugated": encode_matrix(s.conjugated),
        "factors": [{"i": f.i, "j": f.j, "x": rational(f.x)} for f in s.factors],
    }


def encode_cleared(r: ClearedResult, with_logs: bool = True) -> dict:
    out = {
        "M": encode_matrix(r.M),
        "J": r.J,
        "K": r.K,
        "n": r.n,
        "B_K": encode_polymatrix(r.B_K),
        "traces": [rational(x) for x in r.traces],
        "abs_traces": [rational(x) for x in r.abs_traces],
        "sup_norm_M": rational(r.sup_norm_M),
        "poly_norm_B_K": rational(r.poly_norm_B_K),
        "certificates": dict(r.certificates),
        "steps": [encode_step_report(s, with_logs) for s in r.steps],
    }
    if r.conjugation is not None:
        out["conjugation"] = encode_shrink(r.conjugation)
    if r.similarity_witness is not None:
        out["similarity_witness"] = encode_esse(r.similarity_witness)
    return out


def encode_spectrum(d: SpectrumDescriptor) -> dict:
    return {"coeffs": [rational(c) for c in d.coeffs]}


def decode_spectrum(data) -> SpectrumDescriptor:
    _require(data, ("coeffs",), "spectrum")
    try:
        return SpectrumDescriptor(tuple(R.to_rational(c) for c in data["coeffs"]))
    except (TypeError, ZeroDivisionError) as exc:
        raise FormatError(f"bad coefficient: {exc}") from exc
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def encode_spectral_report(r: SpectralReport) -> dict:
    return {
        "mode": r.mode,
        "perron": r.perron,
        "perron_ok": r.perron_ok,
        "coeffs_in_ring_ok": r.coeffs_in_ring_ok,
        "trace_conditions_ok": r.trace_conditions_ok,
        "power_traces": [rational(x) for x in r.power_traces],
        "net_traces": None if r.net_traces is None else [rational(x) for x in r.net_traces],
        "checked_range": {"n_max": r.n_max, "k_max": r.k_max},
        "range_limited": r.range_limited,
        "failures": list(r.failures),
        "ok": r.ok,
    }


def encode_certificate(c: PrimitivityCertificate) -> dict:
    return c.to_json()


def encode_assembly(a: AssemblyResult) -> dict:
    return {
        "G": encode_matrix(a.G),
        "chain": encode_chain(a.chain),
        "identities": dict(a.identities),
        "certificate": encode_certificate(a.certificate),
    }


def jsonable(obj):
    """Fallback conversion for report values (Fractions, details dicts)."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, Matrix):
        return encode_matrix(obj)
    return _scalar_or_str(obj)
