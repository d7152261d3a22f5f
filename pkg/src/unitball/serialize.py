"""JSON file formats for matrices, superoperators, bases, and reports.

JSON was chosen over a binary format because certificates are meant to be
read and diffed; numbers are serialized as shortest round-trip decimals,
so parse(serialize(x)) reproduces every entry bit-exactly.  Superoperator
files must carry the vectorization convention literal; its absence is a
parse error, which prevents silent convention mismatches with other
tools.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .extremal import ExtremePointReport, ExtremeVerdict
from .gen import InstanceKind, InstanceSpec
from .jordan import JordanReport, MapKind
from .linalg import RNG_NAME, Tolerance, as_matrix
from .preserver import PreserverCertificate, PreserverVerdict
from .superop import SuperOperator

__all__ = [
    "VEC_CONVENTION",
    "FormatError",
    "matrix_to_obj",
    "matrix_from_obj",
    "superop_to_obj",
    "superop_from_obj",
    "algebra_elements_from_obj",
    "tolerance_to_obj",
    "tolerance_from_obj",
    "extreme_report_to_obj",
    "extreme_report_from_obj",
    "jordan_report_to_obj",
    "jordan_report_from_obj",
    "certificate_to_obj",
    "certificate_from_obj",
    "instance_spec_to_obj",
    "instance_spec_from_obj",
    "load_json",
    "save_json",
    "dump_json",
    "run_info",
]

VEC_CONVENTION = "column-stacking"


class FormatError(ValueError):
    """Raised when a document does not match its declared schema."""


def _reject_constant(token: str):
    raise FormatError(f"non-finite number {token!r} is not allowed")


def load_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh, parse_constant=_reject_constant)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON in {path}: {exc}") from exc


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def save_json(path: str, obj: Any) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_json(obj))
        fh.write("\n")


def _require(obj: dict, key: str, context: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{context}: missing key {key!r}")
    return obj[key]


def _as_int(x, context: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"{context}: expected an integer, got {x!r}")
    return x


def _as_float(x, context: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"{context}: expected a number, got {x!r}")
    if not math.isfinite(x):
        raise FormatError(f"{context}: non-finite number")
    return float(x)


def matrix_to_obj(a: np.ndarray) -> dict:
    a = as_matrix(a)
    rows, cols = a.shape
    return {
        "rows": rows,
        "cols": cols,
        "entries": [[[z.real, z.imag] for z in row] for row in a],
    }


def matrix_from_obj(obj: Any) -> np.ndarray:
    rows = _as_int(_require(obj, "rows", "matrix"), "matrix.rows")
    cols = _as_int(_require(obj, "cols", "matrix"), "matrix.cols")
    entries = _require(obj, "entries", "matrix")
    if rows < 1 or cols < 1:
        raise FormatError(f"matrix: dimensions must be positive, got {rows}x{cols}")
    if not isinstance(entries, list) or len(entries) != rows:
        raise FormatError(f"matrix: expected {rows} rows of entries")
    out = np.empty((rows, cols), dtype=np.complex128)
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != cols:
            raise FormatError(f"matrix: row {i} must have {cols} entries")
        for j, pair in enumerate(row):
            if not isinstance(pair, list) or len(pair) != 2:
                raise FormatError(f"matrix: entry ({i},{j}) must be a [re, im] pair")
            out[i, j] = complex(
                _as_float(pair[0], f"matrix entry ({i},{j}) re"),
                _as_float(pair[1], f"matrix entry ({i},{j}) im"),
            )
    return out


def _opt_matrix_to_obj(a: np.ndarray | None):
    return None if a is None else matrix_to_obj(a)


def _opt_matrix_from_obj(obj):
    return None if obj is None else matrix_from_obj(obj)


def superop_to_obj(phi: SuperOperator) -> dict:
    return {
        "dim_in": phi.dim_in,
        "dim_out": phi.dim_out,
        "vec_convention": VEC_CONVENTION,
        "matrix": matrix_to_obj(phi.matrix),
    }


def superop_from_obj(obj: Any) -> SuperOperator:
    convention = _require(obj, "vec_convention", "superoperator")
    if convention != VEC_CONVENTION:
        raise FormatError(
            f"superoperator: vec_convention must be {VEC_CONVENTION!r}, got {convention!r}"
        )
    dim_in = _as_int(_require(obj, "dim_in", "superoperator"), "superoperator.dim_in")
    dim_out = _as_int(_require(obj, "dim_out", "superoperator"), "superoperator.dim_out")
    matrix = matrix_from_obj(_require(obj, "matrix", "superoperator"))
    if matrix.shape != (dim_out**2, dim_in**2):
        raise FormatError(
            f"superoperator: matrix shape {matrix.shape} does not match dims "
            f"({dim_out**2}, {dim_in**2})"
        )
    return SuperOperator(dim_in, dim_out, matrix)


def algebra_elements_from_obj(obj: Any) -> tuple[int, list[np.ndarray]]:
    """Parse an algebra-basis document: {"n": ..., "elements": [matrix, ...]}."""
    n = _as_int(_require(obj, "n", "algebra"), "algebra.n")
    raw = _require(obj, "elements", "algebra")
    if not isinstance(raw, list) or not raw:
        raise FormatError("algebra: elements must be a non-empty list")
    elems = [matrix_from_obj(e) for e in raw]
    for e in elems:
        if e.shape != (n, n):
            raise FormatError(f"algebra: element shape {e.shape} does not match n={n}")
    return n, elems


def tolerance_to_obj(tol: Tolerance) -> dict:
    return {"abs": tol.abs, "dimension_scaling": tol.dimension_scaling}


def tolerance_from_obj(obj: Any) -> Tolerance:
    return Tolerance(
        abs=_as_float(_require(obj, "abs", "tolerance"), "tolerance.abs"),
        dimension_scaling=bool(_require(obj, "dimension_scaling", "tolerance")),
    )


def extreme_report_to_obj(r: ExtremePointReport) -> dict:
    return {
        "verdict": r.verdict.value,
        "defect_left": r.defect_left,
        "defect_right": r.defect_right,
        "is_partial_isometry": r.is_partial_isometry,
        "kadison_residual": r.kadison_residual,
        "margin": r.margin,
        "witness_index": r.witness_index,
    }


def extreme_report_from_obj(obj: Any) -> ExtremePointReport:
    witness = obj.get("witness_index")
    return ExtremePointReport(
        defect_left=_as_float(_require(obj, "defect_left", "report"), "defect_left"),
        defect_right=_as_float(_require(obj, "defect_right", "report"), "defect_right"),
        is_partial_isometry=bool(_require(obj, "is_partial_isometry", "report")),
        kadison_residual=_as_float(
            _require(obj, "kadison_residual", "report"), "kadison_residual"
        ),
        verdict=ExtremeVerdict(_require(obj, "verdict", "report")),
        margin=_as_float(_require(obj, "margin", "report"), "margin"),
        witness_index=None if witness is None else _as_int(witness, "witness_index"),
    )


def jordan_report_to_obj(r: JordanReport) -> dict:
    return {
        "r_square": r.r_square,
        "r_star": r.r_star,
        "r_unital": r.r_unital,
        "is_jordan": r.is_jordan,
        "e": _opt_matrix_to_obj(r.e),
        "p": r.p,
        "q": r.q,
        "r_hom": r.r_hom,
        "r_anti": r.r_anti,
        "r_central": r.r_central,
        "worst_square_pair": list(r.worst_square_pair) if r.worst_square_pair else None,
    }


def jordan_report_from_obj(obj: Any) -> JordanReport:
    pair = obj.get("worst_square_pair")
    return JordanReport(
        r_square=_as_float(_require(obj, "r_square", "jordan"), "r_square"),
        r_star=_as_float(_require(obj, "r_star", "jordan"), "r_star"),
        r_unital=_as_float(_require(obj, "r_unital", "jordan"), "r_unital"),
        is_jordan=bool(_require(obj, "is_jordan", "jordan")),
        e=_opt_matrix_from_obj(obj.get("e")),
        p=_as_int(_require(obj, "p", "jordan"), "p"),
        q=_as_int(_require(obj, "q", "jordan"), "q"),
        r_hom=None if obj.get("r_hom") is None else _as_float(obj["r_hom"], "r_hom"),
        r_anti=None if obj.get("r_anti") is None else _as_float(obj["r_anti"], "r_anti"),
        r_central=None
        if obj.get("r_central") is None
        else _as_float(obj["r_central"], "r_central"),
        worst_square_pair=None if pair is None else tuple(_as_int(x, "pair") for x in pair),
    )


def certificate_to_obj(c: PreserverCertificate) -> dict:
    return {
        "verdict": c.verdict.value,
        "v": matrix_to_obj(c.v),
        "v_unitarity_residual": c.v_unitarity_residual,
        "jordan": None if c.jordan is None else jordan_report_to_obj(c.jordan),
        "kind": c.kind.value,
        "u_left": _opt_matrix_to_obj(c.u_left),
        "v_right": _opt_matrix_to_obj(c.v_right),
        "transpose_flag": c.transpose_flag,
        "w": _opt_matrix_to_obj(c.w),
        "reconstruction_residual": c.reconstruction_residual,
        "witness": _opt_matrix_to_obj(c.witness),
        "witness_defect": c.witness_defect,
        "seed": c.seed,
        "reason": c.reason,
    }


def certificate_from_obj(obj: Any) -> PreserverCertificate:
    rec = obj.get("reconstruction_residual")
    wd = obj.get("witness_defect")
    return PreserverCertificate(
        verdict=PreserverVerdict(_require(obj, "verdict", "certificate")),
        v=matrix_from_obj(_require(obj, "v", "certificate")),
        v_unitarity_residual=_as_float(
            _require(obj, "v_unitarity_residual", "certificate"), "v_unitarity_residual"
        ),
        jordan=None if obj.get("jordan") is None else jordan_report_from_obj(obj["jordan"]),
        kind=MapKind(_require(obj, "kind", "certificate")),
        u_left=_opt_matrix_from_obj(obj.get("u_left")),
        v_right=_opt_matrix_from_obj(obj.get("v_right")),
        transpose_flag=bool(_require(obj, "transpose_flag", "certificate")),
        w=_opt_matrix_from_obj(obj.get("w")),
        reconstruction_residual=None if rec is None else _as_float(rec, "reconstruction"),
        witness=_opt_matrix_from_obj(obj.get("witness")),
        witness_defect=None if wd is None else _as_float(wd, "witness_defect"),
        seed=_as_int(_require(obj, "seed", "certificate"), "seed"),
        reason=str(obj.get("reason", "")),
    )


def instance_spec_to_obj(spec: InstanceSpec) -> dict:
    return {
        "n": spec.n,
        "kind": spec.kind.value,
        "seed": spec.seed,
        "p": spec.p,
        "q": spec.q,
        "epsilon": spec.epsilon,
    }


def instance_spec_from_obj(obj: Any) -> InstanceSpec:
    return InstanceSpec(
        n=_as_int(_require(obj, "n", "instance"), "instance.n"),
        kind=InstanceKind(_require(obj, "kind", "instance")),
        seed=_as_int(_require(obj, "seed", "instance"), "instance.seed"),
        p=_as_int(obj.get("p", 0), "instance.p"),
        q=_as_int(obj.get("q", 0), "instance.q"),
        epsilon=_as_float(obj.get("epsilon", 0.0), "instance.epsilon"),
    )


def run_info(tol: Tolerance, seed: int | None, wall_time_s: float) -> dict:
    from . import __version__

    info = {
        "tool": "unitball",
        "version": __version__,
        "rng": RNG_NAME,
        "tolerance": tolerance_to_obj(tol),
        "wall_time_s": wall_time_s,
    }
    if seed is not None:
        info["seed"] = seed
    return info
