"""Deterministic JSON/CSV encoding and the state/operator file formats.

Complex numbers are two-element arrays [re, im]; states are
{"dim": N, "amps": [[re, im], ...]}; operators are
{"dim": N, "rows": [[[re, im], ...], ...]} (row-major). All floats are
emitted with 17 significant digits so output is byte-stable and
round-trip safe.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .blochgeo import SceneGraph
from .errors import ParseError, ValidationError
from .experiments import SWEEP_COLUMNS, SweepConfig, SweepRow
from .majorana import ArgumentDecomposition, StarSet
from .qstate import Observable, PureState
from .weakval import WeakValueResult


def format_float(x: float) -> str:
    """17-significant-digit decimal text; integral values keep a trailing .0."""
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValidationError("non-finite float has no JSON representation")
    text = format(x, ".17g")
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def format_csv_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    return str(v)


def dumps(obj) -> str:
    """Canonical compact JSON: sorted keys, 17-digit floats."""
    pieces: list[str] = []
    _write(obj, pieces)
    return "".join(pieces)


def _write(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise ValidationError("JSON object keys must be strings")
            if i:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _write(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    else:
        raise ValidationError(f"cannot serialize {type(obj).__name__}")


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _decode_complex(obj, what: str) -> complex:
    if (
        not isinstance(obj, (list, tuple))
        or len(obj) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj)
    ):
        raise ParseError(f"{what}: a complex number must be a two-element [re, im] array")
    return complex(float(obj[0]), float(obj[1]))


def encode_state(s: PureState) -> dict:
    return {"dim": s.dim, "amps": [encode_complex(a) for a in s.amps]}


def decode_state(obj, what: str = "state") -> PureState:
    if not isinstance(obj, dict) or set(obj) != {"dim", "amps"}:
        raise ParseError(f'{what}: expected an object with keys "dim" and "amps"')
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"{what}: dim must be a positive integer")
    amps = obj["amps"]
    if not isinstance(amps, list) or len(amps) != dim:
        raise ParseError(f"{what}: amps must be a list of {dim} complex numbers")
    vec = np.array([_decode_complex(a, what) for a in amps], dtype=complex)
    return PureState(vec)


def encode_operator(A: Observable) -> dict:
    return {"dim": A.dim, "rows": [[encode_complex(v) for v in row] for row in A.mat]}


def decode_operator(obj, what: str = "operator") -> Observable:
    if not isinstance(obj, dict) or set(obj) != {"dim", "rows"}:
        raise ParseError(f'{what}: expected an object with keys "dim" and "rows"')
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"{what}: dim must be a positive integer")
    rows = obj["rows"]
    if not isinstance(rows, list) or len(rows) != dim:
        raise ParseError(f"{what}: rows must be a {dim}x{dim} nested list")
    mat = []
    for row in rows:
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{what}: rows must be a {dim}x{dim} nested list")
        mat.append([_decode_complex(v, what) for v in row])
    return Observable(np.array(mat, dtype=complex))


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def load_state(path: str) -> PureState:
    return decode_state(load_json(path), what=path)


def load_operator(path: str) -> Observable:
    return decode_operator(load_json(path), what=path)


def encode_weak_value_result(wv: WeakValueResult) -> dict:
    return {
        "value": encode_complex(wv.value),
        "modulus": wv.modulus,
        "argument": wv.argument,
        "exp_A": wv.exp_A,
        "exp_A2": wv.exp_A2,
        "prop_const": wv.prop_const,
        "effective_state": None if wv.effective_state is None else encode_state(wv.effective_state),
    }


def encode_star_set(ss: StarSet) -> dict:
    return {
        "dim": ss.dim,
        "stars": [
            {
                "theta": s.theta,
                "phi": s.phi,
                "bloch": [float(v) for v in s.bloch],
                "qubit": [encode_complex(a) for a in s.qubit],
            }
            for s in ss.stars
        ],
        "roots": [None if r is None else encode_complex(r) for r in ss.roots],
        "infinity_count": ss.infinity_count,
    }


def encode_decomposition(d: ArgumentDecomposition) -> dict:
    def _nan_null(x: float):
        return None if math.isnan(x) else x

    two_pi = 2.0 * math.pi
    diff = (
        None
        if math.isnan(d.total_arg)
        else min((d.total_arg - d.direct_arg) % two_pi, (d.direct_arg - d.total_arg) % two_pi)
    )
    return {
        "qubit_wvs": [None if math.isnan(w.real) else encode_complex(w) for w in d.qubit_wvs],
        "solid_angles": [_nan_null(o) for o in d.solid_angles],
        "arg_expA": d.arg_expA,
        "total_arg": _nan_null(d.total_arg),
        "direct_arg": d.direct_arg,
        "difference_mod_2pi": diff,
        "normalization_M": d.normalization_M,
        "post_stars": encode_star_set(d.post_stars),
    }


def encode_scene(scene: SceneGraph) -> dict:
    return {
        "points": [
            {"label": p.label, "xyz": [float(v) for v in p.xyz]} for p in scene.points
        ],
        "arcs": [
            {
                "from": a.start,
                "to": a.end,
                "kind": a.kind,
                "samples": [[float(v) for v in row] for row in a.samples],
            }
            for a in scene.arcs
        ],
        "triangles": [
            {"verts": list(t.verts), "omega": None if math.isnan(t.omega) else t.omega}
            for t in scene.triangles
        ],
        "caption": scene.caption,
    }


def decode_sweep_config(obj, what: str = "sweep config") -> SweepConfig:
    if not isinstance(obj, dict):
        raise ParseError(f"{what}: expected a JSON object")
    allowed = {"theta_grid", "xi_grid", "track_stars", "unwrap", "outputs"}
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"{what}: unknown keys {sorted(unknown)}")
    for key in ("theta_grid", "xi_grid"):
        if key not in obj:
            raise ParseError(f"{what}: missing {key}")
    kwargs = {
        "theta_grid": _decode_grid(obj["theta_grid"], f"{what}.theta_grid"),
        "xi_grid": _decode_grid(obj["xi_grid"], f"{what}.xi_grid"),
    }
    for key in ("track_stars", "unwrap"):
        if key in obj:
            if not isinstance(obj[key], bool):
                raise ParseError(f"{what}: {key} must be a boolean")
            kwargs[key] = obj[key]
    if "outputs" in obj:
        if not isinstance(obj["outputs"], list) or not all(
            isinstance(c, str) for c in obj["outputs"]
        ):
            raise ParseError(f"{what}: outputs must be a list of column names")
        kwargs["outputs"] = tuple(obj["outputs"])
    return SweepConfig(**kwargs)


def _decode_grid(obj, what: str) -> tuple[float, ...]:
    """A grid is an explicit list or {"start", "stop", "num"} (inclusive linspace)."""
    if isinstance(obj, list):
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            raise ParseError(f"{what}: grid entries must be numbers")
        return tuple(float(v) for v in obj)
    if isinstance(obj, dict) and set(obj) == {"start", "stop", "num"}:
        start, stop, num = obj["start"], obj["stop"], obj["num"]
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (start, stop)):
            raise ParseError(f"{what}: start/stop must be numbers")
        if not isinstance(num, int) or isinstance(num, bool) or num < 1:
            raise ParseError(f"{what}: num must be a positive integer")
        return tuple(float(v) for v in np.linspace(float(start), float(stop), num))
    raise ParseError(f'{what}: expected a list or {{"start", "stop", "num"}}')


def sweep_rows_to_csv(rows: list[SweepRow], columns=None) -> str:
    """CSV text (LF line endings) with the requested SweepRow columns."""
    cols = tuple(columns) if columns else SWEEP_COLUMNS
    unknown = [c for c in cols if c not in SWEEP_COLUMNS]
    if unknown:
        raise ValidationError(f"unknown sweep columns: {unknown}")
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(format_csv_value(getattr(row, c)) for c in cols))
    return "\n".join(lines) + "\n"


def matrix_to_csv(row_labels, col_labels, matrix, corner: str = "") -> str:
    """CSV with a label row/column, for heatmap-style matrices."""
    lines = [",".join([corner] + [format_csv_value(float(c)) for c in col_labels])]
    for label, row in zip(row_labels, matrix):
        lines.append(
            ",".join([format_csv_value(float(label))] + [format_csv_value(float(v)) for v in row])
        )
    return "\n".join(lines) + "\n"
