"""Command-line front end.

Exit codes: 0 ok; 2 math-domain error; 3 partial geometry (a star triangle
degenerated; partial results are still written); 64 parse error; 65
validation error. Errors are reported as one-line JSON on stderr with a
stable "error" code. WV_TOL_OVERRIDE may carry a JSON map of tolerance
overrides (applied where meaningful, with a warning).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments, render, serialize
from .errors import (
    DegenerateStarTriangleError,
    ParseError,
    ValidationError,
    WvgeoError,
)
from .majorana import (
    StarSet,
    decompose_reduced,
    decompose_with_mapping,
    qutrit_reduction,
)
from .qstate import principal_angle
from .weakval import effective_state, projector_weak_value, weak_value

EXIT_OK = 0
EXIT_MATH = 2
EXIT_PARTIAL = 3
EXIT_PARSE = 64
EXIT_VALIDATION = 65

_TOL_KEYS = {"orthogonality", "divergence", "state-norm", "hermiticity"}

_VIEW_AXES = {
    "+x": (1.0, 0.0, 0.0),
    "-x": (-1.0, 0.0, 0.0),
    "+y": (0.0, 1.0, 0.0),
    "-y": (0.0, -1.0, 0.0),
    "+z": (0.0, 0.0, 1.0),
    "-z": (0.0, 0.0, -1.0),
}


def _tolerance_overrides() -> dict[str, float]:
    raw = os.environ.get("WV_TOL_OVERRIDE")
    if not raw:
        return {}
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"WV_TOL_OVERRIDE is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValidationError("WV_TOL_OVERRIDE must be a JSON object")
    out = {}
    for key, value in obj.items():
        if key not in _TOL_KEYS:
            raise ValidationError(f"WV_TOL_OVERRIDE: unknown tolerance {key!r}")
        if not isinstance(value, (int, float)) or isinstance(value, bool) or value <= 0:
            raise ValidationError(f"WV_TOL_OVERRIDE: {key} must be a positive number")
        out[key] = float(value)
    if out:
        sys.stderr.write(f"warning: tolerance overrides active: {serialize.dumps(out)}\n")
    return out


def _apply_overrides(tols: dict[str, float]) -> None:
    # Process-wide defaults for this CLI invocation only.
    from . import qstate, weakval

    if "state-norm" in tols:
        qstate.UNIT_NORM_ATOL = tols["state-norm"]
    if "hermiticity" in tols:
        qstate.HERMITIAN_ATOL = tols["hermiticity"]
    if "orthogonality" in tols:
        weakval.ORTHOGONALITY_ATOL = tols["orthogonality"]
    if "divergence" in tols:
        experiments.DIVERGENCE_ATOL = tols["divergence"]


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, output: str | None) -> None:
    _emit(serialize.dumps(payload) + "\n", output)


def _view_axis(spec: str):
    if spec in _VIEW_AXES:
        return _VIEW_AXES[spec]
    try:
        parts = [float(v) for v in spec.split(",")]
    except ValueError:
        parts = []
    if len(parts) != 3:
        raise ValidationError(f"view axis must be one of {sorted(_VIEW_AXES)} or 'x,y,z'")
    return tuple(parts)


def cmd_compute(args) -> int:
    A = serialize.load_operator(args.observable)
    pre = serialize.load_state(args.pre)
    post = serialize.load_state(args.post)
    wv = weak_value(A, pre, post)
    _emit_json(serialize.encode_weak_value_result(wv), args.output)
    return EXIT_OK


def cmd_decompose(args) -> int:
    A = serialize.load_operator(args.observable)
    pre = serialize.load_state(args.pre)
    post = serialize.load_state(args.post)
    run = decompose_reduced if args.mode == "reduced" else decompose_with_mapping
    partial = False
    try:
        decomp, mapping = run(A, pre, post)
    except DegenerateStarTriangleError as exc:
        decomp, mapping, partial = exc.partial, None, True
        sys.stderr.write(_error_payload(exc))
    payload = serialize.encode_decomposition(decomp)
    payload["partial"] = partial
    _emit_json(payload, args.output)
    if mapping is not None and (args.scene_json or args.scene_svg):
        from .blochgeo import build_scene

        scene = build_scene(decomp, mapping)
        if args.scene_json:
            Path(args.scene_json).write_text(
                serialize.dumps(serialize.encode_scene(scene)) + "\n", encoding="utf-8"
            )
        if args.scene_svg:
            Path(args.scene_svg).write_text(
                render.scene_to_svg(scene, _view_axis(args.view_axis)), encoding="utf-8"
            )
    return EXIT_PARTIAL if partial else EXIT_OK


def cmd_stars(args) -> int:
    state = serialize.load_state(args.state)
    _emit_json(serialize.encode_star_set(StarSet.from_state(state)), args.output)
    return EXIT_OK


def cmd_reduce(args) -> int:
    A = serialize.load_operator(args.observable)
    pre = serialize.load_state(args.pre)
    post = serialize.load_state(args.post)
    wv = weak_value(A, pre, post)
    eff = effective_state(A, pre)
    pre3, eff3, post3, basis = qutrit_reduction(pre, eff, post)
    reduced_value = None
    if wv.prop_const is not None:
        reduced_value = wv.prop_const * projector_weak_value(pre3, eff3, post3)
    payload = {
        "pre3": serialize.encode_state(pre3),
        "eff3": serialize.encode_state(eff3),
        "post3": serialize.encode_state(post3),
        "basis": [[serialize.encode_complex(v) for v in q] for q in basis],
        "weak_value_original": serialize.encode_complex(wv.value),
        "weak_value_reduced": None
        if reduced_value is None
        else serialize.encode_complex(reduced_value),
    }
    _emit_json(payload, args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = serialize.decode_sweep_config(serialize.load_json(args.config), what=args.config)
    rows = experiments.sweep(config)
    _emit(serialize.sweep_rows_to_csv(rows, config.outputs), args.output)
    return EXIT_OK


def cmd_scene(args) -> int:
    A = serialize.load_operator(args.observable)
    pre = serialize.load_state(args.pre)
    post = serialize.load_state(args.post)
    run = decompose_reduced if args.mode == "reduced" else decompose_with_mapping
    decomp, mapping = run(A, pre, post)
    from .blochgeo import build_scene

    scene = build_scene(decomp, mapping)
    if args.json_out:
        Path(args.json_out).write_text(
            serialize.dumps(serialize.encode_scene(scene)) + "\n", encoding="utf-8"
        )
    if args.svg_out:
        Path(args.svg_out).write_text(
            render.scene_to_svg(scene, _view_axis(args.view_axis)), encoding="utf-8"
        )
    if not args.json_out and not args.svg_out:
        _emit_json(serialize.encode_scene(scene), None)
    return EXIT_OK


def cmd_cnot(args) -> int:
    report = experiments.cnot_case()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    axis = _view_axis(args.view_axis)
    payload = {
        "weak_value": serialize.encode_weak_value_result(report.weak_value),
        "stars_decomposition": serialize.encode_decomposition(report.stars_decomposition),
        "reduced_decomposition": serialize.encode_decomposition(report.reduced_decomposition),
    }
    (out_dir / "cnot_report.json").write_text(serialize.dumps(payload) + "\n", encoding="utf-8")
    for name, scene in report.scenes.items():
        (out_dir / f"cnot_scene_{name}.json").write_text(
            serialize.dumps(serialize.encode_scene(scene)) + "\n", encoding="utf-8"
        )
        (out_dir / f"cnot_scene_{name}.svg").write_text(
            render.scene_to_svg(scene, axis), encoding="utf-8"
        )
    return EXIT_OK


def cmd_spin1_map(args) -> int:
    thetas = np.linspace(args.theta_min, args.theta_max, args.theta_num)
    xis = np.linspace(args.xi_min, args.xi_max, args.xi_num, endpoint=False)
    chart = experiments.star_angle_map(thetas, xis, locus_theta_step=args.locus_step)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "star_angle_map.csv").write_text(
        serialize.matrix_to_csv(
            chart.theta_grid, chart.xi_grid, chart.angles_deg, corner="theta\\xi"
        ),
        encoding="utf-8",
    )
    locus = chart.locus
    locus_lines = ["xi,theta_max,theta_min,max_modulus,divergent"]
    for k in range(len(locus.xi)):
        locus_lines.append(
            ",".join(
                serialize.format_csv_value(v)
                for v in (
                    locus.xi[k],
                    locus.theta_max[k],
                    locus.theta_min[k],
                    locus.max_modulus[k],
                    locus.divergent[k],
                )
            )
        )
    (out_dir / "extrema_locus.csv").write_text("\n".join(locus_lines) + "\n", encoding="utf-8")
    overlays = {
        "theta_max": ("#ff0000", list(locus.xi), list(locus.theta_max)),
        "theta_min": ("#00aa00", list(locus.xi), list(locus.theta_min)),
    }
    (out_dir / "star_angle_map.svg").write_text(
        render.heatmap_to_svg(
            chart.theta_grid,
            chart.xi_grid,
            chart.angles_deg,
            overlays=overlays,
            title="star angle (deg) over (theta, xi)",
        ),
        encoding="utf-8",
    )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wvgeo",
        description="Weak values and their Bloch-sphere solid-angle decomposition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_triple(p):
        p.add_argument("observable", help="observable JSON file")
        p.add_argument("pre", help="pre-selected state JSON file")
        p.add_argument("post", help="post-selected state JSON file")

    p = sub.add_parser("compute", help="weak value of an observable")
    add_triple(p)
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("decompose", help="solid-angle decomposition of the argument")
    add_triple(p)
    p.add_argument("--mode", choices=("stars", "reduced"), default="stars")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.add_argument("--scene-json", help="also write the scene JSON here")
    p.add_argument("--scene-svg", help="also write the scene SVG here")
    p.add_argument("--view-axis", default="+x", help="+x,-x,+y,-y,+z,-z or 'x,y,z'")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("stars", help="Majorana stars of a state")
    p.add_argument("state", help="state JSON file")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_stars)

    p = sub.add_parser("reduce", help="qutrit reduction of the weak-value triple")
    add_triple(p)
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("sweep", help="spin-1 sweep to CSV")
    p.add_argument("config", help="sweep config JSON file")
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("scene", help="scene files for a decomposition")
    add_triple(p)
    p.add_argument("--mode", choices=("stars", "reduced"), default="stars")
    p.add_argument("--json-out", help="scene JSON path")
    p.add_argument("--svg-out", help="scene SVG path")
    p.add_argument("--view-axis", default="+x")
    p.set_defaults(func=cmd_scene)

    p = sub.add_parser("cnot", help="the controlled-NOT case study")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--view-axis", default="+x")
    p.set_defaults(func=cmd_cnot)

    p = sub.add_parser("spin1-map", help="star-angle map with extrema loci")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--theta-num", type=int, default=61)
    p.add_argument("--xi-num", type=int, default=90)
    p.add_argument("--theta-min", type=float, default=0.01)
    p.add_argument("--theta-max", type=float, default=math.pi - 0.01)
    p.add_argument("--xi-min", type=float, default=0.0)
    p.add_argument("--xi-max", type=float, default=2.0 * math.pi)
    p.add_argument("--locus-step", type=float, default=1e-3)
    p.set_defaults(func=cmd_spin1_map)

    return parser


def _error_payload(exc: WvgeoError) -> str:
    return serialize.dumps({"error": exc.code, "message": str(exc)}) + "\n"


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else 0
    try:
        _apply_overrides(_tolerance_overrides())
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(_error_payload(exc))
        return EXIT_PARSE
    except ValidationError as exc:
        sys.stderr.write(_error_payload(exc))
        return EXIT_VALIDATION
    except DegenerateStarTriangleError as exc:
        sys.stderr.write(_error_payload(exc))
        return EXIT_PARTIAL
    except WvgeoError as exc:
        sys.stderr.write(_error_payload(exc))
        return EXIT_MATH
    except OSError as exc:
        sys.stderr.write(serialize.dumps({"error": "io-error", "message": str(exc)}) + "\n")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
