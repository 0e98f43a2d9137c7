"""Command-line front end.

Subcommands cover the whole analysis surface: derive-b, classify, simulate,
regions, orbit-check, equiv, and sweep.  Exit codes: 0 success, 2 input
error, 3 internal-consistency violation.  Structured outputs are JSON, and
sampled outputs are CSV with fixed 17-significant-digit floats, so repeated
runs on identical inputs are byte-identical.  Optional --svg writes a direct
SVG chart; optional --fig renders the same picture with matplotlib.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys as _sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .documents import (
    DocumentError,
    format_float,
    json_dumps,
    load_system,
    make_report,
    system_from_dict,
    system_to_dict,
    write_json,
)
from .dynamics import orbit_closure_check, simulate
from .equivalence import equivalence_check, genericity_report
from .errors import (
    DegenerateOmegaError,
    FilippovConsistencyError,
    GridTooCoarseError,
    NotInelasticError,
    NotOnSurfaceError,
    TorusFilippovError,
)
from .fields import derive_inelastic_b, inelastic_system, region_grid
from .geometry import TorusSpec
from .tangency import TangencyCase, classify_tangency_set, match_tangency_case

THREADS_ENV = "TORUS_FILIPPOV_THREADS"


def _fail(message: str) -> None:
    print(f"error: {message}", file=_sys.stderr)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=_sys.stderr)


def _parse_point(text: str) -> np.ndarray:
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z with numeric entries, got {text!r}")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected exactly three components, got {len(parts)}")
    return np.array(parts)


def _report_path(out_path: str) -> str:
    return out_path + ".report.json"


def _maybe_figures(args, svg_text_fn, fig_fn) -> list[str]:
    """Write the optional chart outputs; matplotlib loads only when used."""
    written = []
    if getattr(args, "svg", None):
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg_text_fn())
        written.append(args.svg)
    if getattr(args, "fig", None):
        from . import plots

        plots.save_figure(fig_fn(), args.fig)
        written.append(args.fig)
    return written


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_derive_b(args) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {args.input}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON in {args.input}: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError("system document must be a JSON object")
    for key in ("A", "b21"):
        if key not in doc:
            raise DocumentError(f"missing required key '{key}'")

    sys_obj = system_from_dict({k: doc[k] for k in ("A", "b21", "torus") if k in doc})
    omega = sys_obj.omega
    write_json(system_to_dict(sys_obj), args.output)
    print(f"omega = {format_float(omega)}")
    degeneracies = []
    if omega == 0.0:
        degeneracies.append("omega_zero")
        _warn("omega = 0: the sliding field is identically zero (degenerate)")
    report = make_report(
        "derive-b",
        {"system": args.input},
        [args.output],
        {"omega": omega, "degeneracies": degeneracies},
    )
    write_json(report.to_dict(), _report_path(args.output))
    return 0


def _component_dict(comp) -> dict:
    if hasattr(comp, "uv"):
        return {
            "kind": "polyline",
            "parameters": {
                "closed": True,
                "grazing": bool(comp.grazing),
                "length": comp.length,
                "vertex_count": int(len(comp.points)),
            },
            "samples": [[float(c) for c in row] for row in comp.points],
            "uv": [[float(c) for c in row] for row in comp.uv],
        }
    return {
        "kind": comp.kind,
        "parameters": comp.parameters(),
        "samples": [[float(c) for c in row] for row in comp.sample(64)],
    }


def cmd_classify(args) -> int:
    sys_obj = load_system(args.system)
    result = classify_tangency_set(sys_obj, n_u=args.grid, n_v=args.grid)
    doc = {
        "case": result.case.value,
        "gamma": result.gamma,
        "component_count": result.component_count,
        "components": [_component_dict(c) for c in result.components],
    }
    write_json(doc, args.out)
    outputs = [args.out]

    def svg_text():
        from .svgchart import classification_svg

        return classification_svg(result, sys_obj.torus)

    def figure():
        from . import plots

        return plots.figure_classification(result, sys_obj.torus)

    outputs += _maybe_figures(args, svg_text, figure)
    report = make_report(
        "classify",
        {"system": args.system},
        outputs,
        {
            "case": result.case.value,
            "gamma": result.gamma,
            "component_count": result.component_count,
            "omega": sys_obj.omega,
        },
    )
    write_json(report.to_dict(), _report_path(args.out))
    return 0


def cmd_simulate(args) -> int:
    sys_obj = load_system(args.system)
    if not (args.tmax >= 0.0 and np.isfinite(args.tmax)):
        raise DocumentError(f"--tmax must be finite and >= 0, got {args.tmax}")
    trajectory = simulate(sys_obj, args.x0, args.tmax)

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,x,y,z,mode,segment\n")
        for index, seg in enumerate(trajectory.segments):
            for t, p in zip(seg.times, seg.points):
                fh.write(
                    f"{format_float(t)},{format_float(p[0])},{format_float(p[1])},"
                    f"{format_float(p[2])},{seg.mode.value},{index}\n"
                )
    outputs = [args.out]

    def svg_text():
        from .svgchart import trajectory_svg

        return trajectory_svg(trajectory, sys_obj.torus)

    def figure():
        from . import plots

        return plots.figure_trajectory(trajectory, sys_obj.torus)

    outputs += _maybe_figures(args, svg_text, figure)
    report = make_report(
        "simulate",
        {"system": args.system},
        outputs,
        {
            "omega": sys_obj.omega,
            "segments": len(trajectory.segments),
            "modes": [seg.mode.value for seg in trajectory.segments],
            "terminal_events": [seg.terminal_event.value for seg in trajectory.segments],
            "flags": trajectory.diagnostics,
        },
    )
    write_json(report.to_dict(), _report_path(args.out))
    return 0


def cmd_regions(args) -> int:
    sys_obj = load_system(args.system, allow_non_inelastic=args.allow_non_inelastic)
    if args.grid < 16:
        raise GridTooCoarseError(f"grid too coarse: need N >= 16, got {args.grid}")
    u, v, kinds = region_grid(sys_obj, args.grid, args.grid)

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("u,v,region\n")
        for i in range(args.grid):
            for j in range(args.grid):
                fh.write(f"{format_float(u[i])},{format_float(v[j])},{kinds[i, j].value}\n")
    outputs = [args.out]

    def svg_text():
        from .svgchart import regions_svg

        return regions_svg(u, v, kinds)

    def figure():
        from . import plots

        return plots.figure_regions(u, v, kinds)

    outputs += _maybe_figures(args, svg_text, figure)
    counts = {}
    for kind in kinds.ravel():
        counts[kind.value] = counts.get(kind.value, 0) + 1
    report = make_report(
        "regions",
        {"system": args.system},
        outputs,
        {"omega": sys_obj.omega, "cell_counts": counts},
    )
    write_json(report.to_dict(), _report_path(args.out))
    return 0


def cmd_orbit_check(args) -> int:
    sys_obj = load_system(args.system)
    result = orbit_closure_check(sys_obj, args.p0)
    report = make_report(
        "orbit-check",
        {"system": args.system},
        [],
        {
            "closed": result.closed,
            "period": result.measured_period,
            "gap": result.return_gap,
            "omega": sys_obj.omega,
        },
    )
    print(json_dumps(report.to_dict()), end="")
    return 0


def _genericity_dict(rep) -> dict:
    return {
        "in_lemma_case": rep.in_lemma_case,
        "case_label": rep.case_label,
        "hyperbolic_interior": rep.hyperbolic_interior,
        "hyperbolic_exterior": rep.hyperbolic_exterior,
        "omega": rep.omega,
        "omega_nonzero": rep.omega_nonzero,
        "in_frak_z_strict": rep.in_frak_z_strict,
        "in_frak_z_relaxed": rep.in_frak_z_relaxed,
        "eigenvalues_interior": [[e.real, e.imag] for e in rep.eigenvalues_interior],
        "eigenvalues_exterior": [[e.real, e.imag] for e in rep.eigenvalues_exterior],
    }


def cmd_equiv(args) -> int:
    sys1 = load_system(args.system1)
    sys2 = load_system(args.system2)
    rep = equivalence_check(sys1, sys2, strict=args.strict)
    doc = {
        "equivalent": rep.equivalent,
        "orientation_relation": rep.orientation_relation.value,
        "homeomorphism_descriptor": (
            rep.homeomorphism_descriptor.value if rep.homeomorphism_descriptor else None
        ),
        "orbit_match_error": rep.orbit_match_error,
        "conjugacy_residual": rep.conjugacy_residual,
        "genericity_1": _genericity_dict(rep.genericity_1),
        "genericity_2": _genericity_dict(rep.genericity_2),
    }
    write_json(doc, args.out)
    report = make_report(
        "equiv",
        {"system1": args.system1, "system2": args.system2},
        [args.out],
        {"equivalent": rep.equivalent, "orientation": rep.orientation_relation.value},
    )
    write_json(report.to_dict(), _report_path(args.out))
    return 0


def _sweep_cell(index: int, base_a: np.ndarray, base_b21: float, torus: TorusSpec, params: dict) -> dict:
    a = base_a.copy()
    b21 = base_b21
    for key, value in params.items():
        if key == "b21":
            b21 = float(value)
        else:
            i, j = int(key[1]) - 1, int(key[2]) - 1
            a[i, j] = float(value)
    sys_obj = inelastic_system(a, b21, torus)
    case = match_tangency_case(a)
    flags = []
    if sys_obj.omega == 0.0:
        flags.append("omega_zero")
    if case is TangencyCase.EVERYWHERE_TANGENT:
        flags.append("everywhere_tangent")
    gen = genericity_report(sys_obj)
    return {
        "index": index,
        "params": params,
        "omega": sys_obj.omega,
        "case": case.value,
        "in_frak_z_relaxed": gen.in_frak_z_relaxed,
        "in_frak_z_strict": gen.in_frak_z_strict,
        "flags": flags,
        "A": a.tolist(),
        "B": derive_inelastic_b(a, b21).tolist(),
    }


_GRID_KEYS = {"a11", "a12", "a13", "a21", "a22", "a23", "a31", "a32", "a33", "b21"}


def cmd_sweep(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {args.config}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON in {args.config}: {exc}") from None

    if "base" not in config or "grid" not in config:
        raise DocumentError("sweep config needs 'base' (system document) and 'grid'")
    base = config["base"]
    if "A" not in base:
        raise DocumentError("sweep base needs key 'A'")
    base_a = np.array(base["A"], dtype=float)
    if base_a.shape != (3, 3):
        raise DocumentError("sweep base 'A' must be 3x3")
    base_b21 = float(base.get("b21", 0.0))
    torus_doc = base.get("torus", {})
    torus = TorusSpec(float(torus_doc.get("R", 2.0)), float(torus_doc.get("r", 1.0)))

    grid = config["grid"]
    if not isinstance(grid, dict) or not grid:
        raise DocumentError("sweep 'grid' must be a non-empty object of entry -> values")
    for key in grid:
        if key not in _GRID_KEYS:
            raise DocumentError(f"unknown grid key '{key}' (expected aij or b21)")

    keys = list(grid.keys())
    combos = list(itertools.product(*(grid[k] for k in keys)))
    os.makedirs(args.out_dir, exist_ok=True)

    workers = int(os.environ.get(THREADS_ENV, "0")) or min(8, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [
            pool.submit(_sweep_cell, idx, base_a, base_b21, torus, dict(zip(keys, combo)))
            for idx, combo in enumerate(combos)
        ]
        cells = [f.result() for f in futures]

    index_rows = []
    for cell in cells:
        name = f"cell_{cell['index']:04d}.json"
        write_json(cell, os.path.join(args.out_dir, name))
        index_rows.append(
            {
                "index": cell["index"],
                "file": name,
                "params": cell["params"],
                "omega": cell["omega"],
                "flags": cell["flags"],
            }
        )
    write_json({"count": len(index_rows), "cells": index_rows}, os.path.join(args.out_dir, "index.json"))
    print(f"sweep: {len(index_rows)} cells written to {args.out_dir}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torus-filippov",
        description=(
            "Analysis of piecewise-linear vector fields with a torus switching "
            "manifold: sliding dynamics, tangency sets, hybrid simulation, and "
            "topological equivalence."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive-b", help="derive the inelastic interior matrix from A and b21")
    p.add_argument("input", help="system JSON with keys A and b21")
    p.add_argument("output", help="path for the completed system JSON")
    p.set_defaults(func=cmd_derive_b)

    p = sub.add_parser("classify", help="classify the tangency set of X+ on the torus")
    p.add_argument("system", help="system JSON")
    p.add_argument("--grid", type=int, default=256, help="contour grid for the numerical fallback")
    p.add_argument("--out", required=True, help="classification JSON output")
    p.add_argument("--svg", help="optional direct-SVG chart output")
    p.add_argument("--fig", help="optional matplotlib figure output (png/pdf/svg)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="hybrid free-flight/sliding simulation")
    p.add_argument("system", help="system JSON")
    p.add_argument("--x0", type=_parse_point, required=True, help="initial point x,y,z")
    p.add_argument("--tmax", type=float, required=True, help="model time horizon")
    p.add_argument("--out", required=True, help="trajectory CSV output")
    p.add_argument("--svg", help="optional direct-SVG chart output")
    p.add_argument("--fig", help="optional matplotlib figure output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("regions", help="sliding/escaping/tangency map over the (u, v) grid")
    p.add_argument("system", help="system JSON")
    p.add_argument("--grid", type=int, default=128, help="grid resolution N (N >= 16)")
    p.add_argument("--out", required=True, help="regions CSV output")
    p.add_argument("--allow-non-inelastic", action="store_true")
    p.add_argument("--svg", help="optional direct-SVG chart output")
    p.add_argument("--fig", help="optional matplotlib figure output")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("orbit-check", help="verify closure of the sliding orbit through a point")
    p.add_argument("system", help="system JSON")
    p.add_argument("--p0", type=_parse_point, required=True, help="torus point x,y,z")
    p.set_defaults(func=cmd_orbit_check)

    p = sub.add_parser("equiv", help="topological-equivalence verdict for two systems")
    p.add_argument("system1")
    p.add_argument("system2")
    p.add_argument("--out", required=True, help="equivalence report JSON output")
    p.add_argument("--strict", action="store_true", help="require hyperbolic spectra as well")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("sweep", help="batch analysis over a coefficient grid")
    p.add_argument("config", help="sweep config JSON with 'base' and 'grid'")
    p.add_argument("--out-dir", required=True, help="directory for per-cell reports and index")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FilippovConsistencyError as exc:
        _fail(str(exc))
        return 3
    except (
        DocumentError,
        GridTooCoarseError,
        NotInelasticError,
        NotOnSurfaceError,
        DegenerateOmegaError,
    ) as exc:
        _fail(str(exc))
        return 2
    except TorusFilippovError as exc:
        _fail(str(exc))
        return 2
    except ValueError as exc:
        _fail(str(exc))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
