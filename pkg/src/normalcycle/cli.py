"""Command-line interface.

Exit codes: 0 success, 1 an asserted identity or check failed, 2 invalid input.
CSV columns are listed in each subcommand's ``--help`` and in FORMATS.md.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import io as nio
from .complex import (
    SimplicialComplex,
    as_covector,
    closure_mask,
    full_subcomplex_mask,
    is_face_closed,
    sample_generic_covector,
    vertex_levels,
)
from .errors import NonGenericCovector, ValidationError
from .euler import ConstructibleFunction, cf_indicator, chi_o, euler_integral
from .integral_geometry import (
    crofton_constant,
    crofton_estimate,
    default_radii,
    fit_tube_polynomial,
    hausdorff_measure_exact,
    intrinsic_volumes_convex,
    run_tube_experiment,
)
from .morse import (
    convergence_harness,
    index_sum_check,
    jump_identity_check,
    jump_measure,
    morse_slice,
)
from .normal_cycle import (
    NormalCycle,
    build_normal_cycle,
    check_cycle_2d,
    check_legendrian,
    check_slices,
)

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2


class CheckFailed(Exception):
    """Raised after output is written when an asserted identity failed."""


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse number list {text!r}") from exc


def _emit(args, payload: dict, rows: list[list] | None, header: list[str] | None):
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _manifest(args) -> tuple[dict, Path]:
    if getattr(args, "manifest", None):
        path = Path(args.manifest)
        m = nio.read_json(path)
        if not isinstance(m, dict):
            raise ValidationError("manifest must be a JSON object")
        return m, path.parent
    return {}, Path(".")


def _input_path(args, manifest: dict, base: Path) -> Path:
    if args.input:
        return Path(args.input)
    if "input" in manifest:
        return base / manifest["input"]
    raise ValidationError("no input given (use --input or a manifest with \"input\")")


def _load_complex(path: Path) -> SimplicialComplex:
    obj = nio.load_any(path)
    if isinstance(obj, ConstructibleFunction):
        return obj.complex
    if isinstance(obj, NormalCycle):
        return obj.complex
    if not isinstance(obj, SimplicialComplex):
        raise ValidationError(f"{path} does not describe a complex")
    return obj


def _covector(args, X: SimplicialComplex) -> np.ndarray:
    if args.xi:
        xi = as_covector(_parse_floats(args.xi), X.ambient_dim)
        return xi / np.linalg.norm(xi)
    return sample_generic_covector(X, args.seed if args.seed is not None else 0)


def _pick(args, manifest, name, key=None, default=None):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return manifest.get(key or name, default)


# --- subcommands ---------------------------------------------------------------


def cmd_chi(args):
    X = _load_complex(Path(args.input))
    if args.vertices is not None:
        sel = full_subcomplex_mask(X, [int(v) for v in _parse_floats(args.vertices)])
    elif args.cells is not None:
        keys = [k for k in args.cells.replace(";", ",").split(",") if k.strip()]
        sel = X.mask(nio.parse_simplex_key(k) for k in keys)
        if args.closure:
            sel = closure_mask(X, sel)
    else:
        sel = X.full_mask()
    closed = is_face_closed(X, sel)
    co = chi_o(X, sel)
    payload = {"cells": int(sel.sum()), "chi_o": co, "face_closed": closed, "chi_top": co if closed else None}
    rows = [[k, "" if v is None else v] for k, v in payload.items()]
    _emit(args, payload, rows, ["quantity", "value"])


def cmd_euler_integral(args):
    obj = nio.load_any(Path(args.input))
    f = obj if isinstance(obj, ConstructibleFunction) else cf_indicator(_load_complex(Path(args.input)))
    payload = {"integral": euler_integral(f)}
    _emit(args, payload, [["integral", payload["integral"]]], ["quantity", "value"])


def cmd_morse(args):
    X = _load_complex(Path(args.input))
    xi = _covector(args, X)
    S = morse_slice(X, xi)
    if not args.check_levels:
        payload = nio.slice_to_dict(S)
        rows = [[a.vertex, a.index, a.level] for a in S.atoms]
        _emit(args, payload, rows, ["vertex", "index", "level"])
        return
    levels = np.unique(vertex_levels(X, xi)[list(X.vertices)])
    rows = []
    checks = []
    ok = True
    for t in levels:
        a = index_sum_check(X, xi, float(t))
        b = jump_identity_check(X, xi, float(t))
        good = a[0] == a[1] and b[0] == b[1]
        ok &= good
        rows.append([float(t), a[0], a[1], b[0], b[1], good])
        checks.append(
            {"level": float(t), "top_drop": list(a), "jump": list(b), "passed": good}
        )
    total = S.total
    chi = chi_o(X)
    ok &= total == chi
    payload = {
        "xi": xi.tolist(),
        "levels": checks,
        "index_total": total,
        "euler_characteristic": chi,
        "passed": bool(ok),
    }
    _emit(args, payload, rows, ["level", "top_drop_lhs", "top_drop_rhs", "jump_lhs", "jump_rhs", "passed"])
    if not ok:
        raise CheckFailed("level identities failed")


def cmd_jump(args):
    obj = nio.load_any(Path(args.input))
    f = obj if isinstance(obj, ConstructibleFunction) else cf_indicator(_load_complex(Path(args.input)))
    xi = _covector(args, f.complex)
    J = jump_measure(f, xi)
    payload = {"xi": xi.tolist(), **nio.jump_to_dict(J)}
    _emit(args, payload, [[t, m] for t, m in J.atoms], ["t", "m"])


def cmd_normal_cycle(args):
    obj = nio.load_any(Path(args.input))
    if isinstance(obj, NormalCycle):
        N = obj
    else:
        N = build_normal_cycle(_load_complex(Path(args.input)))
    if not args.verify:
        payload = nio.normal_cycle_to_dict(N)
        rows = [
            [nio.simplex_key(p.simplex), p.cell.kind, p.multiplicity, p.cell.measure]
            for p in N.pieces
        ]
        _emit(args, payload, rows, ["simplex", "cell_type", "mult", "cell_measure"])
        return
    tol = args.tol if args.tol is not None else 1e-9
    reports = [check_legendrian(N, tol)]
    if N.complex.ambient_dim == 2:
        reports.append(check_cycle_2d(N, tol))
    reports.append(check_slices(N, args.samples or 100, args.seed or 0))
    ok = all(r.passed for r in reports)
    payload = {"passed": ok, "checks": [r.as_dict() for r in reports]}
    rows = [[r.name, r.passed, r.max_violation] for r in reports]
    _emit(args, payload, rows, ["check", "passed", "max_violation"])
    if not ok:
        raise CheckFailed("normal cycle verification failed")


def _tube(args, X, manifest):
    radii = _parse_floats(args.radii) if args.radii else manifest.get("r")
    radii = np.asarray(radii if radii is not None else default_radii(X), dtype=float)
    samples = int(_pick(args, manifest, "samples", default=1_000_000))
    seed = int(_pick(args, manifest, "seed", default=0))
    exp = run_tube_experiment(X, radii, samples, seed)
    fit = fit_tube_polynomial(exp, X.dim, X.ambient_dim)
    if fit.stderr is None:
        fit.stderr = np.zeros_like(fit.mu)
    return exp, fit


def cmd_tube(args):
    manifest, base = _manifest(args)
    X = _load_complex(_input_path(args, manifest, base))
    exp, fit = _tube(args, X, manifest)
    payload = {**exp.as_dict(), "mu": fit.mu.tolist(), "mu_stderr": fit.stderr.tolist()}
    rows = [["tube_volume", r, v, s] for r, v, s in zip(exp.radii, exp.volumes, exp.stderr)]
    rows += [["mu", k, m, s] for k, (m, s) in enumerate(zip(fit.mu, fit.stderr))]
    _emit(args, payload, rows, ["quantity", "parameter", "value", "stderr"])


def cmd_intrinsic_volumes(args):
    manifest, base = _manifest(args)
    X = _load_complex(_input_path(args, manifest, base))
    method = args.method or manifest.get("method", "angles")
    if method == "angles":
        iv = intrinsic_volumes_convex(X)
        payload = {"op": "intrinsic-volumes", "method": "angles", "mu": iv.mu.tolist()}
        rows = [["mu", k, m, 0.0] for k, m in enumerate(iv.mu)]
    elif method == "tube":
        exp, fit = _tube(args, X, manifest)
        payload = {**exp.as_dict(), "method": "tube", "mu": fit.mu.tolist(), "mu_stderr": fit.stderr.tolist()}
        rows = [["mu", k, m, s] for k, (m, s) in enumerate(zip(fit.mu, fit.stderr))]
    else:
        raise ValidationError(f"unknown method {method!r}")
    _emit(args, payload, rows, ["quantity", "parameter", "value", "stderr"])


def cmd_crofton(args):
    manifest, base = _manifest(args)
    X = _load_complex(_input_path(args, manifest, base))
    samples = int(_pick(args, manifest, "samples", default=1_000_000))
    seed = int(_pick(args, manifest, "seed", default=0))
    cal_samples = int(manifest.get("calibration_samples", 1_000_000))
    cal_seed = int(manifest.get("calibration_seed", 0))
    est, se = crofton_estimate(X, 1, samples, seed, cal_samples, cal_seed)
    C, C_se = crofton_constant(cal_samples, cal_seed)
    exact = hausdorff_measure_exact(X, 1)
    payload = {
        "op": "crofton",
        "samples": samples,
        "seed": seed,
        "calibration_samples": cal_samples,
        "calibration_seed": cal_seed,
        "estimates": [est],
        "stderr": [se],
        "calibration_constant": C,
        "calibration_stderr": C_se,
        "exact_length": exact,
    }
    rows = [["length", est, se], ["calibration_constant", C, C_se], ["exact_length", exact, 0.0]]
    _emit(args, payload, rows, ["quantity", "value", "stderr"])


def cmd_converge(args):
    manifest, base = _manifest(args)
    if "sequence" not in manifest or "target" not in manifest:
        raise ValidationError('converge manifest needs "sequence" and "target"')

    def load(p):
        obj = nio.load_any(base / p)
        if not isinstance(obj, (SimplicialComplex, ConstructibleFunction)):
            raise ValidationError(f"{p} is neither a complex nor a constructible function")
        return obj

    seq = [load(p) for p in manifest["sequence"]]
    target = load(manifest["target"])
    n_xi = int(_pick(args, manifest, "samples", key="xi_samples", default=20))
    seed = int(_pick(args, manifest, "seed", default=0))
    tol = float(_pick(args, manifest, "tol", default=1e-2))
    rep = convergence_harness(seq, target, n_xi, seed, tol)
    rows = [
        [i, k, rep.distances[i, k], rep.condition_c[i, k]]
        for i in range(rep.distances.shape[0])
        for k in range(rep.distances.shape[1])
    ]
    payload = {
        "op": "converge",
        "xi_samples": n_xi,
        "seed": seed,
        "tol": tol,
        "mean_distance": rep.mean_distance.tolist(),
        "distances": rep.distances.tolist(),
        "condition_c": rep.condition_c.tolist(),
        "mass": rep.mass.tolist(),
        "mass_bound": rep.mass_bound,
        "strictly_decreasing": rep.strictly_decreasing,
        "tail_start": rep.tail_start,
        "converged": rep.converged,
    }
    _emit(args, payload, rows, ["xi_index", "member", "bl_distance", "condition_c"])


def cmd_validate(args):
    path = Path(args.input)
    obj = nio.load_any(path)
    kind = type(obj).__name__
    if isinstance(obj, dict):
        kind = "manifest"
        if "input" in obj:
            _load_complex(path.parent / obj["input"])
    payload = {"valid": True, "kind": kind}
    if isinstance(obj, SimplicialComplex):
        payload.update(ambient_dim=obj.ambient_dim, dim=obj.dim, f_vector=list(obj.f_vector))
    _emit(args, payload, [[k, v] for k, v in payload.items() if not isinstance(v, list)], ["quantity", "value"])


# --- parser --------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, *, xi=False, samples=False, radii=False, manifest=False):
    p.add_argument("--input", help="complex (.json/.off), constructible function or dump")
    if manifest:
        p.add_argument("--manifest", help="experiment manifest (JSON)")
    if xi:
        p.add_argument("--xi", help="covector as comma-separated coordinates (normalized)")
    p.add_argument("--seed", type=int, help="RNG seed")
    if samples:
        p.add_argument("--samples", type=int, help="Monte Carlo samples / covector samples")
    if radii:
        p.add_argument("--radii", help="comma-separated tube radii")
    p.add_argument("--tol", type=float, help="tolerance")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="normalcycle",
        description="Morse data, normal cycles and curvature measures of PL sets.",
        epilog="Exit codes: 0 success, 1 check failure, 2 invalid input. "
        "Input and output formats are described in FORMATS.md.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chi", help="Euler characteristics of a cell selection",
                       description="CSV columns: quantity,value")
    _common(p)
    p.add_argument("--cells", help="open cells as simplex keys, e.g. 0-1,2")
    p.add_argument("--vertices", help="select the full subcomplex on these vertex ids")
    p.add_argument("--closure", action="store_true", help="close the --cells selection under faces")
    p.set_defaults(func=cmd_chi)

    p = sub.add_parser("euler-integral", help="integral of a constructible function",
                       description="CSV columns: quantity,value")
    _common(p)
    p.set_defaults(func=cmd_euler_integral)

    p = sub.add_parser("morse", help="Morse-data slice or level-identity checks",
                       description="CSV columns: vertex,index,level (slice); "
                       "level,top_drop_lhs,top_drop_rhs,jump_lhs,jump_rhs,passed (--check-levels)")
    _common(p, xi=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--slice", action="store_true", help="print the slice (default)")
    g.add_argument("--check-levels", action="store_true", help="check both level identities")
    p.set_defaults(func=cmd_morse)

    p = sub.add_parser("jump", help="jump measure of a complex or constructible function",
                       description="CSV columns: t,m")
    _common(p, xi=True)
    p.set_defaults(func=cmd_jump)

    p = sub.add_parser("normal-cycle", help="dump or verify the normal cycle",
                       description="CSV columns: simplex,cell_type,mult,cell_measure (dump); "
                       "check,passed,max_violation (--verify)")
    _common(p, samples=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--dump", action="store_true", help="print the pieces (default)")
    g.add_argument("--verify", action="store_true", help="run Legendrian, cycle and slice checks")
    p.set_defaults(func=cmd_normal_cycle)

    p = sub.add_parser("intrinsic-volumes", help="intrinsic volumes by external angles or tube fit",
                       description="CSV columns: quantity,parameter,value,stderr")
    _common(p, samples=True, radii=True, manifest=True)
    p.add_argument("--method", choices=["angles", "tube"], help="default: angles")
    p.set_defaults(func=cmd_intrinsic_volumes)

    p = sub.add_parser("tube", help="Monte Carlo tube volumes and fitted intrinsic volumes",
                       description="CSV columns: quantity,parameter,value,stderr "
                       "(tube_volume rows: parameter = radius; mu rows: parameter = k)")
    _common(p, samples=True, radii=True, manifest=True)
    p.set_defaults(func=cmd_tube)

    p = sub.add_parser("crofton", help="length of a planar PL curve from random lines",
                       description="CSV columns: quantity,value,stderr")
    _common(p, samples=True, manifest=True)
    p.set_defaults(func=cmd_crofton)

    p = sub.add_parser("converge", help="convergence harness over a sequence of complexes",
                       description="CSV columns: xi_index,member,bl_distance,condition_c")
    _common(p, samples=True, manifest=True)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("validate", help="validate an input file",
                       description="CSV columns: quantity,value")
    _common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command not in ("tube", "crofton", "converge", "intrinsic-volumes") and not args.input:
            raise ValidationError("--input is required")
        args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except NonGenericCovector as exc:
        seed = (args.seed or 0) + 1 if hasattr(args, "seed") else 1
        print(f"error: {exc}; try --seed {seed}", file=sys.stderr)
        return EXIT_INPUT
    except (ValidationError, OSError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
