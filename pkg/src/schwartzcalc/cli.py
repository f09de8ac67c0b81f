"""Batch command-line front end.

Subcommands
-----------
``solve --config FILE``
    Solve ``A(u) = d`` by symbol division; writes ``solution.csv`` and
    ``report.json``.
``green --config FILE --index P [--index P ...]``
    Build Green members for the configured operator at the given index
    points; writes ``green_XXX.csv`` per index and ``report.json``.
``expand --config FILE``
    Apply the configured operator by spectral expansion; writes
    ``expansion.csv`` (the image) and ``integrand.csv`` (the symbol-scaled
    coordinate distribution).
``verify SUITE``
    Run a self-check suite (``identity``, ``homomorphism``, ``eigen``,
    ``solver``, ``green`` or ``all``) and print a deterministic pass/fail
    table.

Exit codes: 0 success; 1 configuration problem; 2 the equation/operator is
not divisible/invertible under the policy; 3 a verification check failed.

The probe generator seed is taken from the ``SCHWARTZ_SEED`` environment
variable (default 42).  The JSON config schema is documented in the README.
CSV outputs carry the header ``x0[,x1...],re,im`` with one row per grid node
in row-major order; identical configs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    DivisionError,
    IndexOffGrid,
    NotDivisible,
    NotInvertible,
    SchwartzCalcError,
)
from .grid import (
    Grid,
    GridDistribution,
    SymbolFunction,
    delta_distribution,
    make_grid,
    sample_function,
)
from .families import DiracFamily, FourierFamily, SchwartzFamily
from .solver import (
    DifferentialOperatorSpec,
    DivisionPolicy,
    differential_symbol,
    solve,
)
from .spectral import spectral_apply
from .green import green_family, green_family_divided, left_inverse_family
from .verify import SUITE_NAMES, format_report, run_suites

DEFAULT_SEED = 42


# ---------------------------------------------------------------------------
# config parsing


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _require(cfg: dict, key: str, kind=dict):
    if key not in cfg:
        raise ConfigError(f"config is missing the {key!r} section")
    value = cfg[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"config section {key!r} must be a {kind.__name__}")
    return value


def _parse_grid(section: dict) -> Grid:
    try:
        dim = int(section["dim"])
        counts = [int(n) for n in section["counts"]]
        extents = [float(L) for L in section["half_extents"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"grid section needs dim, counts, half_extents: {exc}") from exc
    return make_grid(dim, counts, extents)


def _parse_complex(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"coefficients must be numbers or [re, im] pairs, got {value!r}")


def _parse_multi_index(key: str, dim: int) -> tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in str(key).split(","))
    except ValueError as exc:
        raise ConfigError(f"bad derivative multi-index {key!r}") from exc
    if len(parts) != dim:
        raise ConfigError(
            f"multi-index {key!r} has {len(parts)} entries for a {dim}-dimensional grid"
        )
    if any(p < 0 for p in parts):
        raise ConfigError(f"multi-index {key!r} has negative entries")
    return parts


def _parse_symbol(section: dict, dim: int) -> SymbolFunction:
    name = section.get("name")
    if name == "one":
        from .grid import unit_symbol

        return unit_symbol(dim)
    if name == "polynomial":
        terms_cfg = section.get("terms")
        if not isinstance(terms_cfg, dict) or not terms_cfg:
            raise ConfigError("polynomial symbol needs a non-empty 'terms' object")
        terms = [
            (_parse_multi_index(k, dim), _parse_complex(v)) for k, v in terms_cfg.items()
        ]

        def evaluator(*coords):
            total = np.zeros(np.broadcast(*coords).shape, dtype=np.complex128)
            for idx, coeff in terms:
                mono = np.full(np.broadcast(*coords).shape, coeff)
                for axis, power in enumerate(idx):
                    if power:
                        mono = mono * np.asarray(coords[axis]) ** power
                total = total + mono
            return total

        label = "+".join(f"{c}*x^{idx}" for idx, c in terms)
        return SymbolFunction(dim, evaluator, f"poly[{label}]")
    raise ConfigError(f"unknown symbol name {name!r} (use 'one' or 'polynomial')")


def _parse_point(value, dim: int, what: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        value = [value]
    try:
        pt = tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what} must be a number or list of numbers") from exc
    if len(pt) != dim:
        raise ConfigError(f"{what} needs {dim} coordinates, got {len(pt)}")
    return pt


def _read_samples_csv(path: str, grid: Grid) -> GridDistribution:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read samples file {path}: {exc}") from exc
    values = []
    for row in rows:
        if not row:
            continue
        try:
            re_part, im_part = float(row[-2]), float(row[-1])
        except ValueError:
            continue  # header or comment line
        values.append(complex(re_part, im_part))
    if len(values) != grid.size:
        raise ConfigError(
            f"samples file {path} has {len(values)} data rows, grid has {grid.size} nodes"
        )
    return GridDistribution(grid, np.asarray(values))


def _parse_datum(section: dict, grid: Grid) -> tuple[GridDistribution, str]:
    kind = section.get("kind")
    if kind == "gaussian":
        sigma = float(section.get("sigma", 1.0))
        if sigma <= 0:
            raise ConfigError("gaussian sigma must be positive")
        center = _parse_point(section.get("center", [0.0] * grid.dim), grid.dim, "center")
        datum = sample_function(
            grid,
            lambda *xs: np.exp(
                -sum((x - c) ** 2 for x, c in zip(xs, center)) / (2.0 * sigma**2)
            ),
        )
        return datum, f"gaussian(sigma={sigma}, center={list(center)})"
    if kind in ("sin", "cos"):
        k = _parse_point(section.get("k", 1.0), grid.dim, "wave vector k")
        fn = np.sin if kind == "sin" else np.cos
        datum = sample_function(
            grid, lambda *xs: fn(sum(ki * x for ki, x in zip(k, xs)))
        )
        return datum, f"{kind}(k={list(k)})"
    if kind == "constant":
        c = _parse_complex(section.get("c", 1.0))
        datum = sample_function(grid, lambda *xs: np.full(np.broadcast(*xs).shape, c))
        return datum, f"constant({c})"
    if kind == "delta":
        p = _parse_point(section.get("p", [0.0] * grid.dim), grid.dim, "delta location p")
        try:
            datum = delta_distribution(grid, p)
        except IndexOffGrid as exc:
            raise ConfigError(str(exc)) from exc
        return datum, f"delta(p={list(p)})"
    if kind == "samples":
        path = section.get("path")
        if not path:
            raise ConfigError("samples datum needs a 'path'")
        return _read_samples_csv(path, grid), f"samples({path})"
    raise ConfigError(
        f"unknown datum kind {kind!r} "
        "(use gaussian, sin, cos, constant, delta or samples)"
    )


def _parse_policy(section: dict | None) -> DivisionPolicy:
    if section is None:
        return DivisionPolicy()
    zt = section.get("zero_threshold")
    rt = section.get("residual_threshold", 1e-10)
    try:
        return DivisionPolicy(
            zero_threshold=None if zt is None else float(zt),
            residual_threshold=float(rt),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad division policy: {exc}") from exc


def _parse_operator(section: dict, grid: Grid) -> tuple[SchwartzFamily, SymbolFunction, str]:
    """Resolve the operator config to its eigen-pair (family, symbol)."""
    kind = section.get("type")
    if kind == "differential":
        coeffs_cfg = section.get("coefficients")
        if not isinstance(coeffs_cfg, dict) or not coeffs_cfg:
            raise ConfigError("differential operator needs a non-empty 'coefficients' object")
        coeffs = {
            _parse_multi_index(k, grid.dim): _parse_complex(v)
            for k, v in coeffs_cfg.items()
        }
        spec = DifferentialOperatorSpec(coeffs)
        family = FourierFamily(grid)
        symbol = differential_symbol(spec, family.index_grid)
        label = ", ".join(
            f"d^{','.join(map(str, idx))}: {coeffs[idx]}" for idx in sorted(coeffs)
        )
        return family, symbol, f"differential({label})"
    if kind == "diagonal":
        family_name = section.get("family")
        if family_name == "fourier":
            family: SchwartzFamily = FourierFamily(grid)
        elif family_name == "dirac":
            family = DiracFamily(grid)
        else:
            raise ConfigError(f"unknown family {family_name!r} (use 'fourier' or 'dirac')")
        symbol = _parse_symbol(_require(section, "symbol"), family.index_dim)
        return family, symbol, f"diagonal(family={family_name}, symbol={symbol.descriptor})"
    if kind == "multiplication":
        symbol = _parse_symbol(_require(section, "symbol"), grid.dim)
        return DiracFamily(grid), symbol, f"multiplication({symbol.descriptor})"
    raise ConfigError(
        f"unknown operator type {kind!r} "
        "(use differential, diagonal or multiplication)"
    )


def _output_dir(cfg: dict) -> Path:
    section = cfg.get("output", {})
    if not isinstance(section, dict):
        raise ConfigError("output section must be an object")
    directory = Path(section.get("directory", "."))
    directory.mkdir(parents=True, exist_ok=True)
    return directory


# ---------------------------------------------------------------------------
# deterministic writers


def _grid_json(grid: Grid) -> dict:
    return {
        "dim": grid.dim,
        "counts": list(grid.counts),
        "half_extents": [float(L) for L in grid.half_extents],
    }


def _policy_json(policy: DivisionPolicy, applied: float | None = None) -> dict:
    out = {
        "zero_threshold": policy.zero_threshold,
        "residual_threshold": policy.residual_threshold,
    }
    if applied is not None:
        out["zero_threshold_applied"] = applied
    return out


def write_distribution_csv(path: Path, dist: GridDistribution) -> None:
    grid = dist.grid
    pts = grid.points()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(f"x{i}" for i in range(grid.dim)) + ",re,im\n")
        for row, val in zip(pts, dist.samples):
            coords = ",".join(repr(float(c)) for c in row)
            fh.write(f"{coords},{float(val.real)!r},{float(val.imag)!r}\n")


def _write_report(path: Path, report: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    grid = _parse_grid(_require(cfg, "grid"))
    family, symbol, op_label = _parse_operator(_require(cfg, "operator"), grid)
    datum, datum_label = _parse_datum(_require(cfg, "datum"), grid)
    policy = _parse_policy(cfg.get("policy"))
    out_dir = _output_dir(cfg)
    applied = policy.resolve_zero_threshold(symbol.sample(family.index_grid))
    report = {
        "command": "solve",
        "grid": _grid_json(grid),
        "operator": op_label,
        "datum": datum_label,
        "policy": _policy_json(policy, applied),
    }
    try:
        result = solve(family, symbol, datum, policy)
    except NotDivisible as exc:
        report.update(
            {
                "status": "not_divisible",
                "divisible": False,
                "residual": None,
                "worst_index": [float(c) for c in exc.worst_point],
                "worst_flat_index": exc.worst_index,
                "offending_mass": exc.magnitude,
            }
        )
        _write_report(out_dir / "report.json", report)
        print(f"not divisible: {exc}", file=sys.stderr)
        return 2
    write_distribution_csv(out_dir / "solution.csv", result.solution)
    report.update(
        {
            "status": "ok",
            "divisible": True,
            "residual": result.residual,
            "outputs": {"solution_csv": "solution.csv"},
        }
    )
    _write_report(out_dir / "report.json", report)
    print(f"solved: residual {result.residual:.4e}; outputs in {out_dir}")
    return 0


def _cmd_green(args) -> int:
    cfg = _load_config(args.config)
    grid = _parse_grid(_require(cfg, "grid"))
    family, symbol, op_label = _parse_operator(_require(cfg, "operator"), grid)
    policy = _parse_policy(cfg.get("policy"))
    out_dir = _output_dir(cfg)
    points = []
    for raw in args.index:
        try:
            pt = _parse_point([float(v) for v in raw.split(",")], grid.dim, "index")
        except ValueError as exc:
            raise ConfigError(f"bad index {raw!r}: {exc}") from exc
        points.append(pt)
    report = {
        "command": "green",
        "grid": _grid_json(grid),
        "operator": op_label,
        "policy": _policy_json(policy),
        "indices": [list(p) for p in points],
    }
    mu = left_inverse_family(family)
    try:
        try:
            result = green_family(family, symbol, mu, policy)
            route = "reciprocal"
        except NotInvertible:
            result = green_family_divided(family, symbol, mu, policy)
            route = "divided"
    except DivisionError as exc:
        report.update(
            {
                "status": "not_invertible" if isinstance(exc, NotInvertible) else "not_divisible",
                "worst_index": [float(c) for c in exc.worst_point],
                "worst_flat_index": exc.worst_index,
                "magnitude": exc.magnitude,
            }
        )
        _write_report(out_dir / "report.json", report)
        print(f"green construction failed: {exc}", file=sys.stderr)
        return 2
    index_grid = result.family.index_grid
    outputs = {}
    residuals = {}
    for k, pt in enumerate(points):
        try:
            flat = index_grid.index_of(pt)
        except IndexOffGrid as exc:
            raise ConfigError(str(exc)) from exc
        name = f"green_{k:03d}.csv"
        write_distribution_csv(out_dir / name, result.family.member(pt))
        outputs[name] = list(pt)
        residuals[name] = float(result.weak_residuals[flat])
    report.update(
        {
            "status": "ok",
            "route": route,
            "outputs": outputs,
            "weak_residuals": residuals,
            "max_weak_residual_all_indices": result.max_weak_residual(),
            "probe": {
                "centers": [list(c) for c in result.probe_centers],
                "width_cells": result.probe_width_cells,
            },
        }
    )
    _write_report(out_dir / "report.json", report)
    print(
        f"green family built ({route}); max weak residual "
        f"{result.max_weak_residual():.4e}; outputs in {out_dir}"
    )
    return 0


def _cmd_expand(args) -> int:
    cfg = _load_config(args.config)
    grid = _parse_grid(_require(cfg, "grid"))
    family, symbol, op_label = _parse_operator(_require(cfg, "operator"), grid)
    datum, datum_label = _parse_datum(_require(cfg, "datum"), grid)
    out_dir = _output_dir(cfg)
    image = spectral_apply(symbol, family, datum)
    coords = family.coordinates(datum)
    integrand = GridDistribution(
        family.index_grid, symbol.sample(family.index_grid) * coords.samples
    )
    write_distribution_csv(out_dir / "expansion.csv", image)
    write_distribution_csv(out_dir / "integrand.csv", integrand)
    report = {
        "command": "expand",
        "status": "ok",
        "grid": _grid_json(grid),
        "operator": op_label,
        "datum": datum_label,
        "outputs": {
            "expansion_csv": "expansion.csv",
            "integrand_csv": "integrand.csv",
        },
    }
    _write_report(out_dir / "report.json", report)
    print(f"expansion written to {out_dir}")
    return 0


def _cmd_verify(args) -> int:
    suite = args.suite
    if suite != "all" and suite not in SUITE_NAMES:
        print(
            f"unknown suite {suite!r}; choose from {', '.join(SUITE_NAMES)} or 'all'",
            file=sys.stderr,
        )
        return 1
    names = SUITE_NAMES if suite == "all" else (suite,)
    seed = int(os.environ.get("SCHWARTZ_SEED", DEFAULT_SEED))
    checks = run_suites(names, seed)
    report = format_report(checks, seed)
    sys.stdout.write(report)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as fh:
            fh.write(report)
    return 0 if all(c.passed for c in checks) else 3


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schwartzcalc",
        description="Spectral calculus on periodic grids: solve, expand, Green families, self checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve A(u) = d by symbol division")
    p_solve.add_argument("--config", required=True, help="JSON run configuration")
    p_solve.set_defaults(func=_cmd_solve)

    p_green = sub.add_parser("green", help="build Green members at index points")
    p_green.add_argument("--config", required=True, help="JSON run configuration")
    p_green.add_argument(
        "--index",
        action="append",
        required=True,
        help="index point, comma-separated coordinates; repeatable",
    )
    p_green.set_defaults(func=_cmd_green)

    p_expand = sub.add_parser("expand", help="apply the operator by spectral expansion")
    p_expand.add_argument("--config", required=True, help="JSON run configuration")
    p_expand.set_defaults(func=_cmd_expand)

    p_verify = sub.add_parser("verify", help="run a self-check suite")
    p_verify.add_argument("suite", help="identity|homomorphism|eigen|solver|green|all")
    p_verify.add_argument("--report", help="also write the table to this file")
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except SchwartzCalcError as exc:
        # remaining library errors (bad grids, arity clashes, ...) are config-level
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
