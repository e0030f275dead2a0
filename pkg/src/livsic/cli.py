"""Command-line front end: JSON inputs, JSON verification reports.

Exit status is 0 when every report item passes, 1 when some item fails or
a computation breaks down, and 2 for unusable input.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import golden
from .errors import InputError, LivsicError
from .extensions import (ExtensionData, ac_deviation, big_kernel, big_kernel_from_measure, clark_measure,
                         cyclic_expansion, decay_rate, domain_images, ext_char, extension_order,
                         herglotz_data, lambda_deviation, order_witness, pochar_verify,
                         shifted_cayley, small_kernel, small_kernel_from_theta, synthesize_extension)
from .grids import DEFAULT_GRID, upper
from .herglotz import (HerglotzData, herglotz_function, herglotz_kernel, inverse_measure_transform,
                       kernel_gram, measure_deviation, measure_transform)
from .inner import ScalarInner, coincide, divides, frostman_shift, is_inner, livsic_char
from .jsonio import (complex_from_json, complex_to_json, herglotz_to_json, inner_from_json, inner_to_json,
                     load_json, matrix_from_json, matrix_to_json, measure_from_json, measure_to_json,
                     vector_from_json)
from .numeric import match_multisets, multiset_distance
from .operators import canonical_extension, cayley_inverse, deficiency_data
from .report import Report

DEFAULT_TOL = 1e-9
# Commands whose checks compare quantities that are only recoverable to a
# coarser accuracy get their own default.
COMMAND_TOL = {"divides": 1e-6, "ac-check": 1e-7, "frostman": 1e-8, "livsic": 1e-8,
               "ext-char": 1e-8, "synthesize": 1e-7, "cyclic": 1e-10}


# ---------------------------------------------------------------------------
# Argument handling

def _resolve_tol(args) -> Optional[float]:
    """``--tol`` beats ``LIVSIC_TOL``; ``None`` means use the command default."""
    if args.tol is not None:
        tol = args.tol
    elif os.environ.get("LIVSIC_TOL"):
        try:
            tol = float(os.environ["LIVSIC_TOL"])
        except ValueError as exc:
            raise InputError(f"LIVSIC_TOL is not a number: {os.environ['LIVSIC_TOL']!r}") from exc
    else:
        return None
    if not (math.isfinite(tol) and tol > 0):
        raise InputError(f"tolerance must be positive, got {tol}")
    return tol


def _tol(args, command: str) -> float:
    return args.resolved_tol if args.resolved_tol is not None else COMMAND_TOL.get(command, DEFAULT_TOL)


def _grid(args) -> list:
    if args.grid is None:
        return list(DEFAULT_GRID)
    text = args.grid
    if Path(text).is_file():
        value = load_json(text)
    else:
        try:
            value = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"--grid: invalid JSON at column {exc.colno}: {exc.msg}") from exc
    if not isinstance(value, list) or not value:
        raise InputError("--grid: expected a non-empty JSON list of points")
    points = [complex_from_json(p, f"grid[{k}]") for k, p in enumerate(value)]
    if any(p.imag == 0 for p in points):
        raise InputError("--grid: points must lie off the real axis")
    return points


def _matrix(path, name):
    return matrix_from_json(load_json(path), name)


def _system(path, name="V"):
    return deficiency_data(_matrix(path, name))


def _extension(args) -> ExtensionData:
    U = _matrix(args.U, "U")
    system = _system(args.V)
    if U.shape[0] < system.dim:
        raise InputError(f"U is {U.shape[0]}x{U.shape[0]} but V acts on C^{system.dim}")
    return ExtensionData(U, system)


def _inner(path, name):
    return inner_from_json(load_json(path), name)


def _function_json(f, grid) -> dict:
    if isinstance(f, ScalarInner):
        return inner_to_json(f)
    return {"values": [{"point": complex_to_json(z), "value": matrix_to_json(f(z))} for z in grid]}


def _value_at_i(f) -> float:
    if isinstance(f, ScalarInner):
        return abs(f(1j))
    return float(np.linalg.norm(f(1j), 2))


# ---------------------------------------------------------------------------
# Commands

def cmd_livsic(args) -> Report:
    tol = _tol(args, "livsic")
    system = _system(args.V)
    report = Report("livsic", data={"index": system.index, "simple": system.simple})
    theta = livsic_char(system)
    report.data["function"] = _function_json(theta, upper(_grid(args)))
    report.check("vanishes at i", _value_at_i(theta), 0.0, _value_at_i(theta), tol)
    report.flag("inner", is_inner(theta))
    if isinstance(theta, ScalarInner):
        images = [complex(a) for a in cayley_inverse(np.linalg.eigvals(system.V))]
        report.check("zeros are inverse Cayley images of the spectrum of V",
                     [complex_to_json(a) for a in theta.zeros], [complex_to_json(a) for a in images],
                     multiset_distance(theta.zeros, images), tol)
    return report


def cmd_clark(args) -> Report:
    tol = _tol(args, "clark")
    ext = _extension(args)
    sigma = clark_measure(ext)
    report = Report("clark", data={"measure": measure_to_json(sigma)})
    mass = sigma.total_mass()
    dev = float(np.linalg.norm(mass - np.eye(ext.index)))
    report.check("total mass is the identity", matrix_to_json(mass), matrix_to_json(np.eye(ext.index)), dev, tol)
    return report


def cmd_transform_measure(args) -> Report:
    tol = _tol(args, "transform-measure")
    measure = measure_from_json(load_json(args.measure), "measure")
    report = Report("transform-measure")
    if measure.domain == "circle":
        data = measure_transform(measure)
        back = inverse_measure_transform(data)
        report.data["herglotz"] = herglotz_to_json(data)
        report.check("inverse transform restores the measure", None, None, measure_deviation(back, measure), tol)
    else:
        P = _matrix(args.P, "P") if args.P else np.zeros((measure.size, measure.size))
        circle = inverse_measure_transform(HerglotzData(P, measure))
        again = measure_transform(circle)
        report.data["measure"] = measure_to_json(circle)
        dev = max(measure_deviation(again.measure, measure), float(np.linalg.norm(again.P - P)))
        report.check("forward transform restores the line data", None, None, dev, tol)
    return report


def cmd_ext_char(args) -> Report:
    tol = _tol(args, "ext-char")
    ext = _extension(args)
    phi = ext_char(ext)
    grid = upper(_grid(args))
    report = Report("ext-char", data={"one_is_eigenvalue": ext.one_is_eigenvalue,
                                      "function": _function_json(phi, grid)})
    report.check("vanishes at i", _value_at_i(phi), 0.0, _value_at_i(phi), tol)
    order = extension_order(ext, grid)
    report.flag("base function divides extension function", order if isinstance(order, bool) else order.holds)
    worst, coverage = lambda_deviation(ext, grid)
    report.check("kernel quotients reproduce the function", worst, 0.0, worst if coverage >= 0.8 else math.inf, tol)
    return report


def cmd_divides(args) -> Report:
    tol = _tol(args, "divides")
    theta, phi = _inner(args.theta, "theta"), _inner(args.phi, "phi")
    _, dev = match_multisets(theta.zeros, phi.zeros)
    holds = divides(theta, phi, tol)
    report = Report("divides", data={"tolerance": tol, "zero_match_deviation": dev if math.isfinite(dev) else None})
    report.flag("theta divides phi", holds, args.expect == "true")
    return report


def cmd_frostman(args) -> Report:
    tol = _tol(args, "frostman")
    theta = _inner(args.theta, "theta")
    shifted = frostman_shift(theta)
    report = Report("frostman", data={"function": inner_to_json(shifted)})
    report.check("vanishes at i", abs(shifted(1j)), 0.0, abs(shifted(1j)), tol)
    c = theta(1j)
    factor = (1 - c.conjugate()) / (1 - c)
    dev = max(abs(shifted(z) - factor * (theta(z) - c) / (1 - c.conjugate() * theta(z))) for z in upper(_grid(args)))
    report.check("agrees with the scalar closed form", dev, 0.0, dev, tol)
    return report


def cmd_ac_check(args) -> Report:
    tol = _tol(args, "ac-check")
    system = _system(args.V)
    param = _matrix(args.param, "param")
    grid = upper(_grid(args))
    dev = ac_deviation(system, param, grid=grid)
    report = Report("ac-check")
    report.check("extension function equals parameter adjoint times base function", dev, 0.0, dev, tol)
    if system.index == 1:
        ext = ExtensionData(canonical_extension(system, param), system)
        phi, theta = ext_char(ext), livsic_char(system)
        report.data.update({"extension": inner_to_json(phi), "base": inner_to_json(theta)})
        report.flag("zero sets coincide", coincide(phi, theta, 1e-6))
    return report


def cmd_kernels(args) -> Report:
    tol = _tol(args, "kernels")
    ext = _extension(args)
    points = _grid(args)
    report = Report("kernels", data={"points": [complex_to_json(z) for z in points]})
    small = kernel_gram(lambda w, z: small_kernel(ext, w, z), points)
    big = kernel_gram(lambda w, z: big_kernel(ext, w, z), points)
    gap = big.gram - small.gram
    g = herglotz_function(herglotz_data(ext))
    herg = kernel_gram(lambda w, z: herglotz_kernel(g, w, z), upper(points))
    for name, gram in (("small kernel", small.gram), ("large kernel", big.gram),
                       ("difference of kernels", gap), ("Herglotz kernel", herg.gram)):
        low = float(np.linalg.eigvalsh((gram + gram.conj().T) / 2)[0])
        report.check(f"{name} Gram is positive semidefinite", low, ">= 0", max(0.0, -low), tol)
    half = upper(points)
    dual_small = max(float(np.linalg.norm(small_kernel(ext, w, z) - small_kernel_from_theta(ext, w, z)))
                     for w in half for z in half)
    dual_big = max(float(np.linalg.norm(big_kernel(ext, w, z) - big_kernel_from_measure(ext, w, z)))
                   for w in half for z in half)
    report.check("small kernel agrees with its characteristic-function formula", dual_small, 0.0, dual_small, tol)
    report.check("large kernel agrees with its measure formula", dual_big, 0.0, dual_big, tol)
    return report


def cmd_cyclic(args) -> Report:
    tol = _tol(args, "cyclic")
    ext = _extension(args)
    h = vector_from_json(load_json(args.h), "h")
    w = complex_from_json(json.loads(args.w), "w") if args.w else 1j
    expansion = cyclic_expansion(ext, h, w, args.k)
    vw, _ = shifted_cayley(ext.base, w)
    radius = float(max(abs(np.linalg.eigvals(vw)))) if vw.size else 0.0
    rate = decay_rate(ext.base, h, w)
    report = Report("cyclic", data={
        "w": complex_to_json(w),
        "identity_residuals": expansion.identity_residuals.tolist(),
        "remainder_norms": expansion.remainder_norms.tolist(),
        "spectral_radius": radius,
        "decay_rate": rate,
    })
    worst = float(expansion.identity_residuals.max())
    report.check("expansion identity holds at every step", worst, 0.0, worst, tol)
    report.flag("remainders shrink", radius < 1 and rate <= radius + 0.05)
    return report


def cmd_synthesize(args) -> Report:
    tol = _tol(args, "synthesize")
    theta, phi = _inner(args.theta, "theta"), _inner(args.phi, "phi")
    result = synthesize_extension(theta, phi)
    ext = result.extension
    built_phi = ext_char(ext)
    built_theta = livsic_char(ext.base)
    report = Report("synthesize", data={
        "U": matrix_to_json(ext.U),
        "V": matrix_to_json(ext.base.V),
        "embedding": matrix_to_json(result.embedding),
        "extension": inner_to_json(built_phi),
        "base": inner_to_json(built_theta),
    })
    report.check("extension function matches phi", None, None, multiset_distance(built_phi.zeros, phi.zeros), tol)
    report.check("base function matches theta", None, None, multiset_distance(built_theta.zeros, theta.zeros), tol)
    return report


def cmd_order_check(args) -> Report:
    tol = _tol(args, "order-check")
    U = _matrix(args.U, "U")
    small = ExtensionData(U, _system(args.V_small, "V-small"))
    big = ExtensionData(U, _system(args.V_big, "V-big"))
    witness = order_witness(small, big)
    result = pochar_verify(witness, domain_images(small), tol)
    report = Report("order-check", data={
        "mediating_function": inner_to_json(witness.phi),
        "small_measure": measure_to_json(witness.sigma_small),
        "large_measure": measure_to_json(witness.sigma_big),
    })
    report.flag("base function divides mediating function", result.cond1)
    report.flag("measures are related through D", result.cond2)
    report.flag("domain images are annihilated", result.cond3)
    report.check("moment against the small measure", result.moment_small, 0.0, result.moment_small, tol)
    report.check("moment against the large measure", result.moment_big, 0.0, result.moment_big, tol)
    return report


def cmd_reproduce(args) -> Report:
    return golden.reproduce(args.example, args.resolved_tol)


# ---------------------------------------------------------------------------
# Parser and entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance for every check (default: LIVSIC_TOL or a per-command value)")
    common.add_argument("--grid", default=None, help="JSON list of sample points, inline or as a file path")
    common.add_argument("--output", default=None, help="write the report here instead of standard output")

    parser = argparse.ArgumentParser(prog="livsic", description="Extension theory of partial isometries.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *options):
        p = sub.add_parser(name, parents=[common], help=help_text)
        for flag, kwargs in options:
            p.add_argument(flag, **kwargs)
        p.set_defaults(func=func)
        return p

    req = {"required": True}
    add("livsic", cmd_livsic, "characteristic function of a partial isometry", ("--V", req))
    add("clark", cmd_clark, "Clark measure of an extension", ("--U", req), ("--V", req))
    add("transform-measure", cmd_transform_measure, "move a measure between circle and line",
        ("--measure", req), ("--P", {"default": None, "help": "mass at 1 for line input"}))
    add("ext-char", cmd_ext_char, "characteristic function of an extension", ("--U", req), ("--V", req))
    add("divides", cmd_divides, "divisibility of scalar inner functions", ("--theta", req), ("--phi", req),
        ("--expect", {"choices": ["true", "false"], "default": "true"}))
    add("frostman", cmd_frostman, "Frostman shift of a scalar inner function", ("--theta", req))
    add("ac-check", cmd_ac_check, "canonical extensions against the base function", ("--V", req), ("--param", req))
    add("kernels", cmd_kernels, "reproducing kernels of an extension", ("--U", req), ("--V", req))
    add("cyclic", cmd_cyclic, "cyclic expansion of a vector", ("--U", req), ("--V", req), ("--h", req),
        ("--w", {"default": None, "help": "JSON complex, default i"}), ("--k", {"type": int, "default": 10}))
    add("synthesize", cmd_synthesize, "build an extension from two inner functions", ("--theta", req), ("--phi", req))
    add("order-check", cmd_order_check, "ordering conditions for two bases of one unitary",
        ("--U", req), ("--V-small", req), ("--V-big", req))
    add("reproduce", cmd_reproduce, "rebuild a worked example", ("example", {"choices": sorted(golden.EXAMPLES)}))
    return parser


def _jsonable(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (complex, np.complexfloating)):
        return complex_to_json(value)
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.resolved_tol = _resolve_tol(args)
        report = args.func(args)
    except InputError as exc:
        print(f"livsic {args.command}: input error: {exc}", file=sys.stderr)
        return 2
    except (LivsicError, np.linalg.LinAlgError) as exc:
        print(f"livsic {args.command}: computation failed: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(_jsonable(report.to_dict()), indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
