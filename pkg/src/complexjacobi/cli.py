"""Command-line front end.

Every subcommand reads JSON, writes JSON (or CSV for sampled curves) and
exits with 0 on success, 1 on invalid input and 2 on numerical failure.
Errors are reported on stderr as ``{"error": code, "detail": message}``.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import tempfile
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_TOL, ComplexJacobi, SpectralData, Tolerances, block_embed, random_jacobi
from .direct import moment_sequence, phase_function
from .errors import NumericalError, SpectralError, ValidationError
from .example_omega import closed_form_moments, closed_form_spectral, jacobi_omega
from .inverse import reconstruct
from .moments import enumerate_paths, path_moment
from .polys import orthogonality_gram, q_polynomials

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


def _pair(z: complex):
    return [float(z.real), float(z.imag)]


def _matrix(M: np.ndarray):
    return [[_pair(z) for z in row] for row in M]


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(path: Optional[str], text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename; stdout if no path."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_json(path: Optional[str]):
    if path is None:
        raise ValidationError("--input is required")
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from exc


def _read_args(path: Optional[str]):
    if path is None:
        return None
    data = _read_json(path)
    if isinstance(data, dict):
        data = data.get("arg_spec")
    if not isinstance(data, list):
        raise ValidationError("argument file must hold a list of angles or {\"arg_spec\": [...]}")
    return [float(x) for x in data]


def _parse_omega(text: str) -> complex:
    try:
        re_, im_ = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"--omega expects 're,im', got {text!r}") from exc
    return complex(re_, im_)


def _tolerances(ns) -> Tolerances:
    overrides = {
        f.name: getattr(ns, f"tol_{f.name}")
        for f in dataclasses.fields(Tolerances)
        if getattr(ns, f"tol_{f.name}", None) is not None
    }
    return dataclasses.replace(DEFAULT_TOL, **overrides)


def _jacobi_from(ns, tol) -> ComplexJacobi:
    if ns.input is not None:
        return ComplexJacobi.from_json(_read_json(ns.input), tol)
    return random_jacobi(ns.n, ns.seed)


# -- subcommands -------------------------------------------------------------


def cmd_direct(ns, tol):
    J = ComplexJacobi.from_json(_read_json(ns.input), tol)
    write_atomic(ns.output, _dump_json(phase_function(J, tol).to_json()))


def cmd_inverse(ns, tol):
    data = SpectralData.from_json(_read_json(ns.input), tol)
    J = reconstruct(data, _read_args(ns.args), tol)
    write_atomic(ns.output, _dump_json(J.to_json()))


def _relative_error(J: ComplexJacobi, K: ComplexJacobi) -> float:
    x = np.concatenate([J.a, J.b])
    y = np.concatenate([K.a, K.b])
    err, mag = np.abs(x - y), np.abs(x)
    # exact zeros fall back to the absolute error
    return float(np.max(np.where(mag > 0, err / np.where(mag > 0, mag, 1.0), err)))


def cmd_roundtrip(ns, tol):
    theta = _read_args(ns.args)
    J = random_jacobi(ns.n, ns.seed, arg_spec=theta)
    data = phase_function(J, tol)
    K = reconstruct(data, theta, tol)
    if K.n != J.n:
        raise NumericalError(f"reconstructed size {K.n} differs from {J.n}")
    x = np.concatenate([J.a, J.b])
    y = np.concatenate([K.a, K.b])
    report = {
        "n": ns.n,
        "seed": ns.seed,
        "atoms": len(data.points),
        "max_abs_error": float(np.max(np.abs(x - y))),
        "max_rel_error": _relative_error(J, K),
        "input": J.to_json(),
        "reconstructed": K.to_json(),
    }
    write_atomic(ns.output, _dump_json(report))


def cmd_moments(ns, tol):
    J = _jacobi_from(ns, tol)
    out = {"n": J.n}
    if ns.moments is not None:
        out["omega"] = moment_sequence(J, ns.moments, tol).to_json()["omega"]
    if ns.paths is not None:
        m = ns.paths
        blocks = block_embed(J)
        total, ext, Y = path_moment(blocks, m)
        D = blocks.dense()
        power = np.linalg.matrix_power(D, m)[:2, :2]
        out["paths"] = {
            "m": m,
            "count": len(enumerate_paths(m)),
            "total": _matrix(total),
            "extremal": _matrix(ext),
            "Y": _matrix(Y),
            "dense_power": _matrix(power),
            "max_deviation": float(np.max(np.abs(total - power))),
        }
    if len(out) == 1:
        raise ValidationError("give --moments M and/or --paths m")
    write_atomic(ns.output, _dump_json(out))


def cmd_ortho(ns, tol):
    J = _jacobi_from(ns, tol)
    data = phase_function(J, tol)
    count = min(J.n, len(data.points))
    qs = q_polynomials(J, count)
    Gv = orthogonality_gram(qs, data, "vector")
    Ge = orthogonality_gram(qs, data, "even-odd")
    eye = np.eye(count)
    report = {
        "n": J.n,
        "count": count,
        "max_deviation_vector": float(np.max(np.abs(Gv - eye))),
        "max_deviation_even_odd": float(np.max(np.abs(Ge - eye))),
        "form_agreement": float(np.max(np.abs(Gv - Ge))),
        "within_tol_gram": bool(np.max(np.abs(Gv - eye)) <= tol.gram),
    }
    write_atomic(ns.output, _dump_json(report))


def cmd_example(ns, tol):
    omega = _parse_omega(ns.omega)
    model = closed_form_spectral(omega)
    lo, hi = model.interval
    K = ns.samples
    if K < 1:
        raise ValidationError("--samples must be positive")
    # interior Chebyshev-type nodes avoid the endpoint singularity of the density
    k = np.arange(K)
    s = lo + (hi - lo) * (1 - np.cos((2 * k + 1) * np.pi / (2 * K))) / 2
    dens = model.density(s)
    psi = model.phase(s)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "density", "re_psi", "im_psi"])
    for row in zip(s, dens, psi.real, psi.imag):
        writer.writerow([repr(float(x)) for x in row])
    write_atomic(ns.output, buf.getvalue())
    if ns.report is not None:
        M = ns.moments if ns.moments is not None else 10
        closed = closed_form_moments(omega, M, tol).omega
        trunc = moment_sequence(jacobi_omega(omega, M + 2), M, tol).omega
        report = {
            "omega": _pair(omega),
            "support": [list(p) for p in model.support],
            "closed_form": [_pair(z) for z in closed],
            "truncation": [_pair(z) for z in trunc],
            "truncation_size": M + 2,
            "max_deviation": float(np.max(np.abs(closed - trunc))),
        }
        write_atomic(ns.report, _dump_json(report))


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="input JSON file ('-' for stdin)")
    common.add_argument("--output", help="output file (default stdout)")
    for f in dataclasses.fields(Tolerances):
        common.add_argument(
            f"--tol-{f.name}", type=float, default=None, metavar="X",
            help=f"override tolerance {f.name} (default {f.default:g})",
        )

    parser = argparse.ArgumentParser(
        prog="complexjacobi",
        description="Spectral data of complex symmetric Jacobi matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("direct", parents=[common], help="Jacobi JSON -> spectral data JSON")
    p.set_defaults(func=cmd_direct)

    p = sub.add_parser("inverse", parents=[common], help="spectral data JSON -> Jacobi JSON")
    p.add_argument("--args", help="JSON file with prescribed arguments theta_j")
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("roundtrip", parents=[common], help="random J -> data -> J error report")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--args", help="JSON file with prescribed arguments theta_j")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("moments", parents=[common], help="moment sequence and path-sum check")
    p.add_argument("--moments", type=int, metavar="M")
    p.add_argument("--paths", type=int, metavar="m")
    p.add_argument("--n", type=int, default=8, help="size of the random instance without --input")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("ortho", parents=[common], help="orthogonality Gram deviation")
    p.add_argument("--n", type=int, default=8, help="size of the random instance without --input")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ortho)

    p = sub.add_parser("example", parents=[common], help="closed-form constant-diagonal example")
    p.add_argument("--omega", required=True, help="'re,im'; use --omega=-1,0 for negative real part")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--moments", type=int, metavar="M", help="order of the moment report (default 10)")
    p.add_argument("--report", help="write the moment-match report JSON here")
    p.set_defaults(func=cmd_example)
    return parser


def _fail(exc: Exception, code: int) -> int:
    default = "validation_error" if code == EXIT_INVALID else "numerical_error"
    err = {"error": getattr(exc, "code", default), "detail": str(exc)}
    sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        tol = _tolerances(ns)
        ns.func(ns, tol)
    except ValidationError as exc:
        return _fail(exc, EXIT_INVALID)
    except NumericalError as exc:
        return _fail(exc, EXIT_NUMERICAL)
    except SpectralError as exc:  # pragma: no cover - every concrete error has a family
        return _fail(exc, EXIT_NUMERICAL)
    except (ValueError, TypeError) as exc:
        return _fail(exc, EXIT_INVALID)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(exc, EXIT_NUMERICAL)
    return EXIT_OK
