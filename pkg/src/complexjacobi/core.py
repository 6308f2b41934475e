"""Domain types, validation, dense materialization and the block embedding.

A Jacobi matrix is stored by its Jacobi parameters: ``a`` holds the ``n - 1``
off-diagonal entries and ``b`` the ``n`` diagonal entries.  The matrix is
complex *symmetric* (``J.T == J``), not Hermitian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ArgMismatch,
    PhaseOutOfRange,
    ShapeError,
    ValidationError,
    ZeroOffDiagonal,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "ComplexJacobi",
    "DiscreteMeasure",
    "SpectralData",
    "BlockJacobi",
    "MomentSequence",
    "validate",
    "with_arguments",
    "dense",
    "block_embed",
    "unembed",
    "random_jacobi",
    "wrap_angle",
]


@dataclass(frozen=True)
class Tolerances:
    """Shared numerical tolerances.

    ``cluster`` is relative: singular values are merged when they differ by
    less than ``cluster * ||J||``.  ``gauge`` is relative to the block norms.
    """

    mass: float = 1e-10
    phase: float = 1e-8
    herm: float = 1e-12
    breakdown: float = 1e-10
    cluster: float = 1e-7
    gauge: float = 1e-7
    gram: float = 1e-8
    arg: float = 1e-12


DEFAULT_TOL = Tolerances()


def _frozen(x, dtype=complex) -> np.ndarray:
    arr = np.array(x, dtype=dtype)
    arr.setflags(write=False)
    return arr


def wrap_angle(theta):
    """Map angles into (-pi, pi]."""
    t = np.mod(np.asarray(theta, dtype=float) + np.pi, 2 * np.pi) - np.pi
    t = np.where(t <= -np.pi, t + 2 * np.pi, t)
    return t if t.ndim else float(t)


@dataclass(frozen=True, eq=False)
class ComplexJacobi:
    """Finite truncation of a complex symmetric Jacobi matrix.

    Build instances through :func:`validate` (or :func:`with_arguments`);
    the constructor itself only freezes the arrays.
    """

    a: np.ndarray
    b: np.ndarray
    arg_spec: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a))
        object.__setattr__(self, "b", _frozen(self.b))
        if self.arg_spec is not None:
            object.__setattr__(self, "arg_spec", _frozen(self.arg_spec, float))

    @property
    def n(self) -> int:
        return len(self.b)

    def dense(self) -> np.ndarray:
        return dense(self)

    def norm(self) -> float:
        return float(np.linalg.norm(dense(self), 2))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """``J @ x`` using the tridiagonal structure only."""
        y = self.b * x
        y[:-1] += self.a * x[1:]
        y[1:] += self.a * x[:-1]
        return y

    def rmatvec(self, x: np.ndarray) -> np.ndarray:
        """``J^* @ x``; since ``J`` is symmetric, ``J^*`` is its entrywise conjugate."""
        a, b = np.conj(self.a), np.conj(self.b)
        y = b * x
        y[:-1] += a * x[1:]
        y[1:] += a * x[:-1]
        return y

    def to_json(self) -> dict:
        return {
            "a": [[float(z.real), float(z.imag)] for z in self.a],
            "b": [[float(z.real), float(z.imag)] for z in self.b],
            "arg_spec": None if self.arg_spec is None else [float(t) for t in self.arg_spec],
        }

    @classmethod
    def from_json(cls, data: dict, tol: Tolerances = DEFAULT_TOL) -> "ComplexJacobi":
        try:
            a = [complex(re, im) for re, im in data["a"]]
            b = [complex(re, im) for re, im in data["b"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"malformed Jacobi JSON: {exc}") from exc
        return validate(a, b, data.get("arg_spec"), tol=tol)


def validate(a, b, arg_spec=None, tol: Tolerances = DEFAULT_TOL) -> ComplexJacobi:
    """Check Jacobi parameters and return a :class:`ComplexJacobi`.

    Raises
    ------
    ShapeError
        ``len(a) != len(b) - 1`` or ``b`` empty.
    ZeroOffDiagonal
        Some ``|a_j| <= tol.breakdown``.
    ArgMismatch
        Without ``arg_spec`` every ``a_j`` must be real and positive; with it,
        ``arg(a_j)`` must equal the prescribed angle.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex)) if len(a) else np.zeros(0, complex)
    b = np.atleast_1d(np.asarray(b, dtype=complex)) if len(b) else np.zeros(0, complex)
    if a.ndim != 1 or b.ndim != 1:
        raise ShapeError("Jacobi parameters must be one-dimensional")
    if len(b) < 1:
        raise ShapeError("need at least one diagonal entry")
    if len(a) != len(b) - 1:
        raise ShapeError(f"len(a)={len(a)} but len(b)={len(b)}; expected len(a) == len(b) - 1")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValidationError("Jacobi parameters must be finite")
    small = np.flatnonzero(np.abs(a) <= tol.breakdown)
    if small.size:
        raise ZeroOffDiagonal(f"|a_{small[0]}| = {abs(a[small[0]]):.3e} is numerically zero")
    if arg_spec is None:
        bad = np.flatnonzero((a.imag != 0) | (a.real <= 0))
        if bad.size:
            raise ArgMismatch(f"a_{bad[0]} = {a[bad[0]]} is not positive; pass arg_spec for complex a")
        return ComplexJacobi(a, b, None)
    theta = np.asarray(arg_spec, dtype=float)
    if theta.shape != a.shape:
        raise ShapeError(f"arg_spec has {theta.size} entries, expected {a.size}")
    if np.any(theta <= -np.pi) or np.any(theta > np.pi):
        raise ArgMismatch("prescribed arguments must lie in (-pi, pi]")
    dev = np.abs(wrap_angle(np.angle(a) - theta)) if a.size else np.zeros(0)
    bad = np.flatnonzero(dev > tol.arg)
    if bad.size:
        j = bad[0]
        raise ArgMismatch(f"arg(a_{j}) = {np.angle(a[j])!r} differs from prescribed {theta[j]!r}")
    return ComplexJacobi(a, b, theta)


def with_arguments(magnitudes, b, arg_spec, tol: Tolerances = DEFAULT_TOL) -> ComplexJacobi:
    """Build ``a_j = |a_j| exp(i theta_j)`` and validate."""
    theta = wrap_angle(np.asarray(arg_spec, dtype=float))
    a = np.asarray(magnitudes, dtype=float) * np.exp(1j * theta)
    return validate(a, b, theta, tol=tol)


def dense(J: ComplexJacobi) -> np.ndarray:
    n = J.n
    M = np.zeros((n, n), dtype=complex)
    M[np.arange(n), np.arange(n)] = J.b
    if n > 1:
        idx = np.arange(n - 1)
        M[idx, idx + 1] = J.a
        M[idx + 1, idx] = J.a
    return M


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finitely supported probability measure on the real line.

    Points are strictly increasing and every weight is positive.  Spectral
    data additionally require the points to be non-negative; that check lives
    in :class:`SpectralData` so that reflected (signed-axis) measures can use
    the same type.  With ``probability=False`` the total mass may be any
    value in [0, 1] (used for the reflected part of a split measure).
    """

    points: np.ndarray
    weights: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)
    probability: bool = True

    def __post_init__(self):
        p = _frozen(self.points, float)
        w = _frozen(self.weights, float)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)
        if p.ndim != 1 or p.shape != w.shape:
            raise ShapeError("points and weights must be 1-d arrays of equal length")
        if p.size and np.any(np.diff(p) <= 0):
            raise ValidationError("points must be strictly increasing")
        if np.any(w <= 0):
            raise ValidationError("weights must be positive")
        total = math.fsum(w)
        if self.probability and abs(total - 1.0) > self.tol.mass:
            raise ValidationError(f"total mass {total!r} differs from 1")
        if total > 1.0 + self.tol.mass:
            raise ValidationError(f"total mass {total!r} exceeds 1")

    def __len__(self) -> int:
        return len(self.points)

    def total(self) -> float:
        return math.fsum(self.weights)

    def moment(self, m: int) -> float:
        return math.fsum(self.weights * self.points**m)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """The pair (nu, psi) restricted to the atoms of nu."""

    measure: DiscreteMeasure
    psi: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        psi = _frozen(self.psi)
        object.__setattr__(self, "psi", psi)
        if psi.shape != self.measure.points.shape:
            raise ShapeError("one phase value per atom is required")
        if len(self.measure) == 0:
            raise ValidationError("spectral data need at least one atom")
        if self.measure.points[0] < 0:
            raise ValidationError("atoms of nu must be non-negative")
        over = np.flatnonzero(np.abs(psi) > 1 + self.tol.phase)
        if over.size:
            k = over[0]
            raise PhaseOutOfRange(f"|psi({self.points[k]})| = {abs(psi[k])} exceeds 1")
        if self.measure.points[0] == 0 and psi[0] != 1:
            raise ValidationError("psi(0) must equal 1")

    @classmethod
    def build(cls, points, weights, psi, tol: Tolerances = DEFAULT_TOL) -> "SpectralData":
        return cls(DiscreteMeasure(points, weights, tol), psi, tol)

    @property
    def points(self) -> np.ndarray:
        return self.measure.points

    @property
    def weights(self) -> np.ndarray:
        return self.measure.weights

    def moments(self, M: int) -> np.ndarray:
        """omega_0 .. omega_M of the data (even: int s^m dnu, odd: int s^m psi dnu)."""
        s, w, psi = self.points, self.weights, self.psi
        out = np.empty(M + 1, dtype=complex)
        for m in range(M + 1):
            out[m] = np.sum(w * s**m * (psi if m % 2 else 1.0))
        return out

    def to_json(self) -> dict:
        return {
            "points": [float(x) for x in self.points],
            "weights": [float(x) for x in self.weights],
            "psi": [[float(z.real), float(z.imag)] for z in self.psi],
        }

    @classmethod
    def from_json(cls, data: dict, tol: Tolerances = DEFAULT_TOL) -> "SpectralData":
        try:
            psi = [complex(re, im) for re, im in data["psi"]]
            return cls.build(data["points"], data["weights"], psi, tol)
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed spectral data JSON: {exc}") from exc


@dataclass(frozen=True, eq=False)
class BlockJacobi:
    """Self-adjoint block Jacobi matrix with 2x2 blocks.

    ``A[j]`` sits in block position (j, j+1) and ``A[j]^*`` in (j+1, j).
    """

    A: np.ndarray
    B: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        A = _frozen(np.reshape(self.A, (-1, 2, 2)))
        B = _frozen(np.reshape(self.B, (-1, 2, 2)))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if len(B) < 1 or len(A) != len(B) - 1:
            raise ShapeError(f"{len(A)} off-diagonal blocks for {len(B)} diagonal blocks")
        for j, Bj in enumerate(B):
            if np.max(np.abs(Bj - Bj.conj().T)) > self.tol.herm * max(1.0, np.abs(Bj).max()):
                raise ValidationError(f"B_{j} is not Hermitian")
        for j, Aj in enumerate(A):
            if np.linalg.svd(Aj, compute_uv=False)[-1] <= self.tol.breakdown:
                raise ValidationError(f"A_{j} is singular")

    @property
    def N(self) -> int:
        return len(self.B)

    def dense(self) -> np.ndarray:
        N = self.N
        M = np.zeros((2 * N, 2 * N), dtype=complex)
        for j in range(N):
            M[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = self.B[j]
        for j in range(N - 1):
            M[2 * j : 2 * j + 2, 2 * j + 2 : 2 * j + 4] = self.A[j]
            M[2 * j + 2 : 2 * j + 4, 2 * j : 2 * j + 2] = self.A[j].conj().T
        return M


def block_embed(J: ComplexJacobi) -> BlockJacobi:
    """Block Jacobi matrix unitarily equivalent to ``[[0, J], [J^*, 0]]``.

    ``A_j = [[0, a_j], [conj(a_j), 0]]`` and ``B_j = [[0, b_j], [conj(b_j), 0]]``.
    For positive ``a_j`` the off-diagonal block is the symmetric
    ``[[0, a_j], [a_j, 0]]``.
    """
    A = np.zeros((J.n - 1, 2, 2), dtype=complex)
    A[:, 0, 1] = J.a
    A[:, 1, 0] = np.conj(J.a)
    B = np.zeros((J.n, 2, 2), dtype=complex)
    B[:, 0, 1] = J.b
    B[:, 1, 0] = np.conj(J.b)
    return BlockJacobi(A, B)


def unembed(blocks: BlockJacobi, arg_spec=None, tol: Tolerances = DEFAULT_TOL) -> ComplexJacobi:
    """Read ``a_j`` and ``b_j`` from the top-right entries of the blocks."""
    a = blocks.A[:, 0, 1].copy()
    b = blocks.B[:, 0, 1].copy()
    if arg_spec is None and np.any((a.imag != 0) | (a.real <= 0)):
        arg_spec = np.angle(a)
    return validate(a, b, arg_spec, tol=tol)


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """omega_0, ..., omega_M with omega_{2n} = <(J^*J)^n d0, d0> and
    omega_{2n+1} = <J (J^*J)^n d0, d0>."""

    omega: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        om = _frozen(self.omega)
        object.__setattr__(self, "omega", om)
        if om.ndim != 1 or om.size == 0:
            raise ShapeError("moment sequence must be a non-empty 1-d array")
        if abs(om[0] - 1) > self.tol.mass:
            raise ValidationError(f"omega_0 = {om[0]} must be 1")
        even = om[2::2]
        scale = np.maximum(1.0, np.abs(even))
        if np.any(np.abs(even.imag) > self.tol.phase * scale) or np.any(even.real <= 0):
            raise ValidationError("even moments must be real and positive")
        if om.size >= 3 and om[2].real < abs(om[1]) ** 2 - self.tol.mass * max(1.0, om[2].real):
            raise ValidationError("Cauchy-Schwarz violated: omega_2 < |omega_1|^2")

    def __len__(self) -> int:
        return len(self.omega)

    def __getitem__(self, m):
        return self.omega[m]

    def to_json(self) -> dict:
        return {"omega": [[float(z.real), float(z.imag)] for z in self.omega]}

    @classmethod
    def from_json(cls, data: dict, tol: Tolerances = DEFAULT_TOL) -> "MomentSequence":
        try:
            return cls([complex(re, im) for re, im in data["omega"]], tol)
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed moment JSON: {exc}") from exc


def random_jacobi(n: int, seed=None, arg_spec: Optional[Sequence[float]] = None) -> ComplexJacobi:
    """Seeded random instance.

    ``|a_j|`` is uniform on [0.5, 2] and ``b_j`` uniform on the complex disk of
    radius 2.  With ``arg_spec`` the off-diagonal entries get those arguments.
    """
    rng = np.random.default_rng(seed)
    mag = rng.uniform(0.5, 2.0, size=n - 1)
    r = 2.0 * np.sqrt(rng.uniform(0.0, 1.0, size=n))
    phi = rng.uniform(-np.pi, np.pi, size=n)
    b = r * np.exp(1j * phi)
    if arg_spec is None:
        return validate(mag.astype(complex), b)
    return with_arguments(mag, b, arg_spec)
