"""Reconstruction ``(nu, psi) -> J``.

The spectral data define a 2x2 matrix-valued measure on the real line.  Block
Lanczos for multiplication by ``t`` in its L^2 space recovers a block Jacobi
matrix up to block-diagonal unitary equivalence; gauge fixing then picks the
unique representative with off-diagonal blocks and prescribed ``arg a_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .core import (
    DEFAULT_TOL,
    ComplexJacobi,
    MomentSequence,
    SpectralData,
    Tolerances,
    validate,
)
from .errors import (
    DegenerateStart,
    GaugeViolation,
    MomentInconsistency,
    PhaseOutOfRange,
    ShapeError,
    TooLarge,
    ValidationError,
)
from .moments import remainder

__all__ = [
    "MatrixMeasure2x2",
    "RawBlocks",
    "matrix_measure",
    "block_lanczos",
    "gauge_fix",
    "reconstruct",
    "reconstruct_from_moments",
    "MAX_MOMENT_DEPTH",
]

MAX_MOMENT_DEPTH = 8


@dataclass(frozen=True, eq=False)
class MatrixMeasure2x2:
    """Discrete PSD 2x2 matrix-valued measure with total mass ``I``."""

    points: np.ndarray
    weights: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        p = np.array(self.points, dtype=float)
        W = np.array(self.weights, dtype=complex).reshape(-1, 2, 2)
        p.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", W)
        if p.shape[0] != W.shape[0]:
            raise ShapeError("one weight matrix per point is required")
        if p.size > 1 and np.any(np.diff(p) <= 0):
            raise ValidationError("points must be strictly increasing")
        for i, Wi in enumerate(W):
            if np.abs(Wi - Wi.conj().T).max() > self.tol.herm:
                raise ValidationError(f"weight at t={p[i]} is not Hermitian")
            if np.linalg.eigvalsh(Wi)[0] < -self.tol.herm:
                raise ValidationError(f"weight at t={p[i]} is not positive semidefinite")
        if np.abs(self.total() - np.eye(2)).max() > self.tol.mass:
            raise ValidationError("total mass differs from the identity")

    def total(self) -> np.ndarray:
        return _fsum_blocks(self.weights)

    def moment(self, m: int) -> np.ndarray:
        return _fsum_blocks(self.weights * (self.points**m)[:, None, None])

    def ranks(self) -> np.ndarray:
        ev = np.linalg.eigvalsh(self.weights)
        return np.sum(ev > self.tol.mass, axis=1)


@dataclass(frozen=True, eq=False)
class RawBlocks:
    """Block Jacobi parameters before gauge fixing."""

    A_raw: List[np.ndarray]
    B_raw: List[np.ndarray]
    steps_completed: int
    breakdown: bool


def _fsum_blocks(T: np.ndarray) -> np.ndarray:
    """Compensated sum of a stack of 2x2 complex matrices over the first axis."""
    out = np.empty((2, 2), dtype=complex)
    for i in range(2):
        for k in range(2):
            col = T[:, i, k]
            out[i, k] = complex(math.fsum(col.real), math.fsum(col.imag))
    return out


def matrix_measure(data: SpectralData, tol: Tolerances = DEFAULT_TOL) -> MatrixMeasure2x2:
    """2x2 measure encoding ``(nu, psi)``.

    An atom ``s > 0`` of weight ``w`` with phase ``psi`` becomes
    ``(w/2)[[1, psi], [conj(psi), 1]]`` at ``+s`` and
    ``(w/2)[[1, -psi], [-conj(psi), 1]]`` at ``-s``.  An atom at zero carries
    ``w * I``, the value forced by the even moments.
    """
    s, w, psi = data.points, data.weights, data.psi
    if np.any(np.abs(psi) > 1 + tol.phase):
        raise PhaseOutOfRange("phase values must satisfy |psi| <= 1")
    pos = np.flatnonzero(s > 0)
    pts: List[float] = []
    mats: List[np.ndarray] = []
    for k in pos[::-1]:
        pts.append(-s[k])
        mats.append(0.5 * w[k] * np.array([[1, -psi[k]], [-np.conj(psi[k]), 1]]))
    zero = np.flatnonzero(s == 0)
    if zero.size:
        pts.append(0.0)
        mats.append(w[zero[0]] * np.eye(2, dtype=complex))
    for k in pos:
        pts.append(s[k])
        mats.append(0.5 * w[k] * np.array([[1, psi[k]], [np.conj(psi[k]), 1]]))
    return MatrixMeasure2x2(np.array(pts), np.array(mats), tol)


def _inv_sqrt_psd(G: np.ndarray) -> np.ndarray:
    ev, V = np.linalg.eigh(G)
    return (V / np.sqrt(ev)) @ V.conj().T


def _factor(M: MatrixMeasure2x2, tol: Tolerances):
    """Stack factors ``W_i = F_i^* F_i`` into a start block ``X`` and the
    matching diagonal of multiplication by ``t``."""
    rows, diag = [], []
    for t, Wi in zip(M.points, M.weights):
        ev, V = np.linalg.eigh(Wi)
        for lam, v in zip(ev, V.T):
            if lam > tol.mass:
                rows.append(math.sqrt(lam) * v.conj())
                diag.append(t)
    return np.array(rows, dtype=complex).reshape(-1, 2), np.array(diag)


def block_lanczos(
    M: MatrixMeasure2x2, max_steps: int, tol: Tolerances = DEFAULT_TOL
) -> RawBlocks:
    """Block Lanczos for multiplication by ``t`` in L^2(M).

    L^2(M) is identified with C^D (D the total rank of the weights) by
    factoring each weight, so that the constant function ``I`` becomes a
    D x 2 block ``X`` and ``t`` a diagonal matrix.  The recursion is
    ``t Q_j = Q_{j-1} A_{j-1} + Q_j B_j + Q_{j+1} A_j^*`` from ``Q_0 = X``,
    with every residual re-orthogonalized twice against all earlier blocks.
    Stops with ``breakdown=True`` when the residual Gram matrix is
    numerically singular.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    X, lam = _factor(M, tol)
    scale = max(1.0, float(np.abs(M.points).max(initial=0.0)))
    if X.shape[0] < 2:
        raise DegenerateStart("the matrix measure has rank below 2")
    G0 = X.conj().T @ X
    G0 = 0.5 * (G0 + G0.conj().T)
    if np.linalg.eigvalsh(G0)[0] < tol.breakdown:
        raise DegenerateStart("the constant block has a singular Gram matrix")
    Q = X @ _inv_sqrt_psd(G0)

    basis = [Q]
    A_raw: List[np.ndarray] = []
    B_raw: List[np.ndarray] = []
    breakdown = False
    for j in range(max_steps):
        Z = lam[:, None] * Q
        Bj = Q.conj().T @ Z
        Bj = 0.5 * (Bj + Bj.conj().T)
        B_raw.append(Bj)
        R = Z - Q @ Bj
        if j > 0:
            R = R - basis[-2] @ A_raw[-1]
        for _ in range(2):
            for P in basis:
                R = R - P @ (P.conj().T @ R)
        if j == max_steps - 1:
            break
        G = R.conj().T @ R
        G = 0.5 * (G + G.conj().T)
        if np.linalg.eigvalsh(G)[0] < tol.breakdown * scale**2:
            breakdown = True
            break
        # block QR of the residual: R = Q_{j+1} C with C = L^* upper triangular
        L = np.linalg.cholesky(G)
        A_raw.append(L)
        Q = R @ np.linalg.inv(L.conj().T)
        basis.append(Q)
    return RawBlocks(A_raw, B_raw, len(B_raw), breakdown)


def _structured(a: complex) -> np.ndarray:
    return np.array([[0, a], [np.conj(a), 0]], dtype=complex)


def gauge_fix(
    raw: RawBlocks, arg_spec=None, tol: Tolerances = DEFAULT_TOL
) -> ComplexJacobi:
    """Pick the representative with off-diagonal blocks.

    A running unitary ``G_j`` (``G_0 = I``) transforms ``B_j -> G_j^* B_j G_j``;
    ``A_j`` is factored as ``G_j^* A_j = S_j G_{j+1}^*`` with
    ``S_j = [[0, a_j], [conj(a_j), 0]]`` and ``a_j = sqrt(r_j) exp(i theta_j)``
    where ``A_j A_j^* = r_j I``.

    Raises
    ------
    GaugeViolation
        ``A_j A_j^*`` is not a multiple of the identity, or a transformed
        ``B_j`` is not off-diagonal: the blocks do not come from a Jacobi
        matrix of this class.
    """
    n = raw.steps_completed
    if n < 1:
        raise ValidationError("no completed Lanczos steps")
    if arg_spec is not None:
        theta = np.asarray(arg_spec, dtype=float)
        if theta.size < n - 1:
            raise ShapeError(f"need {n - 1} prescribed arguments, got {theta.size}")
        theta = theta[: n - 1]
    else:
        theta = np.zeros(n - 1)
    G = np.eye(2, dtype=complex)
    a = np.empty(n - 1, dtype=complex)
    b = np.empty(n, dtype=complex)
    for j in range(n):
        Bj = G.conj().T @ raw.B_raw[j] @ G
        bscale = max(1.0, np.abs(Bj).max())
        diag_dev = max(abs(Bj[0, 0]), abs(Bj[1, 1]), abs(Bj[1, 0] - np.conj(Bj[0, 1])))
        if diag_dev > tol.gauge * bscale:
            raise GaugeViolation(f"B_{j} is not off-diagonal after gauge fixing (deviation {diag_dev:.2e})")
        b[j] = Bj[0, 1]
        if j == n - 1:
            break
        Aj = raw.A_raw[j]
        AA = Aj @ Aj.conj().T
        r = float(np.trace(AA).real) / 2
        if r <= 0 or np.abs(AA - r * np.eye(2)).max() > tol.gauge * r:
            raise GaugeViolation(f"A_{j} A_{j}^* is not a multiple of the identity")
        a[j] = math.sqrt(r) * np.exp(1j * theta[j]) if theta[j] != 0 else math.sqrt(r)
        S = _structured(a[j])
        Gn = (np.linalg.solve(S, G.conj().T @ Aj)).conj().T
        # re-unitarize to stop rounding drift from accumulating along the chain
        U, _, Vh = np.linalg.svd(Gn)
        G = U @ Vh
    return validate(a, b, None if arg_spec is None else theta, tol=tol)


def reconstruct(
    data: SpectralData, arg_spec=None, tol: Tolerances = DEFAULT_TOL
) -> ComplexJacobi:
    """Jacobi matrix whose spectral data are ``data``.

    The size of the result is half the total rank of the matrix measure,
    which equals the number of atoms of ``nu``.  Lanczos is run for exactly
    that many steps; with light atoms the final residual is rounding noise
    well above any fixed breakdown threshold, so it is not inspected.
    """
    M = matrix_measure(data, tol)
    size = int(M.ranks().sum()) // 2
    raw = block_lanczos(M, max_steps=size, tol=tol)
    if raw.steps_completed < size:
        raise GaugeViolation(
            f"Lanczos broke down after {raw.steps_completed} of {size} steps"
        )
    return gauge_fix(raw, arg_spec, tol)


def reconstruct_from_moments(
    omega: MomentSequence, n_max: int, tol: Tolerances = DEFAULT_TOL
) -> ComplexJacobi:
    """Jacobi parameters from the moments via the path-sum recursion.

    ``b_0 = omega_1`` and ``a_0 = sqrt(omega_2 - |omega_1|^2)``; at depth n
    the non-extremal path sums ``Y_{2n+1}``, ``Y_{2n+2}`` of the blocks
    found so far are subtracted from the moment blocks and the extremal
    products are inverted for ``B_n`` and ``A_n A_n^*``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if n_max > MAX_MOMENT_DEPTH:
        raise TooLarge(f"n_max = {n_max} exceeds {MAX_MOMENT_DEPTH}")
    om = omega.omega
    if len(om) < 2 * n_max:
        raise ShapeError(f"need omega_0..omega_{2 * n_max - 1}, got {len(om)} moments")
    A: List[np.ndarray] = []
    B: List[np.ndarray] = []
    a = np.empty(n_max - 1)
    b = np.empty(n_max, dtype=complex)
    P = np.eye(2, dtype=complex)  # A_0 A_1 ... A_{n-1}
    for n in range(n_max):
        odd = np.array([[0, om[2 * n + 1]], [np.conj(om[2 * n + 1]), 0]])
        X = odd - remainder(A, B, 2 * n + 1)
        Pinv = np.linalg.inv(P)
        Bn = Pinv @ X @ Pinv.conj().T
        b[n] = Bn[0, 1]
        B.append(_structured(b[n]))
        if n == n_max - 1:
            break
        Y = remainder(A, B, 2 * n + 2)
        gap = om[2 * n + 2].real - Y[0, 0].real
        if gap <= tol.breakdown:
            raise MomentInconsistency(
                f"omega_{2 * n + 2} - y_{2 * n + 2} = {gap:.3e}: no Jacobi matrix of depth {n + 2}"
            )
        AA = Pinv @ (gap * np.eye(2)) @ Pinv.conj().T
        a[n] = math.sqrt(AA[0, 0].real)
        A.append(_structured(a[n]))
        P = P @ A[-1]
    return validate(a.astype(complex), b, tol=tol)
