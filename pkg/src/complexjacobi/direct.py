"""Direct spectral map ``J -> (nu, psi)`` for finite truncations.

``nu`` is the spectral measure of ``|J| = sqrt(J^*J)`` at ``delta_0``: its
atoms are the distinct singular values of ``J`` and the weight of an atom is
the squared norm of the projection of ``delta_0`` onto the corresponding right
singular subspace.  The phase ``psi(s)`` describes how ``J / s`` maps that
projection onto its componentwise conjugate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np

from .core import (
    DEFAULT_TOL,
    ComplexJacobi,
    DiscreteMeasure,
    MomentSequence,
    SpectralData,
    Tolerances,
    dense,
)
from .errors import IllConditioned, MismatchError, SvdFailure, ZeroWeightAtom

__all__ = [
    "SingularTriple",
    "spectral_measure",
    "phase_function",
    "phase_from_moments",
    "moment_sequence",
    "verify_strong_psi",
    "MAX_VANDERMONDE_ATOMS",
]

MAX_VANDERMONDE_ATOMS = 12
MAX_VANDERMONDE_COND = 1e12


@dataclass(frozen=True, eq=False)
class SingularTriple:
    """``J v = s u`` and ``J^* u = s v`` with unit vectors ``u`` and ``v``."""

    s: float
    v: np.ndarray
    u: np.ndarray


def _svd(M: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Singular values ascending, with right (V) and left (U) vectors as columns."""
    try:
        U, s, Vh = np.linalg.svd(M)
        V = Vh.conj().T
    except np.linalg.LinAlgError:
        # Fall back to the Hermitian eigenproblem of J^*J and set u = Jv / s.
        try:
            ev, V = np.linalg.eigh(M.conj().T @ M)
        except np.linalg.LinAlgError as exc:
            raise SvdFailure(str(exc)) from exc
        s = np.sqrt(np.clip(ev, 0.0, None))
        U = np.empty_like(V)
        for k in range(len(s)):
            U[:, k] = M @ V[:, k] / s[k] if s[k] > 0 else V[:, k].conj()
    order = np.argsort(s, kind="stable")
    return s[order], V[:, order], U[:, order]


def _clusters(J: ComplexJacobi, tol: Tolerances) -> List[List[SingularTriple]]:
    s, V, U = _svd(dense(J))
    gap = tol.cluster * max(s[-1], np.finfo(float).tiny)
    groups: List[List[SingularTriple]] = []
    for k in range(len(s)):
        triple = SingularTriple(float(s[k]), V[:, k], U[:, k])
        if groups and s[k] - groups[-1][-1].s < gap:
            groups[-1].append(triple)
        else:
            groups.append([triple])
    return groups


def _atom(group: Sequence[SingularTriple], norm: float, tol: Tolerances) -> float:
    s = float(np.mean([t.s for t in group]))
    return 0.0 if s < tol.cluster * norm else s


def spectral_measure(
    J: ComplexJacobi, tol: Tolerances = DEFAULT_TOL
) -> Tuple[DiscreteMeasure, List[List[SingularTriple]]]:
    """Spectral measure of ``|J|`` at ``delta_0`` and the singular-triple clusters.

    Singular values closer than ``tol.cluster * ||J||`` form one atom whose
    weight is the sum of ``|v[0]|**2`` over the cluster.  Atoms lighter than
    ``tol.mass`` are dropped.
    """
    groups = _clusters(J, tol)
    norm = groups[-1][-1].s
    points, weights, kept = [], [], []
    for g in groups:
        w = float(sum(abs(t.v[0]) ** 2 for t in g))
        if w < tol.mass:
            continue
        points.append(_atom(g, norm, tol))
        weights.append(w)
        kept.append(g)
    return DiscreteMeasure(points, weights, tol), kept


def _projections(group: Sequence[SingularTriple]) -> Tuple[np.ndarray, np.ndarray]:
    """Projections of delta_0 onto the right and left singular subspaces."""
    V = np.column_stack([t.v for t in group])
    U = np.column_stack([t.u for t in group])
    return V @ V[0].conj(), U @ U[0].conj()


def phase_function(J: ComplexJacobi, tol: Tolerances = DEFAULT_TOL) -> SpectralData:
    """Spectral data ``(nu, psi)`` of ``J``.

    For an atom ``s > 0`` with ``h`` the projection of ``delta_0`` onto its
    right singular subspace, ``psi(s) = <J h, conj(h)> / (s * ||h||^2)``,
    i.e. ``h^T J h / (s * nu({s}))``.  An atom at zero gets ``psi = 1``.
    """
    measure, groups = spectral_measure(J, tol)
    M = dense(J)
    psi = np.empty(len(groups), dtype=complex)
    for k, (s, w, g) in enumerate(zip(measure.points, measure.weights, groups)):
        if w < tol.mass:
            raise ZeroWeightAtom(f"atom {s} has weight {w}")
        if s == 0.0:
            psi[k] = 1.0
            continue
        h, _ = _projections(g)
        psi[k] = (h @ (M @ h)) / (s * w)
    return SpectralData(measure, psi, tol)


def moment_sequence(J: ComplexJacobi, M: int, tol: Tolerances = DEFAULT_TOL) -> MomentSequence:
    """omega_0..omega_M by alternately applying ``J`` and ``J^*`` to ``delta_0``."""
    if M < 0:
        raise ValueError("M must be non-negative")
    x = np.zeros(J.n, dtype=complex)
    x[0] = 1.0
    out = np.empty(M + 1, dtype=complex)
    out[0] = 1.0
    for m in range(1, M + 1):
        x = J.matvec(x) if m % 2 else J.rmatvec(x)
        out[m] = x[0]
    # even moments are real by construction; drop rounding noise in Im
    out[2::2] = out[2::2].real
    return MomentSequence(out, tol)


def phase_from_moments(J: ComplexJacobi, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """psi at the atoms of nu, from the odd moments alone.

    Solves ``sum_k psi_k s_k^(2n+1) w_k = omega_(2n+1)`` for n < m, which is
    a Vandermonde system in ``s_k^2``.  A zero atom does not enter and gets
    ``psi = 1``.
    """
    measure, _ = spectral_measure(J, tol)
    s, w = measure.points, measure.weights
    psi = np.ones(len(s), dtype=complex)
    nz = np.flatnonzero(s > 0)
    m = len(nz)
    if m == 0:
        return psi
    if m > MAX_VANDERMONDE_ATOMS:
        raise IllConditioned(f"{m} atoms exceed the Vandermonde cap of {MAX_VANDERMONDE_ATOMS}")
    omega = moment_sequence(J, 2 * m - 1, tol).omega
    scale = s[nz].max()
    y = (s[nz] / scale) ** 2
    V = np.vander(y, m, increasing=True).T
    rhs = np.array([omega[2 * n + 1] / scale ** (2 * n + 1) for n in range(m)])
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > MAX_VANDERMONDE_COND:
        raise IllConditioned(f"Vandermonde condition number {cond:.3e}")
    x = np.linalg.solve(V, rhs.astype(complex))
    psi[nz] = x / ((s[nz] / scale) * w[nz])
    return psi


PolyLike = Union[Callable[[np.ndarray], np.ndarray], Sequence[complex]]


def verify_strong_psi(
    J: ComplexJacobi, data: SpectralData, f: PolyLike, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Residual of ``Pbar_0 J f(|J|) d0 = |J^*| psi(|J^*|) f(|J^*|) d0``.

    ``Pbar_0`` projects onto the cyclic subspace of ``|J^*|`` generated by
    ``delta_0``, spanned by the projections of ``delta_0`` onto the left
    singular subspaces.  ``f`` is a callable or a coefficient list (ascending).
    """
    if not callable(f):
        f = np.polynomial.Polynomial(np.asarray(f, dtype=complex))
    _, groups = spectral_measure(J, tol)
    if len(groups) != len(data.points):
        raise MismatchError(f"J has {len(groups)} atoms, data has {len(data.points)}")
    M = dense(J)
    fs = np.asarray(f(np.asarray(data.points, dtype=float)), dtype=complex)
    lhs = np.zeros(J.n, dtype=complex)
    rhs = np.zeros(J.n, dtype=complex)
    hbars = []
    for k, g in enumerate(groups):
        h, hbar = _projections(g)
        lhs += fs[k] * (M @ h)
        rhs += data.points[k] * data.psi[k] * fs[k] * hbar
        hbars.append(hbar)
    proj = np.zeros(J.n, dtype=complex)
    for hbar in hbars:
        nrm2 = np.vdot(hbar, hbar).real
        if nrm2 > 0:
            proj += hbar * (np.vdot(hbar, lhs) / nrm2)
    return float(np.linalg.norm(proj - rhs))
