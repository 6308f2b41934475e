"""Antilinear orthogonal polynomials and the self-adjoint measure split.

The polynomials ``q_j`` solve the antilinear eigenvalue problem
``J q(s) = s * conj(q(s))`` column by column::

    a_{j-1} q_{j-1} + b_j q_j + a_j q_{j+1} = s * conj(q_j),   q_0 = 1,

where ``conj`` conjugates coefficients only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .core import DEFAULT_TOL, ComplexJacobi, DiscreteMeasure, SpectralData, Tolerances
from .errors import DepthError, MismatchError, NotSelfAdjointData

__all__ = [
    "QPolynomial",
    "q_polynomials",
    "orthogonality_gram",
    "selfadjoint_split",
    "recurrence_residual",
]


@dataclass(frozen=True, eq=False)
class QPolynomial:
    """Complex polynomial stored by ascending coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.array(self.coeffs, dtype=complex))
        # strip exact trailing zeros, but keep at least the constant term
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, s):
        return np.polynomial.polynomial.polyval(np.asarray(s), self.coeffs)

    def conj(self) -> "QPolynomial":
        """Coefficient conjugation (the antilinear bar)."""
        return QPolynomial(np.conj(self.coeffs))

    def reflect(self) -> "QPolynomial":
        """``s -> q(-s)``."""
        signs = (-1.0) ** np.arange(len(self.coeffs))
        return QPolynomial(self.coeffs * signs)

    def even(self) -> "QPolynomial":
        c = self.coeffs.copy()
        c[1::2] = 0
        return QPolynomial(c)

    def odd(self) -> "QPolynomial":
        c = self.coeffs.copy()
        c[0::2] = 0
        return QPolynomial(c)

    def __repr__(self) -> str:
        return f"QPolynomial({[complex(c) for c in self.coeffs]!r})"


def q_polynomials(J: ComplexJacobi, count: int) -> List[QPolynomial]:
    """``q_0, ..., q_{count-1}`` of ``J``.

    Needs ``a_0 .. a_{count-2}``, so ``count <= n``.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if count > J.n:
        raise DepthError(f"{count} polynomials need a {count} x {count} truncation, got n = {J.n}")
    size = max(count, 1) + 1
    qs = [np.zeros(size, dtype=complex)]
    qs[0][0] = 1.0
    for j in range(count - 1):
        shifted = np.roll(np.conj(qs[j]), 1)
        shifted[0] = 0
        rhs = shifted - J.b[j] * qs[j]
        if j > 0:
            rhs = rhs - J.a[j - 1] * qs[j - 1]
        qs.append(rhs / J.a[j])
    return [QPolynomial(c) for c in qs[:count]]


def recurrence_residual(J: ComplexJacobi, qs: Sequence[QPolynomial], nodes) -> float:
    """Max residual of the recurrence over ``nodes`` and all interior indices."""
    s = np.asarray(nodes, dtype=float)
    worst = 0.0
    for j in range(len(qs) - 1):
        lhs = J.b[j] * qs[j](s) + J.a[j] * qs[j + 1](s)
        if j > 0:
            lhs = lhs + J.a[j - 1] * qs[j - 1](s)
        worst = max(worst, float(np.max(np.abs(lhs - s * qs[j].conj()(s)))))
    return worst


def orthogonality_gram(
    qs: Sequence[QPolynomial], data: SpectralData, form: str = "vector"
) -> np.ndarray:
    """Gram matrix of ``qs`` in the antilinear orthogonality relation.

    ``form="vector"`` pairs ``(q(s), q(-s))`` through the kernel
    ``(1/2)[[1 + Re psi, -i Im psi], [i Im psi, 1 - Re psi]]``;
    ``form="even-odd"`` pairs ``(q^o(s), q^e(s))`` (odd part first) through
    ``[[1, conj psi], [psi, 1]]``.  Both are sums over the atoms of ``nu``
    and ``G[j, k] = sum_s w * <K x_j, x_k>`` with ``<x, y> = y^* x``.
    """
    if len(qs) > 2 * len(data.points):
        raise MismatchError(
            f"{len(qs)} polynomials exceed the capacity {2 * len(data.points)} of the data"
        )
    # With |psi| = 1 the kernel is rank one and large values of q(s), q(-s)
    # cancel inside each term; extended precision keeps the two forms close.
    s = data.points.astype(np.longdouble)
    w = data.weights.astype(np.longdouble)
    psi = data.psi.astype(np.clongdouble)
    P = np.array([_horner(q.coeffs, s) for q in qs]).reshape(len(qs), len(s))
    R = np.array([_horner(q.coeffs, -s) for q in qs]).reshape(len(qs), len(s))
    one = np.ones_like(psi)
    if form == "vector":
        K = 0.5 * np.array([[one + psi.real, -1j * psi.imag], [1j * psi.imag, one - psi.real]])
        X = np.stack([P, R], axis=1)
    elif form == "even-odd":
        K = np.array([[one, np.conj(psi)], [psi, one]])
        X = np.stack([(P - R) / 2, (P + R) / 2], axis=1)
    else:
        raise ValueError(f"unknown form {form!r}")
    KX = np.einsum("abi,jbi->jai", K, X)
    G = np.einsum("jai,kai,i->jk", KX, np.conj(X), w)
    return G.astype(complex)


def _horner(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape, dtype=np.clongdouble)
    for ck in c.astype(np.clongdouble)[::-1]:
        out = out * x + ck
    return out


def selfadjoint_split(
    data: SpectralData, tol: Tolerances = DEFAULT_TOL
) -> Tuple[DiscreteMeasure, DiscreteMeasure]:
    """``(mu, mu_tilde)`` for data with real ``psi``.

    ``mu`` lives on the whole line: mass ``w (1 + psi) / 2`` at ``+s`` and
    ``w (1 - psi) / 2`` at ``-s`` (an atom at 0 keeps its full weight).
    ``mu_tilde`` holds the ``(1 - psi) / 2`` part on ``s > 0``, i.e. the
    reflection of the negative half of ``mu``.  Atoms lighter than
    ``tol.mass`` are dropped.
    """
    psi = data.psi
    bad = np.flatnonzero(np.abs(psi.imag) > tol.phase)
    if bad.size:
        raise NotSelfAdjointData(f"psi({data.points[bad[0]]}) = {psi[bad[0]]} is not real")
    p = psi.real
    s, w = data.points, data.weights
    plus = w * (1 + p) / 2
    minus = w * (1 - p) / 2
    atoms = {}
    tilde_pts, tilde_w = [], []
    for sk, wk, up, down in zip(s, w, plus, minus):
        if sk == 0:
            atoms[0.0] = atoms.get(0.0, 0.0) + wk
            continue
        if up > tol.mass:
            atoms[float(sk)] = up
        if down > tol.mass:
            atoms[-float(sk)] = down
            tilde_pts.append(float(sk))
            tilde_w.append(float(down))
    pts = sorted(atoms)
    mu = DiscreteMeasure(pts, [atoms[t] for t in pts], tol)
    order = np.argsort(tilde_pts)
    mu_tilde = DiscreteMeasure(
        np.array(tilde_pts)[order], np.array(tilde_w)[order], tol, probability=False
    )
    return mu, mu_tilde
