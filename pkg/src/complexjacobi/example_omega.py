"""Closed-form spectral data of the constant-parameter family ``a_j = 1, b_j = omega``.

With ``beta = |Im omega|`` and ``R = Re omega >= 0`` the branch functions are
``t_pm(s) = -R +- sqrt(s^2 - beta^2)``.  For ``R > 2`` only ``t_+`` contributes;
for ``R <= 2`` both branches do on ``[beta, |omega - 2|]``.  Negative ``R`` is
reduced to positive by ``nu_{-omega} = nu_omega`` and ``psi_{-omega} = -psi_omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

from .core import DEFAULT_TOL, ComplexJacobi, MomentSequence, Tolerances, validate
from .errors import DomainError, QuadratureFailure, TooLarge
from .polys import QPolynomial

__all__ = [
    "DensityModel",
    "closed_form_spectral",
    "closed_form_moments",
    "chebyshev_q",
    "jacobi_omega",
    "QUADRATURE_TARGET",
    "MAX_CLOSED_FORM_ORDER",
    "MAX_CHEBYSHEV_INDEX",
]

QUADRATURE_TARGET = 1e-8
MAX_CLOSED_FORM_ORDER = 16
MAX_CHEBYSHEV_INDEX = 14


def _semicircle(t):
    return np.sqrt(np.clip(4.0 - t * t, 0.0, None))


@dataclass(frozen=True)
class DensityModel:
    """Density and phase of ``nu_omega`` on its support.

    ``support`` lists the non-degenerate pieces: ``[beta, |w - 2|]`` (both
    branches, only when ``Re w < 2``) and ``[|w - 2|, |w + 2|]`` (``t_+``
    only), where ``w`` is ``omega`` reflected into ``Re w >= 0``.
    """

    omega: complex

    @property
    def reduced(self) -> complex:
        return -self.omega if self.omega.real < 0 else self.omega

    @property
    def sign(self) -> int:
        return -1 if self.omega.real < 0 else 1

    @property
    def beta(self) -> float:
        return abs(self.omega.imag)

    @property
    def support(self) -> Tuple[Tuple[float, float], ...]:
        w = self.reduced
        lo, mid, hi = self.beta, abs(w - 2), abs(w + 2)
        if w.real > 2:
            return ((mid, hi),)
        pieces = [(lo, mid), (mid, hi)]
        return tuple(p for p in pieces if p[1] > p[0])

    @property
    def interval(self) -> Tuple[float, float]:
        return self.support[0][0], self.support[-1][1]

    def t_plus(self, s):
        return -self.omega.real + self._root(s)

    def t_minus(self, s):
        return -self.omega.real - self._root(s)

    def _root(self, s):
        s = np.asarray(s, dtype=float)
        return np.sqrt(np.clip(s * s - self.beta**2, 0.0, None))

    def _branches(self, s):
        """(root, sqrt(4 - t_-^2) on the two-branch piece else 0, sqrt(4 - t_+^2))."""
        w = self.reduced
        s = np.asarray(s, dtype=float)
        root = self._root(s)
        tp = -w.real + root
        tm = -w.real - root
        plus = _semicircle(tp)
        minus = np.where((w.real <= 2) & (s <= abs(w - 2)), _semicircle(tm), 0.0)
        inside = (s >= self.interval[0]) & (s <= self.interval[1])
        return root, np.where(inside, minus, 0.0), np.where(inside, plus, 0.0), tm, tp

    def _jacobian(self, s, root):
        """``s / sqrt(s^2 - beta^2)``, equal to 1 when beta = 0."""
        if self.beta == 0:
            return np.ones_like(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(root > 0, s / root, np.inf)

    def density(self, s):
        """``d nu / ds``; zero outside the support."""
        s = np.asarray(s, dtype=float)
        root, minus, plus, _, _ = self._branches(s)
        jac = self._jacobian(s, root)
        total = minus + plus
        with np.errstate(invalid="ignore"):
            return np.where(total > 0, jac * total / (2 * np.pi), 0.0)

    def phase(self, s):
        """``psi(s)``; ``nan`` outside the support and at ``s = 0``."""
        w = self.reduced
        s = np.asarray(s, dtype=float)
        root, minus, plus, tm, tp = self._branches(s)
        total = minus + plus
        with np.errstate(divide="ignore", invalid="ignore"):
            num = (tm + w) * minus + (tp + w) * plus
            # at the outer end both weights vanish; the t_+ branch gives the limit
            val = np.where(total > 0, num / np.where(total > 0, total, 1.0), tp + w) / s
        inside = (s >= self.interval[0]) & (s <= self.interval[1]) & (s > 0)
        return self.sign * np.where(inside, val, np.nan)

    def selfadjoint_density(self, t):
        """Density of ``mu`` rebuilt from ``(nu, psi)`` for real ``omega``.

        ``(1 + psi(t)) / 2 * density(t)`` for ``t > 0`` and
        ``(1 - psi(|t|)) / 2 * density(|t|)`` for ``t < 0``.
        """
        if self.omega.imag != 0:
            raise DomainError("the self-adjoint split needs real omega")
        t = np.asarray(t, dtype=float)
        a = np.abs(t)
        d = self.density(a)
        p = np.nan_to_num(self.phase(a).real, nan=0.0)
        return np.where(t >= 0, d * (1 + p) / 2, d * (1 - p) / 2)


def closed_form_spectral(omega: complex) -> DensityModel:
    return DensityModel(complex(omega))


def _u_pieces(model: DensityModel):
    """Integration pieces in ``u = sqrt(s^2 - beta^2)``."""
    beta = model.beta
    return [
        (math.sqrt(max(lo * lo - beta * beta, 0.0)), math.sqrt(max(hi * hi - beta * beta, 0.0)))
        for lo, hi in model.support
    ]


def closed_form_moments(omega: complex, M: int, tol: Tolerances = DEFAULT_TOL) -> MomentSequence:
    """Moments of the closed-form data by adaptive quadrature.

    Each support piece is mapped to ``u = sqrt(s^2 - beta^2)``, which removes
    the ``1/sqrt(s^2 - beta^2)`` factor (``ds = u/s du``), and then to
    ``u = mid - half cos(theta)``, which smooths the square-root zeros of the
    density at the piece ends.  The 1e-8 error target is relative for
    moments larger than one.
    """
    if M < 0:
        raise ValueError("M must be non-negative")
    if M > MAX_CLOSED_FORM_ORDER:
        raise TooLarge(f"M = {M} exceeds {MAX_CLOSED_FORM_ORDER}")
    model = closed_form_spectral(omega)
    beta = model.beta

    def integrand(theta, lo, hi, m, part):
        mid, half = (hi + lo) / 2, (hi - lo) / 2
        u = mid - half * math.cos(theta)
        s = math.sqrt(beta * beta + u * u)
        if s == 0.0:
            return 0.0
        # density(s) * ds/du, written without the removable 0/0 at u = 0
        _, minus, plus, _, _ = model._branches(np.array([s]))
        val = (minus[0] + plus[0]) / (2 * np.pi) * s**m
        if m % 2:
            psi = model.phase(np.array([s]))[0]
            if not np.isfinite(psi):
                return 0.0
            val = val * (psi.real if part == 0 else psi.imag)
        return val * half * math.sin(theta)

    out = np.empty(M + 1, dtype=complex)
    for m in range(M + 1):
        acc = [0.0, 0.0]
        for part in ((0,) if m % 2 == 0 else (0, 1)):
            for lo, hi in _u_pieces(model):
                val, err = integrate.quad(
                    integrand, 0.0, math.pi, args=(lo, hi, m, part),
                    epsabs=1e-13, epsrel=1e-12, limit=200,
                )
                if not np.isfinite(val) or err > QUADRATURE_TARGET * max(1.0, abs(val)):
                    raise QuadratureFailure(f"order {m}: error estimate {err:.2e}")
                acc[part] += val
        out[m] = complex(acc[0], acc[1])
    return MomentSequence(out, tol)


def _chebyshev_pair(x: Polynomial, j: int) -> Tuple[Polynomial, Polynomial, Polynomial]:
    """``(T_j(x), U_j(x), U_{j-1}(x))`` composed with the polynomial ``x``."""
    one = Polynomial([1.0 + 0j])
    T_prev, T = one, x
    U_prev, U = 0 * one, one  # U_{-1} = 0
    if j == 0:
        return one, one, 0 * one
    U_prev, U = one, 2 * x
    for _ in range(j - 1):
        T_prev, T = T, 2 * x * T - T_prev
        U_prev, U = U, 2 * x * U - U_prev
    return T, U, U_prev


def chebyshev_q(omega: complex, j: int) -> QPolynomial:
    """``q_j`` of the purely imaginary case in Chebyshev form.

    With ``x = (2 - s^2 - omega^2) / 2``:
    ``q_{2k+1} = (-1)^k (s - omega) U_k(x)`` and
    ``q_{2k} = (-1)^k [2 T_k(x) - (s^2 + omega^2) U_k(x)] / (2 - s^2 - omega^2)``,
    which simplifies to ``(-1)^k (U_k(x) - U_{k-1}(x))``.
    """
    omega = complex(omega)
    if omega.real != 0:
        raise DomainError(f"Re omega = {omega.real} but the Chebyshev form needs Re omega = 0")
    if j < 0:
        raise ValueError("index must be non-negative")
    if j > MAX_CHEBYSHEV_INDEX:
        raise TooLarge(f"index {j} exceeds {MAX_CHEBYSHEV_INDEX}")
    w2 = omega * omega
    x = Polynomial([(2 - w2) / 2, 0, -0.5])
    k, odd = divmod(j, 2)
    T, U, _ = _chebyshev_pair(x, k)
    sign = (-1) ** k
    if odd:
        return QPolynomial((sign * Polynomial([-omega, 1]) * U).coef)
    numer = 2 * T - Polynomial([w2, 0, 1]) * U
    quot, rem = divmod(numer, 2 * x)
    if rem.coef.size and np.abs(rem.coef).max() > 1e-9 * max(1.0, np.abs(numer.coef).max()):
        raise ArithmeticError("Chebyshev combination is not divisible")  # pragma: no cover
    return QPolynomial(sign * quot.coef)


def jacobi_omega(omega: complex, n: int, tol: Tolerances = DEFAULT_TOL) -> ComplexJacobi:
    """``n x n`` truncation of the constant-parameter matrix."""
    if n < 1:
        raise ValueError("n must be positive")
    return validate(np.ones(n - 1), np.full(n, complex(omega)), tol=tol)
