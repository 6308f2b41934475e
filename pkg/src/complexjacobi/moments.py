"""Motzkin-path expansion of the block moments ``P0 JJ^m P0^*``.

A path of length ``m`` is a level sequence ``(j_1, ..., j_{m-1})`` with
``j_0 = j_m = 0``, unit steps up, down or flat, and no negative level.  Each
path contributes the ordered product of the blocks it traverses: ``B_p`` for
a flat step at level ``p``, ``A_p`` for ``p -> p+1`` and ``A_p^*`` for
``p+1 -> p``.
"""

from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .core import BlockJacobi
from .errors import DepthError, TooLarge

__all__ = [
    "MAX_PATH_LENGTH",
    "enumerate_paths",
    "extremal_path",
    "path_product",
    "path_moment",
    "scalar_path_moment",
    "level_sum",
    "remainder",
]

MAX_PATH_LENGTH = 13

Path = Tuple[int, ...]


def _walk(prefix: List[int], level: int, remaining: int) -> Iterator[Path]:
    if remaining == 1:
        if level <= 1:
            yield tuple(prefix)
        return
    for nxt in (level - 1, level, level + 1):
        # must be able to come back down to 0 in the remaining steps
        if nxt < 0 or nxt > remaining - 1:
            continue
        prefix.append(nxt)
        yield from _walk(prefix, nxt, remaining - 1)
        prefix.pop()


def enumerate_paths(m: int) -> List[Path]:
    """All paths of length ``m`` in lexicographic order of their levels.

    ``m = 0`` yields the single empty path.  Raises :class:`TooLarge` for
    ``m > 13``.
    """
    if m < 0:
        raise ValueError("path length must be non-negative")
    if m > MAX_PATH_LENGTH:
        raise TooLarge(f"m = {m} exceeds the enumeration cap {MAX_PATH_LENGTH}")
    if m == 0:
        return [()]
    return list(_walk([], 0, m))


def extremal_path(m: int) -> Path:
    """The path singled out in the moment recursion.

    Even ``m = 2n``: straight up to level ``n`` and back.  Odd ``m = 2n+1``:
    up to ``n``, one flat step there, and back.
    """
    n = m // 2
    up = list(range(1, n + 1))
    if m % 2:
        return tuple(up + up[::-1])
    return tuple(up + up[-2::-1])


def _step_block(A, B, p: int, q: int) -> np.ndarray:
    if q == p:
        return B[p]
    if q == p + 1:
        return A[p]
    return np.conj(A[q]).T


def path_product(A, B, path: Sequence[int]) -> np.ndarray:
    """Ordered product of the blocks along ``path`` (left to right).

    ``path`` holds the interior levels of a path of length ``len(path) + 1``,
    so the empty tuple is the single flat step ``B_0``.
    """
    levels = (0, *path, 0)
    out = np.eye(2, dtype=complex)
    for p, q in zip(levels[:-1], levels[1:]):
        out = out @ _step_block(A, B, p, q)
    return out


def _check_depth(blocks: BlockJacobi, m: int) -> None:
    need = m // 2 + 1
    if blocks.N < need:
        raise DepthError(f"moment of order {m} needs {need} diagonal blocks, got {blocks.N}")


def path_moment(
    blocks: BlockJacobi, m: int, method: str = "enumerate"
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(total, extremal, Y)`` for the order-``m`` block moment.

    ``total`` sums all path products, ``extremal`` is the contribution of
    :func:`extremal_path` and ``Y = total - extremal``.  ``method="dp"``
    accumulates the same sum level by level instead of path by path, which
    removes the length cap.
    """
    _check_depth(blocks, m)
    A, B = blocks.A, blocks.B
    if m == 0:
        I = np.eye(2, dtype=complex)
        return I, I, np.zeros((2, 2), dtype=complex)
    ext = path_product(A, B, extremal_path(m))
    if method == "enumerate":
        total = np.zeros((2, 2), dtype=complex)
        Y = np.zeros((2, 2), dtype=complex)
        star = extremal_path(m)
        for path in enumerate_paths(m):
            prod = path_product(A, B, path)
            total += prod
            if path != star:
                Y += prod
        return total, ext, Y
    if method == "dp":
        total = level_sum(A, B, m)
        return total, ext, remainder(A, B, m)
    raise ValueError(f"unknown method {method!r}")


def level_sum(A, B, m: int, max_level: Optional[int] = None, flat_off: Optional[int] = None) -> np.ndarray:
    """Sum of all path products computed by dynamic programming over levels.

    ``max_level`` forbids paths above that level; ``flat_off`` forbids flat
    steps at that level.  Only the blocks those paths touch are read, so
    ``A`` and ``B`` may be partially known.
    """
    top = m // 2 if max_level is None else min(max_level, m // 2)
    acc: Dict[int, np.ndarray] = {0: np.eye(2, dtype=complex)}
    for step in range(m):
        remaining = m - step - 1
        nxt: Dict[int, np.ndarray] = {}
        for p, S in acc.items():
            for q in (p - 1, p, p + 1):
                if q < 0 or q > top or q > remaining:
                    continue
                if q == p and p == flat_off:
                    continue
                term = S @ _step_block(A, B, p, q)
                nxt[q] = nxt[q] + term if q in nxt else term
        acc = nxt
    return acc.get(0, np.zeros((2, 2), dtype=complex))


def remainder(A, B, m: int) -> np.ndarray:
    """``Y_m``: the path sum with the extremal path removed.

    For ``m = 2n`` this reads ``B_0..B_{n-1}`` and ``A_0..A_{n-2}``; for
    ``m = 2n+1`` it reads ``B_0..B_{n-1}`` and ``A_0..A_{n-1}``.
    """
    n = m // 2
    if m == 0:
        return np.zeros((2, 2), dtype=complex)
    if m % 2 == 0:
        return level_sum(A, B, m, max_level=n - 1)
    return level_sum(A, B, m, flat_off=n)


def scalar_path_moment(a: Sequence, b: Sequence, m: int):
    """``<J^m d0, d0>`` of a scalar Jacobi matrix as an explicit path sum.

    With integer (or Fraction) parameters the result is exact.
    """
    if m == 0:
        return 1
    total = 0
    for path in enumerate_paths(m):
        levels = (0, *path, 0)
        prod = 1
        for p, q in zip(levels[:-1], levels[1:]):
            if q == p:
                prod = prod * b[p]
            else:
                prod = prod * a[min(p, q)]
        total = total + prod
    return total
