"""Small numeric helpers for lambda-polynomials attached to a matrix.

Polynomials are numpy coefficient arrays, highest degree first (the
numpy.roots convention).  Matrix indices here are 0-based.
"""

from __future__ import annotations

import itertools

import numpy as np

__all__ = [
    "lambda_minor_det", "principal_charpoly", "roots_polished",
    "sort_points", "match_points", "min_pairwise_gap", "TrackingError",
]


class TrackingError(RuntimeError):
    """Root tracking between nearby configurations is ambiguous."""


def _polyadd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) < len(b):
        a, b = b, a
    out = a.astype(complex).copy()
    out[len(a) - len(b):] += b
    return out


def lambda_minor_det(u: np.ndarray, rows: list[int], cols: list[int]) -> np.ndarray:
    """Coefficients of det of the (lam*Id - u) submatrix on rows x cols.

    lam sits only at positions whose global row and column indices agree.
    """
    k = len(rows)
    assert len(cols) == k and k >= 1

    def entry(r: int, c: int) -> np.ndarray:
        if r == c:
            return np.array([1.0, -u[r, c]], dtype=complex)
        return np.array([-u[r, c]], dtype=complex)

    def det(rs: tuple[int, ...], cs: tuple[int, ...]) -> np.ndarray:
        if len(rs) == 1:
            return entry(rs[0], cs[0])
        total = np.zeros(1, dtype=complex)
        r = rs[0]
        for pos, c in enumerate(cs):
            sub = det(rs[1:], cs[:pos] + cs[pos + 1:])
            term = np.polymul(entry(r, c), sub)
            total = _polyadd(total, term if pos % 2 == 0 else -term)
        return total

    return det(tuple(rows), tuple(cols))


def principal_charpoly(u: np.ndarray, k: int) -> np.ndarray:
    """Characteristic polynomial of the top-left k x k block, monic."""
    idx = list(range(k))
    return lambda_minor_det(u, idx, idx)


def roots_polished(coeffs: np.ndarray, iters: int = 6) -> np.ndarray:
    """Companion-matrix roots refined by a few Newton steps."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) <= 1:
        return np.zeros(0, dtype=complex)
    roots = np.roots(coeffs)
    deriv = np.polyder(coeffs)
    for _ in range(iters):
        vals = np.polyval(coeffs, roots)
        dvals = np.polyval(deriv, roots)
        safe = np.abs(dvals) > 1e-300
        step = np.where(safe, vals / np.where(safe, dvals, 1.0), 0.0)
        roots = roots - step
    return roots


def sort_points(points: np.ndarray) -> np.ndarray:
    order = np.lexsort((points.imag, points.real))
    return points[order]


def min_pairwise_gap(points: np.ndarray) -> float:
    if len(points) < 2:
        return np.inf
    return min(abs(a - b) for a, b in itertools.combinations(points, 2))


def match_points(base: np.ndarray, new: np.ndarray,
                 collision_dist: float | None = None) -> np.ndarray:
    """Reorder `new` to follow `base` by minimal-total-distance assignment.

    Brute-force over permutations (sizes here are <= 4).  If requested,
    raise TrackingError when two candidates approach within collision_dist.
    """
    base = np.asarray(base)
    new = np.asarray(new)
    if len(base) != len(new):
        raise TrackingError("point counts differ between configurations")
    if collision_dist is not None and min_pairwise_gap(new) < collision_dist:
        raise TrackingError("points closer than the tracking resolution")
    k = len(base)
    if k <= 1:
        return new.copy()
    best = None
    best_cost = np.inf
    for perm in itertools.permutations(range(k)):
        cost = sum(abs(base[i] - new[perm[i]]) for i in range(k))
        if cost < best_cost:
            best_cost = cost
            best = perm
    return new[list(best)]
