"""Exact hypervolume of a point set above a reference point (maximisation)."""

import numpy as np

from .pareto import as_means, pareto_mask


def _nondominated(points):
    if len(points) <= 1:
        return points
    points = np.unique(points, axis=0)
    return points[pareto_mask(points)]


def _hv2d(points, ref):
    # sweep by decreasing first coordinate; second coordinate must rise to add area
    order = np.argsort(-points[:, 0], kind="stable")
    total = 0.0
    best_y = ref[1]
    for x, y in points[order]:
        if y > best_y:
            total += (x - ref[0]) * (y - best_y)
            best_y = y
    return total


def _hv(points, ref):
    D = points.shape[1]
    if len(points) == 0:
        return 0.0
    if D == 1:
        return float(points[:, 0].max() - ref[0])
    if D == 2:
        return _hv2d(points, ref)
    # slice along the last objective; each slab's cross-section is a (D-1)-volume
    order = np.argsort(-points[:, -1], kind="stable")
    pts = points[order]
    total = 0.0
    for k in range(len(pts)):
        lower = pts[k + 1, -1] if k + 1 < len(pts) else ref[-1]
        height = pts[k, -1] - lower
        if height > 0:
            section = _nondominated(pts[: k + 1, :-1])
            total += height * _hv(section, ref[:-1])
    return total


def hypervolume(points, ref) -> float:
    """Lebesgue measure of the union of boxes ``[ref, x]`` over ``x`` in ``points``.

    Args:
        points: ``(n, D)`` array (or sequence of D-vectors). May be empty.
        ref: reference point, weakly dominated by every point.

    Raises:
        ValueError: if some point lies below ``ref`` in any coordinate.
    """
    ref = np.atleast_1d(np.asarray(ref, dtype=np.float64))
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        return 0.0
    pts = pts.reshape(-1, ref.shape[0])
    if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(ref)):
        raise ValueError("non-finite coordinates")
    if np.any(pts < ref):
        raise ValueError("reference point must be weakly dominated by every point")
    return float(_hv(_nondominated(pts), ref))


def default_reference(theta, margin: float = 1e-6) -> np.ndarray:
    """Componentwise minimum of the means, shifted down by ``margin``."""
    return as_means(theta).min(axis=0) - margin


def hv_fraction(recommended, theta, ref=None) -> float:
    """``HV(recommended means) / HV(Pareto set means)``; 0 for an empty recommendation."""
    theta = as_means(theta)
    rec = sorted(int(a) for a in recommended)
    if not rec:
        return 0.0
    if ref is None:
        ref = default_reference(theta)
    full = hypervolume(theta[pareto_mask(theta)], ref)
    if not full > 0:
        raise ValueError("Pareto set has zero hypervolume for this reference point")
    return hypervolume(theta[rec], ref) / full
