"""Pure numpy versions of the compiled kernels."""
import numpy as np


def segments_blocked(p1, p2, box_min, box_max):
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    box_min = np.asarray(box_min, dtype=float)
    box_max = np.asarray(box_max, dtype=float)
    n = p1.shape[0]
    if n == 0 or box_min.shape[0] == 0:
        return np.zeros(n, dtype=bool)
    d = (p2 - p1)[:, None, :]
    p = p1[:, None, :]
    lo = box_min[None, :, :]
    hi = box_max[None, :, :]
    flat = d == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (lo - p) / d
        t2 = (hi - p) / d
    tnear = np.where(flat, -np.inf, np.minimum(t1, t2))
    tfar = np.where(flat, np.inf, np.maximum(t1, t2))
    inside_flat = np.where(flat, (lo < p) & (p < hi), True).all(axis=2)
    tlo = np.maximum(tnear.max(axis=2), 0.0)
    thi = np.minimum(tfar.min(axis=2), 1.0)
    return (inside_flat & (tlo < thi)).any(axis=1)


def knn_select(points, q, k):
    points = np.asarray(points, dtype=float)
    q = np.asarray(q, dtype=float)
    diff = points - q
    dist = np.sqrt(diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1] + diff[:, 2] * diff[:, 2])
    order = np.argsort(dist, kind="stable")[:k]
    return order.astype(np.intp), dist[order]
