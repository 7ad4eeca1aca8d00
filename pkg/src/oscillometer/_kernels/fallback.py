"""Pure-numpy overlap kernels.

Every quantity the package integrates reduces to a weighted sum over grid
cells where the weight of a cell is the volume of its intersection with an
axis-parallel box, i.e. a product of per-axis overlap lengths.  The three
kernels here share that structure and differ only in the cell coefficient:

    overlap_sum   : sum coef[c] * w(c)
    centered_sum  : sum (values[c] - pivot) * density[c] * w(c)
    absdev_sum    : sum |values[c] - shift| * density[c] * w(c)

The box [a, b] may extend past the grid; cells outside contribute nothing.
A compiled drop-in replacement lives in ``_overlap.pyx``.
"""

import numpy as np


def _axis_window(k, lo, h, a, b):
    """Index range and per-cell overlap lengths of [a, b] on one axis.

    Returns (i0, i1, weights) with weights for cells i0..i1-1, or
    (0, 0, None) when the overlap is empty.
    """
    if not b > a:
        return 0, 0, None
    t0 = (a - lo) / h
    t1 = (b - lo) / h
    if t1 <= 0.0 or t0 >= k:
        return 0, 0, None
    i0 = int(np.floor(t0)) if t0 > 0.0 else 0
    i1 = int(np.ceil(t1)) if t1 < k else k
    if i1 <= i0:
        return 0, 0, None
    edges = lo + h * np.arange(i0, i1 + 1)
    w = np.minimum(b, edges[1:]) - np.maximum(a, edges[:-1])
    np.clip(w, 0.0, None, out=w)
    return i0, i1, w


def _windows(shape, lo, h, a, b):
    slices = []
    weights = []
    for ax in range(len(shape)):
        i0, i1, w = _axis_window(shape[ax], lo[ax], h[ax], a[ax], b[ax])
        if w is None:
            return None, None
        slices.append(slice(i0, i1))
        weights.append(w)
    return tuple(slices), weights


def _contract(sub, weights):
    nd = sub.ndim
    if nd == 1:
        return float(weights[0] @ sub)
    if nd == 2:
        return float(weights[0] @ sub @ weights[1])
    if nd == 3:
        return float(np.einsum("ijk,i,j,k->", sub, weights[0], weights[1], weights[2]))
    raise ValueError(f"unsupported dimension {nd}")


def overlap_sum(coef, lo, h, a, b):
    slices, weights = _windows(coef.shape, lo, h, a, b)
    if slices is None:
        return 0.0
    return _contract(coef[slices], weights)


def centered_sum(values, density, pivot, lo, h, a, b):
    slices, weights = _windows(values.shape, lo, h, a, b)
    if slices is None:
        return 0.0
    sub = (values[slices] - pivot) * density[slices]
    return _contract(sub, weights)


def absdev_sum(values, density, shift, lo, h, a, b):
    slices, weights = _windows(values.shape, lo, h, a, b)
    if slices is None:
        return 0.0
    sub = np.abs(values[slices] - shift) * density[slices]
    return _contract(sub, weights)
