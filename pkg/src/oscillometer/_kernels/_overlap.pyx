# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled overlap kernels; same contract as ``fallback.py``.

The per-cell weight is the product of per-axis overlap lengths between the
query box [a, b] and the cell.  Loops run over the overlapped index window
only, so cost scales with the cube footprint, not the grid.
"""

from libc.math cimport ceil, floor, fabs


cdef inline bint _window(Py_ssize_t k, double lo, double h, double a, double b,
                         Py_ssize_t *i0, Py_ssize_t *i1) noexcept nogil:
    cdef double t0, t1
    if b <= a:
        return False
    t0 = (a - lo) / h
    t1 = (b - lo) / h
    if t1 <= 0.0 or t0 >= <double> k:
        return False
    i0[0] = <Py_ssize_t> floor(t0) if t0 > 0.0 else 0
    i1[0] = <Py_ssize_t> ceil(t1) if t1 < <double> k else k
    if i0[0] < 0:
        i0[0] = 0
    if i1[0] > k:
        i1[0] = k
    return i1[0] > i0[0]


cdef inline double _wlen(double lo, double h, Py_ssize_t i, double a, double b) noexcept nogil:
    cdef double c0 = lo + h * <double> i
    cdef double c1 = c0 + h
    cdef double left = a if a > c0 else c0
    cdef double right = b if b < c1 else c1
    cdef double w = right - left
    return w if w > 0.0 else 0.0


# ---------------------------------------------------------------- coef-only

cdef double _sum_1d(const double[::1] coef, double lo0, double h0,
                    double a0, double b0) noexcept nogil:
    cdef Py_ssize_t i0, i1, i
    cdef double acc = 0.0
    if not _window(coef.shape[0], lo0, h0, a0, b0, &i0, &i1):
        return 0.0
    for i in range(i0, i1):
        acc += coef[i] * _wlen(lo0, h0, i, a0, b0)
    return acc


cdef double _sum_2d(const double[:, ::1] coef, double lo0, double h0, double a0, double b0,
                    double lo1, double h1, double a1, double b1) noexcept nogil:
    cdef Py_ssize_t i0, i1, j0, j1, i, j
    cdef double acc = 0.0, row, wi
    if not _window(coef.shape[0], lo0, h0, a0, b0, &i0, &i1):
        return 0.0
    if not _window(coef.shape[1], lo1, h1, a1, b1, &j0, &j1):
        return 0.0
    for i in range(i0, i1):
        wi = _wlen(lo0, h0, i, a0, b0)
        if wi == 0.0:
            continue
        row = 0.0
        for j in range(j0, j1):
            row += coef[i, j] * _wlen(lo1, h1, j, a1, b1)
        acc += wi * row
    return acc


cdef double _sum_3d(const double[:, :, ::1] coef,
                    double lo0, double h0, double a0, double b0,
                    double lo1, double h1, double a1, double b1,
                    double lo2, double h2, double a2, double b2) noexcept nogil:
    cdef Py_ssize_t i0, i1, j0, j1, k0, k1, i, j, k
    cdef double acc = 0.0, plane, row, wi, wj
    if not _window(coef.shape[0], lo0, h0, a0, b0, &i0, &i1):
        return 0.0
    if not _window(coef.shape[1], lo1, h1, a1, b1, &j0, &j1):
        return 0.0
    if not _window(coef.shape[2], lo2, h2, a2, b2, &k0, &k1):
        return 0.0
    for i in range(i0, i1):
        wi = _wlen(lo0, h0, i, a0, b0)
        if wi == 0.0:
            continue
        plane = 0.0
        for j in range(j0, j1):
            wj = _wlen(lo1, h1, j, a1, b1)
            if wj == 0.0:
                continue
            row = 0.0
            for k in range(k0, k1):
                row += coef[i, j, k] * _wlen(lo2, h2, k, a2, b2)
            plane += wj * row
        acc += wi * plane
    return acc


# -------------------------------------------------- shifted values * density

cdef double _shift_1d(const double[::1] values, const double[::1] density,
                      double shift, bint absolute,
                      double lo0, double h0, double a0, double b0) noexcept nogil:
    cdef Py_ssize_t i0, i1, i
    cdef double acc = 0.0, v
    if not _window(values.shape[0], lo0, h0, a0, b0, &i0, &i1):
        return 0.0
    for i in range(i0, i1):
        v = values[i] - shift
        if absolute:
            v = fabs(v)
        acc += v * density[i] * _wlen(lo0, h0, i, a0, b0)
    return acc


cdef double _shift_2d(const double[:, ::1] values, const double[:, ::1] density,
                      double shift, bint absolute,
                      double lo0, double h0, double a0, double b0,
                      double lo1, double h1, double a1, double b1) noexcept nogil:
    cdef Py_ssize_t i0, i1, j0, j1, i, j
    cdef double acc = 0.0, row, wi, v
    if not _window(values.shape[0], lo0, h0, a0, b0, &i0, &i1):
        return 0.0
    if not _window(values.shape[1], lo1, h1, a1, b1, &j0, &j1):
        return 0.0
    for i in range(i0, i1):
        wi = _wlen(lo0, h0, i, a0, b0)
        if wi == 0.0:
            continue
        row = 0.0
        for j in range(j0, j1):
            v = values[i, j] - shift
            if absolute:
                v = fabs(v)
            row += v * density[i, j] * _wlen(lo1, h1, j, a1, b1)
        acc += wi * row
    return acc


cdef double _shift_3d(const double[:, :, ::1] values, const double[:, :, ::1] density,
                      double shift, bint absolute,
                      double lo0, double h0, double a0, double b0,
                      double lo1, double h1, double a1, double b1,
                      double lo2, double h2, double a2, double b2) noexcept nogil:
    cdef Py_ssize_t i0, i1, j0, j1, k0, k1, i, j, k
    cdef double acc = 0.0, plane, row, wi, wj, v
    if not _window(values.shape[0], lo0, h0, a0, b0, &i0, &i1):
        return 0.0
    if not _window(values.shape[1], lo1, h1, a1, b1, &j0, &j1):
        return 0.0
    if not _window(values.shape[2], lo2, h2, a2, b2, &k0, &k1):
        return 0.0
    for i in range(i0, i1):
        wi = _wlen(lo0, h0, i, a0, b0)
        if wi == 0.0:
            continue
        plane = 0.0
        for j in range(j0, j1):
            wj = _wlen(lo1, h1, j, a1, b1)
            if wj == 0.0:
                continue
            row = 0.0
            for k in range(k0, k1):
                v = values[i, j, k] - shift
                if absolute:
                    v = fabs(v)
                row += v * density[i, j, k] * _wlen(lo2, h2, k, a2, b2)
            plane += wj * row
        acc += wi * plane
    return acc


# ------------------------------------------------------------------- public

def overlap_sum(coef, lo, h, a, b):
    cdef int nd = coef.ndim
    if nd == 1:
        return _sum_1d(coef, lo[0], h[0], a[0], b[0])
    if nd == 2:
        return _sum_2d(coef, lo[0], h[0], a[0], b[0], lo[1], h[1], a[1], b[1])
    if nd == 3:
        return _sum_3d(coef, lo[0], h[0], a[0], b[0], lo[1], h[1], a[1], b[1],
                       lo[2], h[2], a[2], b[2])
    raise ValueError(f"unsupported dimension {nd}")


def centered_sum(values, density, pivot, lo, h, a, b):
    cdef int nd = values.ndim
    if nd == 1:
        return _shift_1d(values, density, pivot, False, lo[0], h[0], a[0], b[0])
    if nd == 2:
        return _shift_2d(values, density, pivot, False,
                         lo[0], h[0], a[0], b[0], lo[1], h[1], a[1], b[1])
    if nd == 3:
        return _shift_3d(values, density, pivot, False,
                         lo[0], h[0], a[0], b[0], lo[1], h[1], a[1], b[1],
                         lo[2], h[2], a[2], b[2])
    raise ValueError(f"unsupported dimension {nd}")


def absdev_sum(values, density, shift, lo, h, a, b):
    cdef int nd = values.ndim
    if nd == 1:
        return _shift_1d(values, density, shift, True, lo[0], h[0], a[0], b[0])
    if nd == 2:
        return _shift_2d(values, density, shift, True,
                         lo[0], h[0], a[0], b[0], lo[1], h[1], a[1], b[1])
    if nd == 3:
        return _shift_3d(values, density, shift, True,
                         lo[0], h[0], a[0], b[0], lo[1], h[1], a[1], b[1],
                         lo[2], h[2], a[2], b[2])
    raise ValueError(f"unsupported dimension {nd}")
