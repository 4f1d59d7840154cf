# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry hot kernels; see _kernels_np.py for the contract.

Loop nests are written to match the numpy backend's results exactly for the
boolean/integer kernels; squared distances accumulate in index order.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def points_in_boxes(double[:, ::1] points, double[:, ::1] mins, double[:, ::1] maxs):
    cdef Py_ssize_t n_points = points.shape[0]
    cdef Py_ssize_t n_boxes = mins.shape[0]
    out = np.zeros((n_points, n_boxes), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    cdef Py_ssize_t p, b
    cdef double x, y, z
    for p in range(n_points):
        x = points[p, 0]
        y = points[p, 1]
        z = points[p, 2]
        for b in range(n_boxes):
            if (mins[b, 0] <= x <= maxs[b, 0]
                    and mins[b, 1] <= y <= maxs[b, 1]
                    and mins[b, 2] <= z <= maxs[b, 2]):
                o[p, b] = 1
    return out.view(np.bool_)


def points_in_any_box(double[:, ::1] points, double[:, ::1] mins, double[:, ::1] maxs):
    cdef Py_ssize_t n_points = points.shape[0]
    cdef Py_ssize_t n_boxes = mins.shape[0]
    out = np.zeros(n_points, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t p, b
    cdef double x, y, z
    for p in range(n_points):
        x = points[p, 0]
        y = points[p, 1]
        z = points[p, 2]
        for b in range(n_boxes):
            if (mins[b, 0] <= x <= maxs[b, 0]
                    and mins[b, 1] <= y <= maxs[b, 1]
                    and mins[b, 2] <= z <= maxs[b, 2]):
                o[p] = 1
                break
    return out.view(np.bool_)


def box_occupancy(double[:, ::1] mins, double[:, ::1] maxs, int resolution):
    centers_arr = -1.0 + (np.arange(resolution, dtype=np.float64) + 0.5) * (2.0 / resolution)
    occ = np.zeros((resolution, resolution, resolution), dtype=np.uint8)
    cdef double[::1] centers = centers_arr
    cdef unsigned char[:, :, ::1] o = occ
    cdef Py_ssize_t n_boxes = mins.shape[0]
    cdef Py_ssize_t b, i, j, k
    cdef double c
    cdef Py_ssize_t x0, x1, y0, y1, z0, z1
    for b in range(n_boxes):
        # closed-bound center comparisons, run bounds found by direct scan
        x0 = _first_inside(centers, mins[b, 0], maxs[b, 0])
        if x0 < 0:
            continue
        x1 = _last_inside(centers, mins[b, 0], maxs[b, 0])
        y0 = _first_inside(centers, mins[b, 1], maxs[b, 1])
        if y0 < 0:
            continue
        y1 = _last_inside(centers, mins[b, 1], maxs[b, 1])
        z0 = _first_inside(centers, mins[b, 2], maxs[b, 2])
        if z0 < 0:
            continue
        z1 = _last_inside(centers, mins[b, 2], maxs[b, 2])
        for i in range(x0, x1 + 1):
            for j in range(y0, y1 + 1):
                for k in range(z0, z1 + 1):
                    o[i, j, k] = 1
    return occ.view(np.bool_)


cdef Py_ssize_t _first_inside(double[::1] centers, double lo, double hi) noexcept:
    cdef Py_ssize_t i
    for i in range(centers.shape[0]):
        if lo <= centers[i] <= hi:
            return i
    return -1


cdef Py_ssize_t _last_inside(double[::1] centers, double lo, double hi) noexcept:
    cdef Py_ssize_t i
    for i in range(centers.shape[0] - 1, -1, -1):
        if lo <= centers[i] <= hi:
            return i
    return -1


def pairwise_sq_dists(double[:, ::1] features):
    cdef Py_ssize_t n = features.shape[0]
    cdef Py_ssize_t dim = features.shape[1]
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j, d
    cdef double acc, diff
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for d in range(dim):
                diff = features[i, d] - features[j, d]
                acc += diff * diff
            o[i, j] = acc
            o[j, i] = acc
    return out


def resolve_face_labels(
    const unsigned char[:, ::1] candidates,
    const unsigned char[:, ::1] contains,
    const long long[::1] precedence,
):
    cdef Py_ssize_t n_faces = candidates.shape[0]
    cdef Py_ssize_t n_boxes = candidates.shape[1]
    out = np.full(n_faces, -1, dtype=np.int64)
    cdef long long[::1] o = out
    cdef Py_ssize_t f, i, j
    cdef long long best_rank
    cdef Py_ssize_t best
    cdef bint eliminated
    for f in range(n_faces):
        best = -1
        best_rank = 0
        for i in range(n_boxes):
            if not candidates[f, i]:
                continue
            eliminated = False
            for j in range(n_boxes):
                if candidates[f, j] and contains[i, j]:
                    eliminated = True
                    break
            if eliminated:
                continue
            if best < 0 or precedence[i] < best_rank:
                best = i
                best_rank = precedence[i]
        o[f] = best
    return out
