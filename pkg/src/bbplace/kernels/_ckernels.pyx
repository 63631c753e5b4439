# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; see ``_pykernels`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

NAME = "cython"


def net_hpwl(const long long[::1] net_ptr, const long long[::1] net_pins,
             const double[::1] px, const double[::1] py):
    cdef Py_ssize_t n_nets = net_ptr.shape[0] - 1
    out = np.zeros(max(n_nets, 0))
    cdef double[::1] res = out
    cdef Py_ssize_t e, j
    cdef long long p
    cdef double x0, x1, y0, y1, v
    with nogil:
        for e in range(n_nets):
            p = net_pins[net_ptr[e]]
            x0 = px[p]; x1 = x0; y0 = py[p]; y1 = y0
            for j in range(net_ptr[e] + 1, net_ptr[e + 1]):
                p = net_pins[j]
                v = px[p]
                if v > x1: x1 = v
                if v < x0: x0 = v
                v = py[p]
                if v > y1: y1 = v
                if v < y0: y0 = v
            res[e] = (x1 - x0) + (y1 - y0)
    return out


def total_hpwl(net_ptr, net_pins, px, py):
    cdef double[::1] per = net_hpwl(net_ptr, net_pins, px, py)
    cdef double s = 0.0
    cdef Py_ssize_t e
    with nogil:
        for e in range(per.shape[0]):
            s += per[e]
    return s


def weighted_lcs(order_a, order_b, weights):
    cdef const long long[::1] a = np.ascontiguousarray(order_a, dtype=np.int64)
    cdef const long long[::1] b = np.ascontiguousarray(order_b, dtype=np.int64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t k = a.shape[0]
    pos_arr = np.empty(k, dtype=np.int64)
    tree_arr = np.zeros(k + 1)
    out = np.zeros(k)
    cdef long long[::1] pos_b = pos_arr
    cdef double[::1] tree = tree_arr
    cdef double[::1] coord = out
    cdef Py_ssize_t t, i, p
    cdef long long e
    cdef double best, val
    with nogil:
        for t in range(k):
            pos_b[b[t]] = t
        for t in range(k):
            e = a[t]
            p = pos_b[e]
            best = 0.0
            i = p
            while i > 0:
                if tree[i] > best:
                    best = tree[i]
                i -= i & -i
            coord[e] = best
            val = best + w[e]
            i = p + 1
            while i <= k:
                if val > tree[i]:
                    tree[i] = val
                i += i & -i
    return out


def mgo_decode(order, fw, fh, mn_ptr, mn_net, oxmin, oxmax, oymin, oymax,
               lo_x, hi_x, lo_y, hi_y, occ, tx, ty, double cw, double ch, Py_ssize_t n,
               double tie_rtol=1e-9):
    cdef const long long[::1] ordv = np.ascontiguousarray(order, dtype=np.int64)
    cdef const long long[::1] fwv = np.ascontiguousarray(fw, dtype=np.int64)
    cdef const long long[::1] fhv = np.ascontiguousarray(fh, dtype=np.int64)
    cdef const long long[::1] ptr = np.ascontiguousarray(mn_ptr, dtype=np.int64)
    cdef const long long[::1] nets = np.ascontiguousarray(mn_net, dtype=np.int64)
    cdef const double[::1] oxa = np.ascontiguousarray(oxmin, dtype=np.float64)
    cdef const double[::1] oxb = np.ascontiguousarray(oxmax, dtype=np.float64)
    cdef const double[::1] oya = np.ascontiguousarray(oymin, dtype=np.float64)
    cdef const double[::1] oyb = np.ascontiguousarray(oymax, dtype=np.float64)
    cdef double[::1] lx = lo_x
    cdef double[::1] hx = hi_x
    cdef double[::1] ly = lo_y
    cdef double[::1] hy = hi_y
    cdef cnp.uint8_t[:, ::1] oc = occ
    cdef const double[::1] txv = np.ascontiguousarray(tx, dtype=np.float64)
    cdef const double[::1] tyv = np.ascontiguousarray(ty, dtype=np.float64)
    cdef Py_ssize_t k = fwv.shape[0]
    gx_arr = np.full(k, -1, dtype=np.int64)
    gy_arr = np.full(k, -1, dtype=np.int64)
    cdef long long[::1] gxo = gx_arr
    cdef long long[::1] gyo = gy_arr
    s_arr = np.zeros((n + 1, n + 1), dtype=np.int64)
    cdef long long[:, ::1] s = s_arr
    cx_arr = np.zeros(n)
    cy_arr = np.zeros(n)
    cdef double[::1] cx = cx_arr
    cdef double[::1] cy = cy_arr
    cdef Py_ssize_t t, i, a, b, nx, ny, u, v, j, bu, bv
    cdef long long e
    cdef double base, best, c, thr, d2, bestd, ddx, ddy, bx, by
    cdef bint any_free
    with nogil:
        for t in range(ordv.shape[0]):
            i = ordv[t]
            a = fwv[i]
            b = fhv[i]
            if a > n or b > n:
                continue
            for u in range(n):
                for v in range(n):
                    s[u + 1, v + 1] = oc[u, v] + s[u, v + 1] + s[u + 1, v] - s[u, v]
            nx = n - a + 1
            ny = n - b + 1
            for u in range(nx):
                cx[u] = 0.0
            for v in range(ny):
                cy[v] = 0.0
            for j in range(ptr[i], ptr[i + 1]):
                e = nets[j]
                if lx[e] <= hx[e]:
                    for u in range(nx):
                        base = u * cw
                        cx[u] += (_pos(base + oxb[j] - hx[e]) + _pos(lx[e] - base - oxa[j]))
                if ly[e] <= hy[e]:
                    for v in range(ny):
                        base = v * ch
                        cy[v] += (_pos(base + oyb[j] - hy[e]) + _pos(ly[e] - base - oya[j]))
            any_free = False
            best = INFINITY
            for u in range(nx):
                for v in range(ny):
                    if s[u + a, v + b] - s[u, v + b] - s[u + a, v] + s[u, v] == 0:
                        any_free = True
                        c = cx[u] + cy[v]
                        if c < best:
                            best = c
            if not any_free:
                continue
            thr = best + tie_rtol * (1.0 + fabs(best))
            bestd = INFINITY
            bu = -1
            bv = -1
            for u in range(nx):
                ddx = (u + 0.5) * cw - txv[i]
                for v in range(ny):
                    if s[u + a, v + b] - s[u, v + b] - s[u + a, v] + s[u, v] != 0:
                        continue
                    if cx[u] + cy[v] <= thr:
                        ddy = (v + 0.5) * ch - tyv[i]
                        d2 = ddx * ddx + ddy * ddy
                        if d2 < bestd:
                            bestd = d2
                            bu = u
                            bv = v
            gxo[i] = bu
            gyo[i] = bv
            for u in range(bu, bu + a):
                for v in range(bv, bv + b):
                    oc[u, v] = 1
            bx = bu * cw
            by = bv * ch
            for j in range(ptr[i], ptr[i + 1]):
                e = nets[j]
                if bx + oxa[j] < lx[e]: lx[e] = bx + oxa[j]
                if bx + oxb[j] > hx[e]: hx[e] = bx + oxb[j]
                if by + oya[j] < ly[e]: ly[e] = by + oya[j]
                if by + oyb[j] > hy[e]: hy[e] = by + oyb[j]
    return gx_arr, gy_arr


cdef inline double _pos(double v) noexcept nogil:
    return v if v > 0.0 else 0.0
