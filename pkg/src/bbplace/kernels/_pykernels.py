"""Pure numpy/Python reference kernels.

Arithmetic order matches ``_ckernels.pyx`` operation for operation so both
backends return bit-identical results.
"""
import numpy as np

NAME = "python"


def net_hpwl(net_ptr, net_pins, px, py):
    n_nets = len(net_ptr) - 1
    if n_nets == 0:
        return np.zeros(0)
    starts = net_ptr[:-1]
    qx = px[net_pins]
    qy = py[net_pins]
    return ((np.maximum.reduceat(qx, starts) - np.minimum.reduceat(qx, starts))
            + (np.maximum.reduceat(qy, starts) - np.minimum.reduceat(qy, starts)))


def total_hpwl(net_ptr, net_pins, px, py):
    per_net = net_hpwl(net_ptr, net_pins, px, py)
    if len(per_net) == 0:
        return 0.0
    # cumsum accumulates strictly left to right (net id ascending)
    return float(np.cumsum(per_net)[-1])


def weighted_lcs(order_a, order_b, weights):
    """Heaviest common-predecessor chain length for every element.

    Processes ``order_a`` left to right keeping a Fenwick tree of prefix
    maxima indexed by position in ``order_b``.
    """
    k = len(order_a)
    pos_b = np.empty(k, dtype=np.int64)
    pos_b[np.asarray(order_b, dtype=np.int64)] = np.arange(k)
    tree = [0.0] * (k + 1)
    coord = np.zeros(k)
    for e in order_a:
        e = int(e)
        p = int(pos_b[e])
        best = 0.0
        i = p
        while i > 0:
            if tree[i] > best:
                best = tree[i]
            i -= i & -i
        coord[e] = best
        val = best + float(weights[e])
        i = p + 1
        while i <= k:
            if val > tree[i]:
                tree[i] = val
            i += i & -i
    return coord


def _window_free(occ, fw, fh):
    n = occ.shape[0]
    s = np.zeros((n + 1, n + 1), dtype=np.int64)
    np.cumsum(np.cumsum(occ, axis=0, dtype=np.int64), axis=1, out=s[1:, 1:])
    win = s[fw:, fh:] - s[:-fw, fh:] - s[fw:, :-fh] + s[:-fw, :-fh]
    return win == 0


def mgo_decode(order, fw, fh, mn_ptr, mn_net, oxmin, oxmax, oymin, oymax,
               lo_x, hi_x, lo_y, hi_y, occ, tx, ty, cw, ch, n, tie_rtol=1e-9):
    """Greedy wire-mask placement of macros on an ``n x n`` grid.

    All coordinates are relative to the canvas origin.  Net boxes
    ``lo_*``/``hi_*`` hold the span of already placed pins (``lo > hi`` means
    empty) and are updated as macros land; ``occ`` is updated in place.
    Returns per-macro grid indices (``-1`` where no feasible cell exists).
    """
    k = len(fw)
    gx_out = np.full(k, -1, dtype=np.int64)
    gy_out = np.full(k, -1, dtype=np.int64)
    base_x = np.arange(n) * cw
    base_y = np.arange(n) * ch
    center_x = (np.arange(n) + 0.5) * cw
    center_y = (np.arange(n) + 0.5) * ch
    for i in order:
        i = int(i)
        a, b = int(fw[i]), int(fh[i])
        if a > n or b > n:
            continue
        free = _window_free(occ, a, b)
        if not free.any():
            continue
        nx, ny = free.shape
        cx = np.zeros(nx)
        cy = np.zeros(ny)
        for j in range(mn_ptr[i], mn_ptr[i + 1]):
            e = mn_net[j]
            if lo_x[e] <= hi_x[e]:
                cx += (np.maximum(base_x[:nx] + oxmax[j] - hi_x[e], 0.0)
                       + np.maximum(lo_x[e] - base_x[:nx] - oxmin[j], 0.0))
            if lo_y[e] <= hi_y[e]:
                cy += (np.maximum(base_y[:ny] + oymax[j] - hi_y[e], 0.0)
                       + np.maximum(lo_y[e] - base_y[:ny] - oymin[j], 0.0))
        cost = cx[:, None] + cy[None, :]
        best = cost[free].min()
        tied = free & (cost <= best + tie_rtol * (1.0 + abs(best)))
        ddx = center_x[:nx] - tx[i]
        ddy = center_y[:ny] - ty[i]
        d2 = ddx[:, None] * ddx[:, None] + ddy[None, :] * ddy[None, :]
        d2 = np.where(tied, d2, np.inf)
        flat = int(np.argmin(d2))
        gx, gy = divmod(flat, ny)
        gx_out[i] = gx
        gy_out[i] = gy
        occ[gx:gx + a, gy:gy + b] = 1
        bx = gx * cw
        by = gy * ch
        for j in range(mn_ptr[i], mn_ptr[i + 1]):
            e = mn_net[j]
            lo_x[e] = min(lo_x[e], bx + oxmin[j])
            hi_x[e] = max(hi_x[e], bx + oxmax[j])
            lo_y[e] = min(lo_y[e], by + oymin[j])
            hi_y[e] = max(hi_y[e], by + oymax[j])
    return gx_out, gy_out
