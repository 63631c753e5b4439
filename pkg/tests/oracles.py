"""Slow, independent reference computations used as test oracles.

None of these call into the package's kernels; they work from the raw
netlist arrays with plain Python loops.
"""
import itertools
import math

import numpy as np


def pin_positions(nl, x, y):
    out = []
    for p in range(len(nl.pin_owner)):
        m = int(nl.pin_owner[p])
        out.append((x[m] + nl.width[m] / 2 + nl.pin_dx[p], y[m] + nl.height[m] / 2 + nl.pin_dy[p]))
    return out


def hpwl_naive(nl, x, y, nets=None, pin_filter=None):
    pos = pin_positions(nl, x, y)
    total = 0.0
    nets = range(len(nl.net_ptr) - 1) if nets is None else nets
    for e in nets:
        pins = [int(p) for p in nl.net_pins[nl.net_ptr[e]:nl.net_ptr[e + 1]]]
        if pin_filter is not None:
            pins = [p for p in pins if pin_filter(p)]
        if not pins:
            continue
        xs = [pos[p][0] for p in pins]
        ys = [pos[p][1] for p in pins]
        total += (max(xs) - min(xs)) + (max(ys) - min(ys))
    return total


def lcs_dp(order_a, order_b, weights):
    """O(k^2) predecessor DP: coord[e] = max over common predecessors f of coord[f] + w[f]."""
    k = len(order_a)
    pa = {int(e): i for i, e in enumerate(order_a)}
    pb = {int(e): i for i, e in enumerate(order_b)}
    coord = [0.0] * k
    for e in sorted(range(k), key=lambda e: pa[e]):
        best = 0.0
        for f in range(k):
            if pa[f] < pa[e] and pb[f] < pb[e]:
                best = max(best, coord[f] + weights[f])
        coord[e] = best
    return np.array(coord)


def sp_relation_pack(pi_plus, pi_minus, w, h):
    """Longest-path packing straight from the left-of / below relations."""
    k = len(pi_plus)
    pp = {int(e): i for i, e in enumerate(pi_plus)}
    pm = {int(e): i for i, e in enumerate(pi_minus)}
    x = [0.0] * k
    y = [0.0] * k
    # relaxation k times suffices for a DAG with k nodes
    for _ in range(k):
        for i in range(k):
            for j in range(k):
                if pp[i] < pp[j] and pm[i] < pm[j]:
                    x[j] = max(x[j], x[i] + w[i])
                if pp[i] > pp[j] and pm[i] < pm[j]:
                    y[j] = max(y[j], y[i] + h[i])
    return np.array(x), np.array(y)


def connected_area_naive(nl, m):
    nets_of = {}
    for e in range(len(nl.net_ptr) - 1):
        for p in nl.net_pins[nl.net_ptr[e]:nl.net_ptr[e + 1]]:
            nets_of.setdefault(int(nl.pin_owner[p]), set()).add(e)
    mine = nets_of.get(m, set())
    others = {o for o, es in nets_of.items() if o != m and es & mine}
    return sum(float(nl.width[o] * nl.height[o]) for o in others)


def partial_hpwl(nl, x, y, placed):
    """HPWL over pins of placed modules only; nets without such pins count 0."""
    placed = set(int(m) for m in placed)
    return hpwl_naive(nl, x, y, pin_filter=lambda p: int(nl.pin_owner[p]) in placed)


def mgo_step_costs(nl, x, y, placed, macro, n):
    """Incremental partial HPWL of ``macro`` at every grid origin (n x n array).

    Nets whose other pins are all unplaced contribute nothing: their
    incremental cost is measured against the placed pins of that net only.
    """
    c = nl.canvas
    cw, ch = c.width / n, c.height / n
    base_set = set(int(m) for m in placed)
    with_set = base_set | {int(macro)}
    nets = [e for e in range(len(nl.net_ptr) - 1)
            if any(int(nl.pin_owner[p]) == macro for p in nl.net_pins[nl.net_ptr[e]:nl.net_ptr[e + 1]])]
    cost = np.zeros((n, n))
    xx = np.array(x, dtype=float)
    yy = np.array(y, dtype=float)
    for gx in range(n):
        for gy in range(n):
            xx[macro] = c.x + gx * cw
            yy[macro] = c.y + gy * ch
            tot = 0.0
            for e in nets:
                pins = [int(p) for p in nl.net_pins[nl.net_ptr[e]:nl.net_ptr[e + 1]]]
                others = [p for p in pins if int(nl.pin_owner[p]) in base_set]
                if not others:
                    continue
                sub_with = [p for p in pins if int(nl.pin_owner[p]) in with_set]
                tot += _span(nl, xx, yy, sub_with) - _span(nl, xx, yy, others)
            cost[gx, gy] = tot
    return cost


def _span(nl, x, y, pins):
    pos = pin_positions(nl, x, y)
    xs = [pos[p][0] for p in pins]
    ys = [pos[p][1] for p in pins]
    return (max(xs) - min(xs)) + (max(ys) - min(ys))


def feasible_cells(nl, x, y, occupied_ids, macro, n):
    """Brute-force legality: footprint inside the grid and touching no cell covered by a positive-area object."""
    c = nl.canvas
    cw, ch = c.width / n, c.height / n
    fw = max(1, math.ceil(nl.width[macro] / cw - 1e-9))
    fh = max(1, math.ceil(nl.height[macro] / ch - 1e-9))
    occ = np.zeros((n, n), dtype=bool)
    for m in occupied_ids:
        m = int(m)
        if nl.width[m] * nl.height[m] <= 0:
            continue  # zero-area pads cannot overlap anything
        a0 = max(0, math.floor((x[m] - c.x) / cw + 1e-9))
        b0 = max(0, math.floor((y[m] - c.y) / ch + 1e-9))
        a1 = min(n, math.ceil((x[m] + nl.width[m] - c.x) / cw - 1e-9))
        b1 = min(n, math.ceil((y[m] + nl.height[m] - c.y) / ch - 1e-9))
        if nl.fixed[m]:
            occ[a0:max(a1, a0), b0:max(b1, b0)] = True
        else:
            occ[a0:a0 + fw_of(nl, m, cw), b0:b0 + fh_of(nl, m, ch)] = True
    feas = np.zeros((n, n), dtype=bool)
    for gx in range(n - fw + 1):
        for gy in range(n - fh + 1):
            feas[gx, gy] = not occ[gx:gx + fw, gy:gy + fh].any()
    return feas


def fw_of(nl, m, cw):
    return max(1, math.ceil(nl.width[m] / cw - 1e-9))


def fh_of(nl, m, ch):
    return max(1, math.ceil(nl.height[m] / ch - 1e-9))


def central_diff(f, x, h):
    g = np.zeros_like(x)
    for i in range(len(x)):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2 * h)
    return g


def all_sequence_pairs(k):
    perms = list(itertools.permutations(range(k)))
    return [(a, b) for a in perms for b in perms]
