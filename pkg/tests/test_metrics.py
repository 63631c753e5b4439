import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bbplace import generate_synthetic, parse_json
from bbplace.metrics import (axis_cost_profile, density_overflow, hinge_profile, net_hpwl, overlap_area,
                             overlap_area_naive, per_net_hpwl, total_hpwl)
from bbplace.netlist import NetlistError, Placement

from . import oracles


def _pins_doc(points, nets, size=1.0, canvas=20):
    """One zero-offset unit module per point, centered there."""
    return parse_json({
        "canvas": {"x": 0, "y": 0, "w": canvas, "h": canvas},
        "modules": [{"id": i, "w": size, "h": size, "kind": "stdcell", "fixed": False,
                     "x": px - size / 2, "y": py - size / 2} for i, (px, py) in enumerate(points)],
        "pins": [{"id": i, "owner": i, "dx": 0, "dy": 0} for i in range(len(points))],
        "nets": nets,
    })


def test_two_pins():
    nl = _pins_doc([(0, 0), (3, 4)], [[0, 1]])
    assert net_hpwl(0, nl.initial_placement()) == 7.0


def test_single_pin_net():
    nl = _pins_doc([(2, 2)], [[0]])
    assert net_hpwl(0, nl.initial_placement()) == 0.0


def test_fig2_nets(fig2):
    pl = fig2.initial_placement()
    assert net_hpwl(0, pl) == 9.0
    assert net_hpwl(1, pl) == 10.0
    assert total_hpwl(pl) == 19.0
    assert overlap_area(pl, fig2.macro_ids) == 0.0


def test_zero_pin_net_reported(fig2):
    with pytest.raises(NetlistError):
        net_hpwl(np.array([], dtype=np.int64), fig2.initial_placement())


def test_coincident():
    nl = _pins_doc([(3, 3)] * 5, [[0, 1], [2, 3, 4]])
    assert total_hpwl(nl.initial_placement()) == 0.0


def test_random_3pin_nets_vs_naive(rng):
    pts = rng.uniform(0, 20, (30, 2))
    nl = _pins_doc([tuple(p) for p in pts], [list(range(3 * i, 3 * i + 3)) for i in range(10)])
    pl = nl.initial_placement()
    assert total_hpwl(pl) == pytest.approx(oracles.hpwl_naive(nl, pl.x, pl.y), rel=1e-12)


def test_translation_invariance(small_synth):
    pl = small_synth.initial_placement(seed=1)
    # dyadic shift keeps every coordinate exactly representable
    assert total_hpwl(pl.shifted(4.0, 4.0)) == total_hpwl(pl)


def test_total_hpwl_matches_per_net_order(small_synth):
    pl = small_synth.initial_placement(seed=2)
    acc = 0.0
    for v in per_net_hpwl(pl):
        acc += v
    assert total_hpwl(pl) == acc


# -- hinge / axis profile -------------------------------------------------------

def test_hinge_example():
    assert hinge_profile(2, 5, np.arange(8)).tolist() == [2, 1, 0, 0, 0, 0, 1, 2]


def test_hinge_empty_span():
    assert np.all(hinge_profile(5, 2, np.arange(8)) == 0)


def _profile_net(rng, k=5, n=16):
    pts = rng.uniform(0, 16, (k, 2))
    sizes = [1.0] * k
    sizes[0] = 3.0
    doc = {
        "canvas": {"x": 0, "y": 0, "w": 16, "h": 16},
        "modules": [{"id": i, "w": sizes[i], "h": sizes[i], "kind": "macro" if i == 0 else "stdcell",
                     "fixed": False, "x": float(pts[i, 0]), "y": float(pts[i, 1])} for i in range(k)],
        "pins": [{"id": 0, "owner": 0, "dx": 0.7, "dy": -0.4}, {"id": 1, "owner": 0, "dx": -1.1, "dy": 0.9}]
                + [{"id": i + 1, "owner": i, "dx": 0, "dy": 0} for i in range(1, k)],
        "nets": [list(range(k + 1))],
    }
    return parse_json(doc)


def test_axis_profile_brute_force(rng):
    for _ in range(20):
        nl = _profile_net(rng)
        pl = nl.initial_placement()
        n = 16
        prof_x = axis_cost_profile(0, 0, "x", n, pl)
        prof_y = axis_cost_profile(0, 0, "y", n, pl)
        others = [1, 2, 3, 4]
        base = oracles.partial_hpwl(nl, pl.x, pl.y, others)
        for gx in range(n):
            for gy in range(n):
                x = pl.x.copy()
                y = pl.y.copy()
                x[0], y[0] = gx, gy
                full = oracles.hpwl_naive(nl, x, y)
                assert prof_x[gx] + prof_y[gy] == pytest.approx(full - base, abs=1e-9)


def test_axis_profile_unimodal(rng):
    nl = _profile_net(rng)
    prof = axis_cost_profile(0, 0, "x", 16, nl.initial_placement())
    i = int(np.argmin(prof))
    assert np.all(np.diff(prof[: i + 1]) <= 1e-12)
    assert np.all(np.diff(prof[i:]) >= -1e-12)


def test_axis_profile_only_own_pins():
    nl = _pins_doc([(2, 2), (5, 5)], [[0], [1]])
    assert np.all(axis_cost_profile(0, 0, "x", 8, nl.initial_placement()) == 0)


# -- overlap -----------------------------------------------------------------

def _rects(boxes):
    doc = {"canvas": {"x": 0, "y": 0, "w": 100, "h": 100},
           "modules": [{"id": i, "w": w, "h": h, "kind": "macro", "fixed": False, "x": x, "y": y}
                       for i, (x, y, w, h) in enumerate(boxes)],
           "pins": [{"id": i, "owner": i, "dx": 0, "dy": 0} for i in range(len(boxes))],
           "nets": [[i] for i in range(len(boxes))]}
    nl = parse_json(doc)
    return nl.initial_placement(), np.arange(len(boxes))


def test_overlap_examples():
    pl, ids = _rects([(0, 0, 1, 1), (2, 0, 1, 1)])
    assert overlap_area(pl, ids) == 0.0
    pl, ids = _rects([(0, 0, 1, 1), (0, 0, 1, 1)])
    assert overlap_area(pl, ids) == 1.0


def test_overlap_touching_is_legal():
    pl, ids = _rects([(0, 0, 2, 2), (2, 0, 2, 2), (0, 2, 2, 2)])
    assert overlap_area(pl, ids) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 20), st.integers(0, 20), st.integers(1, 8), st.integers(1, 8)),
                min_size=1, max_size=8))
def test_overlap_sweep_vs_naive(boxes):
    pl, ids = _rects([tuple(float(v) for v in b) for b in boxes])
    assert overlap_area(pl, ids) == pytest.approx(overlap_area_naive(pl, ids), abs=1e-9)


# -- density -----------------------------------------------------------------

def test_density_examples():
    doc = {"canvas": {"x": 0, "y": 0, "w": 1, "h": 1}, "modules": [], "pins": [], "nets": []}
    assert density_overflow(parse_json(doc).initial_placement(), 1, 1, 1.0) == 0.0
    pl, _ = _rects([(0, 0, 10, 10)])
    assert density_overflow(pl, 10, 10, 1.0) == 0.0
    doc = {"canvas": {"x": 0, "y": 0, "w": 1, "h": 1},
           "modules": [{"id": i, "w": 1, "h": 1, "kind": "stdcell", "fixed": False, "x": 0, "y": 0}
                       for i in range(2)],
           "pins": [{"id": i, "owner": i, "dx": 0, "dy": 0} for i in range(2)], "nets": [[0, 1]]}
    assert density_overflow(parse_json(doc).initial_placement(), 1, 1, 1.0) == 0.5


def test_density_conserves_area(small_synth):
    from bbplace.metrics import density_grid
    pl = small_synth.initial_placement(seed=0)
    g = density_grid(pl, 7, 5)
    assert g.occupancy.min() >= 0
    assert g.occupancy.sum() == pytest.approx(small_synth.area.sum(), rel=1e-12)


def test_density_overflow_bounded(small_synth):
    pl = small_synth.initial_placement(seed=0)
    pl.x[:] = 0
    pl.y[:] = 0
    v = density_overflow(pl, 16, 16, 1.0)
    assert 0.0 <= v <= 1.0
