import json
import math
import time

import numpy as np
import pytest

from bbplace import generate_synthetic, parse_json
from bbplace.harness import (ConfigError, HarnessConfig, MpHpwl, PlacementProblem, Trace, evaluate_gp_hpwl,
                             evaluate_mp_hpwl, gp_fitness, read_config_file, render_svg, resolve_benchmark,
                             run_experiment, run_seed, summarize, worst_fitness)
from bbplace.harness.experiment import GP_BUDGET, MP_BUDGET, OUT_ENV, benchmark_label, coerce
from bbplace.metrics import total_hpwl
from bbplace.placer import PlacementReport, PlacerConfig

from . import oracles

SYN = "synthetic:n_macros=6,n_cells=40,n_nets=50,n_terminals=4,seed=3"


def mp_oracle(nl, pl):
    keep = set(nl.macro_ids.tolist()) | set(np.flatnonzero(nl.fixed).tolist())
    return oracles.hpwl_naive(nl, pl.x, pl.y, pin_filter=lambda p: int(nl.pin_owner[p]) in keep)


# -- MP-HPWL -------------------------------------------------------------------

def test_mp_hpwl_fig2(fig2):
    assert evaluate_mp_hpwl(fig2.initial_placement()) == 19.0


def test_single_macro_net_contributes_zero():
    doc = {"canvas": {"x": 0, "y": 0, "w": 50, "h": 50},
           "modules": [{"id": 0, "w": 5, "h": 5, "kind": "macro", "fixed": False, "x": 0, "y": 0},
                       {"id": 1, "w": 1, "h": 1, "kind": "stdcell", "fixed": False, "x": 40, "y": 40},
                       {"id": 2, "w": 1, "h": 1, "kind": "stdcell", "fixed": False, "x": 10, "y": 30}],
           "pins": [{"id": i, "owner": i, "dx": 0, "dy": 0} for i in range(3)],
           "nets": [[0, 1, 2]], "macro_ids": [0]}
    nl = parse_json(doc)
    pl = nl.initial_placement()
    assert evaluate_mp_hpwl(pl) == 0.0
    assert total_hpwl(pl) > 0


def test_mp_hpwl_matches_filter_oracle(rng):
    for s in range(10):
        nl = generate_synthetic(5, 30, 40, n_terminals=3, seed=s)
        pl = nl.initial_placement(seed=s)
        mp = MpHpwl(nl)
        assert math.isclose(mp.hpwl(pl), mp_oracle(nl, pl), rel_tol=1e-12, abs_tol=1e-9)
        assert mp(pl) >= mp.hpwl(pl)


def test_mp_overlap_charged(fig2):
    pl = fig2.initial_placement()
    pl.x[1], pl.y[1] = pl.x[0] + 1, pl.y[0] + 1
    mp = MpHpwl(fig2)
    assert mp(pl) == pytest.approx(mp.hpwl(pl) + 1.0)


# -- GP-HPWL -------------------------------------------------------------------

def test_gp_hpwl_without_cells(fig2):
    pl = fig2.initial_placement()
    val, out = evaluate_gp_hpwl(pl)
    assert val == total_hpwl(pl)
    assert np.array_equal(out.x, pl.x)


@pytest.fixture(scope="module")
def inst20():
    return generate_synthetic(20, 500, 600, n_terminals=8, seed=0)


def test_gp_hpwl_deterministic_and_dominates(inst20):
    pl = inst20.initial_placement(seed=1)
    cfg = PlacerConfig.for_netlist(inst20, max_iters=300)
    a, pa = evaluate_gp_hpwl(pl, inst20, cfg, seed=4)
    b, pb = evaluate_gp_hpwl(pl, inst20, cfg, seed=4)
    assert a == b and np.array_equal(pa.x, pb.x)
    assert np.array_equal(pa.x[inst20.macro_ids], pl.x[inst20.macro_ids])
    assert a >= MpHpwl(inst20).hpwl(pa)


def test_gp_fitness_penalty(fig2):
    pl = fig2.initial_placement()
    rep = PlacementReport(iterations=3, final_overflow=0.5)
    assert gp_fitness(pl, rep, 0.1) == pytest.approx(total_hpwl(pl) + 0.4 * worst_fitness(fig2))
    rep.final_overflow = 0.05
    assert gp_fitness(pl, rep, 0.1) == total_hpwl(pl)
    rep.status = "diverged"
    assert gp_fitness(pl, rep, 0.1) == worst_fitness(fig2)


# -- problems and config ---------------------------------------------------------

def test_sp_es_rejected():
    with pytest.raises(ConfigError, match="sa or ea"):
        HarnessConfig(benchmark=SYN, placer="sp", algo="es")
    for algo in ("pso", "bo"):
        with pytest.raises(ConfigError):
            HarnessConfig(benchmark=SYN, placer="sp", algo=algo)


def test_config_defaults():
    assert HarnessConfig(benchmark=SYN).budget == MP_BUDGET == 10_000
    assert HarnessConfig(benchmark=SYN, eval_gp_hpwl=True).budget == GP_BUDGET == 200
    cfg = HarnessConfig(benchmark=SYN)
    assert cfg.pop_size == 50 and len(cfg.seeds) == 5
    for bad in (dict(budget=0), dict(pop_size=1), dict(grid=0), dict(workers=0), dict(seeds=[]),
                dict(hpo_scope="x"), dict(placer="tree"), dict(algo="ga")):
        with pytest.raises(ConfigError):
            HarnessConfig(benchmark=SYN, **bad)
    with pytest.raises(ConfigError):
        HarnessConfig.from_mapping({"benchmark": SYN, "colour": 1})
    with pytest.raises(ConfigError):
        HarnessConfig.from_mapping({"placer": "mgo"})


def test_out_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert HarnessConfig(benchmark=SYN).out_dir == tmp_path / "env"
    assert HarnessConfig(benchmark=SYN, out=str(tmp_path / "x")).out_dir == tmp_path / "x"


def test_read_config_file(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# experiment\nbenchmark = synthetic:n_macros=4,n_cells=10,n_nets=12\n"
                 "placer = mgo  # inline\nalgo = pso\nbudget = 30\nseeds = 0, 2\n"
                 "eval_gp_hpwl = false\ndensity = 0.05\n[extra]\ngrid = 16\n")
    d = read_config_file(p)
    assert d == {"benchmark": "synthetic:n_macros=4,n_cells=10,n_nets=12", "placer": "mgo", "algo": "pso",
                 "budget": 30, "seeds": [0, 2], "eval_gp_hpwl": False, "density": 0.05, "grid": 16}
    cfg = HarnessConfig.from_mapping(d)
    assert cfg.grid == 16 and cfg.seeds == [0, 2]
    with pytest.raises(ConfigError):
        coerce("budget", "lots")
    with pytest.raises(ConfigError):
        coerce("eval_gp_hpwl", "maybe")
    bad = tmp_path / "bad.cfg"
    bad.write_text("budget\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)


def test_resolve_benchmark(tmp_path):
    nl = resolve_benchmark(SYN)
    assert nl.n_macros == 6 and nl.counts()["cells"] == 40
    nl = resolve_benchmark(SYN, n_macros=3)
    assert len(nl.macro_ids) == 3
    with pytest.raises(ConfigError):
        resolve_benchmark("synthetic:n_macros=x")
    with pytest.raises(ConfigError):
        resolve_benchmark("synthetic:colour=3")
    from bbplace.netlist import NetlistError
    with pytest.raises(NetlistError):
        resolve_benchmark(str(tmp_path / "missing.aux"))
    assert benchmark_label("a/b/adaptec1.aux") == "adaptec1"


def test_mgo_infeasible_is_worst():
    # two 8x8 macros cannot both fit on a 10x10 canvas: every decode fails
    doc = {"canvas": {"x": 0, "y": 0, "w": 10, "h": 10},
           "modules": [{"id": 0, "w": 8, "h": 8, "kind": "macro", "fixed": False},
                       {"id": 1, "w": 8, "h": 8, "kind": "macro", "fixed": False}],
           "pins": [{"id": 0, "owner": 0, "dx": 0, "dy": 0}, {"id": 1, "owner": 1, "dx": 0, "dy": 0}],
           "nets": [[0, 1]], "macro_ids": [0, 1]}
    nl = parse_json(doc)
    prob = PlacementProblem(nl, "mgo", grid=4)
    f, _ = prob(prob.space.sample(np.random.default_rng(0)))
    assert f == worst_fitness(nl)


def test_sp_fitness_includes_exceed_penalty():
    nl = resolve_benchmark(SYN)
    prob = PlacementProblem(nl, "sp")
    g = prob.space.sample(np.random.default_rng(0))
    f, pl = prob(g)
    assert f >= prob.mp.hpwl(pl)


def test_hpo_problem_fitness(small_synth):
    prob = PlacementProblem(small_synth, "hpo", hpo_max_iters=20)
    f, pl = prob(np.full(15, 0.5))
    assert f == prob.mp(pl) and math.isfinite(f)
    prob = PlacementProblem(small_synth, "hpo", eval_gp_hpwl=True, hpo_max_iters=20)
    f, pl = prob(np.full(15, 0.5))
    assert f >= total_hpwl(pl)


# -- experiments -------------------------------------------------------------------

def check_trace(tr, nl, budget, serial=True):
    curve = np.array(tr.curve)
    assert len(tr.records) <= budget
    assert np.all(np.diff(curve) <= 0)
    assert curve[-1] == tr.best_fitness
    for r in tr.records:
        assert r.opt_time_s >= 0 and r.eval_time_s >= 0
        assert r.opt_time_s + r.eval_time_s <= r.wall_time_s <= tr.wall_time_s
    if serial:
        assert sum(r.opt_time_s + r.eval_time_s for r in tr.records) <= tr.wall_time_s


def test_mgo_ea_budget_200(tmp_path):
    cfg = HarnessConfig(benchmark=SYN, placer="mgo", algo="ea", budget=200, seeds=[0], out=str(tmp_path))
    (tr,) = run_experiment(cfg)
    nl = resolve_benchmark(SYN)
    assert len(tr.records) == 200
    check_trace(tr, nl, 200)
    # the final value is reproducible from the stored placement
    assert MpHpwl(nl).hpwl(tr.placement(nl)) == tr.best_fitness
    js = tmp_path / f"{tr.stem}.json"
    cs = tmp_path / f"{tr.stem}.csv"
    assert js.exists() and cs.exists()
    back = Trace.load(js)
    assert back.curve == tr.curve and back.config == tr.config
    lines = cs.read_text().splitlines()
    assert lines[0] == "eval_index,best_fitness,opt_time_s,eval_time_s" and len(lines) == 201
    assert float(lines[-1].split(",")[1]) == tr.best_fitness
    assert "genotype" not in json.loads(js.read_text())["records"][0]


def test_full_genotypes_flag():
    cfg = HarnessConfig(benchmark=SYN, placer="mgo", algo="sa", budget=5, seeds=[0], full_genotypes=True)
    (tr,) = run_experiment(cfg, write=False)
    assert len(tr.records[0].genotype) == 12


def test_trace_schema_checked(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps({"schema_version": 99}))
    from bbplace.netlist import NetlistError
    with pytest.raises(NetlistError):
        Trace.load(p)
    p.write_text("{not json")
    with pytest.raises(NetlistError):
        Trace.load(p)


@pytest.mark.parametrize("placer,algo", [("mgo", "ea"), ("mgo", "sa"), ("mgo", "pso"), ("mgo", "es"),
                                         ("mgo", "bo"), ("sp", "ea"), ("sp", "sa")])
def test_rerun_identical(placer, algo):
    budget = 25 if algo == "bo" else 120
    cfg = HarnessConfig(benchmark=SYN, placer=placer, algo=algo, budget=budget, seeds=[1], pop_size=20)
    nl = resolve_benchmark(SYN)
    a = run_seed(cfg, 1, nl)
    b = run_seed(cfg, 1, nl)
    assert a.curve_csv().split("\n")[0] == b.curve_csv().split("\n")[0]
    assert json.dumps(a.curve) == json.dumps(b.curve)
    assert [r.digest for r in a.records] == [r.digest for r in b.records]
    check_trace(a, nl, budget)


def test_workers_equal_curves():
    nl = resolve_benchmark(SYN)
    base = dict(benchmark=SYN, placer="mgo", algo="ea", budget=150, seeds=[2], pop_size=25)
    one = run_experiment(HarnessConfig(workers=1, **base), write=False)[0]
    four = run_experiment(HarnessConfig(workers=4, **base), write=False)[0]
    assert one.curve == four.curve
    assert [r.digest for r in one.records] == [r.digest for r in four.records]
    check_trace(four, nl, 150, serial=False)


def test_gp_experiment_small():
    cfg = HarnessConfig(benchmark=SYN, placer="mgo", algo="ea", eval_gp_hpwl=True, budget=6, seeds=[0],
                        pop_size=3, gp_max_iters=60)
    (tr,) = run_experiment(cfg, write=False)
    assert len(tr.records) == 6 and np.all(np.diff(tr.curve) <= 0)


# -- summaries ---------------------------------------------------------------------

def mk(instance, method, value, seed=0):
    return Trace(instance, method, seed, {}, best_fitness=float(value))


def test_summary_single_trace_std_zero():
    s = summarize([mk("a", "m", 3.0)])
    c = s.cell("a", "m")
    assert c.mean == 3.0 and c.std == 0.0 and c.rank == 1


def test_summary_ranks():
    s = summarize([mk("i", "x", 5), mk("i", "y", 7), mk("i", "z", 6)])
    assert [s.cell("i", m).rank for m in "xyz"] == [1, 3, 2]


def test_summary_sample_std():
    s = summarize([mk("i", "x", v, k) for k, v in enumerate([1.0, 2.0, 3.0, 4.0])])
    assert s.cell("i", "x").std == pytest.approx(np.std([1, 2, 3, 4], ddof=1))


def test_summary_average_rank_hand_table():
    means = {"i1": {"a": 1, "b": 2}, "i2": {"a": 5, "b": 3}, "i3": {"a": 0.5, "b": 0.7}}
    tr = [mk(i, m, v) for i, row in means.items() for m, v in row.items()]
    s = summarize(tr)
    # a: ranks 1, 2, 1; b: 2, 1, 2
    assert s.average_rank == {"a": pytest.approx(4 / 3), "b": pytest.approx(5 / 3)}
    for inst in means:
        assert sorted(s.cell(inst, m).rank for m in "ab") == [1, 2]


def test_summary_ragged():
    s = summarize([mk("i1", "a", 1), mk("i1", "b", 2), mk("i2", "a", 3)])
    assert s.cell("i2", "b") is None
    assert s.cell("i2", "a").rank == 1
    assert s.average_rank["b"] == 2.0
    assert "missing" in s.to_text()
    rows = s.to_csv().splitlines()
    assert rows[0] == "instance,method,mean,std,n,rank"
    assert "i2,b,,,0," in rows


# -- rendering -----------------------------------------------------------------------

def test_render_fig2(fig2, tmp_path):
    out = tmp_path / "f.svg"
    doc = render_svg(fig2.initial_placement(), out)
    assert out.read_text() == doc
    assert doc.count('class="macro"') == 4
    assert doc.count('class="canvas"') == 1
    assert render_svg(fig2.initial_placement()) == doc


def test_render_overlap_drawn(fig2):
    pl = fig2.initial_placement()
    pl.x[:] = 0
    pl.y[:] = 0
    assert render_svg(pl).count('class="macro"') == 4


def test_render_543_macros(tmp_path):
    nl = generate_synthetic(543, 200, 600, seed=0)
    pl = nl.initial_placement(seed=0)
    out = tmp_path / "big.svg"
    t = time.perf_counter()
    render_svg(pl, out)
    assert time.perf_counter() - t < 1.0
    assert out.stat().st_size < 5 * 2 ** 20


def test_render_unwritable(fig2, tmp_path):
    with pytest.raises(OSError):
        render_svg(fig2.initial_placement(), tmp_path / "no" / "such" / "dir.svg")
