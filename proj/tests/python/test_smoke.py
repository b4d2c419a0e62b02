import math
import os
import pathlib

import numpy as np
import pytest

import vexp

SOURCE = pathlib.Path(os.environ.get("VEXP_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


def test_grid_and_presets():
    g = vexp.Grid(1, [(0.0, 1.0)], [5])
    assert g.node_count == 5
    assert g.interior_count == 3
    np.testing.assert_allclose(g.coordinates(0), [0, 0.25, 0.5, 0.75, 1.0])
    u = vexp.GridFunction.preset(g, "hat(1)")
    np.testing.assert_allclose(u.values, [0, 0.5, 1, 0.5, 0])
    assert u.zero_trace()


def test_hat_norms():
    g = vexp.Grid(1, [(0.0, 1.0)], [5])
    u = vexp.GridFunction.preset(g, "hat(1)")
    p = vexp.ExponentField.preset(g, "constant(2)")
    b = vexp.norm_bundle(u, p)
    assert b["modular"] == pytest.approx(0.375)
    assert b["phi"] == pytest.approx(4.375)
    assert b["luxemburg"] == pytest.approx(math.sqrt(0.375))
    assert vexp.energy_J(u, p) == pytest.approx(2.0)
    assert float(np.dot(vexp.apply_A(u, p), u.values)) == pytest.approx(4.0)


def test_constant_luxemburg():
    g = vexp.Grid(1, [(0.0, 2.0)], [33])
    u = vexp.GridFunction(g, np.full(33, 3.0))
    p = vexp.ExponentField(g, np.full(33, 2.5))
    assert vexp.luxemburg_norm(u, p) == pytest.approx(3.0 * 2.0 ** (1 / 2.5), abs=1e-10)


def test_holder_on_random_pairs():
    g = vexp.Grid(1, [(0.0, 1.0)], [33])
    p = vexp.ExponentField.preset(g, "linear(2,1)")
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.normal(size=33)
        b = rng.normal(size=33)
        a[[0, -1]] = 0.0
        b[[0, -1]] = 0.0
        lhs, rhs = vexp.holder_pairing(vexp.GridFunction(g, a), vexp.GridFunction(g, b), p)
        assert lhs <= rhs + 1e-9


def test_lambda_star_small():
    g = vexp.Grid(1, [(0.0, 1.0)], [34])
    est = vexp.estimate_lambda_star(vexp.ExponentField.preset(g, "constant(2)"), restarts=1)
    h = 1.0 / 33.0
    assert est["value"] == pytest.approx(4.0 / h**2 * math.sin(math.pi * h / 2) ** 2, rel=1e-8)
    assert len(est["per_start"]) == 2


def test_potentials():
    g = vexp.Grid(1, [(0.0, 1.0)], [5])
    p = vexp.ExponentField.preset(g, "constant(2)")
    j2 = vexp.make_j2(1.0, p, 4.0)
    assert j2.breakpoints == [-1.0, 1.0]
    lo, hi = j2.clarke_interval(2.0, 1.0)
    assert (lo, hi) == pytest.approx((-2.0, 4.0))
    with pytest.raises(vexp.ConstructionError):
        vexp.make_j2(1.0, p, 1.5)


def test_eval_R_hat():
    g = vexp.Grid(1, [(0.0, 1.0)], [5])
    p = vexp.ExponentField.preset(g, "constant(2)")
    u = vexp.GridFunction.preset(g, "hat(1)")
    assert vexp.eval_R(p, 1.0, vexp.make_quartic(1.0), u) == pytest.approx(1.9296875)


def test_scenario_round_trip():
    code, summary, csv = vexp.run({"grid": {"nodes": 33}, "potential": {"preset": "quartic"}, "mode": "hj2"}, "solve")
    assert code == 0
    assert summary["converged"] is True
    assert summary["certification"]["pass"] is True
    assert csv.startswith("x,u\n")
    config = (SOURCE / "configs" / "j2_nonsmooth.json").read_text()
    code, summary, _ = vexp.run(config, "audit")
    assert code == 0
    assert summary["resolved_mode"] == "hj2"


def test_config_errors():
    with pytest.raises(vexp.ConfigError, match="solver.path_nodez"):
        vexp.run({"solver": {"path_nodez": 3}}, "solve")
    with pytest.raises(vexp.ConfigError):
        vexp.run("{}", "bogus")
