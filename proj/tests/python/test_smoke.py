"""Smoke tests for the python bindings."""

import math

import pytest

morseflow = pytest.importorskip("morseflow")


def test_fixture_registry():
    names = morseflow.builtin_fixtures()
    assert "round-sphere" in names
    assert "torus-cosine" in names


def test_round_sphere_pipeline():
    rep = morseflow.run_scene("round-sphere")
    assert rep["exit_status"] == 0
    assert rep["betti"] == [1, 0, 1]
    assert len(rep["critical_points"]) == 2


def test_critical_points_torus():
    crits = morseflow.critical_points("torus-cosine")
    assert len(crits) == 4
    indices = sorted(c["index"] for c in crits)
    assert indices == [0, 1, 1, 2]


def test_monkey_saddle_report_status():
    rep = morseflow.run_scene("monkey-saddle")
    assert rep["exit_status"] == 2
    assert any("MorseViolation" in w for w in rep["warnings"])


def test_abstract_homology():
    gens = [[("z", 0.0)], [("y", 2.0)], [("x1", 5.0), ("x2", 4.0)]]
    boundaries = [[], [[0]], [[1, 1]]]
    out = morseflow.homology_of_complex(gens, boundaries)
    assert out["boundary_squared_ok"]
    assert out["betti"] == [1, 0, 1]
    assert out["action_gap"] == pytest.approx(5.0)


def test_spectral_number():
    gens = [[("z", 0.0)], [("y", 2.0)], [("x1", 5.0), ("x2", 4.0)]]
    boundaries = [[], [[0]], [[1, 1]]]
    sigma = morseflow.spectral_number(gens, boundaries, 2, [1, 1])
    assert sigma == pytest.approx(5.0)


def test_fredholm_index():
    out = morseflow.fredholm_index("full-line", [-1.0], [1.0])
    assert out["index"] == 1
    assert out["dim_ker"] == 1
    assert out["matches"]


def test_infinitesimal_glue():
    out = morseflow.infinitesimal_glue([-1.0, 1.0], 2.0, [1.0], [1.0])
    b1, b2, b3, b4 = out["blocks"]
    assert b1[0] == pytest.approx(math.exp(-4.0), abs=1e-8)
    assert b2[0] == pytest.approx(1.0)
    assert out["max_error"] < 1e-8


def test_integrate_flow():
    out = morseflow.integrate_flow("round-sphere", [1.0, 0.0, 0.0])
    assert out["target"] is not None
    assert out["energy"] == pytest.approx(1.0, abs=1e-5)
    assert out["monotone_violation"] <= 1e-9
