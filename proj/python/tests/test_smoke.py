import math

import numpy as np
import pytest

import nodallab as nl


def test_exponents():
    p = nl.ProblemParams(1.5, 1.0, 2.0)
    d = nl.derived_exponents(p)
    assert d["gamma_q"] == 4.0
    assert d["beta_q"] == 3
    assert d["k_bar"] == 8
    assert nl.admissible_orders(p) == [1, 2, 3, 4]


def test_beta_gaps_positive_and_shrinking():
    gaps = nl.beta_k_gaps(nl.ProblemParams(1.5, 1, 1), 30)
    assert all(g > 0 for g in gaps)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_precondition_error_kind():
    with pytest.raises(nl.NodallabError) as info:
        nl.construct_uk(nl.ProblemParams(1.0, 1.0, 1.0), 4)
    assert info.value.kind == "precondition"
    assert "k_bar=4" in str(info.value)
    with pytest.raises(nl.NodallabError):
        nl.ProblemParams(2.0, 1.0, 1.0)


def test_construct_u5():
    p = nl.ProblemParams(1.0, 1.0, 4.0)
    r = nl.construct_uk(p, 5, arc_nodes=1024)
    assert r.k == 5
    assert r.energy_drift < 1e-6
    z = nl.profile_zero_structure(r.profile)
    assert z["count"] == 10
    u = r.field()
    assert nl.N(u, (0.0, 0.0), 1.0, 1.0, theta_nodes=4096) == pytest.approx(2.0, abs=1e-3)
    order = nl.estimate_order(u, (0.0, 0.0), nl.dyadic_ladder(0.5, 8))
    assert order["snapped"] == 2.0
    assert order["snapped_to_gamma_q"]


def test_profile_arrays_round_trip(tmp_path):
    p = nl.ProblemParams(1.5, 1.0, 2.0)
    r = nl.construct_uk(p, 9, arc_nodes=256)
    path = tmp_path / "u9.txt"
    nl.save(r.profile, path)
    back = nl.load(path)
    assert isinstance(back, nl.AngularProfile)
    np.testing.assert_array_equal(back.values, r.profile.values)
    assert back.params.q == 1.5


def test_catalogue_functionals():
    harmonic = nl.ProblemParams(1.0, 1.0, 1.0, 0.0)
    x1 = nl.PlanarField.from_name("linear", harmonic)
    assert nl.H(x1, (0.0, 0.0), 1.0) == pytest.approx(math.pi)
    assert nl.h1_norm(x1, (0.0, 0.0), 1.0) == pytest.approx(math.sqrt(2 * math.pi))
    v = nl.blow_up(x1, (0.0, 0.0), 0.1)
    assert v.eval(0.5, 0.0) == pytest.approx(0.5 / math.sqrt(2 * math.pi))


def test_grid_field_from_numpy():
    n = 65
    xs = np.linspace(-1.0, 1.0, n)
    X, Y = np.meshgrid(xs, xs)
    f = nl.PlanarField.grid(X**2 - Y**2, nl.ProblemParams(1.0, 1, 1, 0.0))
    assert f.eval(0.5, 0.25) == pytest.approx(0.1875, abs=1e-3)
    with pytest.raises(nl.NodallabError):
        nl.PlanarField.grid(np.zeros((3, 4)), nl.ProblemParams(1.0, 1, 1, 0.0))


def test_nodal_set():
    harmonic = nl.ProblemParams(1.0, 1.0, 1.0, 0.0)
    s = nl.extract_nodal_set(nl.PlanarField.from_name("saddle", harmonic), 128)
    assert s.segments.shape[1] == 4
    assert len(s.singular_points) == 1
    assert s.length(1.0) == pytest.approx(4.0, rel=1e-2)
    assert s.svg().count("<polyline") == 4


def test_hamiltonian():
    t = nl.hamiltonian_cauchy(nl.ProblemParams(1.0, 1.0, 1.0), 1.0, 0.0, 1e-3, 2000)
    assert t["drift"] < 1e-8
    assert len(t["w"]) == 2001


def test_verify_single_suite():
    assert "recurrences" in nl.suite_names()
    rep = nl.verify(["recurrences"])
    assert rep["all_pass"]
    with pytest.raises(nl.NodallabError):
        nl.verify(["nope"])
