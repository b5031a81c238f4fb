import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phaseless1d import potential as P
from phaseless1d.errors import InvalidPotential


def test_zero_is_valid_with_empty_support():
    v = P.validate(P.zero())
    assert v.support_end == 0.0
    assert P.evaluate(v, 0.3) == 0.0


def test_square_barrier_valid():
    v = P.square_barrier(2.0, 1.0)
    assert P.validate(v) is v
    assert v.support_end == 1.0


def test_negative_support_rejected():
    with pytest.raises(InvalidPotential, match="support violates x >= 0"):
        P.piecewise_constant([(-1.0, 0.0, 5.0)])


@pytest.mark.parametrize("bad", [
    [(0.0, 1.0, float("nan"))],
    [(0.0, float("inf"), 1.0)],
    [(0.0, 1.0, 1.0), (0.5, 2.0, 1.0)],
    [(1.0, 0.5, 1.0)],
])
def test_bad_segments_rejected(bad):
    with pytest.raises(InvalidPotential):
        P.piecewise_constant(bad)


def test_grid_rejects_nonfinite_and_negative_nodes():
    with pytest.raises(InvalidPotential):
        P.grid_sampled([0.0, 1.0], [1.0, np.nan])
    with pytest.raises(InvalidPotential):
        P.grid_sampled([-0.5, 1.0], [1.0, 1.0])


def test_evaluate_barrier():
    v = P.square_barrier(2.0, 1.0)
    assert P.evaluate(v, 0.5) == 2.0
    assert P.evaluate(v, -0.1) == 0.0
    assert P.evaluate(v, 1.5) == 0.0


def test_evaluate_grid_midpoint_interpolates():
    v = P.grid_sampled([0.0, 1.0], [1.0, 3.0])
    assert P.evaluate(v, 0.5) == pytest.approx(2.0)


def test_evaluate_gaussian():
    v = P.truncated_gaussian(2.0, 1.0, 0.5)
    assert P.evaluate(v, 1.0) == pytest.approx(2.0)
    assert P.evaluate(v, -1e-9) == 0.0
    assert abs(P.evaluate(v, v.support_end - 1e-9)) < 1e-11
    assert v.truncation_bound <= 1e-12 * 1.0001


def test_translate():
    v = P.square_barrier(2.0, 1.0)
    assert P.translate(v, 0.0) == v
    w = P.translate(v, 0.5)
    assert w.segments == ((0.5, 1.5, 2.0),)
    with pytest.raises(InvalidPotential):
        P.translate(v, -1.0)


def test_translate_grid_and_gaussian():
    g = P.grid_sampled([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
    assert P.evaluate(P.translate(g, 0.25), 1.25) == pytest.approx(1.0)
    h = P.truncated_gaussian(1.0, 1.0, 0.2, L=2.0)
    assert P.evaluate(P.translate(h, 0.3), 1.3) == pytest.approx(1.0)
    assert P.translate(h, 0.3).support_end == pytest.approx(2.3)


def test_l11_norm_closed_forms():
    assert P.l11_norm(P.zero()) == 0.0
    assert P.l11_norm(P.square_barrier(2.0, 1.0)) == pytest.approx(3.0)
    assert P.l11_norm(P.translate(P.square_barrier(2.0, 1.0), 1.0)) == pytest.approx(5.0)


def test_l11_norm_grid_with_sign_change():
    # v = 1 - 2x on [0, 1]; by hand: 7/24 on [0, 1/2] plus 11/24 on [1/2, 1]
    v = P.grid_sampled([0.0, 1.0], [1.0, -1.0])
    assert P.l11_norm(v) == pytest.approx(0.75, rel=1e-12)


def test_l11_norm_gaussian_matches_quadrature_of_samples():
    v = P.truncated_gaussian(1.5, 1.0, 0.3)
    x = np.linspace(0, v.support_end, 200001)
    ref = np.trapezoid((1 + x) * np.abs(P.evaluate(v, x)), x)
    assert P.l11_norm(v) == pytest.approx(ref, rel=1e-8)


def test_json_round_trip():
    for v in [P.square_barrier(2.0, 1.0), P.double_barrier(1.0, 0.5, 0.3),
              P.truncated_gaussian(1.0, 0.8, 0.2), P.translate(P.truncated_gaussian(1.0, 0.8, 0.2), 0.4),
              P.grid_sampled([0.0, 0.5, 1.0], [0.1, 0.2, 0.3])]:
        w = P.from_dict(json.loads(json.dumps(P.to_dict(v))))
        x = np.linspace(-1, 3, 401)
        np.testing.assert_array_equal(P.evaluate(w, x), P.evaluate(v, x))


def test_preset_descriptions():
    v = P.load('{"kind": "square-barrier", "params": {"V0": 2, "L": 1, "shift": 0.5}}')
    assert v.segments == ((0.5, 1.5, 2.0),)
    with pytest.raises(InvalidPotential):
        P.load('{"kind": "nope"}')
    with pytest.raises(InvalidPotential):
        P.load('{"kind": "square-barrier", "params": {"V0": 2}}')


def test_grid_csv_round_trip(tmp_path):
    x = np.linspace(0, 1, 11)
    v = np.cos(x) / 3
    path = tmp_path / "v.csv"
    P.write_grid_csv(path, x, v, ["made by a test"])
    w = P.load(str(path))
    np.testing.assert_array_equal(np.array(w.values), v)
    desc = tmp_path / "v.json"
    desc.write_text(json.dumps({"kind": "grid", "params": {"path": "v.csv"}}))
    assert P.load(str(desc)).nodes == w.nodes


specs = st.one_of(
    st.builds(P.square_barrier, st.floats(-3, 3), st.floats(0.05, 3)),
    st.builds(P.double_barrier, st.floats(0, 3), st.floats(0.05, 1), st.floats(0, 1)),
    st.builds(P.truncated_gaussian, st.floats(-2, 2), st.floats(0, 2), st.floats(0.05, 1)),
)


@settings(max_examples=60, deadline=None)
@given(specs, st.floats(-50, -1e-12))
def test_zero_left_of_origin(v, x):
    assert P.evaluate(v, x) == 0.0


@settings(max_examples=60, deadline=None)
@given(specs, st.floats(0, 5))
def test_l11_monotone_under_shift(v, y):
    assert P.l11_norm(P.translate(v, y)) >= P.l11_norm(v) - 1e-12


@settings(max_examples=60, deadline=None)
@given(specs, st.floats(0, 5))
def test_validation_idempotent(v, y):
    once = P.translate(P.validate(v), y)
    assert P.validate(once) == once
