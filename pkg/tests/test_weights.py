import math

import numpy as np
import pytest

from pspect.weights import Weight


def test_constant_and_poly_eval():
    m = Weight.constant(2.5)
    assert m(0.3) == 2.5
    m2 = Weight.poly([1.0, -2.0])
    rs = np.linspace(0, 1, 11)
    assert np.allclose(m2(rs), 1 - 2 * rs, rtol=0, atol=0)
    assert m2.eval_scalar(0.25) == 0.5


def test_piecewise_continuity_enforced():
    # two linear pieces that disagree at the breakpoint
    with pytest.raises(ValueError, match="discontinuous"):
        Weight((0.0, 0.5, 1.0), ((0.0, 1.0), (0.7, -1.0)))
    # agreeing pieces pass
    w = Weight((0.0, 0.5, 1.0), ((0.0, 1.0), (0.5, -1.0)))
    assert abs(w(0.5) - 0.5) < 1e-15


def test_breakpoint_validation():
    with pytest.raises(ValueError):
        Weight((0.0, 0.5), ((1.0,), (1.0,)))
    with pytest.raises(ValueError):
        Weight((0.1, 1.0), ((1.0,),))
    with pytest.raises(ValueError):
        Weight((0.0, 0.6, 0.4, 1.0), ((1.0,), (1.0,), (1.0,)))


def test_sign_partition_linear():
    m = Weight.poly([1.0, -2.0])  # positive on [0, 0.5), negative after
    (a, b), = m.positive_intervals
    assert abs(a) < 1e-12 and abs(b - 0.5) < 1e-12
    (c, d), = m.negative_intervals
    assert abs(c - 0.5) < 1e-12 and abs(d - 1.0) < 1e-12
    assert abs(m.positive_measure() - 0.5) < 1e-12
    assert m.in_M()
    assert m.negated().in_M()


def test_sign_partition_cosine():
    m = Weight.from_function(lambda r: math.cos(3 * math.pi * r))
    pos = m.positive_intervals
    assert len(pos) == 2
    assert abs(pos[0][1] - 1 / 6) < 1e-9
    assert abs(pos[1][0] - 1 / 2) < 1e-9 and abs(pos[1][1] - 5 / 6) < 1e-9
    assert abs(m.positive_measure() - 0.5) < 1e-9


def test_from_function_interpolation_accuracy():
    m = Weight.from_function(lambda r: math.cos(3 * math.pi * r))
    rs = np.linspace(0, 1, 1777)
    assert np.max(np.abs(m(rs) - np.cos(3 * math.pi * rs))) < 1e-12


def test_negated_scaled_shifted():
    m = Weight.poly([1.0, -2.0])
    rs = np.linspace(0, 1, 101)
    assert np.allclose(m.negated()(rs), -(1 - 2 * rs), atol=0)
    assert np.allclose(m.scaled(3.0)(rs), 3 * (1 - 2 * rs), atol=0)
    assert np.allclose(m.shifted(0.5)(rs), 1.5 - 2 * rs, atol=0)


def test_constant_sign_weight_not_in_M_when_negative():
    m = Weight.constant(-1.0)
    assert not m.in_M()
    assert m.negated().in_M()


def test_from_spec_forms_and_rejections():
    m = Weight.from_spec({"expr": "poly", "coeffs": [1.0, -2.0]})
    assert m(0.0) == 1.0
    m2 = Weight.from_spec(
        {"breakpoints": [0.0, 0.5, 1.0], "coeffs": [[0.0, 1.0], [0.5, -1.0]]}
    )
    assert abs(m2(0.75) - 0.25) < 1e-15
    with pytest.raises(ValueError, match="unknown weight expr"):
        Weight.from_spec({"expr": "fourier", "coeffs": [1.0]})
    with pytest.raises(ValueError, match="unknown weight keys"):
        Weight.from_spec({"expr": "poly", "coeffs": [1.0], "degree": 3})
    with pytest.raises(ValueError):
        Weight.from_spec({"coeffs": [[1.0]]})


def test_fingerprint_deterministic_and_distinct():
    a = Weight.poly([1.0, -2.0])
    b = Weight.poly([1.0, -2.0])
    c = Weight.poly([1.0, -2.0000001])
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != c.fingerprint()


def test_scalar_fn_matches_eval():
    for m in (
        Weight.constant(0.7),
        Weight.poly([1.0, -2.0]),
        Weight.poly([0.3, 0.0, 2.0, -1.0]),
        Weight.from_function(lambda r: math.cos(3 * math.pi * r), n_pieces=16),
    ):
        fn = m.scalar_fn()
        for r in np.linspace(0, 1, 37):
            assert abs(fn(float(r)) - m.eval_scalar(float(r))) < 1e-15
