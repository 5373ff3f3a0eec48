import numpy as np
import pytest

from debondwave.errors import TypeMismatch
from debondwave.expressions import (
    Affine,
    Const,
    Poly,
    SineMode,
    SpaceTimeField,
    parse_expression,
)


def test_parse_round_trip():
    for text, cls in [("Const(2.5)", Const), ("Affine(1.0, 0.5)", Affine),
                      ("SineMode(1.0, 2)", SineMode), ("Poly(1, -2, 3)", Poly)]:
        expr = parse_expression(text)
        assert isinstance(expr, cls)
        assert isinstance(parse_expression(expr.spec()), cls)


def test_parse_rejects_garbage():
    for text in ["Gaussian(1.0)", "Const(abc)", "Const 1.0", "Poly(1,2", "Const(inf)"]:
        with pytest.raises(TypeMismatch):
            parse_expression(text)


def test_poly_calculus():
    p = Poly(1.0, -2.0, 3.0)  # 1 - 2x + 3x^2
    x = np.linspace(-1, 2, 7)
    assert np.allclose(p(x), 1 - 2 * x + 3 * x ** 2)
    assert np.allclose(p.deriv(x), -2 + 6 * x)
    assert np.allclose(p.deriv2(x), 6.0)
    assert abs(p.integral(0.0, 2.0) - (2 - 4 + 8)) < 1e-14


def test_sine_mode_needs_binding():
    s = SineMode(2.0, 1)
    with pytest.raises(ValueError):
        s(0.5)
    b = s.bound(2.0)
    assert abs(b(1.0) - 2.0) < 1e-14
    assert abs(b.integral(0.0, 2.0) - 2.0 * 4.0 / np.pi) < 1e-14


def test_space_time_field_derivatives():
    F = SpaceTimeField(Poly(0.0, 0.0, 1.0), Poly(0.0, 1.0))  # t * x^2
    assert abs(F(2.0, 3.0) - 18.0) < 1e-14
    assert abs(F.dt(2.0, 3.0) - 9.0) < 1e-14
    assert abs(F.dtt(2.0, 3.0)) < 1e-14
    assert abs(F.dxx(2.0, 3.0) - 4.0) < 1e-14
    assert SpaceTimeField(Const(0.0)).is_zero()
