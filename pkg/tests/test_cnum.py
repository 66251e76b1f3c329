import math

import mpmath
import numpy as np
import pytest
import scipy.special as sps
from hypothesis import given, strategies as st

from halfspace.cnum import (Const, PathSpec, Z, cerf, erfi, exp, holomorphic_derivative_fd, integrate_holomorphic,
                            integrate_polyline, integrate_segments, log, parse, ray_tail_bound)
from halfspace.cnum.expr import Pow
from halfspace.errors import ExpressionSyntaxError, QuadratureError


def erfi_series(x, terms=30):
    # independent oracle: (2/sqrt(pi)) sum x^{2k+1} / (k! (2k+1))
    return 2 / math.sqrt(math.pi) * sum(x ** (2 * k + 1) / (math.factorial(k) * (2 * k + 1)) for k in range(terms))


def test_erf_zero_and_odd():
    assert cerf(0j) == 0
    z = 0.7 + 0.3j
    assert cerf(-z) == -cerf(z)


def test_erfi_one_series_oracle():
    assert erfi(1.0) == pytest.approx(erfi_series(1.0), rel=1e-14)
    assert erfi(1.0).real == pytest.approx(1.650425758797543, rel=1e-15)


def test_cerf_vs_mpmath(rng):
    r = 8 * np.sqrt(rng.random(400))
    th = 2 * np.pi * rng.random(400)
    z = r * np.exp(1j * th)
    got = cerf(z)
    for zi, gi in zip(z, got):
        ref = complex(mpmath.erf(mpmath.mpc(zi.real, zi.imag)))
        if abs(ref) > 1e300:
            continue
        assert abs(gi - ref) <= 1e-12 * abs(ref) + 1e-300


def test_cerf_vs_scipy_moderate(rng):
    z = (rng.random(2000) - 0.5) * 6 + 1j * (rng.random(2000) - 0.5) * 6
    ref = sps.erf(z)
    np.testing.assert_allclose(cerf(z), ref, rtol=1e-12, atol=0)


@given(st.floats(-4, 4), st.floats(-4, 4))
def test_symmetries(x, y):
    z = complex(x, y)
    if abs(z) > 4:
        return
    e = cerf(z)
    assert abs(cerf(-z) + e) <= 1e-12 * max(1, abs(e))
    assert abs(cerf(z.conjugate()) - e.conjugate()) <= 1e-12 * max(1, abs(e))


def test_saturation_flag():
    val, ok = cerf(1j * 40.0, full_output=True)
    assert not ok and np.isfinite(val)
    val, ok = cerf(3 + 1j, full_output=True)
    assert ok


def test_erfi_quadrature_vs_series():
    xs = np.linspace(0, 3, 31)
    f = Const(2 / math.sqrt(math.pi)) * exp(Z * Z)
    q, _ = integrate_segments(f, np.zeros_like(xs), xs, tol=1e-13)
    assert np.max(np.abs(q.real - [erfi_series(x, 80) for x in xs])) <= 1e-10


def test_integrals():
    assert integrate_holomorphic(exp(Z), PathSpec.segment(0, 1)) == pytest.approx(math.e - 1, abs=1e-13)
    f = Const(2 / math.sqrt(math.pi)) * exp(-(Z * Z))
    val = integrate_holomorphic(f, PathSpec.segment(0, 1.3), tol=1e-12)
    assert abs(val - cerf(1.3)) <= 1e-10
    f = exp(Z * Z) * Z + Z ** 3
    a = integrate_polyline(f, [0, 1, 1 + 1j])
    b = integrate_polyline(f, [0, 0.2j, 0.7 + 0.4j, 1 + 1j])
    assert abs(a - b) <= 1e-10


def test_ray_tail_bound_and_failure():
    f = exp(-(Z * Z))
    path = PathSpec.ray(0, 0.0, 6.0)
    val, err = integrate_holomorphic(f, path, tol=1e-12, tail=(1.0, -1.0), full_output=True)
    assert abs(val - math.sqrt(math.pi) / 2) <= err + 1e-15
    assert ray_tail_bound(PathSpec.ray(0, 0.0, 1.0), 1.0, 1.0) == math.inf
    with pytest.raises(QuadratureError) as exc:
        integrate_holomorphic(exp(Const(40) * Z * Z), PathSpec.segment(0, 3), tol=1e-14, max_intervals=8)
    assert np.isfinite(exc.value.error)


def test_empty_segments():
    vals, errs = integrate_segments([exp(Z), Z], np.zeros(0), np.zeros(0))
    assert vals.shape == (0, 2) and errs.shape == (0,)


def test_parse_grammar():
    # implicit products are not part of the grammar
    with pytest.raises(ExpressionSyntaxError):
        parse("2*exp(-5 z^2)")
    e = parse("2*exp(-5*z^2) + 0.5i*z - sqrt(z + 4) / (1 + z)**2")
    z = 0.3 - 0.2j
    ref = 2 * np.exp(-5 * z**2) + 0.5j * z - np.sqrt(z + 4) / (1 + z) ** 2
    assert abs(e(z) - ref) <= 1e-14
    assert parse("2^3^2")(0) == 2 ** 9
    assert parse("-2^2")(0) == -4
    assert parse("pi")(0) == pytest.approx(math.pi)
    for bad in ("2 +", "exp(z", "foo(z)", "z $ 2", ""):
        with pytest.raises(ExpressionSyntaxError):
            parse(bad)


def test_parse_roundtrip_str():
    for text in ("exp(z^2)*(1 - z)", "log(1 + z) / 3", "2.5i*z - 1"):
        e = parse(text)
        z = 0.4 + 0.1j
        assert abs(parse(str(e))(z) - e(z)) <= 1e-14


def random_expr(draw_int, depth):
    if depth == 0:
        return Z if draw_int(0, 1) else Const(complex(draw_int(1, 5), draw_int(-2, 2)) / 4)
    k = draw_int(0, 5)
    a = random_expr(draw_int, depth - 1)
    if k == 0:
        return a + random_expr(draw_int, depth - 1)
    if k == 1:
        return a * random_expr(draw_int, depth - 1)
    if k == 2:
        return exp(a / 4)
    if k == 3:
        return a - random_expr(draw_int, depth - 1)
    if k == 4:
        return Pow(a, Const(2))
    return a / (Const(3) + exp(Z / 4))


@given(st.data())
def test_symbolic_derivative_vs_fd(data):
    depth = data.draw(st.integers(1, 6))
    e = random_expr(lambda a, b: data.draw(st.integers(a, b)), depth)
    z = complex(data.draw(st.floats(-0.8, 0.8)), data.draw(st.floats(-0.8, 0.8)))
    d = e.diff()(z)
    fd = holomorphic_derivative_fd(e, z, h=1e-3)
    if not (np.isfinite(d) and np.isfinite(fd)) or abs(e(z)) > 1e8:
        return
    assert abs(d - fd) <= 1e-7 * max(abs(d), abs(e(z)), 1.0)


def test_log_derivative():
    e = log(Z + 2)
    assert abs(e.diff()(0.5) - 1 / 2.5) <= 1e-15
