import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from qtzopt.benchfns import (FUNCTION_NAMES, central_difference, grid_optimum, make_function, washboard,
                             washboard_grad, washboard_min)
from qtzopt.errors import DomainError


@pytest.mark.parametrize("name,point,value", [
    ("drop_wave", [0, 0], 0.0),
    ("salomon", [0, 0], 0.0),
    ("xin_she_yang_n4", [0, 0, 0, 0], 1.0),
    ("rosenbrock2d", [1, 1], 0.0),
    ("powell", [0, 0, 0, 0], 0.0),
    ("whitley", [0, 0], 0.0),
])
def test_known_optima_exact(name, point, value):
    assert abs(make_function(name).evaluate(point) - value) <= 1e-12


def test_ackley_origin_is_zero_up_to_rounding():
    assert abs(make_function("ackley").evaluate([0, 0])) < 1e-15


def test_domains_and_dimensions():
    eg = make_function("eggholder")
    assert eg.lower.tolist() == [400, 300] and eg.upper.tolist() == [600, 500]
    assert make_function("rosenbrock100d").dim == 100
    assert make_function("powell_d4").dim == 4
    assert make_function("Schaffel N2").name == "schaffer_n2"
    with pytest.raises(DomainError):
        make_function("drop_wave", dim=3)
    with pytest.raises(DomainError):
        make_function("no_such_function")
    with pytest.raises(DomainError):
        make_function("salomon").evaluate([0, 0, 0])


# Grid oracle (2001 x 2001 nodes over the box, then Nelder-Mead), computed once and frozen.
@pytest.mark.parametrize("name,x_star,f_star", [
    ("eggholder", (558.32299, 449.19377), -72.158182),
    ("schaffer_n2", (0.0, 0.0), 0.0),
    ("rosenbrock_modification", (-0.909554, -0.950572), 34.040243),
])
def test_grid_oracle_optima(name, x_star, f_star):
    x, f = grid_optimum(make_function(name), points_per_axis=801)
    assert np.allclose(x, x_star, atol=1e-4)
    assert math.isclose(f, f_star, abs_tol=1e-5)


def test_printed_optima_that_are_not_minimisers():
    # the tabulated points are kept on the objects but are not used as targets
    assert make_function("eggholder").optimum_value > 100
    assert make_function("schaffer_n2").optimum_value > 0.99


@pytest.mark.parametrize("name", [n for n in FUNCTION_NAMES if make_function(n).has_analytic_gradient])
def test_analytic_gradients_match_finite_differences(name):
    fn = make_function(name)
    rng = np.random.default_rng(11)
    for _ in range(100):
        x = fn.lower + (fn.upper - fn.lower) * (0.02 + 0.96 * rng.random(fn.dim))
        g = fn.gradient(x)
        fd = central_difference(fn.func, x)
        assert np.max(np.abs(g - fd)) <= 1e-4 * max(1.0, np.max(np.abs(fd)))


def test_xin_she_yang_uses_finite_differences():
    fn = make_function("xin_she_yang_n4")
    assert not fn.has_analytic_gradient
    assert fn.gradient(np.full(4, 0.3)).shape == (4,)


@given(st.floats(-20, 20), st.sampled_from([3.0, 10.0]))
def test_washboard_formula_and_gradient(x, a):
    assert math.isclose(washboard(a, x), 0.125 * x * x + 2 * math.sin(a * x) + 2, abs_tol=1e-12)
    h = 1e-6
    fd = (washboard(a, x + h) - washboard(a, x - h)) / (2 * h)
    assert math.isclose(washboard_grad(a, x), fd, abs_tol=1e-5)


@pytest.mark.parametrize("alpha,x_star,f_star", [
    (3.0, -0.5164256, 0.0337999972),
    (10.0, -0.1568835, 0.0030804009),
])
def test_washboard_minimum(alpha, x_star, f_star):
    x, f = washboard_min(alpha)
    assert math.isclose(x, x_star, abs_tol=1e-6) and math.isclose(f, f_star, abs_tol=1e-9)
    # independent check with a bracketed scalar minimiser
    ref = minimize_scalar(lambda t: washboard(alpha, t), bracket=(x_star - 0.1, x_star, x_star + 0.1),
                          tol=1e-12)
    assert f <= ref.fun + 1e-12
