"""
Tests for the induced special pseudo-Kahler structure.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from geometry.exceptions import DegenerateMetricError, NoConvergenceError, SingularJacobianError
from geometry.hyperkahler import closedness_residual
from geometry.prepotential import builtin, domain_box, embed, resolve
from geometry.special_kahler import (InversionCache, chart_derivative, compatibility_residuals,
                                     dnabla_I_residual, hamiltonian_field_check, holomorphic_coords,
                                     invert_chart, kahler_potential_residual, legendre_dual,
                                     recover_xi, signature, sk_point, xi_recovery_residual)

CUBIC = builtin('cubic', 1)
W0 = [1 + 2j]

SAMPLES = [
    ('quad_plus', 2, [0.4 - 1.3j, -0.8 + 0.6j]),
    ('quad_minus', 1, [1.1 + 0.7j]),
    ('cubic', 1, [1 + 2j]),
    ('cubic', 2, [0.9 - 0.3j, 1.6 + 0.8j]),
    ('mixed2', 2, [1.2 + 0.3j, 0.8 - 0.2j]),
]


def test_cubic_metric_fixture():
    point = sk_point(CUBIC, W0)

    assert_allclose(point.g, [[0.5, 2.0], [2.0, 10.0]], atol=1e-12)
    assert np.linalg.det(point.g) == pytest.approx(1.0, abs=1e-12)
    assert_allclose(point.I, [[-2.0, -10.0], [0.5, 2.0]], atol=1e-12)
    assert point.signature == (2, 0)
    assert point.asymmetry < 1e-12


def test_cubic_metric_against_finite_differences():
    fd = chart_derivative(CUBIC, W0, lambda w: embed(CUBIC, w).xi, 1e-4)

    assert_allclose(fd, sk_point(CUBIC, W0).g, atol=1e-6)


def test_fourth_order_stencil_is_sharper():
    exact = sk_point(CUBIC, W0).g
    xi = lambda w: embed(CUBIC, w).xi  # noqa: E731
    second = np.max(np.abs(chart_derivative(CUBIC, W0, xi, 1e-2) - exact))
    fourth = np.max(np.abs(chart_derivative(CUBIC, W0, xi, 1e-2, accuracy=4) - exact))

    assert fourth < second / 10


def test_chart_derivative_rejects_unknown_accuracy():
    with pytest.raises(ValueError):
        chart_derivative(CUBIC, W0, lambda w: embed(CUBIC, w).xi, 1e-3, accuracy=3)


@pytest.mark.parametrize('name, expected', [('quad_plus', (2, 0)), ('quad_minus', (0, 2))])
def test_quadratic_metrics(name, expected):
    point = sk_point(builtin(name, 1), [0.7 - 0.2j])
    sign = 1.0 if name == 'quad_plus' else -1.0

    assert_allclose(point.g, sign * np.eye(2), atol=1e-15)
    assert point.signature == expected


@pytest.mark.parametrize('name, n, w', SAMPLES)
def test_compatibility(name, n, w):
    point = sk_point(builtin(name, n), w)
    residuals = compatibility_residuals(point)

    assert set(residuals) == {'i_squared', 'i_g_orthogonal', 'i_symplectic', 'metric_from_omega'}
    assert max(residuals.values()) < 1e-9
    assert point.asymmetry < 1e-9


def test_signature_is_locally_constant():
    signatures = {sk_point(CUBIC, [complex(a, b)]).signature
                  for a in np.linspace(0.5, 2.0, 5) for b in np.linspace(-1.0, 1.0, 5)}

    assert signatures == {(2, 0)}


def test_mirrored_cubic_branch_is_negative_definite():
    assert sk_point(CUBIC, [-1 + 0.5j]).signature == (0, 2)


def test_degenerate_metric():
    with pytest.raises(DegenerateMetricError):
        signature(np.diag([1.0, 1e-12]))
    assert signature(np.diag([1.0, -3.0])) == (1, 1)


def test_non_transversal_point():
    with pytest.raises(SingularJacobianError):
        sk_point(CUBIC, [2j])


@pytest.mark.parametrize('w_true, guess', [
    ([1.2 + 0.3j], [1.0 + 0j]),
    ([0.6 - 0.9j], [1.5 + 0.5j]),
])
def test_invert_chart(w_true, guess):
    target = embed(CUBIC, w_true).x
    w = invert_chart(CUBIC, target, guess)

    assert_allclose(w, w_true, atol=1e-10)
    assert np.max(np.abs(embed(CUBIC, w).x - target)) < 1e-11


def test_invert_xi_chart():
    F = builtin('mixed2')
    w_true = np.array([1.3 + 0.1j, 0.7 - 0.3j])
    w = invert_chart(F, embed(F, w_true).xi, [1.0 + 0j, 1.0 + 0j], projection='xi')

    assert_allclose(w, w_true, atol=1e-10)


def test_invert_chart_towards_fold_is_singular():
    # x = (-4, 2) lies over a = 0, where dx/d(Re w) vanishes
    with pytest.raises(SingularJacobianError):
        invert_chart(CUBIC, [-4.0, 2.0], W0)


def test_invert_chart_respects_iteration_budget():
    with pytest.raises(NoConvergenceError):
        invert_chart(CUBIC, embed(CUBIC, [1.8 - 0.7j]).x, [0.6 + 0.4j], max_iter=1)


def test_invert_chart_reads_settings(settings):
    settings.GEOMETRY = {**settings.GEOMETRY, 'NEWTON_MAX_ITER': 0}

    with pytest.raises(NoConvergenceError):
        invert_chart(CUBIC, embed(CUBIC, [1.8 - 0.7j]).x, W0)


def test_invert_chart_rejects_unknown_projection():
    with pytest.raises(ValueError):
        invert_chart(CUBIC, [0.0, 0.0], W0, projection='y')


@pytest.mark.parametrize('name, n, w', SAMPLES)
def test_hamiltonian_field_jacobian_is_I(name, n, w):
    assert hamiltonian_field_check(builtin(name, n), w) < 1e-5


@pytest.mark.parametrize('name, n, w', SAMPLES)
def test_I_is_d_nabla_closed(name, n, w):
    assert dnabla_I_residual(builtin(name, n), w) < 1e-4


def test_dnabla_residual_with_smaller_step():
    assert dnabla_I_residual(CUBIC, W0, step=5e-4) < 1e-4


def test_holomorphic_coordinates():
    z, residual = holomorphic_coords(CUBIC, W0)

    assert_allclose(z, [-3 + 4j, 2 - 1j], atol=1e-12)
    assert residual < 1e-12


@pytest.mark.parametrize('name, n, w', SAMPLES)
def test_dz_has_type_10(name, n, w):
    assert holomorphic_coords(builtin(name, n), w)[1] < 1e-9


@pytest.mark.parametrize('name, n, w', SAMPLES)
def test_kahler_potential(name, n, w):
    assert kahler_potential_residual(builtin(name, n), w) < 1e-4


@pytest.mark.parametrize('name', ['quad_plus', 'quad_minus'])
def test_kahler_potential_is_exact_on_quadratics(name):
    assert kahler_potential_residual(builtin(name, 2), [0.5 + 0.5j, -1.0 + 0.2j]) < 1e-10


def test_legendre_dual():
    phi_star, residual = legendre_dual(CUBIC, W0)

    assert phi_star == pytest.approx(13 / 3, abs=1e-12)
    assert residual < 1e-5


@pytest.mark.parametrize('name, n, w', SAMPLES)
def test_legendre_dual_gradient(name, n, w):
    assert legendre_dual(builtin(name, n), w)[1] < 1e-5


def test_recover_xi_on_cubic():
    start = embed(CUBIC, W0).x
    path = [start, start + [0.3, 0.0], start + [0.3, 0.4]]
    recovery = recover_xi(CUBIC, path, W0, panels=100)

    assert recovery.mismatch < 1e-6
    assert_allclose(recovery.estimate, embed(CUBIC, recovery.w_end).xi, atol=1e-6)


def test_recover_xi_on_quadratic_is_exact():
    F = builtin('quad_minus', 1)
    path = [[0.0, 0.0], [1.0, 0.5], [-0.5, 1.5]]
    recovery = recover_xi(F, path, [0j], panels=4)

    assert recovery.mismatch < 1e-10


def test_recovered_xi_is_path_independent():
    assert xi_recovery_residual(CUBIC, W0, offset=0.1, panels=50) < 1e-6


def test_recover_xi_needs_a_path():
    with pytest.raises(ValueError):
        recover_xi(CUBIC, [[0.0, 0.0]], W0)


def test_inversion_cache_shares_solves_between_checks():
    cache = InversionCache(CUBIC)
    dnabla = dnabla_I_residual(CUBIC, W0, cache=cache)
    solves = len(cache)
    kahler = kahler_potential_residual(CUBIC, W0, cache=cache)

    assert solves == 8
    assert len(cache) == solves
    assert cache.hits == solves
    assert dnabla == dnabla_I_residual(CUBIC, W0)
    assert kahler == kahler_potential_residual(CUBIC, W0)


def test_inversion_cache_keeps_charts_apart():
    cache = InversionCache(CUBIC)
    legendre_dual(CUBIC, W0, cache=cache)
    hamiltonian_field_check(CUBIC, W0, cache=cache)

    assert cache.hits == 0
    assert len(cache) == 8


@pytest.mark.parametrize('w', [[0.4 - 1.3j], [1.5 + 0.2j], [-0.7 + 0.9j]])
def test_quad_plus_is_its_own_legendre_dual(w):
    F = builtin('quad_plus', 1)
    chart = embed(F, w)
    phi_star, residual = legendre_dual(F, w)

    assert_allclose(chart.xi, chart.x, atol=1e-15)
    assert phi_star == pytest.approx(chart.phi, abs=1e-12)
    assert residual < 1e-8


# exp(w1) has g_11 = 1/x_1 and g_12 = tan x_2, so no residual is a polynomial in x
EXP = resolve('exp(w1)', 1)[1]
W_EXP = [0.3 + 0.4j]

EXTERIOR_CHECKS = [dnabla_I_residual, kahler_potential_residual, closedness_residual]


@pytest.mark.parametrize('check', EXTERIOR_CHECKS)
@pytest.mark.parametrize('accuracy, steps', [(2, (2e-2, 1e-2)), (4, (4e-2, 2e-2))])
def test_exterior_residuals_shrink_with_the_step(settings, check, accuracy, steps):
    settings.GEOMETRY = {**settings.GEOMETRY, 'FD_EXTERIOR_ACCURACY': accuracy}
    coarse, fine = (check(EXP, W_EXP, step) for step in steps)

    assert fine < coarse / 3


@pytest.mark.parametrize('check', [hamiltonian_field_check, lambda F, w, step: legendre_dual(F, w, step)[1]])
def test_gradient_residuals_shrink_with_the_step(check):
    coarse, fine = (check(EXP, W_EXP, step) for step in (2e-2, 1e-2))

    assert fine < coarse / 3


@pytest.mark.parametrize('name', ['quad_plus', 'quad_minus', 'cubic', 'mixed2'])
def test_compatibility_on_the_sampling_box(name):
    F = builtin(name, 2)
    box = domain_box(name, 2)
    rng = np.random.default_rng(300)
    for p in rng.uniform(box[:, 0], box[:, 1], size=(300, 4)):
        point = sk_point(F, p[:2] + 1j * p[2:])
        assert max(compatibility_residuals(point).values()) < 1e-9
        assert point.asymmetry < 1e-9
