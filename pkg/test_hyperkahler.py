"""
Tests for the hyperkahler structure on M x R^{2n}.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from geometry import jets
from geometry.hyperkahler import (MOMENT_SIGNS, calibrate_moment_signs, closedness_residual,
                                  harmonic_residual, hk_frame, hk_potential_check,
                                  j1_potential_residual, j2_projection_residual, laplacian_residual,
                                  legendre_coordinates_residual, moment_map)
from geometry.prepotential import builtin, domain_box, embed
from geometry.special_kahler import InversionCache, kahler_potential_residual

CUBIC = builtin('cubic', 1)
W0 = [1 + 2j]

SAMPLES = [
    ('quad_plus', 1, [0.4 - 1.3j], [0.2, -0.5]),
    ('quad_minus', 2, [1.1 + 0.7j, -0.3 + 0.2j], [0.1, 0.2, 0.3, 0.4]),
    ('cubic', 1, [1 + 2j], [0.3, -0.7]),
    ('cubic', 2, [0.9 - 0.3j, 1.6 + 0.8j], [-1.0, 0.5, 0.0, 0.25]),
    ('mixed2', 2, [1.2 + 0.3j, 0.8 - 0.2j], [0.6, -0.6, 0.9, -0.1]),
]


def test_quadratic_frame_is_flat_quaternionic():
    frame = hk_frame(builtin('quad_plus', 1), [0.3 + 0.8j], [1.0, -2.0])
    zero, eye = np.zeros((2, 2)), np.eye(2)

    assert_allclose(frame.sigma1, np.block([[zero, eye], [-eye, zero]]), atol=1e-15)
    assert_allclose(frame.G, np.eye(4), atol=1e-12)
    assert frame.quaternion_residual() < 1e-12
    assert frame.block_form_residual() < 1e-12


def test_cubic_J3_blocks():
    frame = hk_frame(CUBIC, W0, [0.3, -0.7])
    I = np.array([[-2.0, -10.0], [0.5, 2.0]])

    assert_allclose(frame.J3[:2, 2:], I, atol=1e-12)
    assert_allclose(frame.J3[2:, :2], I, atol=1e-12)
    assert_allclose(frame.J3[:2, :2], 0.0, atol=1e-12)
    assert_allclose(frame.J3 @ frame.J3, -np.eye(4), atol=1e-12)
    assert_allclose(frame.J2[:2, :2], -I, atol=1e-12)
    assert_allclose(frame.J2[2:, 2:], I, atol=1e-12)


@pytest.mark.parametrize('name, n, w, y', SAMPLES)
def test_quaternion_identities_and_metric(name, n, w, y):
    frame = hk_frame(builtin(name, n), w, y)

    assert frame.quaternion_residual() < 1e-9
    assert frame.metric_consistency() < 1e-9
    assert frame.block_form_residual() < 1e-9
    assert np.max(np.abs(frame.G - frame.G.T)) < 1e-10


def test_metric_is_two_copies_of_g():
    frame = hk_frame(CUBIC, W0)
    g = frame.base.g

    assert_allclose(frame.G[:2, :2], g, atol=1e-12)
    assert_allclose(frame.G[2:, 2:], g, atol=1e-12)
    assert_allclose(frame.G[:2, 2:], 0.0, atol=1e-12)


@pytest.mark.parametrize('name, w, expected', [
    ('quad_plus', [0.5 + 0.5j], 'positive'),
    ('quad_minus', [0.5 + 0.5j], 'negative'),
    ('cubic', [1.5 - 0.4j], 'positive'),
])
def test_definiteness_follows_g(name, w, expected):
    assert hk_frame(builtin(name, 1), w).definiteness() == expected


def test_mixed2_metric_is_indefinite():
    assert hk_frame(builtin('mixed2'), [1.2 + 0.3j, 0.8 - 0.2j]).definiteness() == 'indefinite'


def test_frames_do_not_depend_on_y():
    a = hk_frame(CUBIC, W0, [0.0, 0.0])
    b = hk_frame(CUBIC, W0, [5.0, -3.0])

    for left, right in zip((a.sigma1, a.sigma2, a.sigma3, a.J1, a.J2, a.J3, a.G),
                           (b.sigma1, b.sigma2, b.sigma3, b.J1, b.J2, b.J3, b.G)):
        assert np.array_equal(left, right)
    assert not np.array_equal(a.y, b.y)


def test_sigma_forms_are_antisymmetric():
    frame = hk_frame(builtin('mixed2'), [1.2 + 0.3j, 0.8 - 0.2j])

    for sigma in frame.sigmas:
        assert_allclose(sigma, -sigma.T, atol=1e-15)


@pytest.mark.parametrize('name', ['quad_plus', 'quad_minus'])
def test_closedness_on_quadratics(name):
    assert closedness_residual(builtin(name, 2), [0.5 + 0.5j, -1.0 + 0.2j]) < 1e-12


@pytest.mark.parametrize('name, n, w', [
    ('cubic', 1, [1 + 2j]),
    ('cubic', 2, [0.9 - 0.3j, 1.6 + 0.8j]),
    ('mixed2', 2, [1.2 + 0.3j, 0.8 - 0.2j]),
])
def test_closedness(name, n, w):
    assert closedness_residual(builtin(name, n), w) < 1e-4


def test_cubic_moment_map():
    moment = moment_map(CUBIC, W0, [0.3, -0.7])

    assert_allclose(moment.values, [[1.0, 0.7, 2.0]], atol=1e-12)
    assert moment.residual < 1e-5
    assert moment.equivariance == 0.0


@pytest.mark.parametrize('name', ['quad_plus', 'quad_minus'])
def test_moment_map_on_quadratics(name):
    moment = moment_map(builtin(name, 2), [0.5 + 0.5j, -1.0 + 0.2j], [0.1, 0.2, 0.3, 0.4])

    assert moment.values.shape == (2, 3)
    assert moment.residual < 1e-10


@pytest.mark.parametrize('name, n, w, y', SAMPLES)
def test_one_sign_vector_serves_every_builtin(name, n, w, y):
    moment = moment_map(builtin(name, n), w, y)

    assert moment.residual < 1e-5
    assert moment.equivariance == 0.0


def test_moment_map_with_wrong_signs_fails():
    moment = moment_map(CUBIC, W0, [0.3, -0.7], signs=(1, 1, 1))

    assert moment.residual > 0.5


def test_calibrated_signs_match_the_constant():
    assert calibrate_moment_signs() == MOMENT_SIGNS


@pytest.mark.parametrize('name, n', [('quad_plus', 2), ('quad_minus', 1), ('cubic', 3), ('mixed2', 2)])
def test_harmonicity(name, n):
    rng = np.random.default_rng(7)
    F = builtin(name, n)
    for _ in range(20):
        c = rng.uniform(-1.0, 1.0, n)
        p = rng.uniform(-1.5, 1.5, 3)
        assert harmonic_residual(F, c, p) < 1e-10


def test_laplacian_of_non_harmonic_fields():
    assert laplacian_residual(jets.real_jet(lambda p: p[0] * p[0], [1.0, 2.0, 3.0], 2)) == pytest.approx(2.0)
    assert laplacian_residual(jets.real_jet(lambda p: p[0] * p[0] - p[1] * p[1], [1.0, 2.0, 3.0], 2)) == 0.0
    field = lambda p: p[0] * p[0] + p[1] * p[1] + p[2] * p[2]  # noqa: E731
    assert laplacian_residual(jets.real_jet(field, [0.5, -1.0, 2.0], 2)) == pytest.approx(6.0)


def test_harmonicity_reads_the_jet_hessian(monkeypatch):
    broken = jets.CJet3(0j, np.zeros(3, dtype=complex), np.diag([123 - 45j, 0j, 0j]), None, dim=3)
    monkeypatch.setattr(jets, 'holo_jet', lambda *args, **kwargs: broken)

    assert harmonic_residual(CUBIC, [1.0], [1.0, 2.0, 5.0]) == pytest.approx(123.0)


def test_harmonicity_along_a_zero_direction():
    assert harmonic_residual(CUBIC, [0.0], [0.7, -0.2, 1.0]) == 0.0


def test_harmonicity_examples():
    assert harmonic_residual(CUBIC, [1.0], [1.0, 2.0, 5.0]) < 1e-10
    assert harmonic_residual(builtin('mixed2'), [0.0, 0.0], [1.0, 2.0, 3.0]) == 0.0


def test_kahler_potential_is_minus_phi():
    K, k_plus_phi = hk_potential_check(CUBIC, W0)

    assert K == pytest.approx(-2 / 3, abs=1e-12)
    assert k_plus_phi == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize('a, b', [(0.4, -1.2), (1.5, 0.3)])
def test_quadratic_kahler_potential(a, b):
    K, _ = hk_potential_check(builtin('quad_plus', 1), [complex(a, b)])

    assert K == pytest.approx(-0.5 * (a * a + b * b))


@pytest.mark.parametrize('name, n', [('quad_plus', 2), ('quad_minus', 2), ('cubic', 2), ('mixed2', 2)])
def test_k_plus_phi_is_constant(name, n):
    rng = np.random.default_rng(11)
    F = builtin(name, n)
    values = [hk_potential_check(F, rng.uniform(0.5, 1.5, n) + 1j * rng.uniform(-0.5, 0.5, n))[1]
              for _ in range(50)]

    assert np.var(values) < 1e-18


@pytest.mark.parametrize('name, n, w, y', SAMPLES)
def test_j1_potential(name, n, w, y):
    assert j1_potential_residual(builtin(name, n), w, y) < 1e-9


def test_j1_potential_does_not_depend_on_y():
    residuals = {j1_potential_residual(CUBIC, W0, [t, -t]) for t in np.linspace(-2.0, 2.0, 10)}

    assert len(residuals) == 1


@pytest.mark.parametrize('name, n, w, y', SAMPLES)
def test_legendre_coordinates(name, n, w, y):
    assert legendre_coordinates_residual(builtin(name, n), w) < 1e-5


def test_legendre_coordinates_of_cubic_fixture():
    chart = embed(CUBIC, W0)

    assert chart.x[0] == pytest.approx(-3.0)
    assert legendre_coordinates_residual(CUBIC, W0) < 1e-7


@pytest.mark.parametrize('name, n, w, y', SAMPLES)
def test_projection_is_j2_holomorphic_with_degenerate_pullback(name, n, w, y):
    result = j2_projection_residual(builtin(name, n), w, y)

    assert result.holomorphic < 1e-12
    assert result.pullback < 1e-4
    assert result.rank == 2 * n


def test_j2_pullback_is_exact_on_quadratics():
    result = j2_projection_residual(builtin('quad_minus', 2), [0.5 + 0.5j, -1.0 + 0.2j], [0.3, 0.1, -0.2, 0.4])

    assert result.pullback < 1e-10
    assert result.rank == 4


def test_j2_pullback_shares_the_kahler_stencil():
    cache = InversionCache(CUBIC)
    kahler_potential_residual(CUBIC, W0, cache=cache)
    solves = len(cache)
    result = j2_projection_residual(CUBIC, W0, [0.3, -0.7], cache=cache)

    assert len(cache) == solves
    assert cache.hits == solves
    assert result == j2_projection_residual(CUBIC, W0, [0.3, -0.7])


def test_moment_map_accepts_a_shared_cache():
    cache = InversionCache(CUBIC)
    shared = moment_map(CUBIC, W0, [0.3, -0.7], cache=cache)
    again = moment_map(CUBIC, W0, [0.3, -0.7], cache=cache)

    assert cache.hits == len(cache)
    assert shared.residual == again.residual


DEFINITENESS = {'quad_plus': 'positive', 'quad_minus': 'negative', 'cubic': 'positive',
                'mixed2': 'indefinite'}


@pytest.mark.parametrize('name', sorted(DEFINITENESS))
def test_frames_on_the_sampling_box(name):
    F = builtin(name, 2)
    box = domain_box(name, 2)
    rng = np.random.default_rng(301)
    params = rng.uniform(box[:, 0], box[:, 1], size=(300, 4))
    ys = rng.uniform(-1.0, 1.0, size=(300, 4))
    for p, y in zip(params, ys):
        frame = hk_frame(F, p[:2] + 1j * p[2:], y)
        assert frame.quaternion_residual() < 1e-9
        assert frame.metric_consistency() < 1e-9
        assert frame.block_form_residual() < 1e-9
        assert frame.definiteness() == DEFINITENESS[name]


@pytest.mark.parametrize('name', sorted(DEFINITENESS))
def test_k_plus_phi_is_constant_on_the_sampling_box(name):
    F = builtin(name, 2)
    box = domain_box(name, 2)
    rng = np.random.default_rng(302)
    values = [hk_potential_check(F, p[:2] + 1j * p[2:])[1]
              for p in rng.uniform(box[:, 0], box[:, 1], size=(1000, 4))]

    assert np.var(values) < 1e-18
