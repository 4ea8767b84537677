"""
Tests for builtin prepotentials and the embedding of the graph v = dF/dw.
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from geometry.exceptions import ArityError, DomainError, UnknownPrepotentialError
from geometry.prepotential import (BUILTINS, builtin, builtin_source, cubic_form, domain_box,
                                   embed, resolve, tangent_frame)
from geometry.symplectic import frame_matrices


def test_cubic_embedding_fixture():
    chart = embed(builtin('cubic', 1), [1 + 2j])

    assert_allclose(chart.x, [-3.0, 2.0], atol=1e-12)
    assert_allclose(chart.xi, [1.0, 4.0], atol=1e-12)
    assert chart.phi == pytest.approx(2 / 3, abs=1e-12)
    assert chart.value == pytest.approx((-11 - 2j) / 3)
    assert chart.n == 1


def test_quadratic_embedding():
    chart = embed(builtin('quad_plus', 1), [1.0])

    assert_allclose(chart.x, [1.0, 0.0])
    assert_allclose(chart.xi, [1.0, 0.0])
    assert chart.phi == pytest.approx(0.5)


@pytest.mark.parametrize('a, b', [(0.3, -1.1), (-1.5, 0.2), (0.0, 0.0)])
def test_quadratic_potential_is_half_norm(a, b):
    chart = embed(builtin('quad_plus', 1), [complex(a, b)])

    assert chart.phi == pytest.approx(0.5 * (a * a + b * b))


def test_cubic_form():
    assert cubic_form(builtin('cubic', 1), [1 + 2j]).theta[0, 0, 0] == pytest.approx(2.0)
    theta = cubic_form(builtin('mixed2'), [1.0 + 0j, 0.5 + 0j]).theta

    assert theta[0, 0, 1] == pytest.approx(2.0)
    assert theta[1, 0, 0] == pytest.approx(2.0)
    assert theta[0, 0, 0] == pytest.approx(0.0)
    assert theta[1, 1, 1] == pytest.approx(0.0)


def test_tangent_frame_columns():
    A, B = frame_matrices(tangent_frame(builtin('cubic', 1), [1 + 2j]))

    assert_allclose(A, [[2.0, -4.0], [0.0, 1.0]])
    assert_allclose(B, [[1.0, 0.0], [4.0, 2.0]])


@pytest.mark.parametrize('name', BUILTINS)
def test_builtin_sources_parse(name):
    n = 2
    text, n = builtin_source(name, n)

    assert builtin(name, n).n == n
    assert text


def test_builtin_defaults_and_errors():
    assert builtin('quad_plus').n == 1
    assert builtin_source('cubic', 2)[0] == 'w1^3/3+w2^3/3'
    with pytest.raises(ArityError):
        builtin('mixed2', 3)
    with pytest.raises(UnknownPrepotentialError):
        builtin('quartic', 1)
    with pytest.raises(UnknownPrepotentialError):
        domain_box('quartic', 1)


def test_domain_boxes():
    box = domain_box('cubic', 2)

    assert box.shape == (4, 2)
    assert_allclose(box[:2], [[0.5, 2.0]] * 2)
    assert_allclose(domain_box('quad_minus', 3), [[-2.0, 2.0]] * 6)


def test_resolve():
    name, expr = resolve('cubic', 2)
    assert name == 'cubic'
    assert expr.n == 2

    name, expr = resolve('w1^2*w2 + w2^3', 2)
    assert name is None
    assert expr.evaluate([1, 2]) == pytest.approx(10)

    with pytest.raises(ArityError):
        resolve('w1^2')


def test_embedding_outside_the_analyticity_domain():
    with pytest.raises(DomainError):
        embed(resolve('log(w1)', 1)[1], [-1.0 + 0j])


def test_embedding_accepts_scalars_and_lists():
    a = embed(builtin('cubic', 1), 1 + 2j)
    b = embed(builtin('cubic', 1), np.array([1 + 2j]))

    assert_allclose(a.x, b.x)
    assert a.tau.shape == (1, 1)


@pytest.mark.parametrize('name, n, w0, direction', [
    ('cubic', 1, [1 + 2j], [0.3 - 0.4j]),
    ('mixed2', 2, [1.2 + 0.3j, 0.8 - 0.2j], [0.1 + 0.2j, -0.3 + 0.1j]),
    ('quad_minus', 2, [0.5 - 1.0j, 1.5 + 0.5j], [1.0, 1j]),
])
def test_phi_is_a_potential_for_xi(name, n, w0, direction):
    # d(phi)/dt = xi . dx/dt along w(t) = w0 + t * direction
    F = builtin(name, n)
    w0, direction = np.asarray(w0), np.asarray(direction)
    h = 1e-4
    for t in np.linspace(-0.2, 0.2, 5):
        plus, minus = embed(F, w0 + (t + h) * direction), embed(F, w0 + (t - h) * direction)
        chart = embed(F, w0 + t * direction)
        d_phi = (plus.phi - minus.phi) / (2 * h)
        d_x = (plus.x - minus.x) / (2 * h)
        assert d_phi == pytest.approx(chart.xi @ d_x, abs=1e-6)


@pytest.mark.parametrize('name, n, w', [
    ('cubic', 2, [0.9 - 0.3j, 1.6 + 0.8j]),
    ('mixed2', 2, [1.2 + 0.3j, 0.8 - 0.2j]),
])
def test_tangent_frame_matches_embedding_differences(name, n, w):
    F = builtin(name, n)
    w = np.asarray(w)
    h = 1e-4
    frame = tangent_frame(F, w)
    for k in range(n):
        for column, step in ((k, h), (n + k, 1j * h)):
            e = np.zeros(n, dtype=complex)
            e[k] = step
            plus, minus = embed(F, w + e), embed(F, w - e)
            assert_allclose(frame[column].a, (plus.x - minus.x) / (2 * h), atol=1e-6)
            assert_allclose(frame[column].alpha, (plus.xi - minus.xi) / (2 * h), atol=1e-6)


def test_cubic_form_matches_differences_of_tau():
    F = resolve('exp(w1)*w2^2 + w1^4/12', 2)[1]
    w = np.array([0.3 + 0.2j, -0.5 + 0.7j])
    h = 1e-4
    theta = cubic_form(F, w).theta
    for c in range(2):
        e = np.zeros(2, dtype=complex)
        e[c] = h
        d_tau = (embed(F, w + e).tau - embed(F, w - e).tau) / (2 * h)
        assert_allclose(theta[:, :, c], d_tau, atol=1e-6)
    assert abs(theta[0, 0, 0]) > 0.1
