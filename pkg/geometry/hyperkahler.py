"""
Hyperkahler structure on M x R^{2n} with coordinates (x, y).

Gram matrices on the (d/dx, d/dy) basis:

    sigma1 = [[0, g], [-g, 0]]
    sigma2 = [[s omega, 0], [0, -s omega]]
    sigma3 = [[0, t omega], [t omega, 0]]

with s = +1, t = -1. These are the signs for which J3 = [[0, I], [I, 0]] and
J2 = [[-I, 0], [0, I]] hold exactly, J_i being the compositions
J1 = sigma3^{-1} sigma2, J2 = sigma1^{-1} sigma3, J3 = sigma2^{-1} sigma1.
The metric is then G = -sigma_i J_i = diag(g, g) for every i.
"""

from dataclasses import dataclass
from typing import NamedTuple
import logging

import numpy as np

from . import jets
from .conf import option
from .prepotential import builtin, embed
from .special_kahler import chart_derivative, sk_point

logger = logging.getLogger(__name__)

SIGMA2_SIGN = 1
SIGMA3_SIGN = -1
MOMENT_SIGNS = (1, -1, 1)

SIGN_VECTOR = {
    'sigma2': SIGMA2_SIGN,
    'sigma3': SIGMA3_SIGN,
    'moment': list(MOMENT_SIGNS),
}


@dataclass(frozen=True, eq=False)
class HKFrame:
    base: object
    y: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray
    sigma3: np.ndarray
    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray
    G: np.ndarray

    @property
    def sigmas(self):
        return self.sigma1, self.sigma2, self.sigma3

    @property
    def complex_structures(self):
        return self.J1, self.J2, self.J3

    def quaternion_residual(self):
        """Worst of J_i^2 + 1, J_i J_j - J_k (cyclic) and J_i J_j + J_j J_i."""
        J = self.complex_structures
        eye = np.eye(len(self.G))
        residuals = [np.max(np.abs(Ji @ Ji + eye)) for Ji in J]
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            residuals.append(np.max(np.abs(J[i] @ J[j] - J[k])))
            residuals.append(np.max(np.abs(J[i] @ J[j] + J[j] @ J[i])))
        return float(max(residuals))

    def metric_consistency(self):
        """max_i |(-sigma_i J_i) - G| together with the asymmetry of G."""
        mismatch = max(np.max(np.abs(-S @ J - self.G))
                       for S, J in zip(self.sigmas, self.complex_structures))
        return float(max(mismatch, np.max(np.abs(self.G - self.G.T))))

    def block_form_residual(self):
        I = self.base.I
        zero = np.zeros_like(I)
        eye = np.eye(len(I))
        expected = (
            np.block([[zero, eye], [-eye, zero]]),
            np.block([[-I, zero], [zero, I]]),
            np.block([[zero, I], [I, zero]]),
        )
        return float(max(np.max(np.abs(J - E)) for J, E in zip(self.complex_structures, expected)))

    def definiteness(self):
        eigenvalues = np.linalg.eigvalsh(0.5 * (self.G + self.G.T))
        if np.all(eigenvalues > 0):
            return 'positive'
        if np.all(eigenvalues < 0):
            return 'negative'
        return 'indefinite'


class MomentMap(NamedTuple):
    values: np.ndarray
    residual: float
    equivariance: float


class J2Projection(NamedTuple):
    holomorphic: float
    pullback: float
    rank: int


def sigma_matrices(g, omega):
    zero = np.zeros_like(g)
    sigma1 = np.block([[zero, g], [-g, zero]])
    sigma2 = SIGMA2_SIGN * np.block([[omega, zero], [zero, -omega]])
    sigma3 = SIGMA3_SIGN * np.block([[zero, omega], [omega, zero]])
    return sigma1, sigma2, sigma3


def hk_frame(F, w, y=None):
    point = sk_point(F, w)
    dim = len(point.g)
    y = np.zeros(dim) if y is None else np.asarray(y, dtype=float)
    sigma1, sigma2, sigma3 = sigma_matrices(point.g, np.asarray(point.space.omega))
    J1 = np.linalg.solve(sigma3, sigma2)
    J2 = np.linalg.solve(sigma1, sigma3)
    J3 = np.linalg.solve(sigma2, sigma1)
    G = -sigma1 @ J1
    return HKFrame(base=point, y=y, sigma1=sigma1, sigma2=sigma2, sigma3=sigma3,
                   J1=J1, J2=J2, J3=J3, G=G)


def closedness_residual(F, w, step=None, cache=None):
    """max |d_l g_jk - d_j g_lk|, i.e. d(sigma1) = 0; sigma2, sigma3 are constant."""
    step = option('FD_STEP_EXTERIOR', step)
    derivative = chart_derivative(F, w, lambda w_: sk_point(F, w_).g, step,
                                  accuracy=option('FD_EXTERIOR_ACCURACY'), cache=cache)  # [j, k, l]
    return float(np.max(np.abs(derivative - derivative.transpose(2, 1, 0))))


def _moment_values(chart, y):
    n = chart.n
    return np.column_stack([chart.xi[:n], -y[n:], chart.x[n:]])


def moment_contractions(frame):
    """iota(U_j) sigma_i for U_j = -d/dy_j, as an array [j, i, 4n]."""
    n = frame.base.chart.n
    dim = 2 * n
    return np.stack([
        np.stack([-S[dim + j] for S in frame.sigmas])
        for j in range(n)
    ])


def moment_differentials(F, w, y, step=None, cache=None):
    """d(mu_{j,i}) by central differences over all 4n coordinates, as [j, i, 4n]."""
    step = option('FD_STEP_GRADIENT', step)
    y = np.asarray(y, dtype=float)
    d_x = chart_derivative(F, w, lambda w_: _moment_values(embed(F, w_), y), step, cache=cache)
    chart = embed(F, w)
    columns = []
    for k in range(len(y)):
        offset = np.zeros(len(y))
        offset[k] = step
        columns.append((_moment_values(chart, y + offset) - _moment_values(chart, y - offset)) / (2 * step))
    d_y = np.stack(columns, axis=-1)
    return np.concatenate([d_x, d_y], axis=-1)


def moment_map(F, w, y, signs=MOMENT_SIGNS, step=None, cache=None):
    """Rows (xi_j, -y_{n+j}, x_{n+j}) with the differential and equivariance residuals."""
    y = np.asarray(y, dtype=float)
    frame = hk_frame(F, w, y)
    n = frame.base.chart.n
    values = _moment_values(frame.base.chart, y)
    differentials = moment_differentials(F, w, y, step, cache)
    expected = np.asarray(signs, dtype=float)[None, :, None] * moment_contractions(frame)
    residual = float(np.max(np.abs(differentials - expected)))
    equivariance = float(np.max(np.abs(differentials[:, :, 2 * n:3 * n])))
    return MomentMap(values=values, residual=residual, equivariance=equivariance)


def calibrate_moment_signs(w=(0.3 + 0.2j,), y=(0.1, -0.4)):
    """Recover the per-form signs of the moment map on the quad_plus fixture."""
    F = builtin('quad_plus', 1)
    frame = hk_frame(F, w, y)
    differentials = moment_differentials(F, w, y)
    contractions = moment_contractions(frame)
    signs = tuple(int(np.sign(np.sum(differentials[:, i] * contractions[:, i]))) for i in range(3))
    logger.info(f"calibrated moment-map signs {signs}")
    return signs


def laplacian_residual(jet):
    """|Re trace| of a jet's Hessian, the Laplacian of its real part."""
    return float(abs(np.trace(np.asarray(jet.hess)).real))


def harmonic_residual(F, c, p):
    """|Laplacian| of p -> Re F(c (p_1 + i p_2)) in R^3; p_3 enters trivially.

    The jet is seeded in the three real parameters with directions
    (c, i c, 0), so the Hessian is the full 3x3 one in p.
    """
    c = np.asarray(c, dtype=complex).reshape(-1)
    u, v, _ = np.asarray(p, dtype=float)
    directions = np.stack([c, 1j * c, np.zeros_like(c)], axis=1)
    jet = jets.holo_jet(F, c * complex(u, v), 2, directions=directions)
    return laplacian_residual(jet)


def hk_potential_check(F, w):
    """K = Re F - sum_{k<=n} x_k xi_k, and K + phi."""
    chart = embed(F, w)
    n = chart.n
    K = chart.value.real - float(chart.x[:n] @ chart.xi[:n])
    return K, K + chart.phi


def j1_potential_residual(F, w, y=None):
    """Compare the Gram matrix of d d-bar phi in z = x + iy with -(i/2) sigma1."""
    frame = hk_frame(F, w, y)
    dim = len(frame.base.g)
    h = 0.25 * frame.base.g
    eye = np.eye(dim)
    dz = np.hstack([eye, 1j * eye])
    dz_bar = np.hstack([eye, -1j * eye])
    gram = dz.T @ h @ dz_bar - dz_bar.T @ h.T @ dz
    return float(np.max(np.abs(gram + 0.5j * frame.sigma1)))


def legendre_coordinates_residual(F, w, step=None):
    """dReF/dxi_j = x_j and dReF/dx_{n+j} = -xi_{n+j} by central differences.

    (xi_1..xi_n, x_{n+1}..x_{2n}) are exactly (Re w, Im w).
    """
    step = option('FD_STEP_GRADIENT', step)
    chart = embed(F, w)
    n = chart.n

    def re_f(w_):
        return complex(jets.holo_jet(F, w_, 0).value).real

    residuals = []
    for j in range(n):
        e = np.zeros(n, dtype=complex)
        e[j] = step
        d_re = (re_f(chart.w + e) - re_f(chart.w - e)) / (2 * step)
        d_im = (re_f(chart.w + 1j * e) - re_f(chart.w - 1j * e)) / (2 * step)
        residuals.append(abs(d_re - chart.x[j]))
        residuals.append(abs(d_im + chart.xi[n + j]))
    return float(max(residuals))


def j2_projection_residual(F, w, y=None, step=None, cache=None):
    """The projection (x, y) -> x intertwines J2 with -I, and dd^c phi in J2
    is the degenerate pull-back of -2 omega.

    d^c phi = -J2^T dphi has x-part I^T xi and no y-part, so its exterior
    derivative lives on the x block only and has rank 2n.
    """
    step = option('FD_STEP_EXTERIOR', step)
    frame = hk_frame(F, w, y)
    dim = len(frame.base.g)
    zero = np.zeros((dim, dim))
    projection = np.hstack([np.eye(dim), zero])
    holomorphic = float(np.max(np.abs(projection @ frame.J2 + frame.base.I @ projection)))

    def d_c_phi(w_):
        chart = embed(F, w_)
        J2 = hk_frame(F, w_, frame.y).J2
        return -J2.T @ np.concatenate([chart.xi, np.zeros(dim)])

    # d^c phi does not depend on y
    d_x = chart_derivative(F, w, d_c_phi, step,
                           accuracy=option('FD_EXTERIOR_ACCURACY'), cache=cache)  # [a, k]
    derivative = np.hstack([d_x, np.zeros((2 * dim, dim))])
    d_theta = derivative.T - derivative
    omega = np.asarray(frame.base.space.omega)
    expected = np.block([[-2.0 * omega, zero], [zero, zero]])
    pullback = float(np.max(np.abs(d_theta - expected)))
    rank = int(np.linalg.matrix_rank(d_theta, tol=1e-6 * max(1.0, np.max(np.abs(d_theta)))))
    return J2Projection(holomorphic=holomorphic, pullback=pullback, rank=rank)
