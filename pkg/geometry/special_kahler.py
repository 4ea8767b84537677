"""
Special pseudo-Kahler structure induced on a bilagrangian graph.

In the flat coordinates x of the first projection the metric is the Hessian
of phi, g = d(xi)/dx, and the complex structure is I = omega^{-1} g, i.e.
I^j_k = sum_a omega^{ja} g_{ak}. With this index placement

    * the Hamiltonian field of phi has components a = omega^{-1} xi, and
      da/dx = I (these are also the flat coordinates y of the second
      projection, so dy = I dx);
    * d(I^T dphi) = -2 omega in the all-ordered-pairs Gram convention,
      i.e. d(I dphi) = -omega as a 2-form;
    * g_jk = -sum_a I^a_j omega_ak.

Derivatives along the chart are central finite differences through Newton
inversion of the chart map; they only ever feed residual checks.
"""

from dataclasses import dataclass
from typing import NamedTuple
import logging

import numpy as np
from scipy.integrate import simpson

from .conf import option
from .exceptions import (DegenerateMetricError, DomainError, NoConvergenceError,
                         SingularJacobianError)
from .prepotential import embed, frame_from_tau
from .symplectic import frame_matrices, second_factor, standard_space, ProductVector

logger = logging.getLogger(__name__)

PROJECTIONS = ('x', 'xi')

# (multiple of the step, weight) pairs of antisymmetric difference stencils
STENCILS = {
    2: ((1, 1 / 2),),
    4: ((1, 2 / 3), (2, -1 / 12)),
}


@dataclass(frozen=True, eq=False)
class SKPoint:
    chart: object
    g: np.ndarray
    I: np.ndarray
    signature: tuple
    asymmetry: float
    space: object

    @property
    def eigenvalues(self):
        return np.linalg.eigvalsh(self.g)


class XiRecovery(NamedTuple):
    estimate: np.ndarray
    mismatch: float
    w_end: np.ndarray


def _checked_cond(matrix, singular_cond):
    cond = np.linalg.cond(matrix)
    if not np.isfinite(cond) or cond > singular_cond:
        raise SingularJacobianError(f"chart Jacobian has condition number {cond:.3e}")
    return cond


def chart_coordinates(chart, projection='x'):
    if projection == 'x':
        return chart.x
    if projection == 'xi':
        return chart.xi
    raise ValueError(f"projection must be one of {PROJECTIONS}, got {projection!r}")


def chart_jacobian(chart, projection='x'):
    """d(coordinates)/d(Re w, Im w) for the chosen projection."""
    A, B = frame_matrices(frame_from_tau(chart.tau))
    return A if projection == 'x' else B


def _params(w):
    return np.concatenate([w.real, w.imag])


def _from_params(p):
    n = len(p) // 2
    return p[:n] + 1j * p[n:]


def invert_chart(F, target, w_guess, projection='x', tol=None, max_iter=None,
                 max_halvings=None, singular_cond=None):
    """Solve coordinates(w) = target by damped Newton from `w_guess`."""
    tol = option('NEWTON_TOL', tol)
    max_iter = option('NEWTON_MAX_ITER', max_iter)
    max_halvings = option('NEWTON_MAX_HALVINGS', max_halvings)
    singular_cond = option('SINGULAR_COND', singular_cond)
    target = np.asarray(target, dtype=float)
    w = np.asarray(w_guess, dtype=complex).reshape(-1)
    p = _params(w)

    chart = embed(F, w)
    residual = chart_coordinates(chart, projection) - target
    norm = np.max(np.abs(residual))
    for iteration in range(max_iter + 1):
        jacobian = chart_jacobian(chart, projection)
        _checked_cond(jacobian, singular_cond)
        if norm < tol:
            return _polish(F, p, residual, norm, target, projection)
        if iteration == max_iter:
            break
        step = np.linalg.solve(jacobian, residual)
        scale = 1.0
        for _ in range(max_halvings + 1):
            trial = p - scale * step
            try:
                trial_chart = embed(F, _from_params(trial))
            except DomainError:
                trial_norm = np.inf
            else:
                trial_residual = chart_coordinates(trial_chart, projection) - target
                trial_norm = np.max(np.abs(trial_residual))
            if trial_norm < norm:
                break
            scale *= 0.5
        else:
            raise NoConvergenceError(
                f"no descent after {max_halvings} step halvings at iteration {iteration} "
                f"(residual {norm:.3e})")
        logger.debug(f"newton {projection}-chart iteration {iteration}: residual {trial_norm:.3e}, scale {scale}")
        p, chart, residual, norm = trial, trial_chart, trial_residual, trial_norm
    raise NoConvergenceError(f"Newton did not reach {tol:g} in {max_iter} iterations (residual {norm:.3e})")


def _polish(F, p, residual, norm, target, projection, steps=2):
    """A couple of extra full Newton steps, kept only while they help."""
    for _ in range(steps):
        if norm == 0:
            break
        jacobian = chart_jacobian(embed(F, _from_params(p)), projection)
        trial = p - np.linalg.solve(jacobian, residual)
        try:
            trial_residual = chart_coordinates(embed(F, _from_params(trial)), projection) - target
        except DomainError:
            break
        trial_norm = np.max(np.abs(trial_residual))
        if trial_norm >= norm:
            break
        p, residual, norm = trial, trial_residual, trial_norm
    return _from_params(p)


def signature(g, rtol=None):
    rtol = option('DEGENERATE_RTOL', rtol)
    eigenvalues = np.linalg.eigvalsh(g)
    threshold = rtol * np.max(np.abs(eigenvalues))
    if np.any(np.abs(eigenvalues) <= threshold):
        raise DegenerateMetricError(f"metric eigenvalues {eigenvalues} hit the zero threshold {threshold:.3e}")
    return int(np.sum(eigenvalues > 0)), int(np.sum(eigenvalues < 0))


def sk_point(F, w, singular_cond=None):
    """Metric g = (dxi/dparam)(dx/dparam)^{-1} and I = omega^{-1} g at w."""
    singular_cond = option('SINGULAR_COND', singular_cond)
    chart = embed(F, w)
    A, B = frame_matrices(frame_from_tau(chart.tau))
    _checked_cond(A, singular_cond)
    try:
        g_raw = np.linalg.solve(A.T, B.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularJacobianError(str(exc)) from exc
    asymmetry = float(np.max(np.abs(g_raw - g_raw.T)))
    g = 0.5 * (g_raw + g_raw.T)
    space = standard_space(chart.n)
    I = space.omega_inv @ g
    return SKPoint(chart=chart, g=g, I=I, signature=signature(g), asymmetry=asymmetry, space=space)


def compatibility_residuals(point):
    """Algebraic identities tying g, I and omega together."""
    g, I, omega = point.g, point.I, point.space.omega
    eye = np.eye(len(g))
    return {
        'i_squared': float(np.max(np.abs(I @ I + eye))),
        'i_g_orthogonal': float(np.max(np.abs(I.T @ g @ I - g))),
        'i_symplectic': float(np.max(np.abs(I.T @ omega @ I - omega))),
        'metric_from_omega': float(np.max(np.abs(g + I.T @ omega))),
    }


class InversionCache:
    """Chart inversions around one base point, shared between FD checks.

    Keys are the exact target coordinates, so checks that use the same step
    and stencil reuse each other's Newton solves.
    """

    def __init__(self, F):
        self.F = F
        self.hits = 0
        self._solutions = {}

    def __len__(self):
        return len(self._solutions)

    def invert(self, target, w_guess, projection='x'):
        target = np.asarray(target, dtype=float)
        key = (projection, target.tobytes())
        if key in self._solutions:
            self.hits += 1
        else:
            self._solutions[key] = invert_chart(self.F, target, w_guess, projection)
        return self._solutions[key]


def chart_derivative(F, w, fn, step, projection='x', accuracy=2, cache=None):
    """Central differences of fn(w) w.r.t. the chart coordinates.

    `accuracy` is the order of the stencil (2 or 4). The derivative index is
    the last axis of the result.
    """
    if accuracy not in STENCILS:
        raise ValueError(f"accuracy must be one of {sorted(STENCILS)}, got {accuracy}")
    if cache is None:
        cache = InversionCache(F)
    w = np.asarray(w, dtype=complex).reshape(-1)
    base = chart_coordinates(embed(F, w), projection)
    columns = []
    for k in range(len(base)):
        column = 0.0
        for multiple, weight in STENCILS[accuracy]:
            offset = np.zeros(len(base))
            offset[k] = multiple * step
            w_plus = cache.invert(base + offset, w, projection)
            w_minus = cache.invert(base - offset, w, projection)
            column = column + weight * (np.asarray(fn(w_plus)) - np.asarray(fn(w_minus))) / step
        columns.append(column)
    return np.stack(columns, axis=-1)


def _complex_structure(F):
    return lambda w: sk_point(F, w).I


def hamiltonian_field_check(F, w, step=None, cache=None):
    """max |da_j/dx_k - I^j_k| for the Hamiltonian field a = omega^{-1} dphi."""
    step = option('FD_STEP_GRADIENT', step)
    point = sk_point(F, w)
    space = point.space

    def field(w_):
        chart = embed(F, w_)
        return second_factor(space, ProductVector(chart.x, chart.xi))[1]

    jacobian = chart_derivative(F, w, field, step, cache=cache)
    return float(np.max(np.abs(jacobian - point.I)))


def dnabla_I_residual(F, w, step=None, cache=None):
    """max |d_m I^j_k - d_k I^j_m|, the flat-connection closedness of I."""
    step = option('FD_STEP_EXTERIOR', step)
    derivative = chart_derivative(F, w, _complex_structure(F), step,
                                  accuracy=option('FD_EXTERIOR_ACCURACY'), cache=cache)
    return float(np.max(np.abs(derivative - derivative.transpose(0, 2, 1))))


def holomorphic_coords(F, w):
    """z_j = x_j - i sum_k omega^{jk} xi_k and the type-(1,0) residual of dz."""
    point = sk_point(F, w)
    chart = point.chart
    y = second_factor(point.space, ProductVector(chart.x, chart.xi))[1]
    z = chart.x - 1j * y
    dz = np.eye(len(z)) - 1j * point.I
    type_residual = float(np.max(np.abs(dz @ point.I - 1j * dz)))
    return z, type_residual


def kahler_potential_residual(F, w, step=None, cache=None):
    """max |d(beta)_kj + 2 omega_kj| for beta_j = sum_i I^i_j dphi/dx_i."""
    step = option('FD_STEP_EXTERIOR', step)
    point = sk_point(F, w)

    def beta(w_):
        return sk_point(F, w_).I.T @ embed(F, w_).xi

    derivative = chart_derivative(F, w, beta, step,
                                  accuracy=option('FD_EXTERIOR_ACCURACY'), cache=cache)  # [j, k] = d_k beta_j
    d_beta = derivative.T - derivative
    return float(np.max(np.abs(d_beta + 2.0 * point.space.omega)))


def legendre_dual(F, w, step=None, cache=None):
    """phi* = sum_j x_j xi_j - phi and max_j |d phi*/d xi_j - x_j|."""
    step = option('FD_STEP_GRADIENT', step)
    chart = embed(F, w)

    def phi_star(w_):
        c = embed(F, w_)
        return c.x @ c.xi - c.phi

    gradient = chart_derivative(F, w, phi_star, step, projection='xi', cache=cache)
    return float(phi_star(chart.w)), float(np.max(np.abs(gradient - chart.x)))


def recover_xi(F, path, w_start_guess, panels=None):
    """Integrate alpha_k = sum omega_kl I^l_j dx_j along a polyline of x-points.

    Each segment uses composite Simpson with `panels` panels; the chart is
    followed by Newton continuation from the previous node.
    """
    panels = option('QUADRATURE_PANELS', panels)
    path = np.asarray(path, dtype=float)
    if path.ndim != 2 or len(path) < 2:
        raise ValueError("path needs at least two points")
    w = invert_chart(F, path[0], w_start_guess)
    start = embed(F, w)
    omega = standard_space(start.n).omega
    estimate = start.xi.copy()
    nodes = np.linspace(0.0, 1.0, 2 * panels + 1)
    for p0, p1 in zip(path[:-1], path[1:]):
        direction = p1 - p0
        values = []
        for t in nodes:
            w = invert_chart(F, p0 + t * direction, w)
            values.append(omega @ sk_point(F, w).I @ direction)
        estimate = estimate + simpson(np.array(values), x=nodes, axis=0)
    end = embed(F, w)
    mismatch = float(np.max(np.abs(estimate - end.xi)))
    logger.debug(f"xi recovery over {len(path) - 1} segments: mismatch {mismatch:.3e}")
    return XiRecovery(estimate=estimate, mismatch=mismatch, w_end=w)


def xi_recovery_residual(F, w, offset=0.05, panels=None):
    """Recover xi along the two L-shaped paths between x(w) and x(w) + offset.

    Returns the worst endpoint mismatch or disagreement between the paths.
    """
    panels = option('XI_RECOVERY_PANELS', panels)
    w = np.asarray(w, dtype=complex).reshape(-1)
    start = embed(F, w).x
    n = len(w)
    step = np.full(2 * n, offset)
    first = np.concatenate([step[:n], np.zeros(n)])
    second = np.concatenate([np.zeros(n), step[n:]])
    paths = (
        [start, start + first, start + step],
        [start, start + second, start + step],
    )
    recoveries = [recover_xi(F, path, w, panels) for path in paths]
    disagreement = np.max(np.abs(recoveries[0].estimate - recoveries[1].estimate))
    return float(max(disagreement, *(r.mismatch for r in recoveries)))
