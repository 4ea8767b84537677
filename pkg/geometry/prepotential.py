"""
Holomorphic prepotentials and the complex Lagrangian graph v = dF/dw.

Coordinates on V x V* follow Omega^c = 1/2 Omega_1 + i Omega_2 =
sum d(x_j + i xi_{n+j}) ^ d(xi_j + i x_{n+j}) = sum dv_j ^ dw_j, so for
j = 1..n:

    w_j = xi_j + i x_{n+j}          v_j = x_j + i xi_{n+j} = dF/dw_j

and the potential is fixed in the gauge phi = sum_{k<=n} x_k xi_k - Re F(w).
"""

from dataclasses import dataclass
import logging

import numpy as np

from . import jets
from .expressions import parse
from .exceptions import ArityError, UnknownPrepotentialError
from .symplectic import ProductVector

logger = logging.getLogger(__name__)

BUILTINS = ('quad_plus', 'quad_minus', 'cubic', 'mixed2')


def _sum_text(n, template):
    return '+'.join(template.format(j=j) for j in range(1, n + 1))


def builtin_source(name, n=None):
    """Expression text of a builtin prepotential."""
    if name == 'mixed2':
        if n not in (None, 2):
            raise ArityError(f"mixed2 is defined for n=2 only, got n={n}")
        return 'w1^2*w2', 2
    n = 1 if n is None else n
    if n < 1:
        raise ArityError(f"n must be positive, got {n}")
    if name == 'quad_plus':
        return f"(1/2)*({_sum_text(n, 'w{j}^2')})", n
    if name == 'quad_minus':
        return f"-(1/2)*({_sum_text(n, 'w{j}^2')})", n
    if name == 'cubic':
        return _sum_text(n, 'w{j}^3/3'), n
    raise UnknownPrepotentialError(f"unknown builtin prepotential {name!r}; choose from {', '.join(BUILTINS)}")


def builtin(name, n=None):
    """PrepotentialExpr of a named builtin."""
    text, n = builtin_source(name, n)
    return parse(text, n)


def domain_box(name, n):
    """Default sampling box as rows (lo, hi) for Re w_1..Re w_n, Im w_1..Im w_n.

    cubic keeps xi_j = Re w_j > 0, away from the non-transversal locus xi_j = 0;
    mixed2 keeps Re w_1 > 0 for the same reason.
    """
    if name in ('quad_plus', 'quad_minus'):
        return np.array([[-2.0, 2.0]] * (2 * n))
    if name == 'cubic':
        return np.array([[0.5, 2.0]] * n + [[-1.0, 1.0]] * n)
    if name == 'mixed2':
        return np.array([[0.5, 2.0]] * n + [[-0.5, 0.5]] * n)
    raise UnknownPrepotentialError(f"no default domain for {name!r}")


def resolve(prepotential, n=None):
    """Accept a builtin name or an expression and return (name, expr)."""
    if prepotential in BUILTINS:
        return prepotential, builtin(prepotential, n)
    if n is None:
        raise ArityError("n is required for a prepotential given as an expression")
    return None, parse(prepotential, n)


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """A point of M in V x V*, with the holomorphic Hessian tau cached."""

    w: np.ndarray
    x: np.ndarray
    xi: np.ndarray
    phi: float
    tau: np.ndarray
    value: complex

    @property
    def n(self):
        return len(self.w)


@dataclass(frozen=True, eq=False)
class CubicForm:
    theta: np.ndarray


def embed(F, w):
    """Point of the graph v = dF/dw over the parameter w."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    jet = jets.holo_jet(F, w, 2)
    v = jet.grad
    x = np.concatenate([v.real, w.imag])
    xi = np.concatenate([w.real, v.imag])
    n = len(w)
    phi = float(x[:n] @ xi[:n] - complex(jet.value).real)
    return ChartPoint(w=w, x=x, xi=xi, phi=phi, tau=jet.hess, value=complex(jet.value))


def frame_from_tau(tau):
    """Pushforwards of d/dRe(w_k) then d/dIm(w_k) through v = dF/dw."""
    n = tau.shape[0]
    eye = np.eye(n)
    frame = []
    for k in range(n):
        dv = tau[:, k]
        frame.append(ProductVector(np.concatenate([dv.real, np.zeros(n)]),
                                   np.concatenate([eye[k], dv.imag])))
    for k in range(n):
        dv = 1j * tau[:, k]
        frame.append(ProductVector(np.concatenate([dv.real, eye[k]]),
                                   np.concatenate([np.zeros(n), dv.imag])))
    return frame


def tangent_frame(F, w):
    return frame_from_tau(embed(F, w).tau)


def cubic_form(F, w):
    """Theta_abc = d^3 F / dw_a dw_b dw_c."""
    jet = jets.holo_jet(F, np.asarray(w, dtype=complex).reshape(-1), 3)
    return CubicForm(theta=jet.third)
