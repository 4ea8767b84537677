"""
Forward-mode truncated Taylor arithmetic to order 3.

A Jet3 carries the value, gradient, Hessian and third derivative tensor of a
scalar field at a point. Symmetric slots are stored packed (one entry per
sorted index tuple) so that their symmetry is a property of the storage.
CJet3 is the holomorphic variant: its derivatives are d/dw_j, complex-valued.
"""

from functools import lru_cache
from itertools import combinations_with_replacement, permutations
import cmath
import logging
import math
import numbers

import numpy as np

from .exceptions import DomainError

logger = logging.getLogger(__name__)

MAX_ORDER = 3


@lru_cache(maxsize=None)
def _packing(dim, rank):
    """Upper index tuples of a symmetric tensor and the dense->packed map."""
    upper = list(combinations_with_replacement(range(dim), rank))
    index = np.empty((dim,) * rank, dtype=np.intp)
    for position, combo in enumerate(upper):
        for perm in set(permutations(combo)):
            index[perm] = position
    upper_arrays = tuple(np.array(axis, dtype=np.intp) for axis in zip(*upper))
    return upper_arrays, index


def _pack(dense, rank):
    upper, _ = _packing(dense.shape[0], rank)
    return np.ascontiguousarray(dense[upper])


def _unpack(packed, dim, rank):
    _, index = _packing(dim, rank)
    return packed[index]


def _sym3(hess, grad):
    """H_ij g_k + H_ik g_j + H_jk g_i."""
    return (np.einsum('ij,k->ijk', hess, grad)
            + np.einsum('ik,j->ijk', hess, grad)
            + np.einsum('jk,i->ijk', hess, grad))


class Jet3:
    """Truncated Taylor data of a real scalar field at a point."""

    __slots__ = ('value', 'dim', 'order', '_grad', '_hess', '_third')

    def __init__(self, value, grad=None, hess=None, third=None, dim=None):
        self.value = value
        slots = [grad, hess, third]
        order = 0
        for slot in slots:
            if slot is None:
                break
            order += 1
        if dim is None:
            if grad is None:
                raise ValueError("dim is required for an order-0 jet")
            dim = len(grad)
        self.dim = dim
        self.order = order
        self._grad = None if grad is None else np.asarray(grad)
        self._hess = None if order < 2 else _pack(np.asarray(hess), 2)
        self._third = None if order < 3 else _pack(np.asarray(third), 3)

    @classmethod
    def _from_packed(cls, value, grad, hess_packed, third_packed, dim, order):
        jet = cls.__new__(cls)
        jet.value = value
        jet.dim = dim
        jet.order = order
        jet._grad = grad
        jet._hess = hess_packed
        jet._third = third_packed
        return jet

    @classmethod
    def constant(cls, value, dim, order):
        dtype = np.result_type(type(value), float)
        grad = np.zeros(dim, dtype=dtype) if order >= 1 else None
        hess = np.zeros((dim, dim), dtype=dtype) if order >= 2 else None
        third = np.zeros((dim,) * 3, dtype=dtype) if order >= 3 else None
        return cls(value, grad, hess, third, dim=dim)

    @property
    def grad(self):
        return self._grad

    @property
    def hess(self):
        if self._hess is None:
            return None
        return _unpack(self._hess, self.dim, 2)

    @property
    def third(self):
        if self._third is None:
            return None
        return _unpack(self._third, self.dim, 3)

    def __repr__(self):
        return f"{type(self).__name__}(value={self.value!r}, dim={self.dim}, order={self.order})"

    # -- construction helpers -------------------------------------------------

    def _parts(self):
        return self.value, self.grad, self.hess, self.third

    def _build(self, value, grad, hess, third, order):
        return type(self)._from_packed(
            value,
            grad if order >= 1 else None,
            _pack(hess, 2) if order >= 2 else None,
            _pack(third, 3) if order >= 3 else None,
            self.dim,
            order,
        )

    def _coerce(self, other):
        if isinstance(other, Jet3):
            if other.dim != self.dim:
                raise ValueError(f"jet dimensions differ: {self.dim} != {other.dim}")
            return other
        if isinstance(other, numbers.Number):
            return type(self).constant(other, self.dim, self.order)
        return NotImplemented

    def compose(self, f0, f1, f2, f3):
        """Chain rule for a scalar function with derivatives f0..f3 at self.value."""
        order = self.order
        v, g, H, T = self._parts()
        grad = hess = third = None
        if order >= 1:
            grad = f1 * g
        if order >= 2:
            hess = f1 * H + f2 * np.outer(g, g)
        if order >= 3:
            third = f1 * T + f2 * _sym3(H, g) + f3 * np.einsum('i,j,k->ijk', g, g, g)
        return self._build(f0, grad, hess, third, order)

    # -- arithmetic -----------------------------------------------------------

    def __neg__(self):
        return type(self)._from_packed(
            -self.value,
            None if self._grad is None else -self._grad,
            None if self._hess is None else -self._hess,
            None if self._third is None else -self._third,
            self.dim,
            self.order,
        )

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, numbers.Number):
            return type(self)._from_packed(self.value + other, self._grad, self._hess,
                                           self._third, self.dim, self.order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        order = min(self.order, other.order)
        parts = [self.value + other.value]
        for mine, theirs in zip((self._grad, self._hess, self._third)[:order],
                                (other._grad, other._hess, other._third)[:order]):
            parts.append(mine + theirs)
        parts += [None] * (MAX_ORDER + 1 - len(parts))
        return type(self)._from_packed(*parts, self.dim, order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            return type(self)._from_packed(
                self.value * other,
                None if self._grad is None else self._grad * other,
                None if self._hess is None else self._hess * other,
                None if self._third is None else self._third * other,
                self.dim,
                self.order,
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        order = min(self.order, other.order)
        a0, ag, aH, aT = self._parts()
        b0, bg, bH, bT = other._parts()
        grad = hess = third = None
        if order >= 1:
            grad = a0 * bg + b0 * ag
        if order >= 2:
            hess = a0 * bH + b0 * aH + np.outer(ag, bg) + np.outer(bg, ag)
        if order >= 3:
            third = a0 * bT + b0 * aT + _sym3(aH, bg) + _sym3(bH, ag)
        return self._build(a0 * b0, grad, hess, third, order)

    __rmul__ = __mul__

    def reciprocal(self):
        u = self.value
        if u == 0:
            raise DomainError("division by zero")
        inv = 1.0 / u
        return self.compose(inv, -inv ** 2, 2 * inv ** 3, -6 * inv ** 4)

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            if other == 0:
                raise DomainError("division by zero")
            return self * (1.0 / other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if not isinstance(exponent, numbers.Real):
            return NotImplemented
        u = self.value
        if float(exponent).is_integer():
            p = int(exponent)
            if p < 0 and u == 0:
                raise DomainError("negative power of zero")
            coeffs = [1, p, p * (p - 1), p * (p - 1) * (p - 2)]
            derivs = [c * u ** (p - k) if c != 0 else 0 for k, c in enumerate(coeffs)]
            if p == 0:
                derivs[0] = 1
            return self.compose(*derivs)
        p = float(exponent)
        self._check_branch(u, "power", allow_zero_value=p > 0)
        derivs = [u ** p, p * u ** (p - 1), p * (p - 1) * u ** (p - 2),
                  p * (p - 1) * (p - 2) * u ** (p - 3)]
        return self.compose(*derivs)

    def _check_branch(self, u, name, allow_zero_value=False):
        if u == 0 and (self.order > 0 or not allow_zero_value):
            raise DomainError(f"{name} is singular at 0")
        if isinstance(u, complex) or np.iscomplexobj(u):
            if u.imag == 0 and u.real < 0:
                raise DomainError(f"{name} argument {u} lies on the principal branch cut")
        elif u < 0:
            raise DomainError(f"{name} of negative argument {u}")

    # -- elementary functions -------------------------------------------------

    def exp(self):
        e = np.exp(self.value)
        return self.compose(e, e, e, e)

    def log(self):
        u = self.value
        self._check_branch(u, "log")
        inv = 1.0 / u
        value = cmath.log(u) if _is_complex(u) else math.log(u)
        return self.compose(value, inv, -inv ** 2, 2 * inv ** 3)

    def sqrt(self):
        u = self.value
        self._check_branch(u, "sqrt", allow_zero_value=True)
        s = cmath.sqrt(u) if _is_complex(u) else math.sqrt(u)
        if self.order == 0:
            return self.compose(s, 0, 0, 0)
        return self.compose(s, 0.5 / s, -0.25 / (s * u), 0.375 / (s * u * u))


class CJet3(Jet3):
    """Holomorphic Taylor data: derivatives are d/dw_j of a holomorphic field."""

    __slots__ = ()


def _is_complex(value):
    return isinstance(value, complex) or np.iscomplexobj(value)


def exp(u):
    return u.exp() if isinstance(u, Jet3) else (cmath.exp(u) if _is_complex(u) else math.exp(u))


def log(u):
    if isinstance(u, Jet3):
        return u.log()
    return Jet3.constant(u, 1, 0).log().value


def sqrt(u):
    if isinstance(u, Jet3):
        return u.sqrt()
    return Jet3.constant(u, 1, 0).sqrt().value


def variables(point, order, directions=None, cls=Jet3):
    """Seed one jet per coordinate of `point`.

    With `directions` (shape len(point) x k) the variables are
    point_j + sum_l directions[j, l] t_l and jets are taken in t.
    """
    point = np.asarray(point)
    if directions is None:
        directions = np.eye(len(point))
    directions = np.asarray(directions)
    dim = directions.shape[1]
    dtype = np.result_type(point.dtype, directions.dtype, float)
    seeds = []
    for j, value in enumerate(point):
        value = complex(value) if np.iscomplexobj(point) else float(value)
        grad = directions[j].astype(dtype) if order >= 1 else None
        hess = np.zeros((dim, dim), dtype=dtype) if order >= 2 else None
        third = np.zeros((dim,) * 3, dtype=dtype) if order >= 3 else None
        seeds.append(cls(value, grad, hess, third, dim=dim))
    return seeds


def _as_jet(result, dim, order, cls):
    if isinstance(result, Jet3):
        return result
    return cls.constant(result, dim, order)


def real_jet(f, x, order=MAX_ORDER):
    """Taylor data of the real field `f` at `x` by jet propagation."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
    x = np.asarray(x, dtype=float)
    with np.errstate(all='raise'):
        try:
            result = f(variables(x, order))
        except (FloatingPointError, ZeroDivisionError) as exc:
            raise DomainError(str(exc)) from exc
    return _as_jet(result, len(x), order, Jet3)


def holo_jet(expr, w, order=MAX_ORDER, directions=None):
    """Holomorphic Taylor data of a prepotential expression at `w`."""
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
    w = np.asarray(w, dtype=complex)
    seeds = variables(w, order, directions=directions, cls=CJet3)
    dim = seeds[0].dim if seeds else len(w)
    with np.errstate(all='raise'):
        try:
            result = expr.evaluate(seeds)
        except (FloatingPointError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(str(exc)) from exc
    return _as_jet(result, dim, order, CJet3)


def fd_check(f, x, step):
    """Max componentwise |jet - central FD| over the gradient and Hessian.

    The gradient oracle differences values; the Hessian oracle differences
    jet gradients, which keeps rounding at eps/step instead of eps/step**2.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    jet = real_jet(f, x, 2)
    m = len(x)
    fd_grad = np.empty(m)
    fd_hess = np.empty((m, m))
    for i in range(m):
        e = np.zeros(m)
        e[i] = step
        fd_grad[i] = (real_jet(f, x + e, 0).value - real_jet(f, x - e, 0).value) / (2 * step)
        fd_hess[:, i] = (real_jet(f, x + e, 1).grad - real_jet(f, x - e, 1).grad) / (2 * step)
    residual = max(np.max(np.abs(jet.grad - fd_grad)), np.max(np.abs(jet.hess - fd_hess)))
    logger.debug(f"fd_check at {x} step {step}: residual {residual:.3e}")
    return float(residual)
