"""
Constant symplectic linear algebra on V = R^{2n} and the product V x V*.

A 2-form with antisymmetric coefficient matrix A evaluates as u^T A v; the
sums in the product forms run over all ordered index pairs, which is where
the factor 2 in Omega_1 and Omega_2 comes from.

The V x V picture is reached through the coordinate change
d(xi)_i = sum_j omega_ij dy_j, i.e. y = omega^{-1} xi (see `second_factor`).
"""

from dataclasses import dataclass
import logging

import numpy as np

from .exceptions import DimensionMismatchError, GeometryError, RankDeficientFrameError

logger = logging.getLogger(__name__)

ANTISYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    """V = R^{2n} with a constant symplectic form omega."""

    n: int
    omega: np.ndarray
    omega_inv: np.ndarray

    @classmethod
    def from_matrix(cls, omega):
        omega = np.array(omega, dtype=float)
        if omega.ndim != 2 or omega.shape[0] != omega.shape[1] or omega.shape[0] % 2:
            raise DimensionMismatchError(f"omega must be a square matrix of even size, got {omega.shape}")
        if np.max(np.abs(omega + omega.T)) > ANTISYMMETRY_TOL:
            raise GeometryError("omega is not antisymmetric")
        try:
            omega_inv = np.linalg.inv(omega)
        except np.linalg.LinAlgError as exc:
            raise GeometryError("omega is degenerate") from exc
        omega.setflags(write=False)
        omega_inv.setflags(write=False)
        return cls(omega.shape[0] // 2, omega, omega_inv)

    @property
    def dim(self):
        return 2 * self.n


@dataclass(frozen=True, eq=False)
class ProductVector:
    """Element (a, alpha) of V x V*; `a` is the dx-part, `alpha` the dxi-part."""

    a: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        alpha = np.asarray(self.alpha, dtype=float)
        if a.shape != alpha.shape or a.ndim != 1:
            raise DimensionMismatchError(f"x-part {a.shape} and xi-part {alpha.shape} differ")
        object.__setattr__(self, 'a', a)
        object.__setattr__(self, 'alpha', alpha)

    def as_array(self):
        return np.concatenate([self.a, self.alpha])


def standard_space(n):
    """omega = sum_j dx_j ^ dx_{n+j}, i.e. [[0, I_n], [-I_n, 0]]."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    omega = np.block([[zero, eye], [-eye, zero]])
    omega_inv = np.block([[zero, -eye], [eye, zero]])
    omega.setflags(write=False)
    omega_inv.setflags(write=False)
    return SymplecticSpace(n, omega, omega_inv)


def _check_pair(u, v, space=None):
    if u.a.shape != v.a.shape:
        raise DimensionMismatchError(f"vectors live in different spaces: {u.a.shape} vs {v.a.shape}")
    if space is not None and u.a.shape[0] != space.dim:
        raise DimensionMismatchError(f"vectors of length {u.a.shape[0]} in a space of dimension {space.dim}")


def eval_Omega1(u, v):
    """Omega_1 = 2 sum dx_i ^ dxi_i."""
    _check_pair(u, v)
    return float(2.0 * (u.a @ v.alpha - v.a @ u.alpha))


def eval_Omega2(space, u, v):
    """Omega_2 = sum omega_ij dx_i ^ dx_j + sum omega^ij dxi_i ^ dxi_j."""
    _check_pair(u, v, space)
    return float(2.0 * (u.a @ space.omega @ v.a + u.alpha @ space.omega_inv @ v.alpha))


def pairing_metric(u, v):
    """Polarization of the indefinite form <x, xi> on V x V*.

    Normalized so that the metric induced on the graph of d(phi) is exactly
    the Hessian of phi.
    """
    _check_pair(u, v)
    return float(0.5 * (u.a @ v.alpha + v.a @ u.alpha))


def second_factor(space, u):
    """Image of (a, alpha) in V x V under alpha = omega y."""
    return u.a, space.omega_inv @ u.alpha


def frame_matrices(frame):
    """Columns of the x-parts and xi-parts of a frame of ProductVectors."""
    A = np.column_stack([f.a for f in frame])
    B = np.column_stack([f.alpha for f in frame])
    return A, B


@dataclass(frozen=True)
class BilagrangianResidual:
    r1: float
    r2: float
    transversal_x: bool
    transversal_xi: bool


def _full_rank(matrix):
    s = np.linalg.svd(matrix, compute_uv=False)
    return bool(s[-1] > s[0] * 1e-12) if s[0] > 0 else False


def gram_matrices(space, frame):
    """Gram matrices of Omega_1 and Omega_2 on a frame."""
    A, B = frame_matrices(frame)
    omega1 = 2.0 * (A.T @ B - B.T @ A)
    omega2 = 2.0 * (A.T @ space.omega @ A + B.T @ space.omega_inv @ B)
    return omega1, omega2


def bilagrangian_residual(space, frame):
    """How far the span of `frame` is from being Lagrangian for both forms."""
    if len(frame) != space.dim:
        raise DimensionMismatchError(f"a frame needs {space.dim} vectors, got {len(frame)}")
    for f in frame:
        if f.a.shape[0] != space.dim:
            raise DimensionMismatchError(f"frame vector of length {f.a.shape[0]} in dimension {space.dim}")
    A, B = frame_matrices(frame)
    if not _full_rank(np.vstack([A, B])):
        raise RankDeficientFrameError(f"frame does not span a {space.dim}-dimensional subspace")
    omega1, omega2 = gram_matrices(space, frame)
    result = BilagrangianResidual(
        r1=float(np.max(np.abs(omega1))),
        r2=float(np.max(np.abs(omega2))),
        transversal_x=_full_rank(A),
        transversal_xi=_full_rank(B),
    )
    logger.debug(f"bilagrangian residual {result}")
    return result
