"""
Batch verification, signature scans and fixture export.

Sample points are drawn up front from a seeded generator, evaluated in a
thread pool and reduced in sample order, so a report does not depend on the
number of workers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product
import logging
import math
import time

import numpy as np

from .conf import option, tolerance
from .exceptions import (ConfigError, DegenerateMetricError, DomainError, NoConvergenceError,
                         RankDeficientFrameError, SingularJacobianError)
from .hyperkahler import (SIGN_VECTOR, closedness_residual, harmonic_residual, hk_frame,
                          hk_potential_check, j1_potential_residual, j2_projection_residual,
                          legendre_coordinates_residual, moment_map)
from .prepotential import BUILTINS, cubic_form, domain_box, embed, frame_from_tau, resolve
from .special_kahler import (InversionCache, compatibility_residuals, dnabla_I_residual,
                             hamiltonian_field_check, holomorphic_coords, invert_chart, kahler_potential_residual,
                             legendre_dual, signature, sk_point, xi_recovery_residual)
from .symplectic import bilagrangian_residual, standard_space

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_ALL_SINGULAR = 3

CHECKS = (
    'bilagrangian_omega1',
    'bilagrangian_omega2',
    'g_symmetry',
    'i_squared',
    'i_g_orthogonal',
    'i_symplectic',
    'metric_from_omega',
    'dnabla_i',
    'hamiltonian_field',
    'type_10',
    'kahler_potential',
    'legendre_dual_gradient',
    'xi_recovery',
    'quaternion',
    'metric_consistency',
    'closedness',
    'moment_map',
    'equivariance',
    'harmonicity',
    'k_plus_phi_variance',
    'legendre_coordinates',
    'j1_potential',
    'j2_projection',
)

# Aggregate checks are reduced over all points instead of per point.
AGGREGATE_CHECKS = ('k_plus_phi_variance',)

# Points where the chart itself breaks down are skipped, not failed.
SINGULAR_ERRORS = (SingularJacobianError, DegenerateMetricError, NoConvergenceError, DomainError,
                   RankDeficientFrameError)

EXPRESSION_BOX = ((0.5, 2.0), (-0.5, 0.5))


def complex_pairs(values):
    """Complex array -> nested [re, im] lists."""
    values = np.asarray(values, dtype=complex)
    return np.stack([values.real, values.imag], axis=-1).tolist()


def _finite_or_none(value):
    return None if value is None or not math.isfinite(value) else value


@dataclass
class RunConfig:
    prepotential: str
    n: int = None
    domain: object = None
    samples: int = None
    seed: int = None
    tol_overrides: dict = field(default_factory=dict)
    fd_step: float = None
    output: str = None
    format: str = 'json'
    workers: int = None
    panels: int = None

    def __post_init__(self):
        self.samples = option('DEFAULT_SAMPLES', self.samples)
        self.seed = option('DEFAULT_SEED', self.seed)
        self.workers = option('WORKERS', self.workers)
        if self.samples < 1:
            raise ConfigError(f"samples must be at least 1, got {self.samples}")
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if self.fd_step is not None and self.fd_step <= 0:
            raise ConfigError(f"fd_step must be positive, got {self.fd_step}")
        if self.format not in ('json', 'csv'):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        for check, value in self.tol_overrides.items():
            if check not in CHECKS:
                raise ConfigError(f"unknown check {check!r} in tolerance overrides")
            if not value > 0:
                raise ConfigError(f"tolerance for {check} must be positive, got {value}")
        self.name, self.expr = resolve(self.prepotential, self.n)
        self.n = self.expr.n
        if self.domain is None:
            self.domain = self._default_domain()
        self.domain = np.asarray(self.domain, dtype=float)
        if self.domain.shape != (2 * self.n, 2):
            raise ConfigError(f"domain needs {2 * self.n} intervals, got shape {self.domain.shape}")
        if np.any(self.domain[:, 0] >= self.domain[:, 1]):
            raise ConfigError("every domain interval must satisfy lo < hi")

    def _default_domain(self):
        if self.name in BUILTINS:
            return domain_box(self.name, self.n)
        re_box, im_box = EXPRESSION_BOX
        return np.array([re_box] * self.n + [im_box] * self.n)

    def steps(self):
        return (option('FD_STEP_GRADIENT', self.fd_step), option('FD_STEP_EXTERIOR', self.fd_step))

    def as_dict(self):
        return {
            'prepotential': self.prepotential,
            'expression': self.expr.to_text(),
            'n': self.n,
            'domain': self.domain.tolist(),
            'samples': self.samples,
            'seed': self.seed,
            'tol_overrides': dict(sorted(self.tol_overrides.items())),
            'fd_step': self.fd_step,
            'format': self.format,
            'panels': option('XI_RECOVERY_PANELS', self.panels),
        }


@dataclass
class CheckResult:
    name: str
    points_evaluated: int
    max_abs_residual: float
    tolerance: float
    passed: bool
    status: str
    points_skipped: int = 0


@dataclass
class PointResult:
    index: int
    w: np.ndarray
    y: np.ndarray
    residuals: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)
    k_plus_phi: float = None
    signature: tuple = None
    error: str = None

    @property
    def singular(self):
        return self.error is not None


@dataclass
class VerificationReport:
    config: dict
    sign_vector: dict
    checks: list
    failures: list
    wall_time_ms: float
    schema_version: int = SCHEMA_VERSION
    signatures: dict = field(default_factory=dict)
    singular_points: int = 0
    warnings: list = field(default_factory=list)
    exit_code: int = EXIT_OK

    @property
    def passed(self):
        return self.exit_code == EXIT_OK

    def as_dict(self):
        return asdict(self)


class VerificationService:
    """Runs the identity suite over seeded sample points."""

    def __init__(self, config):
        self.config = config
        self.F = config.expr
        self.gradient_step, self.exterior_step = config.steps()
        self.panels = option('XI_RECOVERY_PANELS', config.panels)

    def sample_points(self):
        rng = np.random.default_rng(self.config.seed)
        n = self.config.n
        lo, hi = self.config.domain[:, 0], self.config.domain[:, 1]
        params = rng.uniform(lo, hi, size=(self.config.samples, 2 * n))
        ys = rng.uniform(-1.0, 1.0, size=(self.config.samples, 2 * n))
        return [(index, params[index, :n] + 1j * params[index, n:], ys[index])
                for index in range(self.config.samples)]

    def evaluate_point(self, task):
        """Residuals at one sample point.

        A point whose chart breaks down is marked singular. A check that hits
        a singular chart point of its own (an FD neighbour or a recovery
        path) is recorded in `skipped` while the other checks still count.
        """
        index, w, y = task
        result = PointResult(index=index, w=w, y=y)
        try:
            point = sk_point(self.F, w)
            frame = hk_frame(self.F, w, y)
        except SINGULAR_ERRORS as exc:
            logger.warning(f"sample {index} at w={w} skipped: {exc.__class__.__name__}: {exc}")
            result.error = f"{exc.__class__.__name__}: {exc}"
            return result
        result.signature = point.signature
        result.k_plus_phi = hk_potential_check(self.F, w)[1]
        for names, evaluate in self._check_groups(point, frame, w, y):
            try:
                result.residuals.update(evaluate())
            except SINGULAR_ERRORS as exc:
                reason = f"{exc.__class__.__name__}: {exc}"
                logger.info(f"sample {index}: {', '.join(names)} skipped: {reason}")
                result.skipped.update(dict.fromkeys(names, reason))
        return result

    def _check_groups(self, point, frame, w, y):
        """(check names, thunk) pairs; FD checks at one point share an inversion cache."""
        F = self.F
        cache = InversionCache(F)

        def bilagrangian():
            residual = bilagrangian_residual(point.space, frame_from_tau(point.chart.tau))
            return {'bilagrangian_omega1': residual.r1, 'bilagrangian_omega2': residual.r2}

        def moment():
            result = moment_map(F, w, y, step=self.gradient_step, cache=cache)
            return {'moment_map': result.residual, 'equivariance': result.equivariance}

        def j2_projection():
            result = j2_projection_residual(F, w, y, self.exterior_step, cache)
            residual = max(result.holomorphic, result.pullback)
            return {'j2_projection': residual if result.rank == len(point.g) else math.inf}

        def single(name, fn):
            return (name,), lambda: {name: fn()}

        return [
            (('bilagrangian_omega1', 'bilagrangian_omega2'), bilagrangian),
            single('g_symmetry', lambda: point.asymmetry),
            (('i_squared', 'i_g_orthogonal', 'i_symplectic', 'metric_from_omega'),
             lambda: compatibility_residuals(point)),
            single('dnabla_i', lambda: dnabla_I_residual(F, w, self.exterior_step, cache)),
            single('hamiltonian_field', lambda: hamiltonian_field_check(F, w, self.gradient_step, cache)),
            single('type_10', lambda: holomorphic_coords(F, w)[1]),
            single('kahler_potential', lambda: kahler_potential_residual(F, w, self.exterior_step, cache)),
            single('legendre_dual_gradient', lambda: legendre_dual(F, w, self.gradient_step, cache)[1]),
            single('xi_recovery', lambda: xi_recovery_residual(F, w, panels=self.panels)),
            single('quaternion', frame.quaternion_residual),
            single('metric_consistency', frame.metric_consistency),
            single('closedness', lambda: closedness_residual(F, w, self.exterior_step, cache)),
            (('moment_map', 'equivariance'), moment),
            single('harmonicity', lambda: harmonic_residual(F, w, (1.0, 0.0, y[0]))),
            single('legendre_coordinates', lambda: legendre_coordinates_residual(F, w, self.gradient_step)),
            single('j1_potential', lambda: j1_potential_residual(F, w, y)),
            (('j2_projection',), j2_projection),
        ]

    def run(self):
        started = time.perf_counter()
        tasks = self.sample_points()
        logger.info(f"verifying {self.config.prepotential!r} (n={self.config.n}) "
                    f"on {len(tasks)} points with {self.config.workers} worker(s)")
        with ThreadPoolExecutor(max_workers=self.config.workers) as executor:
            results = list(executor.map(self.evaluate_point, tasks))
        checks, failures = self._aggregate(results)
        regular = [r for r in results if not r.singular]
        signatures = {}
        for r in regular:
            key = f"({r.signature[0]},{r.signature[1]})"
            signatures[key] = signatures.get(key, 0) + 1
        if not regular:
            exit_code = EXIT_ALL_SINGULAR
        elif all(c.passed for c in checks):
            exit_code = EXIT_OK
        else:
            exit_code = EXIT_CHECK_FAILED
        report = VerificationReport(
            config=self.config.as_dict(),
            sign_vector=dict(SIGN_VECTOR),
            checks=[asdict(c) for c in checks],
            failures=failures,
            wall_time_ms=(time.perf_counter() - started) * 1000.0,
            signatures=dict(sorted(signatures.items())),
            singular_points=len(results) - len(regular),
            warnings=self._warnings(results, checks),
            exit_code=exit_code,
        )
        failed = [c.name for c in checks if not c.passed]
        if exit_code == EXIT_ALL_SINGULAR:
            logger.warning("every sample point was singular")
        elif failed:
            logger.warning(f"failed checks: {', '.join(failed)}")
        else:
            logger.info(f"all {len(checks)} checks passed")
        return report

    def _warnings(self, results, checks):
        """Notes for sample sets where singular points or skipped checks exceed the
        SINGULAR_WARN_FRACTION setting."""
        threshold = option('SINGULAR_WARN_FRACTION')
        warnings = []
        singular = sum(1 for r in results if r.singular)
        if results and singular / len(results) > threshold:
            warnings.append(f"{singular} of {len(results)} sample points are singular")
        regular = len(results) - singular
        for check in checks:
            if regular and check.points_skipped / regular > threshold:
                warnings.append(f"{check.name} skipped at {check.points_skipped} of {regular} regular points")
        for message in warnings:
            logger.warning(message)
        return warnings

    def _aggregate(self, results):
        regular = [r for r in results if not r.singular]
        limit = option('FAILURE_EXAMPLES')
        overrides = self.config.tol_overrides
        checks, failures = [], []
        for name in CHECKS:
            tol = tolerance(name, overrides)
            if name in AGGREGATE_CHECKS:
                values = [r.k_plus_phi for r in regular]
                residual = float(np.var(values)) if values else None
                scored = []
            else:
                scored = [(r.residuals[name], r) for r in regular if name in r.residuals]
                residual = max((value for value, _ in scored), key=_nan_last, default=None)
            evaluated = len(values) if name in AGGREGATE_CHECKS else len(scored)
            skipped = sum(1 for r in regular if name in r.skipped)
            if residual is None:
                checks.append(CheckResult(name, 0, None, tol, False, 'skipped-singular', skipped))
                continue
            passed = bool(residual < tol)
            status = 'pass' if passed else 'fail'
            checks.append(CheckResult(name, evaluated, residual, tol, passed, status, skipped))
            if not passed:
                scored.sort(key=lambda item: (-_nan_last(item[0]), item[1].index))
                for value, r in scored[:limit]:
                    failures.append({
                        'check': name,
                        'index': r.index,
                        'residual': _finite_or_none(value),
                        'w': complex_pairs(r.w),
                        'y': r.y.tolist(),
                    })
        return checks, failures


def _nan_last(value):
    return math.inf if math.isnan(value) else value


def run_verify(config):
    return VerificationService(config).run()


def _scan_axes(config, grid):
    grid = [int(count) for count in grid]
    if len(grid) == 1:
        grid = grid * (2 * config.n)
    if len(grid) != 2 * config.n:
        raise ConfigError(f"grid needs 1 or {2 * config.n} counts, got {len(grid)}")
    if any(count < 2 for count in grid):
        raise ConfigError("every grid axis needs at least 2 points")
    return [np.linspace(lo, hi, count) for (lo, hi), count in zip(config.domain, grid)]


def _empty_row(coordinates, w=None):
    return {
        'coordinates': [float(c) for c in coordinates],
        'w': None if w is None else complex_pairs(w),
        'x': None,
        'det_g': None,
        'eigenvalues': None,
        'signature': None,
        'transversal': False,
        'singular': False,
        'error': None,
    }


def scan_row(F, w, coordinates):
    row = _empty_row(coordinates, w)
    try:
        chart = embed(F, w)
        row['x'] = chart.x.tolist()
        frame = frame_from_tau(chart.tau)
        residual = bilagrangian_residual(standard_space(chart.n), frame)
        row['transversal'] = residual.transversal_x and residual.transversal_xi
        point = sk_point(F, w)
    except SINGULAR_ERRORS as exc:
        row['singular'] = True
        row['error'] = f"{exc.__class__.__name__}: {exc}"
        return row
    row['det_g'] = float(np.linalg.det(point.g))
    row['eigenvalues'] = point.eigenvalues.tolist()
    row['signature'] = list(point.signature)
    return row


def run_scan(config, grid, chart='w', w_guess=None):
    """Table of metric data over a grid in the w-chart or the x-chart.

    In the x-chart each grid point is found by Newton continuation from the
    previous one; `w_guess` seeds the first point.
    """
    if chart not in ('w', 'x'):
        raise ConfigError(f"chart must be 'w' or 'x', got {chart!r}")
    axes = _scan_axes(config, grid)
    F, n = config.expr, config.n
    if w_guess is None:
        box = config._default_domain()
        w_guess = box[:n].mean(axis=1) + 1j * box[n:].mean(axis=1)
    w_previous = np.asarray(w_guess, dtype=complex).reshape(-1)
    rows = []
    for coordinates in product(*axes):
        coordinates = np.array(coordinates)
        if chart == 'w':
            rows.append(scan_row(F, coordinates[:n] + 1j * coordinates[n:], coordinates))
            continue
        try:
            w = invert_chart(F, coordinates, w_previous)
        except SINGULAR_ERRORS as exc:
            logger.warning(f"x-chart scan: no chart point over x={coordinates.tolist()}: {exc}")
            rows.append({**_empty_row(coordinates), 'singular': True,
                         'error': f"{exc.__class__.__name__}: {exc}"})
            continue
        rows.append(scan_row(F, w, coordinates))
        w_previous = w
    singular = sum(row['singular'] for row in rows)
    logger.info(f"scanned {len(rows)} grid points, {singular} singular")
    return rows


def fixture_record(F, w):
    point = sk_point(F, w)
    chart = point.chart
    z, _ = holomorphic_coords(F, w)
    K, _ = hk_potential_check(F, w)
    return {
        'w': complex_pairs(chart.w),
        'x': chart.x.tolist(),
        'xi': chart.xi.tolist(),
        'phi': chart.phi,
        'g': point.g.tolist(),
        'I': point.I.tolist(),
        'signature': list(signature(point.g)),
        'z': complex_pairs(z),
        'K': K,
        'theta': complex_pairs(cubic_form(F, w).theta),
    }


def export_fixture(config, points):
    """Versioned regression document with one record per point."""
    records = [fixture_record(config.expr, w) for w in points]
    return {
        'schema_version': SCHEMA_VERSION,
        'prepotential': config.prepotential,
        'expression': config.expr.to_text(),
        'n': config.n,
        'records': records,
    }
