from django.conf import settings

# Check tolerances: 1e-9 for jet-exact identities, 1e-4 for FD exterior
# derivatives, 1e-5 for FD gradients. GEOMETRY['TOLERANCES'] may override
# any subset of them.
DEFAULT_TOLERANCES = {
    'bilagrangian_omega1': 1e-10,
    'bilagrangian_omega2': 1e-10,
    'g_symmetry': 1e-9,
    'i_squared': 1e-9,
    'i_g_orthogonal': 1e-9,
    'i_symplectic': 1e-9,
    'metric_from_omega': 1e-9,
    'dnabla_i': 1e-4,
    'hamiltonian_field': 1e-5,
    'type_10': 1e-9,
    'kahler_potential': 1e-4,
    'legendre_dual_gradient': 1e-5,
    'xi_recovery': 1e-6,
    'quaternion': 1e-9,
    'metric_consistency': 1e-9,
    'closedness': 1e-4,
    'moment_map': 1e-5,
    'equivariance': 1e-12,
    'harmonicity': 1e-10,
    'k_plus_phi_variance': 1e-18,
    'legendre_coordinates': 1e-5,
    'j1_potential': 1e-9,
    'j2_projection': 1e-4,
}

_FALLBACK = {
    'FD_STEP_GRADIENT': 1e-4,
    'FD_STEP_EXTERIOR': 1e-3,
    'FD_EXTERIOR_ACCURACY': 4,
    'NEWTON_TOL': 1e-11,
    'NEWTON_MAX_ITER': 50,
    'NEWTON_MAX_HALVINGS': 20,
    'SINGULAR_COND': 1e6,
    'DEGENERATE_RTOL': 1e-8,
    'QUADRATURE_PANELS': 100,
    'XI_RECOVERY_PANELS': 4,
    'SINGULAR_WARN_FRACTION': 0.5,
    'WORKERS': 1,
    'DEFAULT_SEED': 0,
    'DEFAULT_SAMPLES': 100,
    'FAILURE_EXAMPLES': 3,
    'TOLERANCES': {},
}


def option(name, override=None):
    """Return `override` when given, else the GEOMETRY setting `name`."""
    if override is not None:
        return override
    return getattr(settings, 'GEOMETRY', {}).get(name, _FALLBACK[name])


def tolerance(check, overrides=None):
    """Per-run override, else the configured table, else the built-in default."""
    if overrides and check in overrides:
        return overrides[check]
    return {**DEFAULT_TOLERANCES, **option('TOLERANCES')}[check]
