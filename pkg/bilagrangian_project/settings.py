"""
Django settings for bilagrangian_project.

The project has no web surface: Django provides the configuration layer,
the management-command CLI (verify, scan, fixture) and a small SQLite
archive of verification reports.
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'django-insecure-bilagrangian-local-key')

DEBUG = os.getenv('DJANGO_DEBUG', 'False').lower() in ('1', 'true', 'yes')

ALLOWED_HOSTS = ['localhost', '127.0.0.1']


# Application definition

INSTALLED_APPS = [
    'django.contrib.auth',
    'django.contrib.contenttypes',

    # Third party apps
    'rest_framework',

    # Local apps
    'geometry',
]


# Database - SQLite archive for verification reports

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.getenv('GEOMETRY_DB_PATH', str(BASE_DIR / 'db.sqlite3')),
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'INFO',
            'propagate': False,
        },
        'geometry': {
            'handlers': ['console'],
            'level': os.getenv('GEOMETRY_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# Django REST Framework (serializers only, no API views)
REST_FRAMEWORK = {
    'COERCE_DECIMAL_TO_STRING': False,
}


# Numerical defaults. Every value can be overridden per call; the CLI
# exposes the tolerances through --tol and the FD step through --fd-step.
GEOMETRY = {
    # Check tolerances: 1e-9 for jet-exact identities, 1e-4 for FD exterior
    # derivatives, 1e-5 for FD gradients.
    'TOLERANCES': {
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
    },
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
    'WORKERS': int(os.getenv('GEOMETRY_WORKERS', '1')),
    'DEFAULT_SEED': 20240601,
    'DEFAULT_SAMPLES': 100,
    'FAILURE_EXAMPLES': 3,
}
