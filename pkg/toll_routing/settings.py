"""
Django settings for the toll_routing project.

The project has no web surface; Django provides the settings module, the
management commands, form validation of scenario files and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get(
    "DJANGO_SECRET_KEY",
    "toll-routing-local-key-not-used-for-any-signing",
)

DEBUG = False

ALLOWED_HOSTS = []

# Version written into every run manifest
TOOL_VERSION = "1.0.0"

# Default output directory for the commands (overridden with --out)
RESULTS_DIRECTORY = BASE_DIR / "results"

# Application definition

INSTALLED_APPS = [
    'corridor',
]

# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging goes to the console; the level of the corridor app can be raised
# or lowered without editing this file.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'corridor': {
            'handlers': ['console'],
            'level': os.environ.get('CORRIDOR_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# Scenario defaults. These reproduce the parameter table of the two-route
# case study; omitted keys of a scenario file are filled from here.
SCENARIO_DEFAULTS = {
    'network': {
        'e0_length': 1.0,
        'e0_v': 80.0,
        'e0_q': 8000.0,
        'e1_length': 1.0,
        'e1_v': 100.0,
        'e1_q': 4000.0,
        'e1_r': 4800.0,
        'e1_w': 20.0,
        'e2_length': 1.0,
        'e2_v': 50.0,
        'e2_q': 2000.0,
        'e2_r': 2400.0,
        'e2_w': 10.0,
        # None routes in proportion to the capacities of e1 and e2
        'alpha': None,
        'dt': 0.005,
    },
    'compliance': {
        'e1_beta0': -4.0,
        'e1_beta1': 0.01,
        'e1_beta2': -0.02,
        'e1_beta3': 0.3,
        'e1_eps': 0.1,
        'e2_beta0': 1.0,
        'e2_beta1': -0.02,
        'e2_beta2': 0.03,
        'e2_beta3': -0.6,
        'e2_eps': 0.1,
    },
    'demand': {
        'd_min': 4000.0,
        'd_max': 6000.0,
    },
    'policy': {
        'toll': 5.0,
    },
    'solver': {
        'resolution': 33,
        'quadrature_nodes': 16,
        'lipschitz_inflation': 1.5,
        'bisection_tol': 10.0,
        'dbar_low': 0.0,
        'dbar_high': 8000.0,
    },
    'simulation': {
        'horizon': 10000,
        'seeds': 5,
        'seed': 0,
        'threshold': 500.0,
        'slope_tolerance': 1e-3,
    },
    'sweep': {
        'p_min': 0.0,
        'p_max': 10.0,
        'p_step': 0.25,
    },
    'region': {
        'p_min': 0.0,
        'p_max': 20.0,
        'p_step': 0.5,
        'dbar_min': 4500.0,
        'dbar_max': 6000.0,
        'dbar_step': 25.0,
        'simulate': False,
    },
}
