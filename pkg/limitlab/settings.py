"""
Django settings for the limitlab project.

limitlab has no web surface: Django supplies configuration, management
commands, the ORM for the run ledger and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'limitlab-dev-key-not-for-production')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'representations',
    'experiments',
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('LIMITLAB_DB', str(BASE_DIR / 'limitlab.sqlite3')),
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LOG_LEVEL = os.environ.get('LIMITLAB_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'representations': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
        'experiments': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Numerical guards and reproducibility knobs (read through representations.conf.limit)

LIMITLAB = {
    'STATE_CAP': 10**6,
    'MAX_MOMENT_ORDER': 8,
    'MAX_RANK': 64,
    'MAX_SCALE': 5000,
    'MAX_SAMPLES': 10**7,
    'JACOBI_TOLERANCE': 1e-13,
    'JACOBI_MAX_SWEEPS': 60,
    'HERMITIAN_DEFECT': 1e-12,
    'REPLICA_SIZE': 10_000,
    # Thread count is the only knob with an environment override.
    'THREADS': int(os.environ.get('LIMITLAB_THREADS', '1')),
    'RNG_ALGORITHM': 'numpy.random.PCG64+SeedSequence',
    'REPORT_SCHEMA_VERSION': 1,
}
