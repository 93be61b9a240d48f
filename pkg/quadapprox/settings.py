"""
Django settings for the quadapprox project.

quadapprox has no web surface: Django supplies configuration, management
commands (the CLI) and the test runner, DRF supplies serializers for the
JSON certificate and profile formats, and Celery runs the long jobs.

Every tunable is read from the environment (or a `.env` file) through
python-decouple.
"""

from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


SECRET_KEY = config('SECRET_KEY', default='quadapprox-local-only-key')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'arithmetic',
    'certificates',
    'spectrum',
]

MIDDLEWARE = []


# Database
# Only used by the test runner; the apps define no models.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# REST Framework Configuration (serializers only)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
}


# Logging
QA_LOG_LEVEL = config('QA_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': QA_LOG_LEVEL,
    },
}


# Arithmetic Configuration
QA_PRECISION_CAP_BITS = config('QA_PRECISION_CAP_BITS', default=2 ** 20, cast=int)
QA_DEFAULT_PRECISION_BITS = config('QA_DEFAULT_PRECISION_BITS', default=192, cast=int)

# Construction Configuration
QA_BLOCK_BUDGET = config('QA_BLOCK_BUDGET', default=10 ** 7, cast=int)
QA_CHOOSE_N_LIMIT = config('QA_CHOOSE_N_LIMIT', default=10_000, cast=int)

# Spectrum Configuration
QA_SPECTRUM_PRECISION_CAP_BITS = config('QA_SPECTRUM_PRECISION_CAP_BITS', default=8192, cast=int)
QA_SPECTRUM_WORKERS = config('QA_SPECTRUM_WORKERS', default=1, cast=int)
QA_SPECTRUM_WINDOW_LEVELS = config('QA_SPECTRUM_WINDOW_LEVELS', default=1 << 15, cast=int)


# Celery Configuration (for background tasks - Using Environment Variables)
CELERY_BROKER_URL = config('REDIS_URL', default='redis://localhost:6379/0')
CELERY_RESULT_BACKEND = config('REDIS_URL', default='redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
# Without a deployed worker, tasks run inline in the calling process.
CELERY_TASK_ALWAYS_EAGER = config('CELERY_TASK_ALWAYS_EAGER', default=True, cast=bool)
CELERY_TASK_EAGER_PROPAGATES = True
