"""
Django settings for dlrlab project.

Generated by 'django-admin startproject' using Django 5.2.5.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('DJANGO_PROJECT_SECRET_KEY', 'django-insecure-dlrlab-local-only')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.getenv('DJANGO_DEBUG', 'False') == 'True'

ALLOWED_HOSTS = ["localhost", "127.0.0.1"]


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'rest_framework',
    'mnist',
    'network',
    'optimizers',
    'traces',
    'experiments',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'dlrlab.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'dlrlab.wsgi.application'


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases
# Runs are only stored with --persist. SQLite unless DB_ENGINE=postgresql.

if os.getenv('DB_ENGINE', 'sqlite') == 'postgresql':
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.postgresql',
            'NAME': os.getenv('DB_NAME', 'postgres'),
            'USER': os.getenv('DB_USERNAME', 'postgres'),
            'PASSWORD': os.getenv('DB_PASSWORD'),
            'HOST': os.getenv('DB_HOST', 'localhost'),
            'PORT': os.getenv('DB_PORT', '5432'),
        }
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': os.getenv('DB_NAME', BASE_DIR / 'db.sqlite3'),
        }
    }


# Password validation
# https://docs.djangoproject.com/en/5.2/ref/settings/#auth-password-validators

AUTH_PASSWORD_VALIDATORS = [
    {
        'NAME': 'django.contrib.auth.password_validation.UserAttributeSimilarityValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.MinimumLengthValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.CommonPasswordValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.NumericPasswordValidator',
    },
]


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)
# https://docs.djangoproject.com/en/5.2/howto/static-files/

STATIC_URL = 'static/'

STATIC_ROOT = os.path.join(BASE_DIR, 'staticfiles')

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging

DLRLAB_LOG_LEVEL = os.getenv('DLRLAB_LOG_LEVEL', 'INFO')

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
        'level': DLRLAB_LOG_LEVEL,
    },
}


# Experiment defaults (overridden by --config files, manifests and flags)

DLRLAB_DATA_DIR = os.getenv('DLRLAB_DATA_DIR', None)
DLRLAB_OUTPUT_DIR = os.getenv('DLRLAB_OUTPUT_DIR', 'runs')
DLRLAB_BATCH_SIZE = int(os.getenv('DLRLAB_BATCH_SIZE', 10))
DLRLAB_EVAL_INTERVAL = int(os.getenv('DLRLAB_EVAL_INTERVAL', 100))
DLRLAB_THRESHOLD = float(os.getenv('DLRLAB_THRESHOLD', 0.96))
DLRLAB_MAX_EPOCHS = float(os.getenv('DLRLAB_MAX_EPOCHS', 30))
DLRLAB_HIDDEN_UNITS = int(os.getenv('DLRLAB_HIDDEN_UNITS', 100))
DLRLAB_RUNS = int(os.getenv('DLRLAB_RUNS', 10))
DLRLAB_WORKERS = int(os.getenv('DLRLAB_WORKERS', 1))
DLRLAB_FIT_STARTS = int(os.getenv('DLRLAB_FIT_STARTS', 8))
DLRLAB_REPLAY_SEED_OFFSET = int(os.getenv('DLRLAB_REPLAY_SEED_OFFSET', 1000))
DLRLAB_TRACE_EPOCHS = float(os.getenv('DLRLAB_TRACE_EPOCHS', 3.0))
DLRLAB_SIZES = os.getenv('DLRLAB_SIZES', '30,100,300')
DLRLAB_START_SIZE = int(os.getenv('DLRLAB_START_SIZE', 60))
DLRLAB_SIZE_STEP = int(os.getenv('DLRLAB_SIZE_STEP', 2))

# Parameter grids searched by the compare and minsize commands, per algorithm.
DLRLAB_DEFAULT_GRIDS = {
    'sgd': {'eta': [0.03, 0.1, 0.3, 1.0, 3.0]},
    'momentum': {'eta': [0.03, 0.1, 0.3, 1.0, 3.0], 'mu': [0.5, 0.9, 0.99]},
    'nesterov': {'eta': [0.03, 0.1, 0.3, 1.0, 3.0], 'mu': [0.5, 0.9, 0.99]},
    'adam': {'adam_alpha': [1e-4, 3e-4, 1e-3, 3e-3], 'epsilon': [1e-8, 1e-4, 1e-2]},
    'dlr-pre': {'eta0': [0.03, 0.1, 0.3, 1.0, 3.0], 'alpha': [1.0, 3.0, 10.0, 30.0]},
    'dlr-post': {'eta0': [0.03, 0.1, 0.3, 1.0, 3.0], 'alpha': [1.0, 3.0, 10.0, 30.0]},
}
