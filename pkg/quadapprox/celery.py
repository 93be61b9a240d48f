import os
from celery import Celery

# Set the default Django settings module for the 'celery' program.
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'quadapprox.settings')

app = Celery('quadapprox')

# Celery-related configuration keys carry the `CELERY_` prefix in settings.py.
app.config_from_object('django.conf:settings', namespace='CELERY')

# Picks up certificates.tasks and spectrum.tasks.
app.autodiscover_tasks()
