import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'quadapprox.settings')
django.setup()
