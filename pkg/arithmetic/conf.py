from typing import Any

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured


def get_setting(name: str, default: Any) -> Any:
    """Read a project setting, falling back to `default` outside a configured Django process"""
    try:
        return getattr(settings, name, default)
    except ImproperlyConfigured:
        return default
