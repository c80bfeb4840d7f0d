"""
WSGI entry point for the sieve_lab results API.

Serves the read-only experiment/evaluation endpoints defined in
``sieve_lab.urls``; the numerical pipeline itself runs through
``manage.py`` commands.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'sieve_lab.settings')

application = get_wsgi_application()
