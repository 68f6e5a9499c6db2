import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'toll_routing.settings')
django.setup()
