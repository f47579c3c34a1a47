"""
URL configuration for dlrlab project.

Only the admin is served; it lists runs stored with --persist.
"""
from django.contrib import admin
from django.urls import path


urlpatterns = [
    path('admin/', admin.site.urls),
]
