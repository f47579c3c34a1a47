from django.apps import AppConfig


class MnistConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mnist'
    verbose_name = 'MNIST data'
