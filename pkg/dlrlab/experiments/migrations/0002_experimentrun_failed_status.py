# Generated by Django 5.2.5 on 2026-10-18 12:00

from django.db import migrations, models


class Migration(migrations.Migration):

    dependencies = [
        ('experiments', '0001_initial'),
    ]

    operations = [
        migrations.AlterField(
            model_name='experimentrun',
            name='status',
            field=models.CharField(choices=[('running', 'Running'), ('succeeded', 'Succeeded'), ('goal_not_met', 'Goal not met'), ('failed', 'Failed')], default='running', max_length=20),
        ),
    ]
