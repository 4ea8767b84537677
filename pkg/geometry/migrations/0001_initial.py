# Generated initial migration for geometry app

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='VerificationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('prepotential', models.CharField(db_index=True, max_length=500)),
                ('n', models.PositiveIntegerField()),
                ('samples', models.PositiveIntegerField()),
                ('seed', models.CharField(max_length=20)),
                ('passed', models.BooleanField(db_index=True, default=False)),
                ('exit_code', models.PositiveSmallIntegerField()),
                ('wall_time_ms', models.FloatField()),
                ('sign_vector', models.JSONField(default=dict)),
                ('report', models.JSONField(default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True, db_index=True)),
            ],
            options={
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['prepotential', '-created_at'], name='run_prepot_created_idx')],
            },
        ),
    ]
