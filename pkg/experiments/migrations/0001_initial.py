from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="ExperimentRun",
            fields=[
                ("id", models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name="ID")),
                ("subcommand", models.CharField(max_length=32)),
                ("seed", models.CharField(max_length=20)),
                ("config", models.JSONField(default=dict)),
                ("rng_algorithm", models.CharField(max_length=64)),
                ("schema_version", models.PositiveIntegerField()),
                ("build", models.CharField(blank=True, max_length=64)),
                (
                    "status",
                    models.CharField(choices=[("passed", "Passed"), ("failed", "Failed")], max_length=16),
                ),
                ("created_at", models.DateTimeField(auto_now_add=True)),
            ],
            options={
                "ordering": ["-created_at", "-id"],
            },
        ),
        migrations.CreateModel(
            name="ReportRow",
            fields=[
                ("id", models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name="ID")),
                ("position", models.PositiveIntegerField()),
                ("label", models.CharField(max_length=128)),
                ("ks", models.JSONField(blank=True, default=list)),
                ("reference", models.FloatField()),
                ("estimate", models.FloatField()),
                ("standard_error", models.FloatField(default=0.0)),
                ("tolerance", models.FloatField(blank=True, null=True)),
                ("passed", models.BooleanField()),
                (
                    "run",
                    models.ForeignKey(
                        on_delete=django.db.models.deletion.CASCADE,
                        related_name="rows",
                        to="experiments.experimentrun",
                    ),
                ),
            ],
            options={
                "ordering": ["run", "position"],
                "constraints": [
                    models.UniqueConstraint(fields=("run", "position"), name="unique_row_position_per_run"),
                ],
            },
        ),
    ]
