import math

from django.db import migrations, models


def backfill_errors(apps, schema_editor):
    ReportRow = apps.get_model("experiments", "ReportRow")
    for row in ReportRow.objects.all():
        row.error = math.hypot(row.estimate - row.reference, row.estimate_imag - row.reference_imag)
        row.save(update_fields=["error"])


def noop(apps, schema_editor):
    pass


class Migration(migrations.Migration):

    dependencies = [
        ("experiments", "0001_initial"),
    ]

    operations = [
        migrations.AddField(
            model_name="reportrow",
            name="reference_imag",
            field=models.FloatField(default=0.0),
        ),
        migrations.AddField(
            model_name="reportrow",
            name="estimate_imag",
            field=models.FloatField(default=0.0),
        ),
        migrations.AddField(
            model_name="reportrow",
            name="error",
            field=models.FloatField(default=0.0),
        ),
        migrations.RunPython(backfill_errors, reverse_code=noop),
    ]
