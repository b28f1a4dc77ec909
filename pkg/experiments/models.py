from django.core.exceptions import ValidationError
from django.db import models


class ExperimentRun(models.Model):
    STATUS_PASSED = "passed"
    STATUS_FAILED = "failed"
    STATUS_CHOICES = [
        (STATUS_PASSED, "Passed"),
        (STATUS_FAILED, "Failed"),
    ]

    subcommand = models.CharField(max_length=32)
    # 64-bit unsigned seeds do not fit a signed BigIntegerField.
    seed = models.CharField(max_length=20)
    config = models.JSONField(default=dict)
    rng_algorithm = models.CharField(max_length=64)
    schema_version = models.PositiveIntegerField()
    build = models.CharField(max_length=64, blank=True)
    status = models.CharField(max_length=16, choices=STATUS_CHOICES)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at", "-id"]

    def __str__(self) -> str:
        return f"{self.subcommand} seed={self.seed} {self.status}"

    @property
    def passed(self) -> bool:
        return self.status == self.STATUS_PASSED

    def clean(self):
        if not self.seed.isdigit() or int(self.seed) >= 2**64:
            raise ValidationError({"seed": "Seed must be a 64-bit unsigned integer."})

    def save(self, *args, **kwargs):
        self.full_clean()
        super().save(*args, **kwargs)


class ReportRow(models.Model):
    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name="rows")
    position = models.PositiveIntegerField()
    label = models.CharField(max_length=128)
    ks = models.JSONField(default=list, blank=True)
    reference = models.FloatField()
    estimate = models.FloatField()
    # Imaginary parts of complex moments; zero for real rows.
    reference_imag = models.FloatField(default=0.0)
    estimate_imag = models.FloatField(default=0.0)
    error = models.FloatField(default=0.0)
    standard_error = models.FloatField(default=0.0)
    tolerance = models.FloatField(null=True, blank=True)
    passed = models.BooleanField()

    class Meta:
        ordering = ["run", "position"]
        constraints = [
            models.UniqueConstraint(fields=["run", "position"], name="unique_row_position_per_run"),
        ]

    def __str__(self) -> str:
        return f"{self.label}: {self.estimate} vs {self.reference}"

    def save(self, *args, **kwargs):
        self.full_clean()
        super().save(*args, **kwargs)
