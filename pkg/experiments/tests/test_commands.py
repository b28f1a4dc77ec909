import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from experiments.models import ExperimentRun

RESTRICT_ARGS = ["--w", "1,0", "--d", "1", "--scale", "200", "--samples", "20000"]


def run_command(name, *args):
    stdout = StringIO()
    call_command(name, *args, stdout=stdout)
    return stdout.getvalue()


def decode_error(caught):
    return json.loads(str(caught.exception))


class ExactCommandTests(SimpleTestCase):
    def test_dim(self):
        output = run_command("dim", "--w", "2,1,0")
        self.assertIn("8", output)
        self.assertIn("2,1,0", output)

    def test_tensor(self):
        output = run_command("tensor", "--a", "1,0", "--b", "1,0")
        self.assertIn("2,0", output)
        self.assertIn("1,1", output)

    def test_branch(self):
        output = run_command("branch", "--w", "1,1")
        self.assertIn("1", output)

    def test_tensor_json_report(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "tensor.json"
            run_command("tensor", "--a", "1,0", "--b", "1,0", "--json-report", str(path))
            payload = json.loads(path.read_text())
        self.assertEqual(payload["command"], "tensor")
        self.assertEqual({row["weight"] for row in payload["rows"]}, {"2,0", "1,1"})

    def test_parse_error(self):
        with self.assertRaises(CommandError) as caught:
            run_command("dim", "--w", "2,x,0")
        self.assertEqual(caught.exception.returncode, 2)
        self.assertEqual(decode_error(caught)["error"], "parse_error")

    def test_rank_mismatch(self):
        with self.assertRaises(CommandError) as caught:
            run_command("tensor", "--a", "1,0", "--b", "1,0,0")
        self.assertEqual(decode_error(caught)["error"], "rank_mismatch")

    def test_not_dominant(self):
        with self.assertRaises(CommandError) as caught:
            run_command("dim", "--w", "0,1")
        self.assertEqual(caught.exception.returncode, 2)
        self.assertEqual(decode_error(caught)["error"], "not_dominant")


class ExperimentCommandTests(SimpleTestCase):
    def test_missing_seed(self):
        with self.assertRaises(CommandError) as caught:
            run_command("restrict_limit", *RESTRICT_ARGS)
        self.assertEqual(caught.exception.returncode, 2)
        self.assertEqual(decode_error(caught)["error"], "missing_seed")

    def test_same_seed_gives_identical_files(self):
        with tempfile.TemporaryDirectory() as directory:
            root = Path(directory)
            for name in ("first", "second"):
                run_command(
                    "restrict_limit",
                    *RESTRICT_ARGS,
                    "--seed",
                    "12345",
                    "--out",
                    str(root / f"{name}.csv"),
                    "--json-report",
                    str(root / f"{name}.json"),
                )
            self.assertEqual((root / "first.csv").read_bytes(), (root / "second.csv").read_bytes())
            self.assertEqual((root / "first.json").read_bytes(), (root / "second.json").read_bytes())
            payload = json.loads((root / "first.json").read_text())
            header = (root / "first.csv").read_text().splitlines()[0]
        self.assertEqual(payload["schema_version"], 1)
        self.assertEqual(payload["seed"], 12345)
        self.assertIn("rng_algorithm", payload)
        self.assertTrue(payload["passed"])
        self.assertNotIn("created_at", payload)
        self.assertEqual(header, "eig_1")

    def test_zero_tolerance_fails_the_report(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "report.json"
            with self.assertRaises(CommandError) as caught:
                run_command(
                    "restrict_limit", *RESTRICT_ARGS, "--seed", "12345", "--w1-tolerance", "0", "--json-report", str(path)
                )
            payload = json.loads(path.read_text())
        self.assertEqual(caught.exception.returncode, 1)
        self.assertEqual(decode_error(caught)["error"], "report_failed")
        self.assertFalse(payload["passed"])

    def test_bad_spin_list(self):
        with self.assertRaises(CommandError) as caught:
            run_command("so3_demo", "--seed", "1", "--spins", "1/2,a")
        self.assertEqual(decode_error(caught)["error"], "parse_error")


class RecordedRunTests(TestCase):
    def test_record_flag_stores_run(self):
        output = run_command("so3_demo", "--seed", "8", "--samples", "20000", "--spins", "1/2,1", "--record")
        run = ExperimentRun.objects.get()
        self.assertIn(f"recorded run {run.pk}", output)
        self.assertEqual(run.seed, "8")
        self.assertEqual(run.subcommand, "so3_demo")
        self.assertTrue(run.rows.exists())
