from experiments.cli import ExperimentCommand, parse_int, parse_int_list, parse_weight
from experiments.services import RESTRICT_LIMIT


class Command(ExperimentCommand):
    help = (
        "Compare the rescaled restriction of L * lambda_0 from U(d') to U(d) with the "
        "eigenvalues of the d x d corner of a Haar-rotated diag(lambda_0)."
    )
    subcommand = RESTRICT_LIMIT

    def add_experiment_arguments(self, parser):
        parser.add_argument("--w", required=True, help="lambda_0, a highest weight of U(d').")
        parser.add_argument("--d", dest="d", required=True, help="Target rank d < d'.")
        parser.add_argument("--d-prime", dest="d_prime", help="Rank d' (checked against --w).")
        parser.add_argument("--scale", default="200", help="Scale(s) L, comma-separated.")

    def config_fields(self, options):
        d_prime = parse_int(options["d_prime"], "rank") if options.get("d_prime") else None
        return {
            "lam": parse_weight(options["w"], d_prime),
            "d": parse_int(options["d"], "rank"),
            "scales": parse_int_list(options["scale"], "scale list"),
        }
