from experiments.cli import ExperimentCommand, parse_int, parse_int_list, parse_weight
from experiments.services import TENSOR_LIMIT


class Command(ExperimentCommand):
    help = (
        "Compare the rescaled random highest weight of rho_{L lambda_0} x rho_{L mu_0} with "
        "the spectrum of a sum of two independent invariant matrices."
    )
    subcommand = TENSOR_LIMIT

    def add_experiment_arguments(self, parser):
        parser.add_argument("--a", required=True, help="lambda_0.")
        parser.add_argument("--b", required=True, help="mu_0.")
        parser.add_argument("--d", dest="d", help="Rank (checked against the weights).")
        parser.add_argument("--scale", default="10,20,40", help="Scale(s) L, comma-separated.")

    def config_fields(self, options):
        d = parse_int(options["d"], "rank") if options.get("d") else None
        return {
            "lam": parse_weight(options["a"], d),
            "mu": parse_weight(options["b"], d),
            "d": d,
            "scales": parse_int_list(options["scale"], "scale list"),
        }
