from experiments.cli import ExperimentCommand, parse_int, parse_int_list
from experiments.services import CLT


class Command(ExperimentCommand):
    help = (
        "Central limit for tensor powers of the defining representation: exact centered "
        "moments against Wick moments, and samples of the fitted scaled GUE_v."
    )
    subcommand = CLT

    def add_experiment_arguments(self, parser):
        parser.add_argument("--d", dest="d", default="2", help="Rank d >= 2.")
        parser.add_argument("--n", default="16,64,256", help="Tensor powers, comma-separated.")
        parser.add_argument("--k", default="2,3,4,5,6", help="Moment orders, comma-separated.")

    def config_fields(self, options):
        return {
            "d": parse_int(options["d"], "rank"),
            "n_list": parse_int_list(options["n"], "tensor power list"),
            "k_list": parse_int_list(options["k"], "moment order list"),
        }
