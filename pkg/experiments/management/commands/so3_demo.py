from experiments.cli import ExperimentCommand, parse_float, parse_spins
from experiments.services import SO3_DEMO


class Command(ExperimentCommand):
    help = "J_z of a uniformly rotated angular momentum against Uniform[-|J|, |J|] and the spin-j weight laws."
    subcommand = SO3_DEMO

    def add_experiment_arguments(self, parser):
        parser.add_argument("--radius", default="1", help="|J| > 0.")
        parser.add_argument("--spins", default="1/2,1,10,50,200", help="Spins j, comma-separated (halves allowed).")

    def config_fields(self, options):
        return {
            "radius": parse_float(options["radius"], "radius"),
            "spins": parse_spins(options["spins"]),
        }
