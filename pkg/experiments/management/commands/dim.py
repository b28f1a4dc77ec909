from experiments.cli import ExactCommand, parse_weight
from representations.weights import casimir_value, dim_weyl


class Command(ExactCommand):
    help = "Dimension (Weyl formula) and Casimir value of an irreducible U(d) representation."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--w", required=True, help="Highest weight, comma-separated, e.g. 2,1,0.")

    def run(self, **options) -> None:
        weight = parse_weight(options["w"], self.rank(options))
        rows = [
            {
                "weight": weight.label(),
                "dim": str(dim_weyl(weight)),
                "casimir": str(casimir_value(weight)),
            }
        ]
        self.emit(rows, options)
