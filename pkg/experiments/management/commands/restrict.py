from experiments.cli import ExactCommand, parse_int, parse_weight
from representations.decompose import restrict


class Command(ExactCommand):
    help = "Random highest weight of the restriction of an irreducible U(d') representation to U(d)."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--w", required=True, help="Highest weight of U(d').")
        parser.add_argument("--to", required=True, help="Target rank d < d'.")

    def run(self, **options) -> None:
        weight = parse_weight(options["w"], self.rank(options))
        measure = restrict(weight, parse_int(options["to"], "rank"))
        self.emit(measure.to_rows(), options, w=weight.label(), total_dim=str(measure.total_dim))
