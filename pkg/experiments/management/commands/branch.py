from experiments.cli import ExactCommand, parse_weight
from representations.decompose import branch_one_step


class Command(ExactCommand):
    help = "Branch an irreducible U(d) representation to U(d-1)."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--w", required=True, help="Highest weight of U(d).")

    def run(self, **options) -> None:
        weight = parse_weight(options["w"], self.rank(options))
        rows = [
            {"weight": child.label(), "multiplicity": str(multiplicity)}
            for child, multiplicity in branch_one_step(weight).items()
        ]
        self.emit(rows, options, w=weight.label())
