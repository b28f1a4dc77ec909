from experiments.cli import ExactCommand, parse_weight
from representations.decompose import tensor_decompose
from representations.weights import dim_weyl


class Command(ExactCommand):
    help = "Decompose the tensor product of two irreducible U(d) representations."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--a", required=True, help="First highest weight.")
        parser.add_argument("--b", required=True, help="Second highest weight.")

    def run(self, **options) -> None:
        d = self.rank(options)
        a, b = parse_weight(options["a"], d), parse_weight(options["b"], d)
        decomposition = tensor_decompose(a, b)
        rows = [
            {"weight": weight.label(), "multiplicity": str(multiplicity), "dim": str(dim_weyl(weight))}
            for weight, multiplicity in decomposition.items()
        ]
        self.emit(rows, options, a=a.label(), b=b.label())
