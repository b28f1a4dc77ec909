from experiments.cli import ExactCommand, parse_int, parse_weight
from representations.decompose import tensor_power_measure


class Command(ExactCommand):
    help = "Random highest weight of the n-th tensor power of an irreducible U(d) representation."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--w", required=True, help="Highest weight.")
        parser.add_argument("--n", required=True, help="Tensor power n >= 1.")
        parser.add_argument("--state-cap", dest="state_cap", help="Override the STATE_CAP setting.")

    def run(self, **options) -> None:
        weight = parse_weight(options["w"], self.rank(options))
        state_cap = parse_int(options["state_cap"], "state cap") if options.get("state_cap") else None
        measure = tensor_power_measure(weight, parse_int(options["n"], "tensor power"), state_cap=state_cap)
        self.emit(measure.to_rows(), options, w=weight.label(), total_dim=str(measure.total_dim))
