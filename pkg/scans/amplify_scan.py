"""amplify: amplified pre-trace sum, spectral side against geometric side."""

from heckelab.amplifier import (
    admissible_prime_count,
    amplified_sum_geometric,
    amplified_sum_spectral,
    amplifier_levels,
    build_amplifier,
    self_amplification_floor,
)
from heckelab.errors import InsufficientDataError
from heckelab.hecke_so3 import joint_eigenbasis
from result_store import ScanResult
from scans.base_scan import BaseScan, form_index, nonnegative_int, positive_int, unit_point


class AmplifyScan(BaseScan):
    name = "amplify"
    anchor = (
        "sum_j rho(mu - mu_j)|phi_j(x)|^2 |sum_n z_n eta_j(n)|^2 = "
        "sum_{n,m} z_n conj(z_m) sum_{d|(n,m)} d/sqrt(nm) K_{nm/d^2}(x, x)"
    )
    help = "amplified sum for one target form, from eigendata and from Hecke kernels"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--mu", type=float, required=True)
        parser.add_argument("--N", dest="length", type=positive_int, default=None, help="amplifier length")
        parser.add_argument("--j0", type=form_index, required=True, help="target form as k:index")
        parser.add_argument("--x", type=unit_point, default=(0.0, 0.0, 1.0))
        parser.add_argument("--delta-supp", dest="delta_supp", type=float, default=None)
        parser.add_argument("--kmax", type=nonnegative_int, default=None, help="degree cap for both sides")

    def run(self, args):
        length = args.length or self.config["scans"]["amplifier_length"]
        k_max = self.config["scans"]["spectral_kmax"] if args.kmax is None else args.kmax
        w = self.window(args.delta_supp)
        levels = amplifier_levels(length)
        k0, j0 = args.j0

        if not levels:
            raise InsufficientDataError(f"No admissible prime p <= sqrt({length})")
        target = joint_eigenbasis(k0, levels, self.seed)
        z = build_amplifier(target, j0, length)
        prime_count, prime_estimate = admissible_prime_count(length**0.5)

        bases = self.map(lambda k: joint_eigenbasis(k, levels, self.seed), range(k_max + 1), label=lambda k: f"k{k}")
        spectral = amplified_sum_spectral(args.x, args.mu, z, w, lambda k: bases[k], k_max)
        geometric = amplified_sum_geometric(args.x, args.mu, z, w, k_max)
        gap = abs(spectral - geometric.value) / max(abs(spectral), abs(geometric.value), 1e-300)
        self.logger.info("Amplified sums: spectral %.12g, geometric %.12g, gap %.3e", spectral, geometric.value, gap)

        return ScanResult(
            record={
                "mu": args.mu,
                "N": length,
                "j0": {"k": k0, "index": j0},
                "x": args.x,
                "k_max": k_max,
                "levels": levels,
                "admissible_primes": {"count": prime_count, "estimate": prime_estimate},
                "amplifier": {str(n): value for n, value in z.entries.items()},
                "spectral": spectral,
                "geometric": geometric.value,
                "geometric_imaginary_part": geometric.imaginary_part,
                "relative_gap": gap,
                "self_amplification_floor": self_amplification_floor(args.x, args.mu, z, w, target),
                "terms": [
                    {"level": term.level, "coefficient": term.coefficient, "kernel": term.kernel}
                    for term in geometric.terms
                ],
            }
        )
