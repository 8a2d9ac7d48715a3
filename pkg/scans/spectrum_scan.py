"""spectrum: joint Hecke eigenvalues on H_k for a range of degrees."""

from heckelab.errors import DegenerateInputError
from heckelab.hecke_so3 import joint_eigenbasis
from result_store import ScanResult
from scans.base_scan import BaseScan, level_list, nonnegative_int


class SpectrumScan(BaseScan):
    name = "spectrum"
    anchor = "joint eigenfunctions of the Laplacian and the Hecke operators T_n on S^2"
    help = "joint eigenvalues of T_n, n in levels, on H_k for kmin <= k <= kmax"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--levels", type=level_list, default=None, help="comma-separated levels (default from config)")
        parser.add_argument("--kmin", type=nonnegative_int, default=0)
        parser.add_argument("--kmax", type=nonnegative_int, required=True)

    def run(self, args):
        levels = tuple(dict.fromkeys(args.levels or self.config["scans"]["levels"]))
        if args.kmax < args.kmin:
            raise DegenerateInputError(f"kmax {args.kmax} is below kmin {args.kmin}")

        bases = self.map(
            lambda k: joint_eigenbasis(k, levels, self.seed),
            range(args.kmin, args.kmax + 1),
            label=lambda k: f"k{k}",
        )
        rows = []
        for basis in bases:
            for j in range(basis.size):
                rows.append([basis.k, j, basis.laplace_eigenvalue] + [basis.eigenvalue(n, j) for n in levels])
            if len(basis.clusters) < basis.size:
                self.logger.info("H_%d keeps joint eigenspaces of sizes %s", basis.k, basis.clusters)
        header = ["k", "j", "laplace_eig"] + [f"T{n}" for n in levels]
        return ScanResult(header=header, rows=rows)
