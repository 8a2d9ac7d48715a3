"""supnorm: sup norms of joint Hecke eigenforms (or zonal harmonics) by degree."""

from heckelab.errors import DegenerateInputError
from heckelab.hecke_so3 import joint_eigenbasis
from heckelab.supnorm import (
    SupNormSample,
    hecke_family_supnorms,
    hecke_form,
    sup_norm_estimate,
    zonal_supnorms,
)
from result_store import ScanResult
from scans.base_scan import BaseScan, level_list, nonnegative_int, positive_int

HEADER = ["k", "lambda", "j", "supnorm", "argmax"]


class SupNormScan(BaseScan):
    name = "supnorm"
    anchor = "sup norms of Hecke-Maass forms on S^2 against the convex bound lambda^(1/4); subconvex target 5/24"
    help = "sup norms of joint T_n eigenforms (or zonal harmonics) for kmin <= k <= kmax"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--levels", type=level_list, default=None)
        parser.add_argument("--kmin", type=nonnegative_int, default=1)
        parser.add_argument("--kmax", type=nonnegative_int, required=True)
        parser.add_argument("--ktype", type=int, default=0, help="K-type weight l (group forms when nonzero)")
        parser.add_argument("--family", choices=["hecke", "zonal"], default="hecke")
        parser.add_argument(
            "--grid-res", dest="grid_res", type=positive_int, default=None,
            help="grid samples per great circle, per unit of degree (>= 4)",
        )
        parser.add_argument("--polish", type=nonnegative_int, default=None, help="polish iterations")

    def run(self, args):
        if args.kmax < args.kmin:
            raise DegenerateInputError(f"kmax {args.kmax} is below kmin {args.kmin}")
        per_degree = args.grid_res or self.config["scans"]["grid_res_per_degree"]
        polish = self.config["scans"]["polish_steps"] if args.polish is None else args.polish
        degrees = range(args.kmin, args.kmax + 1)

        if args.family == "zonal":
            if args.ktype != 0:
                raise DegenerateInputError("The zonal family has K-type 0")
            chunks = self.map(lambda k: zonal_supnorms([k], per_degree, polish), degrees, label=lambda k: f"k{k}")
        else:
            levels = tuple(dict.fromkeys(args.levels or self.config["scans"]["levels"]))
            chunks = self.map(
                lambda k: self._hecke_degree(k, levels, args.ktype, per_degree, polish),
                degrees,
                label=lambda k: f"k{k}",
            )

        rows = [
            [s.k, s.laplace_eigenvalue, s.j, s.sup_norm, s.argmax]
            for chunk in chunks
            for s in chunk
        ]
        return ScanResult(header=list(HEADER), rows=rows)

    def _hecke_degree(self, k, levels, l, per_degree, polish):
        if k < abs(l):
            self.logger.debug("Skipping k=%d below K-type %d", k, l)
            return []
        basis = joint_eigenbasis(k, levels, self.seed)
        if l == 0:
            return hecke_family_supnorms([basis], per_degree, polish)
        samples = []
        for j in range(basis.size):
            result = sup_norm_estimate(hecke_form(basis, j, l), per_degree * max(k, 1), polish)
            samples.append(SupNormSample(k, basis.laplace_eigenvalue, j, result.value, result.point))
        return samples
