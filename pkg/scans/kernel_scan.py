"""kernel: smoothed spectral projector kernels over a grid of mu."""

import numpy as np

from heckelab.errors import DegenerateInputError
from heckelab.spectral_kernel import ktype_kernel_diag, sharp_kernel_diag
from heckelab.spectral_kernel import kernel_scan as evaluate_kernel
from result_store import ScanResult
from scans.base_scan import BaseScan, nonnegative_int, positive_int, unit_point, value_grid

MODES = ("diag", "offdiag", "hecke", "ktype")


class KernelScan(BaseScan):
    name = "kernel"
    anchor = (
        "K_mu(x, y) = sum_k rho(mu - mu_k)(2k+1)/(4 pi) P_k(x.y): diagonal ~ mu, "
        "off-diagonal ~ (mu/theta)^(1/2), Hecke diagonal <= mu + n mu^(1/2) log mu"
    )
    help = "scan the diagonal, off-diagonal, Hecke-twisted or K-type kernel"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--mode", choices=MODES, required=True)
        parser.add_argument("--n", type=positive_int, default=None, help="Hecke level (mode hecke)")
        parser.add_argument("--ktype", type=int, default=0, help="K-type weight l (mode ktype)")
        parser.add_argument("--mu-min", dest="mu_min", type=float, required=True)
        parser.add_argument("--mu-max", dest="mu_max", type=float, required=True)
        parser.add_argument("--mu-steps", dest="mu_steps", type=positive_int, required=True)
        parser.add_argument("--theta", type=value_grid, default=None, help="angles, a:b:steps or a list (mode offdiag)")
        parser.add_argument("--x", type=unit_point, default=(0.0, 0.0, 1.0), help="base point (mode hecke)")
        parser.add_argument("--delta-supp", dest="delta_supp", type=float, default=None)
        parser.add_argument("--kmax", type=nonnegative_int, default=None, help="degree cap (default: window truncation)")

    def run(self, args):
        if args.mu_max < args.mu_min:
            raise DegenerateInputError(f"mu-max {args.mu_max} is below mu-min {args.mu_min}")
        w = self.window(args.delta_supp)
        mus = list(np.linspace(args.mu_min, args.mu_max, args.mu_steps))

        if args.mode == "ktype":
            values = self.map(lambda mu: ktype_kernel_diag(mu, args.ktype, w, args.kmax), mus)
            return ScanResult(header=["mu", "l", "value"], rows=[[mu, args.ktype, v] for mu, v in zip(mus, values)])

        scans = self.map(
            lambda mu: evaluate_kernel(args.mode, [mu], w, args.theta, args.n, args.x, args.kmax),
            mus,
            label=lambda mu: f"mu{mu:g}",
        )
        if args.mode == "diag":
            rows = [[mu, scan.values[0], sharp_kernel_diag(mu)] for mu, scan in zip(mus, scans)]
            return ScanResult(header=["mu", "value", "sharp"], rows=rows)
        if args.mode == "offdiag":
            rows = [
                [mu, theta, value]
                for mu, scan in zip(mus, scans)
                for theta, value in zip(scan.angle_grid, scan.values[0])
            ]
            return ScanResult(header=["mu", "theta", "value"], rows=rows)
        rows = [[args.n, mu, scan.values[0]] for mu, scan in zip(mus, scans)]
        return ScanResult(header=["n", "mu", "value"], rows=rows)
