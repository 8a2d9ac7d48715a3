"""count-sphere and count-hyp: lattice counts M(delta) near a point."""

from heckelab.counting import hyperbolic_profile, sphere_profile
from heckelab.quaternion_core import IndefAlgebra
from result_store import ScanResult
from scans.base_scan import BaseScan, half_plane_point, positive_int, unit_point, value_grid

HEADER = ["delta", "M"]


def profile_result(profile) -> ScanResult:
    return ScanResult(header=list(HEADER), rows=[list(row) for row in profile.rows])


class CountSphereScan(BaseScan):
    name = "count-sphere"
    anchor = "#{alpha in R(n): d(x, R_alpha x) < delta}, bound shape delta^(1/2) n^(1+eps) + n^eps"
    help = "count R(n) elements moving x by less than delta"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--n", type=positive_int, required=True)
        parser.add_argument("--x", type=unit_point, default=(0.0, 0.0, 1.0), help="nx,ny,nz")
        parser.add_argument("--delta-grid", dest="delta_grid", type=value_grid, required=True, help="a:b:steps")

    def run(self, args):
        return profile_result(sphere_profile(args.n, args.x, args.delta_grid))


class CountHyperbolicScan(BaseScan):
    name = "count-hyp"
    anchor = "#{x in order: N(x) = n, u(z, x z) < delta}, bound shape (delta + delta^(1/4)) n^(1+eps) + n^eps"
    help = "count order elements of norm n moving z by u < delta"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--a", type=int, default=None, help="structure constant a (default from config)")
        parser.add_argument("--b", type=int, default=None, help="structure constant b (default from config)")
        parser.add_argument("--n", type=positive_int, required=True)
        parser.add_argument("--z", type=half_plane_point, default="0,1", help="re,im with im > 0")
        parser.add_argument("--delta-grid", dest="delta_grid", type=value_grid, required=True, help="a:b:steps")

    def run(self, args):
        settings = self.config["algebra"]
        algebra = IndefAlgebra(
            settings["a"] if args.a is None else args.a,
            settings["b"] if args.b is None else args.b,
        )
        return profile_result(hyperbolic_profile(algebra, args.n, args.z, args.delta_grid))
