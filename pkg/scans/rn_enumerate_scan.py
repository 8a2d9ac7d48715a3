"""rn-enumerate: list R(n), one quaternion per row."""

from heckelab.quaternion_core import enumerate_Rn
from result_store import ScanResult
from scans.base_scan import BaseScan, positive_int


class RnEnumerateScan(BaseScan):
    name = "rn-enumerate"
    anchor = "Lipschitz quaternions of norm n with a0 odd, a1..a3 even; |R(n)| = 2 sigma(n) for n = 1 mod 4"
    help = "enumerate R(n)"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--n", type=positive_int, required=True, help="norm n >= 1")
        layout = parser.add_mutually_exclusive_group()
        layout.add_argument("--json", dest="as_json", action="store_true", help="single JSON record")
        layout.add_argument("--csv", dest="as_json", action="store_false", help="one row per element (default)")

    def run(self, args):
        elements = enumerate_Rn(args.n)
        self.logger.info("R(%d) has %d elements", args.n, len(elements))
        if args.as_json:
            return ScanResult(
                record={"n": args.n, "count": len(elements), "elements": [q.as_tuple() for q in elements]}
            )
        return ScanResult(header=["a0", "a1", "a2", "a3"], rows=[q.as_tuple() for q in elements])
