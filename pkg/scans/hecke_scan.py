"""hecke: the matrix of T_n on H_k."""

from heckelab.hecke_so3 import hecke_matrix
from result_store import ScanResult
from scans.base_scan import BaseScan, nonnegative_int, positive_int


class HeckeScan(BaseScan):
    name = "hecke"
    anchor = "T_n F(x) = sum over alpha in R(n)/(+-1) of F(R_alpha x), restricted to degree-k harmonics"
    help = "matrix of the Hecke operator T_n on H_k"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--n", type=positive_int, required=True, help="level, n = 1 mod 4")
        parser.add_argument("--k", type=nonnegative_int, required=True, help="harmonic degree")

    def run(self, args):
        matrix = hecke_matrix(args.n, args.k)
        header = [f"c{column}" for column in range(matrix.entries.shape[1])]
        return ScanResult(header=header, rows=[list(row) for row in matrix.entries])
