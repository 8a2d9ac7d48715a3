"""fit: eigenvalue exponent of sup norms read back from a supnorm CSV."""

from heckelab.errors import InsufficientDataError
from heckelab.supnorm import SupNormSample, exponent_fit, family_maxima
from result_store import ScanResult, read_csv
from scans.base_scan import BaseScan, nonnegative_int

CONVEX_EXPONENT = 0.25
SUBCONVEX_TARGET = 5.0 / 24.0

# Desk-scale acceptance windows for the fitted slope
ZONAL_TOLERANCE = 0.02
HECKE_CEILING = 0.225


class FitScan(BaseScan):
    name = "fit"
    anchor = "log-log slope of max_j ||phi_j||_inf against lambda; convex 1/4, subconvex target 5/24"
    help = "fit the lambda-exponent of a supnorm CSV"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--input", required=True, help="CSV written by the supnorm subcommand")
        parser.add_argument("--family", choices=["hecke", "zonal"], default="hecke")
        parser.add_argument("--kmin", type=nonnegative_int, default=None)
        parser.add_argument("--kmax", type=nonnegative_int, default=None)

    def run(self, args):
        samples = []
        for row in read_csv(args.input):
            try:
                k = int(row["k"])
                sample = SupNormSample(k, int(row["lambda"]), int(row["j"]), float(row["supnorm"]), ())
            except (KeyError, ValueError) as exc:
                raise InsufficientDataError(f"{args.input} is not a supnorm CSV: {exc}") from exc
            if args.kmin is not None and k < args.kmin:
                continue
            if args.kmax is not None and k > args.kmax:
                continue
            samples.append(sample)

        maxima = family_maxima(samples)
        fit = exponent_fit(maxima)
        if args.family == "zonal":
            expected = abs(fit.slope - CONVEX_EXPONENT) <= ZONAL_TOLERANCE
        else:
            expected = fit.slope <= HECKE_CEILING
        self.logger.info("Fitted %s exponent %.4f over %d degrees", args.family, fit.slope, len(maxima))
        return ScanResult(
            record={
                "family": args.family,
                "slope": fit.slope,
                "intercept": fit.intercept,
                "stderr": fit.stderr,
                "degrees": len(maxima),
                "convex_exponent": CONVEX_EXPONENT,
                "subconvex_target": SUBCONVEX_TARGET,
                "within_expectation": expected,
            }
        )
