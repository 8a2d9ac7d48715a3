"""selfcheck: the invariant suite at desk-scale sizes, as a deterministic report."""

from typing import Callable, List

import numpy as np
from sympy import divisor_sigma

from heckelab.amplifier import (
    amplified_sum_geometric,
    amplified_sum_spectral,
    amplifier_levels,
    build_amplifier,
    relation_residual,
)
from heckelab.counting import (
    HyperbolicPoint,
    count_hyperbolic,
    count_hyperbolic_naive,
    count_sphere,
    coordinate_bounds,
    mobius,
    u_invariant,
)
from heckelab.hecke_so3 import (
    commutator_norm,
    composition_residual,
    hecke_matrix,
    hecke_trace_formula,
    joint_eigenbasis,
    symmetric_eigen,
)
from heckelab.quaternion_core import IndefAlgebra, Rn_array, enumerate_Rn, theta_embed
from heckelab.spectral_kernel import hecke_kernel_diag, hecke_kernel_diag_spectral, kernel_diag
from heckelab.supnorm import convex_sup_norm, hecke_family_supnorms, sup_norm_estimate, zonal_form
from report_service import CheckOutcome, ReportService
from result_store import ScanResult
from scans.base_scan import BaseScan, nonnegative_int

Check = Callable[[], List[CheckOutcome]]


class SelfCheckScan(BaseScan):
    name = "selfcheck"
    anchor = "exact enumeration, Hecke algebra relations, Deligne bound, pre-trace and amplification identities"
    help = "run the invariant suite and print a report"

    @classmethod
    def add_arguments(cls, parser):
        parser.add_argument("--kmax", type=nonnegative_int, default=8, help="largest degree checked")

    def run(self, args):
        self.k_max = max(args.kmax, 2)
        self.rng = np.random.default_rng(self.seed)
        self.points = [p / np.linalg.norm(p) for p in self.rng.normal(size=(3, 3))]
        self.coords = self.rng.integers(-4, 5, size=(12, 4))
        self.w = self.window()

        checks: List[Check] = [
            self._quaternion_checks,
            self._algebra_checks,
            self._hecke_checks,
            self._eigenbasis_checks,
            self._kernel_checks,
            self._counting_checks,
            self._amplifier_checks,
            self._supnorm_checks,
        ]
        outcomes = [outcome for group in self.map(lambda check: check(), checks, label=_check_label) for outcome in group]
        report = ReportService().build_report(outcomes, self.seed)
        exit_code = 0 if all(outcome.passed for outcome in outcomes) else 1
        return ScanResult(text=report, exit_code=exit_code)

    def _quaternion_checks(self) -> List[CheckOutcome]:
        sizes_ok = len(enumerate_Rn(1)) == 2 and len(enumerate_Rn(5)) == 12
        formula_errors = 0
        layout_errors = 0
        for n in range(1, 201):
            elements = enumerate_Rn(n)
            expected = 2 * int(divisor_sigma(n)) if n % 4 == 1 else 0
            formula_errors += int(len(elements) != expected)
            layout_errors += int(not np.array_equal(Rn_array(n).reshape(-1, 4), np.array([q.as_tuple() for q in elements]).reshape(-1, 4)))
        target = set(enumerate_Rn(65))
        closure_errors = sum(
            int(p * q not in target)
            for p in enumerate_Rn(5)
            for q in enumerate_Rn(13)
        )
        return [
            CheckOutcome.at_most("quaternion_core", "R(1)=2 and R(5)=12", 0 if sizes_ok else 1, 0),
            CheckOutcome.at_most("quaternion_core", "|R(n)| = 2 sigma(n), n <= 200", formula_errors, 0),
            CheckOutcome.at_most("quaternion_core", "array matches iterator", layout_errors, 0),
            CheckOutcome.at_most("quaternion_core", "R(5) R(13) inside R(65)", closure_errors, 0),
        ]

    def _algebra_checks(self) -> List[CheckOutcome]:
        settings = self.config["algebra"]
        algebra = IndefAlgebra(settings["a"], settings["b"])
        det_error = 0.0
        hom_error = 0.0
        for first, second in zip(self.coords[:6], self.coords[6:]):
            x, y = algebra.element(*first), algebra.element(*second)
            det_error = max(det_error, abs(np.linalg.det(theta_embed(x)) - x.norm()) / max(1, abs(x.norm())))
            product = theta_embed(x) @ theta_embed(y)
            hom_error = max(hom_error, float(np.max(np.abs(theta_embed(x * y) - product))) / max(1.0, float(np.max(np.abs(product)))))
        return [
            CheckOutcome.at_most("quaternion_core", "det theta(x) = N(x)", det_error, 1e-9),
            CheckOutcome.at_most("quaternion_core", "theta is multiplicative", hom_error, 1e-12),
        ]

    def _hecke_checks(self) -> List[CheckOutcome]:
        degrees = range(1, self.k_max + 1)
        identity = max(float(np.max(np.abs(hecke_matrix(1, k).entries - np.eye(2 * k + 1)))) for k in degrees)
        asymmetry = max(
            float(np.max(np.abs(hecke_matrix(n, k).entries - hecke_matrix(n, k).entries.T)))
            for n in (5, 13)
            for k in degrees
        )
        composition = max(
            composition_residual(r, s, k) for (r, s) in ((5, 5), (5, 13), (13, 13), (5, 25)) for k in degrees
        )
        commutator = max(commutator_norm(5, 13, k) for k in degrees)
        deligne = 0.0
        for p in (5, 13, 17, 29):
            for k in degrees:
                values, _ = symmetric_eigen(hecke_matrix(p, k).eta_scaled())
                deligne = max(deligne, float(np.max(np.abs(values))))
        trace = max(
            abs(float(np.trace(hecke_matrix(n, k).entries)) - hecke_trace_formula(n, k)) / (n + 1)
            for n in (5, 13, 25)
            for k in degrees
        )
        return [
            CheckOutcome.at_most("hecke_so3", "T_1 is the identity", identity, 1e-10),
            CheckOutcome.at_most("hecke_so3", "T_n symmetric", asymmetry, 1e-10),
            CheckOutcome.at_most("hecke_so3", "T_r T_s composition law", composition, 1e-8),
            CheckOutcome.at_most("hecke_so3", "[T_5, T_13] relative norm", commutator, 1e-8),
            CheckOutcome.at_most("hecke_so3", "max |eig T_p / sqrt p|", deligne, 2.0 + 1e-6),
            CheckOutcome.at_most("hecke_so3", "trace = character sum", trace, 1e-9),
        ]

    def _eigenbasis_checks(self) -> List[CheckOutcome]:
        bases = [joint_eigenbasis(k, (5, 13, 25, 169), self.seed) for k in range(self.k_max + 1)]
        residual = max(basis.residual for basis in bases)
        orthogonality = max(
            float(np.max(np.abs(basis.vectors.T @ basis.vectors - np.eye(basis.size)))) for basis in bases
        )
        relation = max(relation_residual(basis, p) for basis in bases for p in (5, 13))
        return [
            CheckOutcome.at_most("hecke_so3", "joint eigenbasis residual", residual, 1e-7),
            CheckOutcome.at_most("hecke_so3", "eigenbasis orthonormal", orthogonality, 1e-10),
            CheckOutcome.at_most("amplifier", "eta(p)^2 - eta(p^2) = 1", relation, 1e-6),
        ]

    def _kernel_checks(self) -> List[CheckOutcome]:
        w = self.w
        positivity = -float(np.min(w.rho(np.linspace(-1.0, 1.0, 201))))
        gap = 0.0
        for n in (5, 13):
            for x in self.points:
                geometric = hecke_kernel_diag(n, 6.0, x, w, self.k_max)
                spectral = hecke_kernel_diag_spectral(n, 6.0, x, w, self.k_max)
                scale = max(abs(geometric), kernel_diag(6.0, w, self.k_max))
                gap = max(gap, abs(geometric - spectral) / scale)
        return [
            CheckOutcome.at_most("spectral_kernel", "-min rho on [-1, 1]", positivity, 0.0),
            CheckOutcome.at_most("spectral_kernel", "pre-trace identity gap", gap, 1e-8),
        ]

    def _counting_checks(self) -> List[CheckOutcome]:
        settings = self.config["algebra"]
        algebra = IndefAlgebra(settings["a"], settings["b"])
        z = HyperbolicPoint(0.3, 1.2)
        mismatches = 0
        for n in (1, 2, 5, 7, 11):
            box = int(np.max(coordinate_bounds(algebra, n, z, 2.0))) + 2
            mismatches += int(count_hyperbolic(algebra, n, z, 2.0) != count_hyperbolic_naive(algebra, n, z, 2.0, box))
        odd = sum(count_sphere(n, self.points[0], 0.8) % 2 for n in range(1, 101, 4))
        g = np.array([[2.0, 1.0], [3.0, 2.0]])
        w = HyperbolicPoint(-0.7, 0.4)
        invariance = abs(u_invariant(mobius(g, z), mobius(g, w)) - u_invariant(z, w)) / u_invariant(z, w)
        return [
            CheckOutcome.at_most("counting", "count_hyperbolic = box oracle", mismatches, 0),
            CheckOutcome.at_most("counting", "sphere counts even", odd, 0),
            CheckOutcome.at_most("counting", "u is SL(2,R)-invariant", invariance, 1e-12),
        ]

    def _amplifier_checks(self) -> List[CheckOutcome]:
        length = 30
        levels = amplifier_levels(length)
        bases = [joint_eigenbasis(k, levels, self.seed) for k in range(self.k_max + 1)]
        z = build_amplifier(bases[2], 0, length)
        gap = 0.0
        for x in self.points:
            spectral = amplified_sum_spectral(x, 6.0, z, self.w, lambda k: bases[k], self.k_max)
            geometric = amplified_sum_geometric(x, 6.0, z, self.w, self.k_max).value
            gap = max(gap, abs(spectral - geometric) / max(abs(spectral), 1e-300))
        return [CheckOutcome.at_most("amplifier", "spectral = geometric amplified sum", gap, 1e-6)]

    def _supnorm_checks(self) -> List[CheckOutcome]:
        k = self.k_max
        zonal = abs(sup_norm_estimate(zonal_form(k)).value - convex_sup_norm(k))
        basis = joint_eigenbasis(k, (5, 13), self.seed)
        excess = max(s.sup_norm for s in hecke_family_supnorms([basis])) - convex_sup_norm(k)
        return [
            CheckOutcome.at_most("supnorm", "zonal sup norm at the pole", zonal, 1e-9),
            CheckOutcome.at_most("supnorm", "Hecke forms below convex bound", excess, 1e-9),
        ]


def _check_label(check: Check) -> str:
    return check.__name__.strip("_").replace("_checks", "")
