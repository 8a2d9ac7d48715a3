"""
Factory module for creating scan instances based on subcommand names.
"""

from typing import Dict, List, Type

from scans.amplify_scan import AmplifyScan
from scans.base_scan import BaseScan
from scans.counting_scans import CountHyperbolicScan, CountSphereScan
from scans.fit_scan import FitScan
from scans.hecke_scan import HeckeScan
from scans.kernel_scan import KernelScan
from scans.rn_enumerate_scan import RnEnumerateScan
from scans.selfcheck_scan import SelfCheckScan
from scans.spectrum_scan import SpectrumScan
from scans.supnorm_scan import SupNormScan


class ScanFactory:
    """Factory class to create the right scan based on the subcommand name."""

    _SCANS: Dict[str, Type[BaseScan]] = {
        "rn-enumerate": RnEnumerateScan,
        "hecke": HeckeScan,
        "spectrum": SpectrumScan,
        "supnorm": SupNormScan,
        "fit": FitScan,
        "count-sphere": CountSphereScan,
        "count-hyp": CountHyperbolicScan,
        "kernel": KernelScan,
        "amplify": AmplifyScan,
        "selfcheck": SelfCheckScan,
    }

    @staticmethod
    def available() -> List[str]:
        return list(ScanFactory._SCANS)

    @staticmethod
    def scan_class(name: str) -> Type[BaseScan]:
        """Return the scan class for a subcommand.

        Raises:
            ValueError: If no scan is registered under that name
        """
        if name in ScanFactory._SCANS:
            return ScanFactory._SCANS[name]
        available_scans_str = ", ".join(ScanFactory.available())
        raise ValueError(f"No scan available for subcommand: {name}. Available scans: {available_scans_str}")

    @staticmethod
    def get_scan(name: str, config, connector=None) -> BaseScan:
        """Return a scan instance for the requested subcommand.

        Args:
            name: Subcommand name
            config: Merged run settings
            connector: ScanConnector for parallel work items (optional)

        Returns:
            A scan instance for the requested subcommand

        Raises:
            ValueError: If no scan is available for the requested subcommand
        """
        return ScanFactory.scan_class(name)(config, connector)
