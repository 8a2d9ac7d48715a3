"""
heckelab: quaternion Hecke operators, spectral projector kernels, lattice
counting and amplification on S^2 = SO(3)/SO(2) and on the hyperbolic plane.

Submodules are imported explicitly (``from heckelab.hecke_so3 import ...``);
nothing is re-exported here.
"""

__version__ = "0.3.0"
