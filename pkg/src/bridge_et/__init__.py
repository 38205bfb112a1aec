"""Electron-transfer rates through a donor-bridge-acceptor triad in solution.

Two models are provided: a vibronic model with Franck-Condon dressed couplings
and a bath acting on the vibrational ladders, and an electronic tight-binding
model with closed-form rates.  Both share the Marcus-type solvent energetics.
"""

from .liouville import RateResult
from .solvent import Energetics, SolventRecord, TriadGeometry, table1

__all__ = ["Energetics", "RateResult", "SolventRecord", "TriadGeometry", "table1"]
__version__ = "0.1.0"
