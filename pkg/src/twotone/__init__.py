"""Steady-state two-tone spectroscopy simulator for a driven, dissipative
transmon-resonator system in the strong dispersive regime.

Subpackages by concern: ``operators`` (truncated Fock x qubit algebra),
``model`` (device parameters and Hamiltonians), ``lindblad`` (Liouvillian
and steady state), ``analytic`` (closed-form 4-level model and
calibrations), ``sweep`` (spectra and two-tone maps), ``specfit``
(multi-Lorentzian fits and photon statistics), ``cli`` (command line).
"""

__version__ = "0.1.0"
