"""Dipole emission in planar metal/dielectric multilayers.

Purcell factors, far-field patterns, collection efficiency and effective-medium
analysis for a point dipole embedded in a stratified stack.
"""

from .emission import DecayRates, DipoleSource, dissipation_spectrum, position_sweep, purcell, relative_rate
from .emt import effective_permittivity, hyperbolicity_band, iso_frequency_k_perp
from .farfield import angular_pattern, collection, cpr_spectrum, quantum_efficiency
from .materials import get_material, ingest_nk_table, permittivity
from .stack import Layer, LayerStack, half_space_response, preset

__version__ = "0.1.0"

__all__ = [
    "DecayRates", "DipoleSource", "Layer", "LayerStack", "angular_pattern", "collection",
    "cpr_spectrum", "dissipation_spectrum", "effective_permittivity", "get_material",
    "half_space_response", "hyperbolicity_band", "ingest_nk_table", "iso_frequency_k_perp",
    "permittivity", "position_sweep", "preset", "purcell", "quantum_efficiency", "relative_rate",
]
