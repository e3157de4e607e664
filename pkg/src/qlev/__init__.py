"""qlev: spectrum, shifts and lifetimes of quantum levitation states.

A neutral atom bouncing on a reflective surface under gravity supports
long-lived quasi-stationary states: gravity closes the cavity from above,
quantum reflection on the attractive surface tail closes it from below.
This package computes the round-trip factor of that cavity, locates its
resonances and complex poles, and extracts shifts, widths and lifetimes,
either from a full wave calculation or from effective-range analytics.
"""

from .airy import airy_phase, airy_phase_complex, airy_phase_derivative, airy_zero
from .backend import IS_COMPILED
from .cavity import (
    LorentzianPeak,
    ResonanceRecord,
    complex_poles,
    ideal_levels,
    lifetime,
    lorentzian_fit,
    pole_lifetime,
    read_resonance_csv,
    resonances_effective_range,
    resonances_numeric,
    response_function,
    response_scan,
    scattering_length_levels,
    scattering_length_lifetime,
    transition_frequencies,
    write_resonance_csv,
    write_response_csv,
)
from .effrange import (
    EffectiveRangeCoefficients,
    coefficients_from_json,
    coefficients_to_json,
    fit_coefficients,
    preset_coefficients,
    r_model,
    scattering_length,
    synthetic_reflection,
    v4_coefficients,
)
from .errors import QlevError, QlevNumericalError, QlevUsageError
from .liouville import LangerProblem, write_langer_csv
from .potential import (
    PhysicalSetup,
    PotentialModel,
    SurfacePreset,
    builtin_preset_names,
    load_preset,
    read_potential_table,
)
from .scatter import (
    ReflectionData,
    RoundTrip,
    ideal_round_trip,
    read_reflection_csv,
    reflection_amplitude,
    round_trip_factor,
    write_reflection_csv,
)

__all__ = [
    "EffectiveRangeCoefficients",
    "IS_COMPILED",
    "LangerProblem",
    "LorentzianPeak",
    "PhysicalSetup",
    "PotentialModel",
    "QlevError",
    "QlevNumericalError",
    "QlevUsageError",
    "ReflectionData",
    "ResonanceRecord",
    "RoundTrip",
    "SurfacePreset",
    "__version__",
    "airy_phase",
    "airy_phase_complex",
    "airy_phase_derivative",
    "airy_zero",
    "builtin_preset_names",
    "coefficients_from_json",
    "coefficients_to_json",
    "complex_poles",
    "fit_coefficients",
    "ideal_levels",
    "ideal_round_trip",
    "lifetime",
    "load_preset",
    "lorentzian_fit",
    "pole_lifetime",
    "preset_coefficients",
    "r_model",
    "read_potential_table",
    "read_reflection_csv",
    "read_resonance_csv",
    "reflection_amplitude",
    "resonances_effective_range",
    "resonances_numeric",
    "response_function",
    "response_scan",
    "round_trip_factor",
    "scattering_length",
    "scattering_length_levels",
    "scattering_length_lifetime",
    "synthetic_reflection",
    "transition_frequencies",
    "v4_coefficients",
    "write_langer_csv",
    "write_reflection_csv",
    "write_resonance_csv",
    "write_response_csv",
]

__version__ = "0.1.0"
