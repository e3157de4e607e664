"""Physical setup, unit system, and Casimir-Polder potential models.

Two natural unit systems condition every solver in this package near unity:

* gravity side — lengths in ell_g = (ħ²/(2m²g))^(1/3), energies in
  eps_g = m·g·ell_g; the dimensionless wavevector is then sqrt(E/eps_g);
* surface side — lengths in ell = sqrt(2mC4)/ħ, the strength scale of the
  attractive tail, with the dimensionless wavevector K = k·ell.

Surface presets (perfect mirror, silicon bulk, silica bulk) ship as JSON
documents carrying ell in Bohr radii and the fitted low-energy expansion
coefficients for each surface.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NonPositiveAltitude, QlevUsageError, TableTooSparse

__all__ = [
    "HBAR",
    "BOHR_RADIUS",
    "ELECTRON_VOLT",
    "HYDROGEN_MASS",
    "STANDARD_GRAVITY",
    "PhysicalSetup",
    "PotentialModel",
    "SurfacePreset",
    "cp_potential",
    "cp_scales",
    "f_function",
    "load_preset",
    "builtin_preset_names",
    "read_potential_table",
]

HBAR = 1.054571817e-34  # J*s
BOHR_RADIUS = 5.29177210903e-11  # m
ELECTRON_VOLT = 1.602176634e-19  # J
HARTREE = 4.3597447222071e-18  # J
HYDROGEN_MASS = 1.6735328e-27  # kg, ground-state hydrogen/antihydrogen atom
STANDARD_GRAVITY = 9.81  # m/s^2

# Atomic units for the dispersion coefficients
C3_ATOMIC_UNIT = HARTREE * BOHR_RADIUS**3  # J*m^3
C4_ATOMIC_UNIT = HARTREE * BOHR_RADIUS**4  # J*m^4


@dataclass(frozen=True)
class PhysicalSetup:
    """Atom mass and gravity; the derived scales are always recomputed."""

    mass: float = HYDROGEN_MASS
    gravity: float = STANDARD_GRAVITY

    def __post_init__(self) -> None:
        if self.mass <= 0 or self.gravity <= 0:
            raise QlevUsageError("mass and gravity must both be positive")

    @property
    def ell_g(self) -> float:
        """Gravitational length scale (ħ²/(2m²g))^(1/3) in meters."""
        return (HBAR**2 / (2.0 * self.mass**2 * self.gravity)) ** (1.0 / 3.0)

    @property
    def eps_g(self) -> float:
        """Gravitational energy scale m·g·ell_g in joules."""
        return self.mass * self.gravity * self.ell_g

    def to_eps_g(self, energy: complex) -> complex:
        """Energy in joules -> dimensionless multiple of eps_g."""
        return energy / self.eps_g

    def from_eps_g(self, bold_e: complex) -> complex:
        """Dimensionless multiple of eps_g -> energy in joules."""
        return bold_e * self.eps_g

    def wavevector(self, energy: float) -> float:
        """k = sqrt(2mE)/ħ in 1/m for E > 0."""
        return math.sqrt(2.0 * self.mass * energy) / HBAR


# ---------------------------------------------------------------------------
# potential models
# ---------------------------------------------------------------------------

_VARIANTS = ("v4", "v3v4", "table")


@dataclass(frozen=True)
class PotentialModel:
    """Casimir-Polder potential model: homogeneous tail, interpolant, or table.

    variant "v4":   V(z) = -C4/z^4
    variant "v3v4": V(z) = -C4/(z^3 (z + z_c)), z_c = C4/C3, reproducing the
                    -C3/z^3 and -C4/z^4 limits near and far from the surface
    variant "table": natural cubic interpolation of sampled (z, V) with
                    power-law tails fitted on the outermost tenth of points
    """

    variant: str
    C4: float
    C3: float | None = None
    z_grid: tuple[float, ...] | None = None
    v_grid: tuple[float, ...] | None = None
    label: str = ""
    _spline: CubicSpline | None = field(
        default=None, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        if self.variant not in _VARIANTS:
            raise QlevUsageError(
                f"unknown potential variant {self.variant!r}; expected one of {_VARIANTS}"
            )
        if self.C4 <= 0:
            raise QlevUsageError("C4 must be positive (attractive tail)")
        if self.variant == "v3v4" and (self.C3 is None or self.C3 <= 0):
            raise QlevUsageError("v3v4 variant requires positive C3")

    # -- constructors --------------------------------------------------------

    @classmethod
    def homogeneous_v4(cls, C4: float, label: str = "") -> "PotentialModel":
        return cls(variant="v4", C4=C4, label=label)

    @classmethod
    def v3v4(cls, C3: float, C4: float, label: str = "") -> "PotentialModel":
        return cls(variant="v3v4", C4=C4, C3=C3, label=label)

    @classmethod
    def tabulated(
        cls, z: Sequence[float], v: Sequence[float], label: str = ""
    ) -> "PotentialModel":
        z_arr = np.asarray(z, dtype=float)
        v_arr = np.asarray(v, dtype=float)
        if z_arr.ndim != 1 or z_arr.shape != v_arr.shape:
            raise QlevUsageError("table grids z and V must be equal-length 1D")
        if len(z_arr) < 100:
            raise TableTooSparse(
                f"potential table has {len(z_arr)} rows; at least 100 required"
            )
        if np.any(np.diff(z_arr) <= 0):
            bad = int(np.argmax(np.diff(z_arr) <= 0)) + 2
            raise QlevUsageError(f"row {bad}: table altitudes must strictly increase")
        if np.any(z_arr <= 0):
            bad = int(np.argmax(z_arr <= 0)) + 1
            raise QlevUsageError(f"row {bad}: table altitude must be positive")
        if np.any(v_arr >= 0):
            bad = int(np.argmax(v_arr >= 0)) + 1
            raise QlevUsageError(
                f"row {bad}: Casimir-Polder potential must be attractive (V < 0)"
            )
        n_tail = max(4, len(z_arr) // 10)
        # least-squares amplitudes of the -C3/z^3 (near) and -C4/z^4 (far) tails
        zn, vn = z_arr[:n_tail], v_arr[:n_tail]
        c3 = -float(np.sum(vn / zn**3) / np.sum(zn**-6))
        zf, vf = z_arr[-n_tail:], v_arr[-n_tail:]
        c4 = -float(np.sum(vf / zf**4) / np.sum(zf**-8))
        spline = CubicSpline(z_arr, v_arr, bc_type="natural")
        return cls(
            variant="table",
            C4=c4,
            C3=c3,
            z_grid=tuple(z_arr.tolist()),
            v_grid=tuple(v_arr.tolist()),
            label=label,
            _spline=spline,
        )

    # -- derived scales -------------------------------------------------------

    def ell_cp(self, setup: PhysicalSetup) -> float:
        """Strength length of the attractive tail, sqrt(2mC4)/ħ."""
        return math.sqrt(2.0 * setup.mass * self.C4) / HBAR

    def eps_cp(self, setup: PhysicalSetup) -> float:
        """Strength energy of the attractive tail, C4/ell_cp^4."""
        return self.C4 / self.ell_cp(setup) ** 4

    @property
    def z_c(self) -> float:
        """Crossover altitude C4/C3 of the v3v4 interpolant."""
        if self.C3 is None or self.C3 <= 0:
            raise QlevUsageError("z_c requires a positive C3")
        return self.C4 / self.C3

    def spline(self) -> CubicSpline:
        if self._spline is None:
            raise QlevUsageError("only tabulated models carry an interpolation spline")
        return self._spline


def cp_potential(model: PotentialModel, z: float) -> float:
    """Casimir-Polder potential V_CP(z) in joules at altitude z > 0 (meters)."""
    if z <= 0:
        raise NonPositiveAltitude(f"altitude must be positive, got z = {z:.4g} m")
    if model.variant == "v4":
        return -model.C4 / z**4
    if model.variant == "v3v4":
        return -model.C4 / (z**3 * (z + model.z_c))
    z_grid = model.z_grid
    assert z_grid is not None and model.C3 is not None
    if z < z_grid[0]:
        return -model.C3 / z**3
    if z > z_grid[-1]:
        return -model.C4 / z**4
    return float(model.spline()(z))


def cp_scales(model: PotentialModel, setup: PhysicalSetup | None = None) -> tuple[float, float]:
    """(ell_cp, eps_cp) in SI for the model's far tail."""
    setup = setup or PhysicalSetup()
    return model.ell_cp(setup), model.eps_cp(setup)


def f_function(
    setup: PhysicalSetup, model: PotentialModel | None, E: float, z: float
) -> float:
    """Local squared wavevector F(z) = (2m/ħ²)(E − mgz − V_CP(z)), in 1/m².

    F > 0 in the classically allowed region and F = k_dB² there; pass
    model=None for the pure gravitational bouncer.
    """
    if z <= 0:
        raise NonPositiveAltitude(f"altitude must be positive, got z = {z:.4g} m")
    v = setup.mass * setup.gravity * z
    if model is not None:
        v += cp_potential(model, z)
    return 2.0 * setup.mass * (E - v) / HBAR**2


# ---------------------------------------------------------------------------
# surface presets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfacePreset:
    """Fitted low-energy reflection data for one surface.

    ell is stored in meters; alpha0/alpha2 are the dimensionless expansion
    coefficients of the reduced reflection function for that surface.
    """

    name: str
    ell: float
    alpha0: complex
    alpha2: complex
    C3: float | None = None

    @property
    def C4(self) -> float:
        """Tail coefficient consistent with ell: C4 = ħ²ell²/(2m)."""
        return HBAR**2 * self.ell**2 / (2.0 * HYDROGEN_MASS)

    def model(self, variant: str = "v4") -> PotentialModel:
        """Model potential with this surface's far tail."""
        if variant == "v4":
            return PotentialModel.homogeneous_v4(self.C4, label=self.name)
        if variant == "v3v4":
            if self.C3 is None:
                raise QlevUsageError(
                    f"preset {self.name!r} carries no C3; supply one for v3v4"
                )
            return PotentialModel.v3v4(self.C3, self.C4, label=self.name)
        raise QlevUsageError(f"preset model variant must be v4 or v3v4, got {variant!r}")


def _preset_from_dict(doc: dict, origin: str) -> SurfacePreset:
    try:
        name = str(doc["name"])
        ell_a0 = float(doc["ell_a0"])
        alpha0 = complex(float(doc["alpha0_re"]), float(doc["alpha0_im"]))
        alpha2 = complex(float(doc["alpha2_re"]), float(doc["alpha2_im"]))
    except KeyError as exc:
        raise QlevUsageError(f"{origin}: preset document missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise QlevUsageError(f"{origin}: malformed preset field ({exc})") from exc
    if ell_a0 <= 0:
        raise QlevUsageError(f"{origin}: ell_a0 must be positive")
    c3 = doc.get("C3_au")
    c3_si = float(c3) * C3_ATOMIC_UNIT if c3 is not None else None
    if "C4_au" in doc and doc["C4_au"] is not None:
        # optional override; kept consistent with ell when absent
        c4_si = float(doc["C4_au"]) * C4_ATOMIC_UNIT
        ell = math.sqrt(2.0 * HYDROGEN_MASS * c4_si) / HBAR
    else:
        ell = ell_a0 * BOHR_RADIUS
    return SurfacePreset(name=name, ell=ell, alpha0=alpha0, alpha2=alpha2, C3=c3_si)


def builtin_preset_names() -> list[str]:
    files = resources.files("qlev.data")
    return sorted(p.name[: -len(".json")] for p in files.iterdir() if p.name.endswith(".json"))


def load_preset(source: str | Path) -> SurfacePreset:
    """Load a surface preset by built-in name or from a JSON file path."""
    path = Path(source)
    if path.suffix == ".json" and path.exists():
        doc = json.loads(path.read_text())
        return _preset_from_dict(doc, origin=str(path))
    candidate = resources.files("qlev.data").joinpath(f"{source}.json")
    if candidate.is_file():
        doc = json.loads(candidate.read_text())
        return _preset_from_dict(doc, origin=f"preset {source!r}")
    raise QlevUsageError(
        f"unknown preset {source!r}; built-ins: {', '.join(builtin_preset_names())}"
    )


# ---------------------------------------------------------------------------
# tabulated-potential file format
# ---------------------------------------------------------------------------


def read_potential_table(path: str | Path, label: str = "") -> PotentialModel:
    """Parse a `z_m,V_eV` CSV file into a tabulated model.

    The file must have that exact header, strictly increasing altitudes and
    at least 100 rows; error messages cite 1-based row numbers (the header
    is row 1).
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise QlevUsageError(f"cannot read potential table {path}: {exc}") from exc
    rows: list[str] = [ln.strip() for ln in lines if ln.strip()]
    if not rows:
        raise QlevUsageError(f"{path}: empty potential table")
    if rows[0].replace(" ", "") != "z_m,V_eV":
        raise QlevUsageError(
            f"{path}: row 1: expected header 'z_m,V_eV', got {rows[0]!r}"
        )
    z_list: list[float] = []
    v_list: list[float] = []
    for i, row in enumerate(rows[1:], start=2):
        parts = row.split(",")
        if len(parts) != 2:
            raise QlevUsageError(f"{path}: row {i}: expected 2 columns, got {len(parts)}")
        try:
            z_val = float(parts[0])
            v_val = float(parts[1])
        except ValueError:
            raise QlevUsageError(f"{path}: row {i}: non-numeric entry {row!r}") from None
        z_list.append(z_val)
        v_list.append(v_val * ELECTRON_VOLT)
    if len(z_list) < 100:
        raise TableTooSparse(
            f"{path}: potential table has {len(z_list)} rows; at least 100 required"
        )
    try:
        return PotentialModel.tabulated(z_list, v_list, label=label or path.stem)
    except QlevUsageError as exc:
        # tabulated() reports data-row indices; shift to file rows (header +1)
        msg = str(exc)
        if msg.startswith("row "):
            head, rest = msg.split(":", 1)
            file_row = int(head[4:]) + 1
            raise type(exc)(f"{path}: row {file_row}:{rest}") from None
        raise


# ---------------------------------------------------------------------------
# dimensionless helpers shared by the solvers
# ---------------------------------------------------------------------------


def sigma_ratio(setup: PhysicalSetup, ell: float) -> float:
    """sigma = ell/ell_g, the small parameter of the levitation problem."""
    return ell / setup.ell_g


def k_dimensionless(setup: PhysicalSetup, ell: float, bold_e: float) -> float:
    """K = k·ell for energy E = bold_e·eps_g; equals sqrt(bold_e)·sigma."""
    if bold_e < 0:
        raise QlevUsageError("K is defined for non-negative energies only")
    return math.sqrt(bold_e) * sigma_ratio(setup, ell)
