"""Physical constants and minimal unit-tagged quantities.

Everything downstream works in CGS lengths/times with energies in eV:
lengths in cm, times in s, speeds in cm/s, accelerations in cm/s^2,
energies in eV, powers computed in eV/s and converted to W at the output
boundary.  Two constant presets are provided:

* ``paper``  -- the rounded constant set (hbar = 0.65e-15 eV s,
  mc^2 = 0.511e6 eV, c = 3e10 cm/s, alpha = 1/137) under which all the
  reference numbers in the reproduction suite were derived; they
  reproduce bit-for-bit only with this preset.
* ``modern`` -- CODATA-2018 values.

Only the handful of unit tags the artifact emits are supported; this is
deliberately not a general units library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, UnitError


@dataclass(frozen=True)
class PhysicalConstants:
    """Immutable constant set. Values are positive by construction."""

    name: str
    hbar_ev_s: float              # reduced Planck constant (eV s)
    c_cm_s: float                 # speed of light (cm/s)
    electron_rest_energy_ev: float  # mc^2 (eV)
    alpha: float                  # fine-structure constant
    electron_charge_c: float      # elementary charge (C)
    planck_h_j_s: float           # Planck constant (J s)
    ev_to_joule: float            # 1 eV in J

    def __post_init__(self):
        for field in ("hbar_ev_s", "c_cm_s", "electron_rest_energy_ev",
                      "alpha", "electron_charge_c", "planck_h_j_s",
                      "ev_to_joule"):
            if getattr(self, field) <= 0.0:
                raise ConfigError(f"constant {field} must be positive")

    @property
    def electron_mass(self) -> float:
        """Electron mass m = mc^2 / c^2, in eV s^2/cm^2."""
        return self.electron_rest_energy_ev / self.c_cm_s**2

    @property
    def larmor_prefactor(self) -> float:
        """(4/3) alpha hbar / c^2, in eV s^3/cm^2.

        Multiplying by an acceleration squared (cm^2/s^4) gives an
        emission power in eV/s.
        """
        return (4.0 / 3.0) * self.alpha * self.hbar_ev_s / self.c_cm_s**2

    def acceleration_from_gradient(self, grad_q_ev_per_cm: float) -> float:
        """|a| = |grad Q| / m for a potential gradient in eV/cm -> cm/s^2."""
        return abs(grad_q_ev_per_cm) / self.electron_mass

    def speed_from_kinetic_energy(self, kinetic_energy_ev: float) -> float:
        """Non-relativistic speed from E = p^2/2m, in cm/s."""
        if kinetic_energy_ev < 0.0:
            raise ConfigError("kinetic energy must be non-negative")
        return self.c_cm_s * math.sqrt(
            2.0 * kinetic_energy_ev / self.electron_rest_energy_ev)


_PAPER = PhysicalConstants(
    name="paper",
    hbar_ev_s=0.65e-15,
    c_cm_s=3.0e10,
    electron_rest_energy_ev=0.511e6,
    alpha=1.0 / 137.0,
    electron_charge_c=1.6022e-19,
    planck_h_j_s=6.63e-34,
    ev_to_joule=1.6022e-19,
)

_MODERN = PhysicalConstants(
    name="modern",
    hbar_ev_s=6.582119569e-16,
    c_cm_s=2.99792458e10,
    electron_rest_energy_ev=0.51099895000e6,
    alpha=7.2973525693e-3,
    electron_charge_c=1.602176634e-19,
    planck_h_j_s=6.62607015e-34,
    ev_to_joule=1.602176634e-19,
)

_PRESETS = {"paper": _PAPER, "modern": _MODERN}


def constants(preset: str = "paper") -> PhysicalConstants:
    """Return one of the two named constant sets."""
    try:
        return _PRESETS[preset]
    except KeyError:
        raise ConfigError(
            f"unknown constants preset {preset!r}; expected one of "
            f"{sorted(_PRESETS)}") from None


# ---------------------------------------------------------------------------
# Unit-tagged scalars

# dimension -> {unit tag: scale to the dimension's base unit}.  The eV-based
# tags scale with the eV->J factor of the active constant preset and are
# patched in by _factors().
_STATIC_TABLE: dict[str, dict[str, float]] = {
    "energy": {"J": 1.0, "erg": 1.0e-7},
    "power": {"W": 1.0, "erg/s": 1.0e-7},
    "spectral_energy": {"J/Hz": 1.0},
    "length": {"cm": 1.0, "m": 100.0, "angstrom": 1.0e-8},
    "speed": {"cm/s": 1.0},
    "acceleration": {"cm/s^2": 1.0},
    "time": {"s": 1.0},
    "frequency": {"Hz": 1.0},
    "flux": {"W/m^2": 1.0},
    "rate": {"e-/s": 1.0},
    "gradient": {"eV/cm": 1.0},
    "action": {"eV*s": 1.0},
}


def _factors(consts: PhysicalConstants) -> dict[str, tuple[str, float]]:
    """unit tag -> (dimension, scale to base unit)."""
    table: dict[str, tuple[str, float]] = {}
    for dim, units in _STATIC_TABLE.items():
        for tag, scale in units.items():
            table[tag] = (dim, scale)
    table["eV"] = ("energy", consts.ev_to_joule)
    table["eV/s"] = ("power", consts.ev_to_joule)
    table["eV/Hz"] = ("spectral_energy", consts.ev_to_joule)
    return table


@dataclass(frozen=True)
class Quantity:
    """A scalar with a unit tag. Mixing tags without convert() raises."""

    value: float
    unit: str

    def _check_same(self, other: "Quantity") -> None:
        if not isinstance(other, Quantity):
            raise UnitError(f"cannot operate on Quantity and {type(other).__name__}")
        if other.unit != self.unit:
            raise UnitError(
                f"unit mismatch: {self.unit!r} vs {other.unit!r}; "
                "convert() explicitly first")

    def __add__(self, other: "Quantity") -> "Quantity":
        self._check_same(other)
        return Quantity(self.value + other.value, self.unit)

    def __sub__(self, other: "Quantity") -> "Quantity":
        self._check_same(other)
        return Quantity(self.value - other.value, self.unit)

    def __mul__(self, scalar: float) -> "Quantity":
        if isinstance(scalar, Quantity):
            raise UnitError("Quantity*Quantity is not supported; work in floats")
        return Quantity(self.value * scalar, self.unit)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Quantity":
        if isinstance(scalar, Quantity):
            raise UnitError("Quantity/Quantity is not supported; work in floats")
        return Quantity(self.value / scalar, self.unit)

    def __lt__(self, other: "Quantity") -> bool:
        self._check_same(other)
        return self.value < other.value


def convert(q: Quantity, target_unit: str,
            consts: PhysicalConstants | None = None) -> Quantity:
    """Rescale a Quantity to a dimensionally compatible unit tag.

    The eV<->J factor comes from the constant preset (default: paper).
    """
    consts = consts if consts is not None else _PAPER
    table = _factors(consts)
    if q.unit not in table:
        raise UnitError(f"unknown unit tag {q.unit!r}")
    if target_unit not in table:
        raise UnitError(f"unknown unit tag {target_unit!r}")
    dim_from, scale_from = table[q.unit]
    dim_to, scale_to = table[target_unit]
    if dim_from != dim_to:
        raise UnitError(
            f"incompatible dimensions: {q.unit!r} ({dim_from}) -> "
            f"{target_unit!r} ({dim_to})")
    return Quantity(q.value * scale_from / scale_to, target_unit)
