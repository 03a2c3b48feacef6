"""Post-slit wavefunction of two Gaussian slits and derived field quantities.

The transverse state is a superposition of two freely spreading Gaussian
packets centered at y = +Y and y = -Y, each starting with width sigma0 and
zero transverse momentum:

    psi(y, t) = G(y - Y, t) + G(y + Y, t)
    G(u, t)   = (2 pi sigma0^2)^(-1/4) (1 + i b)^(-1/2)
                * exp(-u^2 / (4 sigma0^2 (1 + i b)))
    b         = hbar t / (2 m sigma0^2)

so the spread width is sigma_t = sigma0 sqrt(1 + b^2).  The longitudinal
motion is classical: x = v_x t, which maps a section at distance x from the
slit plane onto an evaluation time t = x / v_x.

From psi we expose the polar decomposition psi = R exp(iS/hbar), the
quantum potential

    Q = -(hbar^2 / 2m) (d^2 R / dy^2) / R

and its y-gradient.  Both are evaluated in closed form through the first
three complex derivatives of psi: with A = R^2 = |psi|^2,

    R''/R = A''/(2A) - A'^2/(4A^2)
    Q'    = -(hbar^2/4m) [A'''/A - 2 A''A'/A^2 + A'^3/A^3]

which avoids ever differentiating the modulus numerically.  All functions
are pure and vectorized over y.

Samples where R falls below a floor (1e-12 of the packet peak scale at
that t) sit too close to a node for Q to be meaningful; they are returned
as NaN and flagged, and valley scans exclude them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .units import PhysicalConstants

# Fraction of the peak amplitude scale below which a sample counts as
# node-adjacent and is masked out of Q / grad Q.
R_FLOOR_FRACTION = 1.0e-12

# Ratio kinetic energy / rest energy above which the non-relativistic
# model is refused.
RELATIVISTIC_RATIO_LIMIT = 0.2


@dataclass(frozen=True)
class SlitExperiment:
    """Geometry and beam parameters of the two-Gaussian-slit setup.

    Lengths in cm, speeds in cm/s, energies in eV.  ``amplitude`` scales
    the (un-normalized) wavefunction; every derived quantity must be
    invariant under it, which the test suite asserts.

    slit_half_separation_cm may be zero: that is the degenerate
    single-packet limit used by closed-form oracles.  Configuration
    loading (make_experiment) requires it to be positive.
    """

    slit_half_separation_cm: float   # Y
    packet_width_cm: float           # sigma0
    kinetic_energy_ev: float
    forward_speed_cm_s: float        # v_x
    screen_distance_cm: float        # D
    cross_section_x_cm: float        # section position for scans
    amplitude: float = 1.0

    def __post_init__(self):
        if self.slit_half_separation_cm < 0.0:
            raise ConfigError("slit_half_separation_cm must be >= 0")
        if self.packet_width_cm <= 0.0:
            raise ConfigError("packet_width_cm must be positive")
        if self.kinetic_energy_ev <= 0.0:
            raise ConfigError("kinetic_energy_ev must be positive")
        if self.forward_speed_cm_s <= 0.0:
            raise ConfigError("forward_speed_cm_s must be positive")
        if not 0.0 < self.cross_section_x_cm <= self.screen_distance_cm:
            raise ConfigError(
                "cross_section_x_cm must satisfy 0 < x <= screen_distance_cm")
        if self.amplitude <= 0.0:
            raise ConfigError("amplitude must be positive")

    @property
    def time_of_flight_s(self) -> float:
        """Slit plane to screen."""
        return self.screen_distance_cm / self.forward_speed_cm_s

    def section_time_s(self, x_cm: float) -> float:
        """Evaluation time for a cross section at distance x from the slits."""
        if not 0.0 <= x_cm <= self.screen_distance_cm:
            raise ConfigError("section position outside slit-screen region")
        return x_cm / self.forward_speed_cm_s


# Calibrated defaults for the 45 keV two-slit setup: slit centers 1e-4 cm
# apart, screen at 35 cm, section of interest at 18 cm.  The packet width
# is calibrated so that the section at 18 cm shows the quoted observables
# (|Q| maximum of order 1e-4 eV, first-valley wall gradients within an
# order of magnitude of 9.66 / 3.06 / 0.93 / 0.8 eV/cm).
JONSSON_DEFAULTS = {
    "slit_half_separation_cm": 0.5e-4,
    "packet_width_cm": 3.5e-6,
    "kinetic_energy_ev": 45.0e3,
    "screen_distance_cm": 35.0,
    "cross_section_x_cm": 18.0,
}


def make_experiment(consts: PhysicalConstants,
                    *,
                    slit_half_separation_cm: float,
                    packet_width_cm: float,
                    kinetic_energy_ev: float,
                    screen_distance_cm: float,
                    cross_section_x_cm: float,
                    forward_speed_cm_s: float | None = None,
                    amplitude: float = 1.0) -> SlitExperiment:
    """Validated construction: non-relativistic guard and p^2/2m consistency.

    If forward_speed_cm_s is omitted it is derived from the kinetic
    energy; if given, it must agree with p^2/2m to 1 part in 1e6.
    """
    if slit_half_separation_cm <= 0.0:
        raise ConfigError("slit_half_separation_cm must be positive")
    ratio = kinetic_energy_ev / consts.electron_rest_energy_ev
    if ratio > RELATIVISTIC_RATIO_LIMIT:
        raise ConfigError(
            f"kinetic energy is {ratio:.2f} of the rest energy; the "
            f"non-relativistic model is only valid below "
            f"{RELATIVISTIC_RATIO_LIMIT}")
    v_expected = consts.speed_from_kinetic_energy(kinetic_energy_ev)
    if forward_speed_cm_s is None:
        forward_speed_cm_s = v_expected
    elif abs(forward_speed_cm_s - v_expected) > 1.0e-6 * v_expected:
        raise ConfigError(
            f"forward_speed_cm_s={forward_speed_cm_s:g} inconsistent with "
            f"p^2/2m for {kinetic_energy_ev:g} eV (expected {v_expected:g})")
    return SlitExperiment(
        slit_half_separation_cm=slit_half_separation_cm,
        packet_width_cm=packet_width_cm,
        kinetic_energy_ev=kinetic_energy_ev,
        forward_speed_cm_s=forward_speed_cm_s,
        screen_distance_cm=screen_distance_cm,
        cross_section_x_cm=cross_section_x_cm,
        amplitude=amplitude,
    )


def jonsson_experiment(consts: PhysicalConstants,
                       **overrides) -> SlitExperiment:
    """The calibrated 45 keV default setup."""
    params = dict(JONSSON_DEFAULTS)
    params.update(overrides)
    return make_experiment(consts, **params)


# ---------------------------------------------------------------------------
# Packet kinematics

def spreading_parameter(exp: SlitExperiment, consts: PhysicalConstants,
                        t):
    """b = hbar t / (2 m sigma0^2), dimensionless. Vectorized over t."""
    m = consts.electron_mass
    return consts.hbar_ev_s * t / (2.0 * m * exp.packet_width_cm**2)


def sigma_t(exp: SlitExperiment, consts: PhysicalConstants, t):
    """Spread packet width sigma0 sqrt(1 + b^2), in cm. Vectorized over t."""
    b = spreading_parameter(exp, consts, t)
    return exp.packet_width_cm * np.hypot(1.0, b)


def interference_wavenumber(exp: SlitExperiment, consts: PhysicalConstants,
                            t: float) -> float:
    """Local fringe wavenumber xi = Y b / (sigma0^2 (1 + b^2)), in 1/cm.

    The two-packet cross term oscillates as cos(xi * y); 2 pi / xi is the
    fringe spacing at time t (zero at t = 0).
    """
    b = spreading_parameter(exp, consts, t)
    return (exp.slit_half_separation_cm * b
            / (exp.packet_width_cm**2 * (1.0 + b * b)))


def field_scale(exp: SlitExperiment, consts: PhysicalConstants,
                t: float) -> float:
    """Shortest length scale of field structure at time t, in cm.

    min(sigma_t, 1/xi); used to pick finite-difference steps.
    """
    xi = interference_wavenumber(exp, consts, t)
    s = sigma_t(exp, consts, t)
    return min(s, 1.0 / xi) if xi > 0.0 else s


def de_broglie_wavelength(exp: SlitExperiment,
                          consts: PhysicalConstants) -> float:
    """lambda = h/p = 2 pi hbar / (m v_x), in cm."""
    p = consts.electron_mass * exp.forward_speed_cm_s
    return 2.0 * math.pi * consts.hbar_ev_s / p


def fringe_spacing(exp: SlitExperiment, consts: PhysicalConstants,
                   x_cm: float) -> float:
    """Far-field fringe spacing lambda_dB * x / (2 Y) at section x, in cm."""
    return (de_broglie_wavelength(exp, consts) * x_cm
            / (2.0 * exp.slit_half_separation_cm))


def peak_amplitude_scale(exp: SlitExperiment, consts: PhysicalConstants, t):
    """Upper bound 2 |N(t)| on |psi| at time t (perfect packet overlap)."""
    b = spreading_parameter(exp, consts, t)
    n_abs = (2.0 * math.pi * exp.packet_width_cm**2) ** -0.25 \
        / (1.0 + b * b) ** 0.25
    return 2.0 * exp.amplitude * n_abs


def r_floor(exp: SlitExperiment, consts: PhysicalConstants, t):
    """Amplitude below which a sample is treated as node-adjacent."""
    return R_FLOOR_FRACTION * peak_amplitude_scale(exp, consts, t)


# ---------------------------------------------------------------------------
# psi and derivatives

def _packet_core(exp: SlitExperiment, consts: PhysicalConstants, t):
    """Complex width parameter g and prefactor N of one packet at time t.

    G(u, t) = N exp(-g u^2) with g = 1 / (4 sigma0^2 (1 + i b)).
    """
    b = spreading_parameter(exp, consts, t)
    denom = 1.0 + 1j * b
    g = 1.0 / (4.0 * exp.packet_width_cm**2 * denom)
    n = exp.amplitude * (2.0 * math.pi * exp.packet_width_cm**2) ** -0.25 \
        / np.sqrt(denom)
    return g, n


def _psi_derivs(exp: SlitExperiment, consts: PhysicalConstants,
                y, t, order: int = 3):
    """psi and its first ``order`` y-derivatives, each shaped like y.

    For one packet G = N exp(-g u^2):
        G'   = -2 g u G
        G''  = (4 g^2 u^2 - 2 g) G
        G''' = (12 g^2 u - 8 g^3 u^3) G
    and the superposition just sums the two shifted packets.  t may be a
    scalar or an array broadcastable against y (paired path samples).
    """
    if np.any(np.asarray(t) < 0.0):
        raise ConfigError("t must be >= 0")
    y = np.asarray(y, dtype=float)
    g, n = _packet_core(exp, consts, t)
    yy = exp.slit_half_separation_cm
    out = []
    u1 = y - yy
    u2 = y + yy
    # amplitude underflow far in the tails is benign: those samples sit
    # below the node floor and end up masked by the callers
    with np.errstate(invalid="ignore", over="ignore", under="ignore"):
        g1 = n * np.exp(-g * u1 * u1)
        g2 = n * np.exp(-g * u2 * u2)
        out.append(g1 + g2)
        if order >= 1:
            out.append(-2.0 * g * (u1 * g1 + u2 * g2))
        if order >= 2:
            out.append((4.0 * g * g * u1 * u1 - 2.0 * g) * g1
                       + (4.0 * g * g * u2 * u2 - 2.0 * g) * g2)
        if order >= 3:
            out.append((12.0 * g**2 * u1 - 8.0 * g**3 * u1**3) * g1
                       + (12.0 * g**2 * u2 - 8.0 * g**3 * u2**3) * g2)
    return out


def psi(exp: SlitExperiment, consts: PhysicalConstants, y, t: float):
    """Un-normalized superposition amplitude at (y, t)."""
    (p,) = _psi_derivs(exp, consts, y, t, order=0)
    if p.ndim == 0:
        return complex(p)
    return p


def amplitude_phase(exp: SlitExperiment, consts: PhysicalConstants,
                    y, t: float):
    """Polar decomposition (R, S) with S = hbar arg(psi) in eV s.

    For array y the phase is unwrapped along the array so dS/dy is well
    defined between nodes; for scalar y the principal value is returned.
    Node-adjacent samples (R below the floor) get S = NaN.
    """
    (p,) = _psi_derivs(exp, consts, y, t, order=0)
    r = np.abs(p)
    phase = np.angle(p)
    if phase.ndim > 0:
        phase = np.unwrap(phase)
    s = consts.hbar_ev_s * phase
    floor = r_floor(exp, consts, t)
    s = np.where(r > floor, s, np.nan)
    if np.ndim(y) == 0:
        return float(r), float(s)
    return r, s


def _log_density_derivs(exp, consts, y, t, order=3):
    """A = |psi|^2 and its derivatives A', A'', A''' (as needed)."""
    derivs = _psi_derivs(exp, consts, y, t, order=order)
    p = derivs[0]
    a = (p * p.conjugate()).real
    out = [a]
    if order >= 1:
        d1 = derivs[1]
        out.append(2.0 * (p.conjugate() * d1).real)
    if order >= 2:
        d1, d2 = derivs[1], derivs[2]
        out.append(2.0 * (p.conjugate() * d2).real
                   + 2.0 * (d1 * d1.conjugate()).real)
    if order >= 3:
        d1, d2, d3 = derivs[1], derivs[2], derivs[3]
        out.append(2.0 * (p.conjugate() * d3).real
                   + 6.0 * (d1.conjugate() * d2).real)
    return out


def r_laplacian_over_r(exp: SlitExperiment, consts: PhysicalConstants,
                       y, t: float):
    """(d^2R/dy^2)/R = A''/(2A) - A'^2/(4A^2), unmasked."""
    a, a1, a2 = _log_density_derivs(exp, consts, y, t, order=2)
    with np.errstate(invalid="ignore", divide="ignore"):
        return a2 / (2.0 * a) - a1 * a1 / (4.0 * a * a)


def r_laplacian(exp: SlitExperiment, consts: PhysicalConstants, y, t: float):
    """Analytic d^2R/dy^2, for cross-checks against finite differences."""
    a = _log_density_derivs(exp, consts, y, t, order=0)[0]
    return np.sqrt(a) * r_laplacian_over_r(exp, consts, y, t)


def quantum_potential(exp: SlitExperiment, consts: PhysicalConstants,
                      y, t: float):
    """Q = -(hbar^2/2m) R''/R in eV; NaN where R is below the node floor."""
    a, a1, a2 = _log_density_derivs(exp, consts, y, t, order=2)
    m = consts.electron_mass
    with np.errstate(invalid="ignore", divide="ignore"):
        q = -(consts.hbar_ev_s**2 / (2.0 * m)) * (
            a2 / (2.0 * a) - a1 * a1 / (4.0 * a * a))
    floor2 = r_floor(exp, consts, t) ** 2
    q = np.where(a > floor2, q, np.nan)
    return float(q) if np.ndim(q) == 0 else q


def grad_quantum_potential(exp: SlitExperiment, consts: PhysicalConstants,
                           y, t: float, method: str = "analytic",
                           h_fd: float | None = None):
    """dQ/dy in eV/cm; NaN where R is below the node floor.

    method "analytic" uses the closed form
        Q' = -(hbar^2/4m) [A'''/A - 2 A''A'/A^2 + A'^3/A^3];
    "finite_difference" applies second-order central differences to Q with
    step h_fd (default 1e-3 times the local field scale).
    """
    if method == "analytic":
        a, a1, a2, a3 = _log_density_derivs(exp, consts, y, t, order=3)
        m = consts.electron_mass
        with np.errstate(invalid="ignore", divide="ignore"):
            gq = -(consts.hbar_ev_s**2 / (4.0 * m)) * (
                a3 / a - 2.0 * a2 * a1 / (a * a) + (a1 / a) ** 3)
        floor2 = r_floor(exp, consts, t) ** 2
        gq = np.where(a > floor2, gq, np.nan)
        return float(gq) if np.ndim(gq) == 0 else gq
    if method == "finite_difference":
        if h_fd is None:
            h_fd = 1.0e-3 * field_scale(exp, consts, t)
        y = np.asarray(y, dtype=float)
        qp = quantum_potential(exp, consts, y + h_fd, t)
        qm = quantum_potential(exp, consts, y - h_fd, t)
        gq = (qp - qm) / (2.0 * h_fd)
        return float(gq) if gq.ndim == 0 else gq
    raise ConfigError(f"unknown gradient method {method!r}")


# ---------------------------------------------------------------------------
# Cross-section scans and valley detection

@dataclass(frozen=True)
class FieldSample:
    """One sampled point of the field; flag is 'ok' or 'singular'."""

    y_cm: float
    t_s: float
    psi_re: float
    psi_im: float
    r: float
    s_ev_s: float
    q_ev: float
    grad_q_ev_per_cm: float
    flag: str


def field_sample(exp: SlitExperiment, consts: PhysicalConstants,
                 y: float, t: float) -> FieldSample:
    """Probe every field channel at one (y, t) point."""
    p = psi(exp, consts, y, t)
    r, s = amplitude_phase(exp, consts, y, t)
    q = quantum_potential(exp, consts, y, t)
    gq = grad_quantum_potential(exp, consts, y, t)
    singular = not math.isfinite(q)
    return FieldSample(
        y_cm=float(y),
        t_s=float(t),
        psi_re=p.real,
        psi_im=p.imag,
        r=r,
        s_ev_s=s,
        q_ev=q,
        grad_q_ev_per_cm=gq,
        flag="singular" if singular else "ok",
    )


@dataclass(frozen=True)
class Valley:
    """A trough of Q between two flanking maxima.

    ``index`` counts outward from the symmetry axis (1 = innermost) and is
    shared by the mirror partner at -y_min.  The depth and half-width are
    measured on the wall nearer the axis (the side an outbound electron
    enters through), so grad_estimate = depth / half-width is the entry
    wall steepness.
    """

    index: int
    y_min_cm: float
    y_left_cm: float
    y_right_cm: float
    depth_ev: float
    half_width_cm: float
    grad_estimate_ev_per_cm: float

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "y_min_cm": self.y_min_cm,
            "y_left_cm": self.y_left_cm,
            "y_right_cm": self.y_right_cm,
            "depth_ev": self.depth_ev,
            "half_width_cm": self.half_width_cm,
            "grad_estimate_ev_per_cm": self.grad_estimate_ev_per_cm,
        }


@dataclass
class ScanResult:
    """Arrays sampled along y at fixed t, plus detected valleys."""

    x_cm: float
    t_s: float
    y: np.ndarray
    r: np.ndarray
    s: np.ndarray
    q: np.ndarray
    grad_q: np.ndarray
    singular: np.ndarray          # bool mask, True where node-adjacent
    valleys: list[Valley] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def symmetric_grid(half_range: float, n_samples: int) -> np.ndarray:
    """Grid exactly symmetric about 0 (odd point count includes 0)."""
    half = n_samples // 2
    step = half_range / half
    return step * np.arange(-half, half + 1)


def cross_section_scan(exp: SlitExperiment, consts: PhysicalConstants,
                       x_cm: float, y_half_range_cm: float,
                       n_samples: int = 8193) -> ScanResult:
    """Sample the field along y at the section x and detect Q valleys.

    The grid is symmetric about y = 0 (mirror symmetry of the setup is
    exact there, which the valley pairing tests rely on).
    """
    if n_samples < 100:
        raise ConfigError("n_samples must be >= 100")
    t = exp.section_time_s(x_cm)
    y = symmetric_grid(y_half_range_cm, n_samples)
    r, s = amplitude_phase(exp, consts, y, t)
    q = quantum_potential(exp, consts, y, t)
    gq = grad_quantum_potential(exp, consts, y, t)
    singular = ~np.isfinite(q)
    result = ScanResult(x_cm=x_cm, t_s=t, y=y, r=r, s=s, q=q, grad_q=gq,
                        singular=singular)
    result.valleys = _detect_valleys(y, q, singular, result.diagnostics)
    if not result.valleys:
        result.diagnostics.append(
            "no valleys found: the section shows no resolved troughs of Q "
            "inside the scan range")
    return result


def _local_extrema(q: np.ndarray, singular: np.ndarray):
    """Indices of strict local minima and maxima of q, skipping singular."""
    valid = ~singular
    ok = valid[:-2] & valid[1:-1] & valid[2:]
    interior = q[1:-1]
    is_min = ok & (interior < q[:-2]) & (interior < q[2:])
    is_max = ok & (interior > q[:-2]) & (interior > q[2:])
    return list(np.nonzero(is_min)[0] + 1), list(np.nonzero(is_max)[0] + 1)


def _detect_valleys(y: np.ndarray, q: np.ndarray, singular: np.ndarray,
                    diagnostics: list[str]) -> list[Valley]:
    mins, maxs = _local_extrema(q, singular)
    if not mins or not maxs:
        return []
    valleys: list[Valley] = []
    # Group minima by side of the axis; index outward per side.
    for side in (+1, -1):
        side_mins = [i for i in mins if side * y[i] > 0.0]
        side_mins.sort(key=lambda i: abs(y[i]))
        for rank, i in enumerate(side_mins, start=1):
            # Flanking maxima: nearest toward and away from the axis.
            inner = [j for j in maxs if abs(y[j]) < abs(y[i])
                     and side * y[j] >= 0.0]
            outer = [j for j in maxs if side * y[j] > 0.0
                     and abs(y[j]) > abs(y[i])]
            if not inner or not outer:
                diagnostics.append(
                    f"minimum at y={y[i]:.3e} lacks a flanking maximum; "
                    "skipped")
                continue
            j_in = max(inner, key=lambda j: abs(y[j]))
            j_out = min(outer, key=lambda j: abs(y[j]))
            depth = q[j_in] - q[i]
            half_width = abs(y[i] - y[j_in])
            left, right = sorted((y[j_in], y[j_out]))
            valleys.append(Valley(
                index=rank,
                y_min_cm=float(y[i]),
                y_left_cm=float(left),
                y_right_cm=float(right),
                depth_ev=float(depth),
                half_width_cm=float(half_width),
                grad_estimate_ev_per_cm=float(depth / half_width),
            ))
    valleys.sort(key=lambda v: (v.index, -np.sign(v.y_min_cm)))
    return valleys
