"""Physical layer: geometry, path loss, ULA response, PDAF and link SINRs.

Conventions
-----------
* 2D geometry.  Every RIS is a horizontal ULA whose broadside points along +y,
  rotated by a per-RIS ``orientation``; azimuths are ``atan2(dx, dy)`` minus
  that orientation, wrapped to (-pi, pi].
* Path loss is ``beta0 / d**2`` for every link (UE-RIS, RIS-UE and UE-UE).
* The bracketed terms of the SINR expressions are complex amplitudes; their
  power is the squared magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

SPEED_OF_LIGHT = 3e8
TWO_PI = 2.0 * np.pi

DIRECT_ALL = "all"
DIRECT_ABOVE_THRESHOLD = "above-threshold"


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(x)
    return float(out) if out.ndim == 0 else out


def wrap_phase(phases) -> np.ndarray:
    """Map phases into [0, 2pi)."""
    out = np.mod(np.asarray(phases, dtype=float), TWO_PI)
    # mod of a tiny negative number rounds up to exactly 2pi
    return np.where(out >= TWO_PI, 0.0, out)


def wrap_angle(angle):
    """Map an angle into (-pi, pi]."""
    a = np.mod(np.asarray(angle, dtype=float) + np.pi, TWO_PI) - np.pi
    a = np.where(a <= -np.pi, a + TWO_PI, a)
    return float(a) if a.ndim == 0 else a


@dataclass(frozen=True)
class ArrayGeometry:
    elements: int = 10
    spacing: float = 0.05
    wavelength: float = 0.1

    def __post_init__(self):
        if self.elements < 1:
            raise ValueError("an array needs at least one element")
        if self.spacing <= 0 or self.wavelength <= 0:
            raise ValueError("spacing and wavelength must be positive")

    @classmethod
    def from_carrier(cls, elements: int, carrier: float = 3e9, spacing_frac: float = 0.5) -> "ArrayGeometry":
        wl = SPEED_OF_LIGHT / carrier
        return cls(elements, spacing_frac * wl, wl)

    @property
    def phase_step(self) -> float:
        """2*pi*spacing/wavelength."""
        return TWO_PI * self.spacing / self.wavelength

    def with_elements(self, elements: int) -> "ArrayGeometry":
        return replace(self, elements=elements)


@dataclass(frozen=True)
class RadioConstants:
    tx_power: float = 1.0
    ref_pathloss: float = 1e-6
    noise_power: float = 1e-16  # -130 dBm
    carrier: float = 3e9
    bandwidth: float = 250e3
    d2d_snr_threshold_db: float = 83.0
    ris_sinr_threshold_db: float = 30.0

    def __post_init__(self):
        for name in ("tx_power", "ref_pathloss", "noise_power", "carrier", "bandwidth"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not (math.isfinite(self.d2d_snr_threshold_db) and math.isfinite(self.ris_sinr_threshold_db)):
            raise ValueError("thresholds must be finite")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier


@dataclass(frozen=True)
class Scenario:
    """World state: UE/RIS positions, array geometry, constants and D2D fading."""

    ue_positions: np.ndarray
    ris_positions: np.ndarray
    geometry: ArrayGeometry = field(default_factory=ArrayGeometry)
    constants: RadioConstants = field(default_factory=RadioConstants)
    d2d_fading: np.ndarray | None = None
    ris_orientation: np.ndarray | None = None
    element_pattern: str = "cos"
    direct_links: str = DIRECT_ALL
    seed: int = 0

    def __post_init__(self):
        ue = np.asarray(self.ue_positions, dtype=float).reshape(-1, 2)
        ris = np.asarray(self.ris_positions, dtype=float).reshape(-1, 2)
        U, M = len(ue), len(ris)
        fading = np.ones((U, U), complex) if self.d2d_fading is None else np.asarray(self.d2d_fading, complex)
        if fading.shape != (U, U):
            raise ValueError(f"d2d_fading must be {U}x{U}")
        orient = np.zeros(M) if self.ris_orientation is None else np.asarray(self.ris_orientation, float)
        if orient.shape != (M,):
            raise ValueError("one orientation per RIS")
        if self.element_pattern not in ELEMENT_PATTERNS:
            raise ValueError(f"unknown element pattern {self.element_pattern!r}")
        if self.direct_links not in (DIRECT_ALL, DIRECT_ABOVE_THRESHOLD):
            raise ValueError(f"unknown direct link model {self.direct_links!r}")
        if U >= 2:
            d = np.linalg.norm(ue[:, None, :] - ue[None, :, :], axis=-1)
            if np.any(d[~np.eye(U, dtype=bool)] <= 0):
                raise ValueError("UE positions must be distinct")
        for name, value in (("ue_positions", ue), ("ris_positions", ris), ("d2d_fading", fading),
                            ("ris_orientation", orient)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def num_ues(self) -> int:
        return len(self.ue_positions)

    @property
    def num_ris(self) -> int:
        return len(self.ris_positions)

    def with_ris_positions(self, positions) -> "Scenario":
        return replace(self, ris_positions=np.asarray(positions, float).reshape(-1, 2))

    def with_geometry(self, geometry: ArrayGeometry) -> "Scenario":
        return replace(self, geometry=geometry)


# ---------------------------------------------------------------- geometry


def azimuth(frm, to) -> float:
    """Angle of ``to - frm`` from the +y broadside, in (-pi, pi]."""
    dx = float(to[0]) - float(frm[0])
    dy = float(to[1]) - float(frm[1])
    if dx == 0.0 and dy == 0.0:
        raise ValueError("azimuth of coincident points is undefined")
    return math.atan2(dx, dy)


def distance(a, b) -> float:
    return float(math.hypot(float(a[0]) - float(b[0]), float(a[1]) - float(b[1])))


def ris_angle(scn: Scenario, m: int, ue: int) -> float:
    """Azimuth of UE ``ue`` seen from RIS ``m``, relative to that RIS's broadside."""
    theta = azimuth(scn.ris_positions[m], scn.ue_positions[ue])
    return wrap_angle(theta - scn.ris_orientation[m])


# ------------------------------------------------------------------ arrays


def array_response(geom: ArrayGeometry, angle) -> np.ndarray:
    n = np.arange(geom.elements)
    return np.exp(-1j * geom.phase_step * n * np.sin(angle))


def aligned_profile(geom: ArrayGeometry, aoa: float, aod: float) -> np.ndarray:
    """Phase profile that makes every PDAF summand equal to one (peak N**2)."""
    n = np.arange(geom.elements)
    return wrap_phase(geom.phase_step * n * (np.sin(aoa) + np.sin(aod)))


def cascade_sum(geom: ArrayGeometry, profile, aoa, aod) -> np.ndarray:
    """Complex sum ``Psi . (a(aoa) * a(aod))``.

    ``profile`` may be (N,) or (P, N); ``aod`` may be scalar or (T,).  The result
    has shape ``profile.shape[:-1] + aod.shape``.
    """
    phases = np.asarray(profile, dtype=float)
    if phases.shape[-1] != geom.elements:
        raise ValueError(f"profile has {phases.shape[-1]} phases, array has {geom.elements} elements")
    sines = np.sin(aoa) + np.sin(np.asarray(aod, dtype=float))
    n = np.arange(geom.elements)
    steer = np.exp(-1j * geom.phase_step * np.multiply.outer(n, sines))  # (N, *T)
    return np.tensordot(np.exp(1j * phases), steer, axes=([-1], [0]))


def pdaf(geom: ArrayGeometry, profile, aoa, aod):
    """Power-domain array factor, in [0, N**2]."""
    val = np.abs(cascade_sum(geom, profile, aoa, aod)) ** 2
    return float(val) if np.ndim(val) == 0 else val


def _pattern_cos(theta):
    theta = np.asarray(theta, dtype=float)
    return np.where(np.abs(theta) < np.pi / 2, 2.0 * np.cos(theta), 0.0)


ELEMENT_PATTERNS = {
    "cos": _pattern_cos,
    "isotropic": lambda theta: np.ones_like(np.asarray(theta, dtype=float)),
    "none": lambda theta: np.zeros_like(np.asarray(theta, dtype=float)),
}


def element_gain(angle, pattern: str = "cos"):
    g = ELEMENT_PATTERNS[pattern](angle)
    return float(g) if np.ndim(g) == 0 else g


# -------------------------------------------------------------------- links


def path_gain(scn: Scenario, d: float) -> float:
    if d <= 0:
        raise ValueError("zero link distance")
    return scn.constants.ref_pathloss / d**2


def d2d_snr_linear(scn: Scenario, u: int, r: int) -> float:
    if u == r:
        raise ValueError("D2D SNR needs two distinct UEs")
    c = scn.constants
    beta = path_gain(scn, distance(scn.ue_positions[u], scn.ue_positions[r]))
    return c.tx_power * beta * abs(scn.d2d_fading[u, r]) ** 2 / c.noise_power


def d2d_snr(scn: Scenario, u: int, r: int) -> float:
    """D2D SNR in dB; -inf marks an absent link."""
    return linear_to_db(d2d_snr_linear(scn, u, r))


def d2d_snr_matrix(scn: Scenario) -> np.ndarray:
    """Linear SNR for all UE pairs (zero diagonal)."""
    c = scn.constants
    P = scn.ue_positions
    d2 = np.sum((P[:, None, :] - P[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    return c.tx_power * c.ref_pathloss / d2 * np.abs(scn.d2d_fading) ** 2 / c.noise_power


def direct_coefficient(scn: Scenario, u: int, r: int) -> complex:
    """``sqrt(beta_ur) h_ur``; zero when the direct link is treated as blocked."""
    if scn.direct_links == DIRECT_ABOVE_THRESHOLD:
        if linear_to_db(d2d_snr_linear(scn, u, r)) < scn.constants.d2d_snr_threshold_db:
            return 0j
    beta = path_gain(scn, distance(scn.ue_positions[u], scn.ue_positions[r]))
    return complex(np.sqrt(beta) * scn.d2d_fading[u, r])


def cascade_coefficient(scn: Scenario, m: int, u: int, r: int) -> float:
    """``sqrt(beta_um beta_mr G0(theta_u) G0(theta_r))`` for UE u -> RIS m -> UE r."""
    ris = scn.ris_positions[m]
    beta_u = path_gain(scn, distance(scn.ue_positions[u], ris))
    beta_r = path_gain(scn, distance(ris, scn.ue_positions[r]))
    g = element_gain(ris_angle(scn, m, u), scn.element_pattern) * \
        element_gain(ris_angle(scn, m, r), scn.element_pattern)
    return float(np.sqrt(beta_u * beta_r * g))


def link_amplitude(scn: Scenario, profile, m: int, u: int, r: int, *, cascaded: bool = True) -> complex:
    amp = direct_coefficient(scn, u, r)
    if cascaded:
        xc = cascade_coefficient(scn, m, u, r)
        if xc:
            amp += xc * complex(cascade_sum(scn.geometry, profile, ris_angle(scn, m, u), ris_angle(scn, m, r)))
    return amp


def _check_triple(assignment, u: int, m: int, r: int):
    if not assignment.has_triple(u, m, r):
        raise ValueError(f"triple (tx={u}, ris={m}, rx={r}) is not in the assignment")


def _sinr(scn, assignment, profiles, u, r, m, interferer_cascade: bool) -> float:
    _check_triple(assignment, u, m, r)
    p = scn.constants.tx_power
    signal = p * abs(link_amplitude(scn, profiles[m], m, u, r)) ** 2
    interference = 0.0
    for m2, u2 in assignment.transmitters():
        if u2 == u or u2 == r:
            continue
        amp = link_amplitude(scn, profiles[m2], m2, u2, r, cascaded=interferer_cascade)
        interference += p * abs(amp) ** 2
    return signal / (interference + scn.constants.noise_power)


def exact_sinr_linear(scn, assignment, profiles, u: int, r: int, m: int) -> float:
    return _sinr(scn, assignment, profiles, u, r, m, True)


def approx_sinr_linear(scn, assignment, profiles, u: int, r: int, m: int) -> float:
    """SINR with the interferers' RIS-reflected terms dropped."""
    return _sinr(scn, assignment, profiles, u, r, m, False)


def exact_sinr(scn, assignment, profiles, u: int, r: int, m: int) -> float:
    return linear_to_db(exact_sinr_linear(scn, assignment, profiles, u, r, m))


def approx_sinr(scn, assignment, profiles, u: int, r: int, m: int) -> float:
    return linear_to_db(approx_sinr_linear(scn, assignment, profiles, u, r, m))


def sum_rate(sinrs_db: Sequence[float], bandwidth: float) -> float:
    """Shannon sum rate in bit/s for SINRs given in dB."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    lin = db_to_linear(np.asarray(sinrs_db, dtype=float))
    return float(bandwidth * np.sum(np.log2(1.0 + lin)))


def direct_matrix(scn: Scenario) -> np.ndarray:
    """``sqrt(beta_ur) h_ur`` for all UE pairs, honoring the direct-link model."""
    c = scn.constants
    P = scn.ue_positions
    d2 = np.sum((P[:, None, :] - P[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    out = np.sqrt(c.ref_pathloss / d2) * scn.d2d_fading
    if scn.direct_links == DIRECT_ABOVE_THRESHOLD:
        snr = c.tx_power * np.abs(out) ** 2 / c.noise_power
        out = np.where(snr >= db_to_linear(c.d2d_snr_threshold_db), out, 0j)
    return out


class LinkSinrModel:
    """Linear SINR of every ``assignment.triples()`` link as a function of RIS positions.

    Vectorized equivalent of calling ``exact_sinr_linear``/``approx_sinr_linear``
    per link.  Everything that does not depend on RIS positions is computed once.
    """

    def __init__(self, scn: Scenario, assignment, profiles, *, exact: bool = False,
                 direct: np.ndarray | None = None):
        self.triples = assignment.triples()
        self.scn = scn
        self.exact = exact
        if not self.triples:
            return
        D = direct_matrix(scn) if direct is None else direct
        self.pattern = ELEMENT_PATTERNS[scn.element_pattern]
        txs = assignment.transmitters()
        self.ris_idx = np.array([m for m, _ in txs])
        tx_ue = np.array([u for _, u in txs])
        rx = np.array([t[2] for t in self.triples])
        row_of_ris = {m: k for k, (m, _) in enumerate(txs)}
        self.serving = np.array([row_of_ris[t[1]] for t in self.triples])
        self.cols = np.arange(len(rx))
        self.tx_pos = scn.ue_positions[tx_ue]
        self.rx_pos = scn.ue_positions[rx]
        self.orient = scn.ris_orientation[self.ris_idx]
        self.n = np.arange(scn.geometry.elements)
        self.psi = np.exp(1j * np.array([profiles[m] for m in self.ris_idx], dtype=float))  # (K, N)
        self_link = tx_ue[:, None] == rx[None, :]
        self.direct_amp = np.where(self_link, 0j, D[tx_ue][:, rx])
        self.interferer = ~self_link
        self.interferer[self.serving, self.cols] = False
        c = scn.constants
        self.direct_interference = c.tx_power * np.sum(
            np.where(self.interferer, np.abs(self.direct_amp) ** 2, 0.0), axis=0)

    def __call__(self, ris_positions=None) -> np.ndarray:
        if not self.triples:
            return np.zeros(0)
        scn, c = self.scn, self.scn.constants
        all_ris = scn.ris_positions if ris_positions is None else np.asarray(ris_positions, float).reshape(-1, 2)
        ris_pos = all_ris[self.ris_idx]                                   # (K, 2)
        vu = self.tx_pos - ris_pos                                        # (K, 2)
        vr = self.rx_pos[None, :, :] - ris_pos[:, None, :]                # (K, R, 2)
        du2 = np.sum(vu**2, axis=-1)
        dr2 = np.sum(vr**2, axis=-1)
        if np.any(du2 <= 0) or np.any(dr2 <= 0):
            raise ValueError("RIS coincides with a UE")
        th_u = wrap_angle(np.arctan2(vu[:, 0], vu[:, 1]) - self.orient)
        th_r = wrap_angle(np.arctan2(vr[..., 0], vr[..., 1]) - self.orient[:, None])
        xc = np.sqrt(c.ref_pathloss**2 / (du2[:, None] * dr2) * self.pattern(th_u)[:, None] * self.pattern(th_r))
        sines = np.sin(th_u)[:, None] + np.sin(th_r)                      # (K, R)
        cas = np.einsum("kn,krn->kr", self.psi, np.exp(-1j * scn.geometry.phase_step * sines[..., None] * self.n))
        full = self.direct_amp + xc * cas
        signal = c.tx_power * np.abs(full[self.serving, self.cols]) ** 2
        if self.exact:
            interference = c.tx_power * np.sum(np.where(self.interferer, np.abs(full) ** 2, 0.0), axis=0)
        else:
            interference = self.direct_interference
        return signal / (interference + c.noise_power)


def link_sinrs(scn: Scenario, assignment, profiles, *, exact: bool = False,
               direct: np.ndarray | None = None) -> np.ndarray:
    """Linear SINR of every ``assignment.triples()`` link, in that order."""
    return LinkSinrModel(scn, assignment, profiles, exact=exact, direct=direct)()
