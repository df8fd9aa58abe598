"""Impurity models, bias configuration and subsystem geometry.

The chain is an infinite tight-binding lattice with hopping ``eta`` and a
current-conserving impurity occupying the sites ``|m| <= m0``.  Extended
single-particle eigenstates come in two families labeled by the incoming
direction, with reflection/transmission amplitudes collected in a 2x2
unitary scattering matrix

    S(k) = [[r_l, t_r],
            [t_l, r_r]],      0 < k < pi.

Two reservoirs fill left-moving and right-moving states up to chemical
potentials ``mu_l`` and ``mu_r``; the corresponding Fermi momenta are
``k_F = arccos(-mu / 2 eta)``.

Two subsystems are considered: an interval of ``ell_l`` sites at distance
``d_l`` to the left of the impurity, and one of ``ell_r`` sites at
distance ``d_r`` to the right.  The mirror-image overlap

    ell_mirror = max(min(d_l + ell_l, d_r + ell_r) - max(d_l, d_r), 0)

counts site pairs (-m, m) with one member in each interval; it controls
every volume-law term downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandEdgeError, DomainError

UNITARITY_TOL = 1e-10
PROBABILITY_TOL = 1e-12


@dataclass(frozen=True)
class ScatteringData:
    """Scattering amplitudes of the impurity at one momentum."""

    k: float
    r_l: complex
    t_l: complex
    r_r: complex
    t_r: complex

    def __post_init__(self):
        if not 0.0 < self.k < np.pi:
            raise DomainError(f"momentum k={self.k} outside (0, pi)")
        s = self.matrix()
        residual = np.max(np.abs(s.conj().T @ s - np.eye(2)))
        if residual > UNITARITY_TOL:
            raise DomainError(
                f"scattering matrix not unitary: residual {residual:.3e}")
        if abs(abs(self.t_l) ** 2 - abs(self.t_r) ** 2) > PROBABILITY_TOL:
            raise DomainError("left/right transmission probabilities differ")
        if abs(self.transmission + self.reflection - 1.0) > PROBABILITY_TOL:
            raise DomainError("T + R deviates from 1 beyond tolerance")

    def matrix(self) -> np.ndarray:
        return np.array([[self.r_l, self.t_r], [self.t_l, self.r_r]],
                        dtype=complex)

    @property
    def transmission(self) -> float:
        return abs(self.t_l) ** 2

    @property
    def reflection(self) -> float:
        return abs(self.r_l) ** 2


class ImpurityModel:
    """Base class; concrete impurities provide amplitudes at any momentum."""

    def amplitudes(self, k):
        """Vectorized (r_l, t_l, r_r, t_r) over an array of momenta."""
        raise NotImplementedError

    def transmission(self, k):
        _, t_l, _, _ = self.amplitudes(k)
        return np.abs(t_l) ** 2


@dataclass(frozen=True)
class ConstantS(ImpurityModel):
    """Impurity with momentum-independent scattering amplitudes."""

    r_l: complex
    t_l: complex
    r_r: complex
    t_r: complex

    def __post_init__(self):
        # delegate the unitarity checks to ScatteringData at a probe momentum
        ScatteringData(np.pi / 2, self.r_l, self.t_l, self.r_r, self.t_r)

    @classmethod
    def beamsplitter(cls, transmission: float) -> "ConstantS":
        """Symmetric beamsplitter with the given transmission probability."""
        if not 0.0 <= transmission <= 1.0:
            raise DomainError(f"transmission {transmission} outside [0, 1]")
        t = np.sqrt(transmission)
        r = 1j * np.sqrt(1.0 - transmission)
        return cls(r_l=r, t_l=t, r_r=r, t_r=t)

    def amplitudes(self, k):
        k = np.asarray(k, dtype=float)
        shape = k.shape
        return (np.full(shape, self.r_l, dtype=complex),
                np.full(shape, self.t_l, dtype=complex),
                np.full(shape, self.r_r, dtype=complex),
                np.full(shape, self.t_r, dtype=complex))


@dataclass(frozen=True)
class SingleSite(ImpurityModel):
    """Single-site impurity: on-site energy eps0 at m = 0.

    The transmission probability is

        T(k) = sin^2 k / (sin^2 k + (eps0 / 2 eta)^2).

    Only T, R and the combination t* r enter any measured quantity; the
    individual phases below are one fixed unitary-consistent convention,
    recorded for reproducibility:

        t = sin k / (sin k + i eps0 / 2 eta),    r = t - 1.
    """

    eps0: float
    eta: float = 1.0

    def __post_init__(self):
        if self.eta <= 0:
            raise DomainError(f"hopping amplitude eta={self.eta} must be > 0")

    def amplitudes(self, k):
        k = np.asarray(k, dtype=float)
        s = np.sin(k)
        a = self.eps0 / (2.0 * self.eta)
        t = s / (s + 1j * a)
        r = t - 1.0
        return r, t, r, t


def scattering_at(model: ImpurityModel, k: float) -> ScatteringData:
    """Scattering data of ``model`` at momentum ``k`` in (0, pi)."""
    if not 0.0 < k < np.pi:
        raise DomainError(f"momentum k={k} outside (0, pi)")
    r_l, t_l, r_r, t_r = (np.asarray(x).item() for x in model.amplitudes(k))
    return ScatteringData(k=k, r_l=r_l, t_l=t_l, r_r=r_r, t_r=t_r)


def fermi_momentum(eta: float, mu: float) -> float:
    """Fermi momentum arccos(-mu / 2 eta) in [0, pi]."""
    if eta <= 0:
        raise DomainError(f"hopping amplitude eta={eta} must be > 0")
    x = -mu / (2.0 * eta)
    if abs(x) > 1.0:
        raise BandEdgeError(
            f"|mu|={abs(mu)} exceeds the band edge 2*eta={2 * eta}")
    return float(np.arccos(x))


@dataclass(frozen=True)
class BiasConfig:
    """Hopping amplitude and the two reservoir chemical potentials."""

    eta: float
    mu_l: float
    mu_r: float

    def __post_init__(self):
        # raises BandEdgeError for out-of-band potentials
        fermi_momentum(self.eta, self.mu_l)
        fermi_momentum(self.eta, self.mu_r)

    @classmethod
    def from_fermi_momenta(cls, kf_l: float, kf_r: float,
                           eta: float = 1.0) -> "BiasConfig":
        for kf in (kf_l, kf_r):
            if not 0.0 <= kf <= np.pi:
                raise DomainError(f"Fermi momentum {kf} outside [0, pi]")
        return cls(eta=eta, mu_l=-2.0 * eta * np.cos(kf_l),
                   mu_r=-2.0 * eta * np.cos(kf_r))

    @property
    def kf_l(self) -> float:
        return fermi_momentum(self.eta, self.mu_l)

    @property
    def kf_r(self) -> float:
        return fermi_momentum(self.eta, self.mu_r)

    @property
    def k_plus(self) -> float:
        return max(self.kf_l, self.kf_r)

    @property
    def k_minus(self) -> float:
        return min(self.kf_l, self.kf_r)

    @property
    def delta_k(self) -> float:
        return self.k_plus - self.k_minus


@dataclass(frozen=True)
class Geometry:
    """Impurity half-width and the two subsystem intervals (in sites)."""

    m0: int
    d_l: int
    ell_l: int
    d_r: int
    ell_r: int

    def __post_init__(self):
        for name in ("m0", "d_l", "ell_l", "d_r", "ell_r"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 0:
                raise DomainError(f"{name}={value!r} must be a nonnegative integer")
        if self.ell_l < 1 or self.ell_r < 1:
            raise DomainError("subsystem lengths must be at least 1 site")

    def left_sites(self) -> np.ndarray:
        """A_L site indices, ascending (leftmost first)."""
        b = np.arange(self.ell_l, 0, -1)
        return -(self.m0 + self.d_l + b)

    def right_sites(self) -> np.ndarray:
        """A_R site indices, ascending."""
        a = np.arange(1, self.ell_r + 1)
        return self.m0 + self.d_r + a


def mirror_overlap(g: Geometry) -> tuple[int, int, int]:
    """(ell_mirror, delta_ell_l, delta_ell_r) for a geometry."""
    ell_mirror = max(min(g.d_l + g.ell_l, g.d_r + g.ell_r)
                     - max(g.d_l, g.d_r), 0)
    return ell_mirror, g.ell_l - ell_mirror, g.ell_r - ell_mirror
