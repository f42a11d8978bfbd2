"""Quasiparticle spectrum and ground-state magnetic moments of the chain.

The environment is a periodic chain of N spins (N odd) with Hamiltonian

    H_chain = -J * sum_j [ (1+gamma)/2 * sz_j sz_{j+1}
                           + (1-gamma)/2 * sy_j sy_{j+1} + lambda * sx_j ]

where gamma = 1 is the transverse-field Ising chain and gamma = 0 the XX
chain.  Jordan-Wigner + Fourier + Bogoliubov diagonalization gives, for
each momentum index k = 1 .. (N-1)/2,

    eps_k = 2J (lambda - cos(2 pi k / N))
    xi_k  = 2J sqrt[(cos(2 pi k / N) - lambda)^2 + gamma^2 sin^2(2 pi k / N)]
    cos(theta_k) = eps_k / xi_k,   sin(theta_k) = 2 J gamma sin(2 pi k / N) / xi_k

The transverse moment statistics of the Bogoliubov vacuum,

    m  = sum_{k>0} cos(theta_k)
    s2 = sum_{k>0} sin^2(theta_k)

feed the effective Landau-Zener coupling in :mod:`lzchain.lz`.

Conventions: sin(theta_k) >= 0 for k in range (only sin^2 is observable);
gapless XX modes (xi_k = 0) take the one-sided limit cos(theta_k) = +1,
sin(theta_k) = 0 unless strict mode is requested.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

ISING = "ising"
XY = "xy"

# xi below this (in units of J) counts as a gapless mode; double-precision
# rounding floor with headroom.
GAPLESS_TOL = 1e-14


class GaplessModeError(ValueError):
    """A Bogoliubov angle was requested for a mode with xi_k = 0 (strict mode)."""

    def __init__(self, k: int, lam: float):
        self.k = k
        self.lam = lam
        super().__init__(
            f"mode k={k} is gapless at lambda={lam!r}; "
            "the Bogoliubov angle is ill-defined (xi_k = 0)"
        )


@dataclass(frozen=True)
class ChainSpec:
    """Chain parameters: kind ('ising'|'xy'), size N (odd), coupling J,
    transverse field lambda, anisotropy gamma (forced to 1 for Ising)."""

    kind: Literal["ising", "xy"]
    n: int
    j: float = 1.0
    lam: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in (ISING, XY):
            raise ValueError(f"kind must be 'ising' or 'xy', got {self.kind!r}")
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"N must be odd and >= 3, got {self.n}")
        if not self.j > 0:
            raise ValueError(f"J must be positive, got {self.j}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.kind == ISING and self.gamma != 1.0:
            raise ValueError("Ising chain has gamma = 1 exactly; use kind='xy' instead")


@dataclass(frozen=True)
class Mode:
    """One k > 0 quasi-fermion mode."""

    k: int
    momentum: float
    eps: float
    xi: float
    cos_theta: float
    sin_theta: float


@dataclass(frozen=True)
class Spectrum:
    """All (N-1)/2 modes of a chain, in increasing-k order.

    Mode data is stored as flat arrays; the Mode view is built on demand.
    """

    spec: ChainSpec
    k: np.ndarray = field(repr=False)
    momentum: np.ndarray = field(repr=False)
    eps: np.ndarray = field(repr=False)
    xi: np.ndarray = field(repr=False)
    cos_theta: np.ndarray = field(repr=False)
    sin_theta: np.ndarray = field(repr=False)

    @property
    def modes(self) -> list[Mode]:
        return [
            Mode(int(self.k[i]), float(self.momentum[i]), float(self.eps[i]),
                 float(self.xi[i]), float(self.cos_theta[i]), float(self.sin_theta[i]))
            for i in range(len(self.k))
        ]


@dataclass(frozen=True)
class GroundMoments:
    """Vacuum moment m = sum cos(theta_k) and variance s2 = sum sin^2(theta_k)."""

    m: float
    s2: float


def momenta(n: int) -> np.ndarray:
    """Positive momentum indices k = 1 .. (N-1)/2 for an odd chain of N spins."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"N must be odd and >= 3, got {n}")
    return np.arange(1, (n - 1) // 2 + 1)


def dispersion(spec: ChainSpec, k) -> tuple:
    """Return (eps_k, xi_k) for momentum index k (scalar or array)."""
    k = np.asarray(k)
    if np.any(k < 1) or np.any(k > (spec.n - 1) // 2):
        raise ValueError(f"k must lie in [1, {(spec.n - 1) // 2}] for N={spec.n}")
    phi = 2.0 * np.pi * k / spec.n
    c, s = np.cos(phi), np.sin(phi)
    eps = 2.0 * spec.j * (spec.lam - c)
    xi = 2.0 * spec.j * np.sqrt((c - spec.lam) ** 2 + (spec.gamma * s) ** 2)
    if eps.ndim == 0:
        return float(eps), float(xi)
    return eps, xi


def bogoliubov(spec: ChainSpec, k, strict: bool = False) -> tuple:
    """Return (cos_theta_k, sin_theta_k) for momentum index k (scalar or array).

    Gapless modes (possible only for gamma = 0 with lambda on a mode energy)
    use the lambda -> value+ limit cos = +1, sin = 0, or raise
    GaplessModeError when ``strict``.
    """
    karr = np.atleast_1d(np.asarray(k))
    eps, xi = dispersion(spec, karr)
    eps = np.atleast_1d(eps)
    xi = np.atleast_1d(xi)
    gapless = xi < GAPLESS_TOL * spec.j
    if strict and np.any(gapless):
        bad = int(karr[np.argmax(gapless)])
        raise GaplessModeError(bad, spec.lam)
    safe_xi = np.where(gapless, 1.0, xi)
    ct = np.where(gapless, 1.0, eps / safe_xi)
    phi = 2.0 * np.pi * karr / spec.n
    st = np.where(gapless, 0.0, 2.0 * spec.j * spec.gamma * np.sin(phi) / safe_xi)
    if np.isscalar(k) or np.asarray(k).ndim == 0:
        return float(ct[0]), float(st[0])
    return ct, st


def spectrum(spec: ChainSpec, strict: bool = False) -> Spectrum:
    """Full positive-momentum spectrum of the chain."""
    k = momenta(spec.n)
    phi = 2.0 * np.pi * k / spec.n
    eps, xi = dispersion(spec, k)
    ct, st = bogoliubov(spec, k, strict=strict)
    return Spectrum(spec=spec, k=k, momentum=phi, eps=np.atleast_1d(eps),
                    xi=np.atleast_1d(xi), cos_theta=np.atleast_1d(ct),
                    sin_theta=np.atleast_1d(st))


def ground_moments(spec_or_spectrum) -> GroundMoments:
    """Vacuum moment statistics m = sum_k cos(theta_k), s2 = sum_k sin^2(theta_k).

    Accepts either a ChainSpec or a precomputed Spectrum.
    """
    sp = spec_or_spectrum
    if isinstance(sp, ChainSpec):
        sp = spectrum(sp)
    m = float(np.sum(sp.cos_theta))
    s2 = float(np.sum(sp.sin_theta ** 2))
    return GroundMoments(m=m, s2=s2)
