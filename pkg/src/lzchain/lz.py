"""Closed-form Landau-Zener flip probability for a chain-coupled qubit.

The qubit Hamiltonian (v t / 2) sz + (Delta / 2) sx is swept through its
crossing while the qubit couples to the chain via -g * sx * J^x.  For a
chain starting in its Bogoliubov vacuum the asymptotic survival
probability is

    P_surv = exp(-2 pi Gamma^2 / (hbar v)),
    Gamma^2 = (Delta/2 - g m)^2 + g^2 s2,

with (m, s2) the vacuum moment statistics from :mod:`lzchain.chain`.
At g = 0 this reduces to the textbook P_flip = 1 - exp(-pi Delta^2 / (2 hbar v)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, GroundMoments, ground_moments, spectrum

# exp underflow boundary for double precision; below this p_survive is 0 exactly
_EXP_CLAMP = -745.0


@dataclass(frozen=True)
class LZParams:
    """Sweep parameters: tunneling Delta >= 0, velocity v > 0, coupling g >= 0."""

    delta: float = 0.0
    v: float = 50.0
    g: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"Delta must be >= 0, got {self.delta}")
        if not self.v > 0:
            raise ValueError(f"sweep velocity v must be positive, got {self.v}")
        if self.g < 0:
            raise ValueError(f"coupling g must be >= 0, got {self.g}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")


@dataclass(frozen=True)
class LZResult:
    gamma2: float
    p_flip: float
    p_survive: float


def gamma_squared(moments: GroundMoments, params: LZParams) -> float:
    """Effective squared coupling (Delta/2 - g m)^2 + g^2 s2 (energy^2)."""
    return (params.delta / 2.0 - params.g * moments.m) ** 2 + params.g ** 2 * moments.s2


def lz_probability(gamma2: float, params: LZParams) -> LZResult:
    """Asymptotic flip/survival probabilities for a given Gamma^2."""
    if gamma2 < 0:
        raise ValueError(f"Gamma^2 must be >= 0, got {gamma2} (upstream bug?)")
    expo = -2.0 * np.pi * gamma2 / (params.hbar * params.v)
    p_survive = 0.0 if expo < _EXP_CLAMP else float(np.exp(expo))
    return LZResult(gamma2=float(gamma2), p_flip=1.0 - p_survive, p_survive=p_survive)


def standard_lz(delta: float, v: float, hbar: float = 1.0) -> float:
    """Textbook uncoupled result 1 - exp(-pi Delta^2 / (2 hbar v))."""
    if not v > 0:
        raise ValueError(f"sweep velocity v must be positive, got {v}")
    return 1.0 - float(np.exp(-np.pi * delta ** 2 / (2.0 * hbar * v)))


def chain_driven_probability(spec: ChainSpec, params: LZParams,
                             strict: bool = False) -> LZResult:
    """Flip probability of a qubit coupled to the given chain (vacuum start)."""
    moments = ground_moments(spectrum(spec, strict=strict))
    return lz_probability(gamma_squared(moments, params), params)
