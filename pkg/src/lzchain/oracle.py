"""Brute-force cross-check of the closed-form flip probability.

Builds the full qubit + chain Hamiltonian in the 2^(N+1)-dimensional spin
basis, prepares |up> (x) |chain ground state>, integrates the
time-dependent Schrodinger equation over a symmetric window [-T, T], and
reads off the flip probability by tracing over the final chain state.

The dynamics only ever touches the chain through H_chain and J^x, so the
chain component stays inside the smallest {H_chain, J^x}-invariant
subspace containing the initial ground state.  The propagation runs in an
orthonormal basis of that subspace (built numerically and verified for
invariance at runtime, with a fallback to the full space), which is an
exact restriction, not an approximation.  The integrator is DOP853 with
per-step error control; norm drift is reported and checked against a
budget.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import ode
from scipy.linalg import eigh

from .chain import ChainSpec, spectrum
from .lz import LZParams

MAX_SITES = 13          # full dimension cap 2^(13+1) = 16384
DEGENERACY_TOL = 1e-10  # relative gap below which the ground state counts as degenerate
CONVERGENCE_TOL = 5e-3  # |p(T) - p(1.5T)| gate used by check_convergence

_SX = np.array([[0.0, 1.0], [1.0, 0.0]])
_SY_REAL = np.array([[0.0, -1.0], [1.0, 0.0]])  # sy = i * _SY_REAL; sy(x)sy is real
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
_I2 = np.eye(2)


class DimensionCapError(ValueError):
    """Chain too large for the dense oracle (N > MAX_SITES)."""


class NormBudgetExceededError(RuntimeError):
    """Integrator norm drift exceeded the configured budget."""


class NonConvergentError(RuntimeError):
    """Flip probability still moving when the time window is enlarged."""


@dataclass(frozen=True)
class OracleConfig:
    """Integration window [-t_span, t_span], per-step error target, norm budget.

    step_control defaults to 1e-12: per-step 1e-10 accumulates a norm drift
    of order 5e-8 over the ~1e5 steps a T=40 sweep needs, which would bust
    the default 1e-8 norm budget.
    """

    t_span: float = 40.0
    step_control: float = 1e-12
    norm_budget: float = 1e-8

    def __post_init__(self):
        if not self.t_span > 0:
            raise ValueError(f"t_span must be positive, got {self.t_span}")
        if not 0 < self.step_control < 1e-3:
            raise ValueError(f"step_control out of range: {self.step_control}")
        if not self.norm_budget > 0:
            raise ValueError(f"norm_budget must be positive, got {self.norm_budget}")


@dataclass(frozen=True)
class ChainGroundState:
    """Dense chain ground state with degeneracy bookkeeping."""

    vector: np.ndarray
    energy: float
    gap: float
    degenerate: bool


@dataclass(frozen=True)
class OracleResult:
    p_flip: float
    p_survive: float
    norm_drift: float
    t_span_used: float
    converged: Optional[bool] = None


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    p_flip_t: float
    p_flip_longer: float
    difference: float
    result: OracleResult


def _check_cap(n: int):
    if n > MAX_SITES:
        raise DimensionCapError(
            f"N={n} exceeds the dense-oracle cap of {MAX_SITES} sites "
            f"(dimension 2^{MAX_SITES + 1})"
        )


def site_operator(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a single-spin operator at the given site of an n-spin chain."""
    out = np.array([[1.0]])
    for s in range(n):
        out = np.kron(out, op if s == site else _I2)
    return out


def total_sx(n: int) -> np.ndarray:
    """Transverse moment J^x = sum_j sx_j on the 2^n chain space."""
    out = np.zeros((2 ** n, 2 ** n))
    for j in range(n):
        out += site_operator(_SX, j, n)
    return out


def chain_hamiltonian(spec: ChainSpec) -> np.ndarray:
    """Dense chain-only Hamiltonian on 2^N (periodic boundary).

    -J sum_j [(1+gamma)/2 zz + (1-gamma)/2 yy + lambda x]; real symmetric
    because sy(x)sy has real entries.
    """
    _check_cap(spec.n)
    n, j, lam, gamma = spec.n, spec.j, spec.lam, spec.gamma
    d = 2 ** n
    h = np.zeros((d, d))
    for site in range(n):
        nxt = (site + 1) % n
        zz = site_operator(_SZ, site, n) @ site_operator(_SZ, nxt, n)
        h -= j * (1.0 + gamma) / 2.0 * zz
        if gamma != 1.0:
            yy = -(site_operator(_SY_REAL, site, n) @ site_operator(_SY_REAL, nxt, n))
            h -= j * (1.0 - gamma) / 2.0 * yy
        h -= j * lam * site_operator(_SX, site, n)
    return h


def build_hamiltonian(spec: ChainSpec, params: LZParams, t: float) -> np.ndarray:
    """Full dense H(t) on 2^(N+1): qubit sweep + tunneling + chain + coupling.

    The qubit is the leading tensor factor; the chain follows.
    """
    _check_cap(spec.n)
    dc = 2 ** spec.n
    ic = np.eye(dc)
    h = np.kron(params.v * t / 2.0 * _SZ + params.delta / 2.0 * _SX, ic)
    h += np.kron(_I2, chain_hamiltonian(spec))
    if params.g != 0.0:
        h -= params.g * np.kron(_SX, total_sx(spec.n))
    return h


def chain_ground_state(spec: ChainSpec) -> ChainGroundState:
    """Lowest eigenvector of the dense chain Hamiltonian.

    On (near-)degeneracy the even combination under the global spin flip
    prod_j sx_j is returned, matching the parity of the Bogoliubov vacuum.
    """
    h = chain_hamiltonian(spec)
    w, v = eigh(h)
    gap = float(w[1] - w[0])
    degenerate = gap < DEGENERACY_TOL * spec.j
    if not degenerate:
        vec = v[:, 0]
    else:
        block = [0, 1]
        while len(block) < len(w) and w[block[-1] + 1] - w[0] < DEGENERACY_TOL * spec.j:
            block.append(block[-1] + 1)
        sub = v[:, block]
        flip = site_operator(_SX, 0, spec.n)
        for s in range(1, spec.n):
            flip = flip @ site_operator(_SX, s, spec.n)
        pw, pv = eigh(sub.T @ flip @ sub)
        vec = sub @ pv[:, np.argmax(pw)]  # eigenvalue closest to +1
    vec = vec / np.linalg.norm(vec)
    # fix the overall sign for reproducibility
    lead = np.argmax(np.abs(vec))
    if vec[lead] < 0:
        vec = -vec
    return ChainGroundState(vector=vec, energy=float(w[0]), gap=gap,
                            degenerate=degenerate)


def _invariant_basis(seed: np.ndarray, operators: list, tol: float = 1e-8):
    """Orthonormal basis of the smallest operator-invariant subspace
    containing ``seed``, or None when the closure is not numerically clean."""
    basis: list = []
    queue = [seed / np.linalg.norm(seed)]
    dim = seed.size
    while queue:
        vec = queue.pop(0)
        for b in basis:        # two Gram-Schmidt passes for stable orthogonality
            vec = vec - (b @ vec) * b
        for b in basis:
            vec = vec - (b @ vec) * b
        norm = np.linalg.norm(vec)
        if norm > tol:
            vec = vec / norm
            basis.append(vec)
            if len(basis) == dim:
                break
            scale = max(np.max(np.abs(op)) for op in operators)
            for op in operators:
                queue.append((op @ vec) / scale)
    b = np.array(basis).T
    # verify invariance; the reduction must be exact, not approximate
    for op in operators:
        resid = op @ b - b @ (b.T @ op @ b)
        if np.linalg.norm(resid) > 1e-9 * max(1.0, np.linalg.norm(op)):
            return None
    if np.linalg.norm(b.T @ b - np.eye(b.shape[1])) > 1e-12:
        return None
    return b


@dataclass(frozen=True)
class _ReducedSystem:
    """Static pieces of the Schrodinger equation in the invariant subspace."""

    h_static: np.ndarray   # time-independent part / hbar, (2r, 2r)
    sweep_diag: np.ndarray  # diagonal of (v/2) sz / hbar, (2r,)
    y0: np.ndarray          # [Re psi; Im psi] at t = -T, (4r,)
    r: int


def _reduce(spec: ChainSpec, params: LZParams) -> _ReducedSystem:
    hc = chain_hamiltonian(spec)
    gs = chain_ground_state(spec)
    ops = [hc]
    if params.g != 0.0:
        ops.append(total_sx(spec.n))
    basis = _invariant_basis(gs.vector, ops)
    if basis is None:
        basis = np.eye(2 ** spec.n)
    r = basis.shape[1]
    hc_r = basis.T @ hc @ basis
    h_static = np.kron(params.delta / 2.0 * _SX, np.eye(r)) + np.kron(_I2, hc_r)
    if params.g != 0.0:
        jx_r = basis.T @ total_sx(spec.n) @ basis
        h_static -= params.g * np.kron(_SX, jx_r)
    h_static /= params.hbar
    sweep_diag = np.kron(np.array([1.0, -1.0]), np.ones(r)) * (params.v / 2.0) / params.hbar
    psi0 = np.zeros(2 * r)
    psi0[:r] = basis.T @ gs.vector  # = e_1: the seed is the first basis vector
    y0 = np.concatenate([psi0, np.zeros(2 * r)])
    return _ReducedSystem(h_static=h_static, sweep_diag=sweep_diag, y0=y0, r=r)


def _integrate(system: _ReducedSystem, y0: np.ndarray, t0: float, t1: float,
               rtol: float) -> np.ndarray:
    """DOP853 integration of the real-split Schrodinger equation."""
    h_static, dvec = system.h_static, system.sweep_diag
    dim = h_static.shape[0]

    def rhs(t, y):
        re, im = y[:dim], y[dim:]
        sweep = dvec * t
        d_re = h_static @ im + sweep * im
        d_im = -(h_static @ re + sweep * re)
        return np.concatenate([d_re, d_im])

    solver = ode(rhs)
    solver.set_integrator("dop853", rtol=rtol, atol=rtol, nsteps=100_000_000)
    solver.set_initial_value(y0, t0)
    yf = solver.integrate(t1)
    if not solver.successful():
        raise RuntimeError("DOP853 integration failed")
    return yf


def _window_warning(spec: ChainSpec, params: LZParams, config: OracleConfig):
    xi_max = float(np.max(spectrum(spec).xi))
    needed = 20.0 * max(params.delta, xi_max)
    if params.v * config.t_span < needed:
        warnings.warn(
            f"v*T = {params.v * config.t_span:g} below the asymptotic-regime "
            f"heuristic 20*max(Delta, xi_max) = {needed:g}; the window may be too short",
            stacklevel=3,
        )


def propagate(spec: ChainSpec, params: LZParams,
              config: OracleConfig = OracleConfig()) -> OracleResult:
    """Integrate H(t) over [-T, T] from |up> (x) |chain gs>; trace out the chain.

    p_survive sums |<up, n|psi(T)>|^2 over every chain configuration n.
    Raises NormBudgetExceededError when the integrator drifts too far.
    """
    _check_cap(spec.n)
    _window_warning(spec, params, config)
    system = _reduce(spec, params)
    t = config.t_span
    yf = _integrate(system, system.y0, -t, t, config.step_control)
    r = system.r
    re, im = yf[:2 * r], yf[2 * r:]
    norm = float(np.sqrt(re @ re + im @ im))
    drift = abs(norm - 1.0)
    if drift > config.norm_budget:
        raise NormBudgetExceededError(
            f"norm drift {drift:.3e} exceeds budget {config.norm_budget:.3e}"
        )
    p_survive = float(re[:r] @ re[:r] + im[:r] @ im[:r])
    p_flip = float(re[r:] @ re[r:] + im[r:] @ im[r:])
    return OracleResult(p_flip=p_flip, p_survive=p_survive, norm_drift=drift,
                        t_span_used=t)


def check_convergence(spec: ChainSpec, params: LZParams,
                      config: OracleConfig = OracleConfig()) -> ConvergenceReport:
    """Rerun at T and 1.5T; converged iff the flip probability moved < 5e-3."""
    res_t = propagate(spec, params, config)
    longer = OracleConfig(t_span=1.5 * config.t_span,
                          step_control=config.step_control,
                          norm_budget=config.norm_budget)
    res_longer = propagate(spec, params, longer)
    diff = abs(res_t.p_flip - res_longer.p_flip)
    converged = diff < CONVERGENCE_TOL
    result = OracleResult(p_flip=res_t.p_flip, p_survive=res_t.p_survive,
                          norm_drift=res_t.norm_drift, t_span_used=res_t.t_span_used,
                          converged=converged)
    return ConvergenceReport(converged=converged, p_flip_t=res_t.p_flip,
                             p_flip_longer=res_longer.p_flip, difference=diff,
                             result=result)


def round_trip_fidelity(spec: ChainSpec, params: LZParams,
                        config: OracleConfig = OracleConfig()) -> float:
    """Integrate -T -> T -> -T and return |<psi0|psi_back>|^2 (integrator check)."""
    _check_cap(spec.n)
    system = _reduce(spec, params)
    t = config.t_span
    y_fwd = _integrate(system, system.y0, -t, t, config.step_control)
    y_back = _integrate(system, y_fwd, t, -t, config.step_control)
    r = system.r
    re0, im0 = system.y0[:2 * r], system.y0[2 * r:]
    re, im = y_back[:2 * r], y_back[2 * r:]
    overlap_re = re0 @ re + im0 @ im
    overlap_im = re0 @ im - im0 @ re
    return float(overlap_re ** 2 + overlap_im ** 2)
