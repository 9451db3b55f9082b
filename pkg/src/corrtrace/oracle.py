"""Brute-force reference dynamics in a truncated Fock space.

Everything else in the package evaluates closed-form expressions for the
reduced dynamics; this module instead builds the joint Hamiltonian of the
qubit and a few discrete bosonic modes,

    H = E0 |0><0| + (E1 |1><1| + sum_k g_k (b_k + b_k^+) |1><1|)
      + sum_k w_k b_k^+ b_k,

truncates each mode at n_max levels, and computes the same first-order
response by explicit time evolution.  It shares no formulas with
`correlations`/`dynamics` beyond the probe convention
H_P(t) = -(eps/2)(sigma_+ e^{-i w_p t} + h.c.), so agreement between the
two routes checks both.

Basis ordering is system-major: index = s * d_env + e.  H is block
diagonal in the qubit (pure dephasing); the lower block is already
diagonal in the Fock basis and the upper block is diagonalized once.

The first-order coherence comes from the Dyson term

    rho_10(t) = i (eps/2) int_0^t dt' e^{-i w_p t'}
                Tr_E[ U_1(t-t') (rho_00(t') - rho_11(t')) U_0^+(t-t') ],

reduced to eigenbasis sums and integrated in t' with the same cumulative
rule as the rest of the package, streamed so memory stays O(d_env^2).
The reported A(t) = rho_10 / (i (eps/2) e^{-i w_p t}) is directly
comparable to `dynamics.a_corr` / `dynamics.a_marg`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .model import DiscreteBath
from .numerics import ComplexSeries, CumulativeIntegrator, GridTooCoarse, uniform_spacing

__all__ = [
    "DimensionBudgetExceeded",
    "OracleSystem",
    "build_system",
    "suggest_n_max",
    "gibbs_state",
    "gibbs_state_closed_form",
    "marginal_state",
    "partial_trace_env",
    "partial_trace_system",
    "first_order_coherence",
    "zeroth_order_populations",
    "finite_field_coherence",
]

_MAX_MODES = 3


class DimensionBudgetExceeded(ValueError):
    """The requested truncation does not fit the dimension budget."""


@dataclass
class OracleSystem:
    """Truncated joint system; see module docstring for basis conventions."""

    bath: DiscreteBath
    n_max: int
    e0: float
    e1: float
    d_env: int
    h_env_diag: np.ndarray  # (d_env,) bath energies in the Fock basis
    coupling: np.ndarray  # (d_env, d_env) sum_k g_k (b_k + b_k^+)
    h0_diag: np.ndarray  # (d_env,) lower-block diagonal
    h1: np.ndarray  # (d_env, d_env) upper block
    _eig1: Optional[tuple[np.ndarray, np.ndarray]] = field(
        default=None, repr=False, compare=False
    )

    @property
    def dim(self) -> int:
        return 2 * self.d_env

    def h_total(self) -> np.ndarray:
        """Dense joint Hamiltonian (dim x dim); built on demand."""
        h = np.zeros((self.dim, self.dim), dtype=complex)
        h[: self.d_env, : self.d_env] = np.diag(self.h0_diag)
        h[self.d_env :, self.d_env :] = self.h1
        return h

    def probe_ops(self) -> tuple[np.ndarray, np.ndarray]:
        """(sigma_+ x 1, sigma_- x 1) in the joint basis."""
        p = np.zeros((self.dim, self.dim), dtype=complex)
        p[self.d_env :, : self.d_env] = np.eye(self.d_env)
        return p, p.conj().T

    def eig_upper(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigendecomposition of the upper block, cached."""
        if self._eig1 is None:
            lam, v = np.linalg.eigh(self.h1)
            self._eig1 = (lam, v)
        return self._eig1


def _as_bath(modes: Union[DiscreteBath, Iterable]) -> DiscreteBath:
    if isinstance(modes, DiscreteBath):
        return modes
    return DiscreteBath(modes=tuple((float(g), float(w)) for g, w in modes))


def build_system(
    modes: Union[DiscreteBath, Iterable],
    n_max: int,
    e0: float = 0.0,
    e1: float = 1.0,
    dim_budget: int = 4096,
) -> OracleSystem:
    """Assemble the truncated joint system for up to 3 modes.

    n_max is the number of Fock levels kept per mode, so the joint
    dimension is 2 * n_max^K; exceeding dim_budget raises rather than
    silently thrashing.
    """
    bath = _as_bath(modes)
    k = len(bath.modes)
    if k == 0:
        raise ValueError("need at least one mode")
    if k > _MAX_MODES:
        raise ValueError(f"at most {_MAX_MODES} modes supported, got {k}")
    if n_max < 2:
        raise ValueError(f"need at least 2 levels per mode, got n_max={n_max}")
    d_env = n_max**k
    if 2 * d_env > dim_budget:
        raise DimensionBudgetExceeded(
            f"2 * {n_max}^{k} = {2 * d_env} exceeds dim_budget={dim_budget}"
        )

    a_single = np.diag(np.sqrt(np.arange(1, n_max, dtype=float)), k=1)
    eye = np.eye(n_max)

    def mode_op(op: np.ndarray, pos: int) -> np.ndarray:
        out = np.array([[1.0]])
        for i in range(k):
            out = np.kron(out, op if i == pos else eye)
        return out

    occ = np.indices((n_max,) * k).reshape(k, d_env)
    freqs = bath.frequencies()
    h_env_diag = freqs @ occ

    coupling = np.zeros((d_env, d_env), dtype=complex)
    for pos, (g, _) in enumerate(bath.modes):
        if g != 0.0:
            b = mode_op(a_single, pos)
            coupling += g * (b + b.T)

    h0_diag = e0 + h_env_diag
    h1 = np.diag(e1 + h_env_diag).astype(complex) + coupling
    return OracleSystem(
        bath=bath,
        n_max=n_max,
        e0=e0,
        e1=e1,
        d_env=d_env,
        h_env_diag=h_env_diag,
        coupling=coupling,
        h0_diag=h0_diag,
        h1=h1,
    )


def suggest_n_max(modes: Union[DiscreteBath, Iterable], beta: float, tail: float = 1e-6) -> int:
    """Heuristic truncation: enough levels for thermal occupation and the
    polaron displacement of every mode.  Verify convergence by doubling."""
    bath = _as_bath(modes)
    if beta == 0:
        raise ValueError("no finite truncation captures beta = 0")
    n = 8
    for g, w in bath.modes:
        disp = (g / w) ** 2
        n = max(n, math.ceil(4.0 * disp + 6.0))
        if math.isfinite(beta):
            n = max(n, math.ceil((disp + math.log(1.0 / tail)) / (beta * w)))
    return n


def _thermal_vector(energies: np.ndarray, beta: float) -> np.ndarray:
    """Normalized Gibbs weights for a list of energies, stable for any beta >= 0."""
    e = np.asarray(energies, dtype=float)
    emin = float(e.min())
    if math.isinf(beta):
        w = (e - emin <= 1e-12 * max(1.0, abs(emin))).astype(float)
    else:
        w = np.exp(-beta * (e - emin))
    return w / w.sum()


def gibbs_state(system: OracleSystem, beta: float) -> np.ndarray:
    """exp(-beta H)/Z of the joint truncated Hamiltonian."""
    if math.isnan(beta) or beta < 0:
        raise ValueError(f"beta must be >= 0 (inf allowed), got {beta}")
    lam1, v1 = system.eig_upper()
    w = _thermal_vector(np.concatenate([system.h0_diag, lam1]), beta)
    d = system.d_env
    rho = np.zeros((2 * d, 2 * d), dtype=complex)
    rho[:d, :d] = np.diag(w[:d])
    rho[d:, d:] = (v1 * w[d:]) @ v1.conj().T
    return rho


def gibbs_state_closed_form(system: OracleSystem, beta: float) -> np.ndarray:
    """Gibbs state via the displaced-bath construction instead of eigh.

    The upper block Hamiltonian equals E1' + D^+ H_E D with the shift
    E1' = E1 - sum g^2/w and the displacement D = exp(sum (g/w)(b^+ - b)),
    so its Gibbs block is the displaced thermal bath state.  Exact in the
    untruncated space; in the truncated space it differs from
    `gibbs_state` by the truncation error, which is what makes it a
    useful cross-check.
    """
    if math.isnan(beta) or beta < 0:
        raise ValueError(f"beta must be >= 0 (inf allowed), got {beta}")
    d = system.d_env
    rho_e = np.diag(_thermal_vector(system.h_env_diag, beta)).astype(complex)

    n_max = system.n_max
    k = len(system.bath.modes)
    a_single = np.diag(np.sqrt(np.arange(1, n_max, dtype=float)), k=1)
    eye = np.eye(n_max)
    gen = np.zeros((d, d), dtype=complex)
    for pos, (g, w) in enumerate(system.bath.modes):
        if g != 0.0:
            op = np.array([[1.0]])
            for i in range(k):
                op = np.kron(op, a_single if i == pos else eye)
            gen += (g / w) * (op.T - op)  # b^+ - b
    herm = 1j * gen
    lam, u = np.linalg.eigh(herm)
    disp = (u * np.exp(-1j * lam)) @ u.conj().T  # exp(gen)

    e1p = system.e1 - system.bath.polaron_shift()
    w_sys = _thermal_vector(np.array([system.e0, e1p]), beta)
    rho = np.zeros((2 * d, 2 * d), dtype=complex)
    rho[:d, :d] = w_sys[0] * rho_e
    rho[d:, d:] = w_sys[1] * (disp.conj().T @ rho_e @ disp)
    return rho


def partial_trace_env(rho: np.ndarray, d_env: int) -> np.ndarray:
    """Reduce a joint state to the 2x2 system block structure."""
    out = np.empty((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[i, j] = np.trace(
                rho[i * d_env : (i + 1) * d_env, j * d_env : (j + 1) * d_env]
            )
    return out


def partial_trace_system(rho: np.ndarray, d_env: int) -> np.ndarray:
    return rho[:d_env, :d_env] + rho[d_env:, d_env:]


def marginal_state(rho: np.ndarray) -> np.ndarray:
    """Product of the two marginals, kron(rho_S, rho_E)."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    if rho.shape != (d, d) or d % 2:
        raise ValueError(f"expected a square matrix of even size, got {rho.shape}")
    d_env = d // 2
    return np.kron(partial_trace_env(rho, d_env), partial_trace_system(rho, d_env))


def _split_blocks(system: OracleSystem, rho0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = system.d_env
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (2 * d, 2 * d):
        raise ValueError(f"state shape {rho0.shape} does not match dim {2 * d}")
    scale = max(float(np.max(np.abs(rho0))), 1e-300)
    if np.max(np.abs(rho0[:d, d:])) > 1e-12 * scale:
        raise ValueError("initial state must be block-diagonal in the qubit")
    return rho0[:d, :d].copy(), rho0[d:, d:].copy()


def first_order_coherence(
    system: OracleSystem,
    rho0: np.ndarray,
    omega_p: float,
    t_grid,
) -> ComplexSeries:
    """Normalized first-order response A(t) on a uniform grid from t = 0.

    The field prefactor cancels in the normalization, so it is not a
    parameter.  Cost is two (d_env x d_env) matrix products per grid point.
    """
    t = np.asarray(t_grid, dtype=float)
    h = uniform_spacing(t)
    if h is None or t[0] != 0.0:
        raise GridTooCoarse("need a uniform grid starting at t = 0")
    r0, r1 = _split_blocks(system, rho0)
    lam0 = system.h0_diag
    lam1, v1 = system.eig_upper()
    v1h = v1.conj().T
    r1_eig = v1h @ r1 @ v1
    v1t = v1.T

    out = np.empty(t.size, dtype=complex)
    stream = CumulativeIntegrator(h)
    for t_prime in t:
        e0v = np.exp(-1j * lam0 * t_prime)
        e1v = np.exp(-1j * lam1 * t_prime)
        rho00 = (e0v[:, None] * r0) * e0v.conj()[None, :]
        r1_t = (e1v[:, None] * r1_eig) * e1v.conj()[None, :]
        n_mat = (v1h @ rho00 - r1_t @ v1h) * v1t
        w_mat = n_mat * np.outer(e1v.conj(), e0v) * np.exp(-1j * omega_p * t_prime)
        for j, cum in stream.push(w_mat):
            tj = t[j]
            f1 = np.exp(-1j * lam1 * tj)
            f0 = np.exp(1j * lam0 * tj)
            out[j] = np.exp(1j * omega_p * tj) * np.einsum("ab,a,b->", cum, f1, f0)
    return ComplexSeries(t=t, values=out)


def zeroth_order_populations(system: OracleSystem, rho0: np.ndarray, t_grid) -> np.ndarray:
    """Populations of the reduced state under the unprobed evolution.

    Returns an (n, 2) array.  Analytically constant in t for this model;
    computed here by explicit evolution (O(d_env^3) per point, test scale).
    """
    t = np.asarray(t_grid, dtype=float)
    r0, r1 = _split_blocks(system, rho0)
    lam1, v1 = system.eig_upper()
    r1_eig = v1.conj().T @ r1 @ v1
    lam0 = system.h0_diag
    out = np.empty((t.size, 2))
    for i, t_prime in enumerate(t):
        e0v = np.exp(-1j * lam0 * t_prime)
        e1v = np.exp(-1j * lam1 * t_prime)
        ev0 = (e0v[:, None] * r0) * e0v.conj()[None, :]
        ev1 = v1 @ ((e1v[:, None] * r1_eig) * e1v.conj()[None, :]) @ v1.conj().T
        out[i, 0] = np.trace(ev0).real
        out[i, 1] = np.trace(ev1).real
    return out


def finite_field_coherence(
    system: OracleSystem,
    rho0: np.ndarray,
    omega_p: float,
    t_grid,
    epsilon: float = 1e-3,
    richardson: bool = True,
) -> ComplexSeries:
    """A(t) from full propagation at small finite field strength.

    Midpoint-exponential stepping of the complete time-dependent
    Hamiltonian; with richardson=True the runs at epsilon and epsilon/2
    are combined to cancel the O(epsilon^2) error.  Secondary sanity
    check for `first_order_coherence` at small dimensions only (one dense
    eigh per step).
    """
    t = np.asarray(t_grid, dtype=float)
    h = uniform_spacing(t)
    if h is None or t[0] != 0.0:
        raise GridTooCoarse("need a uniform grid starting at t = 0")

    def run(eps: float) -> np.ndarray:
        ham = system.h_total()
        p_plus, p_minus = system.probe_ops()
        rho = np.asarray(rho0, dtype=complex).copy()
        vals = np.empty(t.size, dtype=complex)
        d = system.d_env
        vals[0] = 0.0
        for j in range(1, t.size):
            t_mid = 0.5 * (t[j - 1] + t[j])
            drive = -0.5 * eps * (
                p_plus * np.exp(-1j * omega_p * t_mid)
                + p_minus * np.exp(1j * omega_p * t_mid)
            )
            lam, u = np.linalg.eigh(ham + drive)
            prop = (u * np.exp(-1j * lam * h)) @ u.conj().T
            rho = prop @ rho @ prop.conj().T
            coh = np.trace(rho[d:, :d])
            vals[j] = coh / (0.5j * eps * np.exp(-1j * omega_p * t[j]))
        return vals

    if richardson:
        a = (4.0 * run(0.5 * epsilon) - run(epsilon)) / 3.0
    else:
        a = run(epsilon)
    return ComplexSeries(t=t, values=a)
