"""Small-scale Lindblad reference: resonant Jaynes-Cummings with incoherent pump.

For up to three identical two-level emitters coupled to one cavity mode,

    H = g * sum_j (a^dag sigma_j^- + a sigma_j^+)

with jump operators sqrt(kappa)*a, and per emitter sqrt(P)*sigma^+,
sqrt(gamma_a)*sigma^-, (sqrt(gamma_d)/2)*sigma^z.  The dephasing prefactor is
pinned by requiring the photon-emitter coherence to decay at
(P + kappa + gamma_a + gamma_d)/2, which is the rate whose adiabatic
elimination yields gamma_r = 4g^2/(P + kappa + gamma_d + gamma_a); the
consistency test against the mean-field model guards this convention.

The Liouvillian is held sparse (row-major vec(rho), so A rho B -> kron(A, B^T));
the steady state comes from an LU solve with the trace constraint replacing
one row, and two-time correlations use the quantum regression theorem with
Krylov propagation (expm_multiply).  This oracle validates the stochastic
engine -- it is capped at desk scale, not built to scale up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import expm_multiply, splu

from .analytic import below_threshold_reference
from .observables import AutocorrelationEstimate, LinewidthEstimate, SpectrumEstimate
from .observables import linewidth as fit_linewidth
from .observables import spectrum as make_spectrum
from .ratemodel import LaserParams, steady_state

__all__ = [
    "HilbertConfig",
    "DensityOperator",
    "Liouvillian",
    "build_generator",
    "steady_state_density",
    "solve_steady",
    "mean_photon_me",
    "g2_zero_me",
    "spectrum_me",
    "linewidth_me",
]

MAX_EMITTERS = 3
MAX_HILBERT_DIM = 1024


@dataclass(frozen=True)
class HilbertConfig:
    """Truncated product space: n_fock photon levels x n_emitters qubits."""

    n_fock: int
    n_emitters: int

    def __post_init__(self):
        if self.n_emitters < 1 or self.n_emitters > MAX_EMITTERS:
            raise ValueError(
                f"n_emitters must be in 1..{MAX_EMITTERS} (got {self.n_emitters}); "
                "the dense-physics reference is deliberately desk-scale")
        if self.n_fock < 2:
            raise ValueError("n_fock must be >= 2")
        if self.dim > MAX_HILBERT_DIM:
            raise ValueError(f"Hilbert dimension {self.dim} exceeds cap "
                             f"{MAX_HILBERT_DIM}")

    @property
    def dim(self) -> int:
        return self.n_fock * 2 ** self.n_emitters


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, unit-trace matrix on the truncated product space."""

    matrix: np.ndarray
    config: HilbertConfig

    def validate(self):
        rho = self.matrix
        if not np.allclose(rho, rho.conj().T, atol=1e-12):
            raise ValueError("density operator not Hermitian to 1e-12")
        if abs(np.trace(rho).real - 1.0) > 1e-12:
            raise ValueError("density operator trace differs from 1 by > 1e-12")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density operator has eigenvalue < -1e-10")


@dataclass(frozen=True)
class Liouvillian:
    """Sparse generator of d rho/dt plus the operators needed for observables."""

    matrix: sparse.csr_matrix
    config: HilbertConfig
    params: LaserParams
    a: sparse.csr_matrix  # annihilation operator on the product space


def _destroy(n_fock: int) -> sparse.csr_matrix:
    return sparse.diags(np.sqrt(np.arange(1, n_fock)), 1, format="csr")


def _emitter_op(op2: np.ndarray, j: int, n_emitters: int) -> sparse.csr_matrix:
    out = sparse.identity(1, format="csr")
    for i in range(n_emitters):
        block = sparse.csr_matrix(op2) if i == j else sparse.identity(2, format="csr")
        out = sparse.kron(out, block, format="csr")
    return out


_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])  # |g><e|, basis (g, e)
_SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]])


def _dissipator(op: sparse.spmatrix) -> sparse.csr_matrix:
    d = op.shape[0]
    eye = sparse.identity(d, format="csr")
    opd = op.conj().T.tocsr()
    opdop = (opd @ op).tocsr()
    return (sparse.kron(op, op.conj(), format="csr")
            - 0.5 * sparse.kron(opdop, eye, format="csr")
            - 0.5 * sparse.kron(eye, opdop.T, format="csr"))


def _excitations(config: HilbertConfig) -> np.ndarray:
    """Total excitation (photons + excited emitters) of each basis state."""
    pop = np.array([bin(x).count("1") for x in range(2 ** config.n_emitters)])
    return (np.arange(config.n_fock)[:, None] + pop[None, :]).reshape(-1)


def _sector(config: HilbertConfig, k: int) -> np.ndarray:
    """vec indices (row-major) whose excitation difference q_row - q_col = k.

    Every term of the generator conserves this difference (the Hamiltonian
    commutes with the total excitation; each jump operator shifts both sides
    of rho equally), so dynamics never leaves a sector.  The steady state
    lives in k = 0 and first-order field coherences in k = -1; restricting
    to a sector shrinks the linear algebra by roughly the Hilbert dimension.
    """
    q = _excitations(config)
    diff = (q[:, None] - q[None, :]).reshape(-1)
    return np.nonzero(diff == k)[0]


def build_generator(params: LaserParams, config: HilbertConfig) -> Liouvillian:
    """Assemble the Lindblad superoperator for the resonant-frame model."""
    if params.n0 != config.n_emitters:
        raise ValueError(f"params.n0={params.n0} but config has "
                         f"{config.n_emitters} emitters")
    nf, m = config.n_fock, config.n_emitters
    d = config.dim
    eye_em = sparse.identity(2 ** m, format="csr")
    a = sparse.kron(_destroy(nf), eye_em, format="csr")
    ad = a.conj().T.tocsr()

    sm = [sparse.kron(sparse.identity(nf, format="csr"),
                      _emitter_op(_SIGMA_MINUS, j, m), format="csr")
          for j in range(m)]
    s_minus = sum(sm[1:], start=sm[0])
    h = params.g * (ad @ s_minus + a @ s_minus.conj().T.tocsr())

    eye = sparse.identity(d, format="csr")
    lio = -1j * (sparse.kron(h, eye, format="csr")
                 - sparse.kron(eye, h.T, format="csr"))
    if params.kappa > 0.0:
        lio = lio + params.kappa * _dissipator(a)
    for j in range(m):
        sj = sm[j]
        if params.pump > 0.0:
            lio = lio + params.pump * _dissipator(sj.conj().T.tocsr())
        if params.gamma_a > 0.0:
            lio = lio + params.gamma_a * _dissipator(sj)
        if params.gamma_d > 0.0:
            sz = sparse.kron(sparse.identity(nf, format="csr"),
                             _emitter_op(_SIGMA_Z, j, m), format="csr")
            # rate gamma_d/4 gives coherence decay gamma_d/2, matching gamma_r
            lio = lio + (params.gamma_d / 4.0) * _dissipator(sz)
    return Liouvillian(matrix=lio.tocsr(), config=config, params=params, a=a)


def steady_state_density(gen: Liouvillian) -> DensityOperator:
    """Null vector of the generator, normalized to unit trace.

    Works in the diagonal (k = 0) excitation sector, with the trace
    functional replacing one row (sparse LU).  The residual ||L rho|| is
    then verified against the FULL generator, so the sector restriction is
    itself checked, not assumed.
    """
    d = gen.config.dim
    lio = gen.matrix.tocsr()
    idx = _sector(gen.config, 0)
    sub = lio[idx][:, idx].tocsr()
    diag_positions = np.nonzero(np.isin(idx, np.arange(d) * d + np.arange(d)))[0]
    trace_row = sparse.csr_matrix(
        (np.ones(diag_positions.size),
         (np.zeros(diag_positions.size, dtype=int), diag_positions)),
        shape=(1, idx.size))
    system = sparse.vstack([trace_row, sub[1:, :]], format="csc")
    rhs = np.zeros(idx.size, dtype=np.complex128)
    rhs[0] = 1.0
    vec_sub = splu(system).solve(rhs)
    vec = np.zeros(d * d, dtype=np.complex128)
    vec[idx] = vec_sub

    residual = np.linalg.norm(lio @ vec)
    if residual > 1e-10:
        raise RuntimeError(f"steady-state residual {residual:.3g} > 1e-10; "
                           "generator may have a degenerate null space")
    rho = vec.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    out = DensityOperator(matrix=rho, config=gen.config)
    out.validate()
    return out


def _fock_populations(rho: DensityOperator) -> np.ndarray:
    d_em = 2 ** rho.config.n_emitters
    diag = np.real(np.diag(rho.matrix))
    return diag.reshape(rho.config.n_fock, d_em).sum(axis=1)


def _initial_n_fock(params: LaserParams) -> int:
    n_bar = steady_state(params).n_a
    return int(math.ceil(n_bar + 10.0 * math.sqrt(n_bar + 1.0) + 12.0))


def solve_steady(params: LaserParams, n_fock: int | None = None,
                 top_tol: float = 1e-6) -> tuple[DensityOperator, Liouvillian]:
    """Steady state with automatic Fock truncation.

    Starts from a mean-field-based guess and enlarges n_fock until the top
    Fock level holds less than top_tol of the population.
    """
    nf = n_fock if n_fock is not None else _initial_n_fock(params)
    for _ in range(8):
        config = HilbertConfig(n_fock=nf, n_emitters=params.n0)
        gen = build_generator(params, config)
        rho = steady_state_density(gen)
        if _fock_populations(rho)[-1] < top_tol:
            return rho, gen
        nf = int(math.ceil(nf * 1.3)) + 4
    raise RuntimeError(f"Fock truncation did not stabilize below {top_tol} "
                       f"(last n_fock {nf})")


def mean_photon_me(rho: DensityOperator) -> float:
    pops = _fock_populations(rho)
    return float(np.arange(rho.config.n_fock) @ pops)


def g2_zero_me(rho: DensityOperator) -> float:
    """<a^dag a^dag a a> / <a^dag a>^2 for the cavity mode."""
    pops = _fock_populations(rho)
    n = np.arange(rho.config.n_fock)
    mean = float(n @ pops)
    if mean <= 0.0:
        raise ValueError("g2 undefined: zero mean photon number")
    second = float((n * (n - 1.0)) @ pops)
    return second / mean ** 2


def spectrum_me(gen: Liouvillian, rho_ss: DensityOperator, max_lag: float,
                n_lags: int) -> tuple[AutocorrelationEstimate, SpectrumEstimate]:
    """g1(tau) = <a^dag(tau) a(0)> by quantum regression, then its transform.

    Evolves a*rho_ss under the generator on a uniform lag grid; the zero-lag
    value is <a^dag a> and normalizes the estimate.  The propagation runs in
    the k = -1 excitation sector, where the initial operator is verified to
    live.
    """
    d = gen.config.dim
    v0 = (gen.a @ rho_ss.matrix).reshape(-1)
    idx = _sector(gen.config, -1)
    outside = np.linalg.norm(np.delete(v0, idx))
    if outside > 1e-12 * max(np.linalg.norm(v0), 1e-300):
        raise RuntimeError("a*rho_ss leaks outside the k=-1 sector; "
                           "sector propagation invalid")
    sub = gen.matrix.tocsr()[idx][:, idx]
    vt_sub = expm_multiply(sub.tocsc(), v0[idx], start=0.0, stop=max_lag,
                           num=n_lags + 1, endpoint=True)
    # Tr[a^dag M] = vec(conj(a)) . vec(M) in row-major layout
    w = np.asarray(gen.a.conj().todense()).reshape(-1)
    raw = vt_sub @ w[idx]
    intensity = raw[0].real
    if intensity <= 0.0:
        raise ValueError("zero cavity population; spectrum undefined")
    dt = max_lag / n_lags
    values = raw / raw[0]
    values[0] = 1.0
    acf = AutocorrelationEstimate(
        lags=dt * np.arange(n_lags + 1), values=values,
        counts=np.ones(n_lags + 1, dtype=np.int64),
        mean_intensity=intensity, sample_dt=dt)
    return acf, make_spectrum(acf)


def linewidth_me(params: LaserParams, n_fock: int | None = None,
                 lag_hint: float | None = None,
                 n_lags: int = 1200) -> LinewidthEstimate:
    """Steady-state emission linewidth of the reference model.

    The lag span starts from a coarse estimate of the decay time and is
    extended until |g1| drops below the fit floor.
    """
    rho, gen = solve_steady(params, n_fock=n_fock)
    if lag_hint is not None:
        span = lag_hint
    else:
        span = 8.0 / max(below_threshold_reference(params), 1e-6)
    for _ in range(8):
        acf, _spec = spectrum_me(gen, rho, span, n_lags)
        est = fit_linewidth(acf)
        if est.resolved:
            return est
        span *= 3.0
    raise RuntimeError("ME linewidth did not resolve; increase the lag span")
