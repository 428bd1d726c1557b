"""Truncated l^2 states and the lattice operators entering the equation of
motion

    i dpsi_n/dt = kappa*(psi_{n+1} - 2 psi_n + psi_{n-1}) - i*gamma*psi_n
                  + F(|psi_n|^2) psi_n + g1_n(t) + g2_n(t) psi_n

on sites n = -N/2 .. N/2-1.  All operations are pure; states are immutable
once constructed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

DIRICHLET = "dirichlet"
PERIODIC = "periodic"


@dataclass(frozen=True)
class LatticeState:
    """Complex amplitudes on the truncated lattice.

    Array index i holds site n = i - N//2, so site 0 sits at the array
    center.  ``bc`` controls how out-of-range neighbors are resolved:
    Dirichlet treats them as zero, periodic wraps around.
    """

    values: np.ndarray
    bc: str = DIRICHLET

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.ndim != 1 or v.size < 3:
            raise DomainError("state needs at least 3 sites")
        if not np.all(np.isfinite(v.view(np.float64))):
            raise DomainError("state contains NaN/Inf")
        if self.bc not in (DIRICHLET, PERIODIC):
            raise DomainError(f"unknown boundary condition {self.bc!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_sites(self) -> int:
        return self.values.size

    def site_index(self, n: int) -> int:
        """Array index of lattice site n."""
        i = n + self.n_sites // 2
        if not 0 <= i < self.n_sites:
            raise DomainError(f"site {n} outside truncation")
        return i

    def with_values(self, values: np.ndarray) -> "LatticeState":
        return LatticeState(values, self.bc)

    @staticmethod
    def zeros(n_sites: int, bc: str = DIRICHLET) -> "LatticeState":
        return LatticeState(np.zeros(n_sites, dtype=np.complex128), bc)

    @staticmethod
    def single_site(n_sites: int, site: int, amplitude: complex = 1.0,
                    bc: str = DIRICHLET) -> "LatticeState":
        v = np.zeros(n_sites, dtype=np.complex128)
        v[site + n_sites // 2] = amplitude
        return LatticeState(v, bc)


@dataclass(frozen=True)
class NonlinearitySpec:
    """Power nonlinearity F(s) = sign * s**sigma with its two-sided growth
    constants: |F(|x|^2)x - F(|y|^2)y| <= a*(|x|^b + |y|^b)*|x - y|."""

    sigma: float
    sign: int = 1
    a: float = field(default=None)
    b: float = field(default=None)

    def __post_init__(self):
        if self.sigma <= 0:
            raise DomainError("sigma must be positive")
        if self.sign not in (+1, -1):
            raise DomainError("sign must be +1 or -1")
        if self.b is None:
            object.__setattr__(self, "b", 2.0 * self.sigma)
        if self.a is None:
            # conservative growth constant; (2s+1)/2 is sharp for s <= 1
            a = (2 * self.sigma + 1) / 2 if self.sigma <= 1 else 2 * self.sigma + 1
            object.__setattr__(self, "a", a)
        if self.a <= 0 or self.b <= 0:
            raise DomainError("a and b must be positive")

    @staticmethod
    def cubic(sign: int = 1) -> "NonlinearitySpec":
        return NonlinearitySpec(sigma=1.0, sign=sign)


@dataclass(frozen=True)
class ModelParams:
    """Coupling, damping and nonlinearity of the lattice model.

    ``nonlinearity=None`` means F = 0 (linear model)."""

    kappa: float
    gamma: float
    nonlinearity: NonlinearitySpec | None = None

    def __post_init__(self):
        if not math.isfinite(self.kappa):
            raise DomainError("kappa must be finite")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError("gamma must be positive")


def l2_norm(state: LatticeState) -> float:
    """sqrt(sum |psi_n|^2), accumulated with compensated summation."""
    return math.sqrt(norm_sq(state.values))


def norm_sq(values: np.ndarray) -> float:
    v = np.asarray(values)
    re = v.real
    im = v.imag
    return math.fsum((re * re).tolist()) + math.fsum((im * im).tolist())


def tail_mass(state: LatticeState, m: int) -> float:
    """sum_{|n|>m} |psi_n|^2 on the truncation."""
    n_sites = state.n_sites
    if not 0 <= m < n_sites // 2:
        raise DomainError(f"cutoff m={m} out of range [0, {n_sites // 2})")
    c = n_sites // 2
    v = state.values
    outside = np.concatenate([v[: c - m], v[c + m + 1:]])
    return norm_sq(outside)


def _laplacian_values(v: np.ndarray, bc: str) -> np.ndarray:
    out = -2.0 * v
    if bc == PERIODIC:
        out += np.roll(v, -1) + np.roll(v, 1)
    else:
        out[:-1] += v[1:]
        out[1:] += v[:-1]
    return out


def apply_laplacian(state: LatticeState) -> LatticeState:
    """Discrete Laplacian (A psi)_n = psi_{n+1} - 2 psi_n + psi_{n-1}."""
    return state.with_values(_laplacian_values(state.values, state.bc))


def apply_difference(state: LatticeState, direction: str) -> LatticeState:
    """Forward difference (B psi)_n = psi_{n+1} - psi_n or its adjoint
    (B* psi)_n = psi_{n-1} - psi_n."""
    v = state.values
    out = np.empty_like(v)
    if direction == "forward":
        if state.bc == PERIODIC:
            out[:] = np.roll(v, -1) - v
        else:
            out[:-1] = v[1:] - v[:-1]
            out[-1] = -v[-1]
    elif direction == "backward":
        if state.bc == PERIODIC:
            out[:] = np.roll(v, 1) - v
        else:
            out[1:] = v[:-1] - v[1:]
            out[0] = -v[0]
    else:
        raise DomainError(f"direction must be 'forward' or 'backward', got {direction!r}")
    return state.with_values(out)


def _nonlinearity_values(v: np.ndarray, spec: NonlinearitySpec) -> np.ndarray:
    s = (v.real * v.real + v.imag * v.imag) ** spec.sigma
    return spec.sign * s * v


def evaluate_nonlinearity(state: LatticeState, spec: NonlinearitySpec) -> LatticeState:
    """Entrywise sign * |psi_n|^(2 sigma) * psi_n."""
    return state.with_values(_nonlinearity_values(state.values, spec))


def make_rhs(params: ModelParams, driving, n_sites: int, bc: str):
    """Build f(t, values) -> dvalues/dt on raw arrays.

    ``driving`` must provide sample_values(t, n_sites) -> (g1, g2) arrays.
    The equation of motion in d/dt form reads

        dpsi/dt = -i*kappa*A psi - gamma*psi - i*F(|psi|^2) psi
                  - i*g1(t) - i*g2(t)*psi
    """
    kappa = params.kappa
    gamma = params.gamma
    nl = params.nonlinearity

    def f(t, v):
        out = (-1j * kappa) * _laplacian_values(v, bc)
        out -= gamma * v
        if nl is not None:
            out -= 1j * _nonlinearity_values(v, nl)
        g1, g2 = driving.sample_values(t, n_sites)
        if g1 is not None:
            out -= 1j * g1
        if g2 is not None:
            out -= 1j * (g2 * v)
        return out

    return f


def rhs(state: LatticeState, t: float, params: ModelParams, driving) -> LatticeState:
    """Right-hand side of the equation of motion at time t."""
    f = make_rhs(params, driving, state.n_sites, state.bc)
    return state.with_values(f(t, state.values))


def random_state(n_sites: int, seed: int, norm: float = 1.0,
                 bc: str = DIRICHLET, localized: bool = True) -> LatticeState:
    """Deterministic pseudo-random state, scaled to the given l^2 norm.

    With ``localized`` the amplitudes are damped by exp(-|n|/8) so the
    state is compatible with the Dirichlet truncation.
    """
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n_sites) + 1j * rng.standard_normal(n_sites)
    if localized:
        n = np.arange(n_sites) - n_sites // 2
        v *= np.exp(-np.abs(n) / 8.0)
    current = math.sqrt(norm_sq(v))
    if current > 0 and norm > 0:
        v *= norm / current
    elif norm == 0:
        v = np.zeros(n_sites, dtype=np.complex128)
    return LatticeState(v, bc)
