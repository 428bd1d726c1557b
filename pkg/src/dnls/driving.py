"""External driving fields g1 (additive) and g2 (multiplicative).

A field is separable: a spatial profile realized on the truncation times a
scalar temporal law.  Temporal laws come in three classes: constant /
periodic (single harmonic) / finite harmonic sums with pairwise rationally
independent frequencies (quasiperiodic; three or more harmonics serve as
the almost-periodic class).  Translation by h shifts the time argument and
stays inside the hull of the original field.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .lattice import DIRICHLET, LatticeState

_EPS = sys.float_info.epsilon


# ---------------------------------------------------------------------------
# spatial profiles

@dataclass(frozen=True)
class SpatialProfile:
    """Spatial shape of a driving field on the lattice.

    kinds:
      exponential  amplitude * exp(-rate*|n|)
      gaussian     amplitude * exp(-n^2 / (2*width^2))
      single_site  amplitude at site ``site``, zero elsewhere
      custom       explicit table ``values`` starting at site ``start``
    """

    kind: str
    amplitude: float = 1.0
    rate: float = 1.0
    width: float = 1.0
    site: int = 0
    values: tuple = ()
    start: int = 0

    def __post_init__(self):
        if self.kind not in ("exponential", "gaussian", "single_site", "custom"):
            raise DomainError(f"unknown profile kind {self.kind!r}")
        if self.kind == "exponential" and self.rate <= 0:
            raise DomainError("exponential rate must be positive")
        if self.kind == "gaussian" and self.width <= 0:
            raise DomainError("gaussian width must be positive")
        if self.kind == "custom":
            object.__setattr__(
                self, "values", tuple(complex(v) for v in self.values))

    def _site_value(self, n: np.ndarray) -> np.ndarray:
        if self.kind == "exponential":
            return self.amplitude * np.exp(-self.rate * np.abs(n))
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-(n * n) / (2.0 * self.width ** 2))
        raise AssertionError(self.kind)

    def realize(self, n_sites: int) -> np.ndarray:
        """Profile values on sites -N/2 .. N/2-1 as a complex array."""
        out = np.zeros(n_sites, dtype=np.complex128)
        c = n_sites // 2
        if self.kind == "single_site":
            i = self.site + c
            if not 0 <= i < n_sites:
                raise DomainError(f"site {self.site} outside truncation")
            out[i] = self.amplitude
        elif self.kind == "custom":
            for k, v in enumerate(self.values):
                i = self.start + k + c
                if not 0 <= i < n_sites:
                    raise DomainError("custom table does not fit truncation")
                out[i] = v
        else:
            n = np.arange(n_sites) - c
            out[:] = self._site_value(n)
        return out

    def l2_norm_sq(self) -> float:
        """Squared l^2 norm on the infinite lattice (closed form where one
        exists); never smaller than the truncated norm."""
        a2 = self.amplitude * self.amplitude
        if self.kind == "exponential":
            # sum exp(-2r|n|) = coth(r)
            return a2 / math.tanh(self.rate)
        if self.kind == "gaussian":
            return a2 * self._gaussian_sum(0) + a2  # n=0 term plus both tails
        if self.kind == "single_site":
            return a2
        return math.fsum(abs(v) ** 2 for v in self.values)

    def _gaussian_sum(self, m: int) -> float:
        # 2 * sum_{n>m} exp(-n^2/width^2); terms below 1e-320 are dropped
        w2 = self.width * self.width
        total = 0.0
        n = m + 1
        while True:
            term = math.exp(-(n * n) / w2) if (n * n) / w2 < 740 else 0.0
            if term == 0.0:
                break
            total += term
            n += 1
        return 2.0 * total

    def tail_sq(self, m: int) -> float:
        """sum_{|n|>m} |profile_n|^2 on the infinite lattice."""
        if m < 0:
            raise DomainError("cutoff must be nonnegative")
        a2 = self.amplitude * self.amplitude
        if self.kind == "exponential":
            r = self.rate
            return a2 * 2.0 * math.exp(-2.0 * r * (m + 1)) / (1.0 - math.exp(-2.0 * r))
        if self.kind == "gaussian":
            return a2 * self._gaussian_sum(m)
        if self.kind == "single_site":
            return a2 if abs(self.site) > m else 0.0
        return math.fsum(
            abs(v) ** 2
            for k, v in enumerate(self.values)
            if abs(self.start + k) > m
        )

    def truncation_fraction(self, n_sites: int) -> float:
        """Fraction of the profile's mass lost to the truncation."""
        total = self.l2_norm_sq()
        if total == 0.0:
            return 0.0
        return self.tail_sq(n_sites // 2 - 1) / total

    @staticmethod
    def zero() -> "SpatialProfile":
        return SpatialProfile(kind="single_site", amplitude=0.0)


# ---------------------------------------------------------------------------
# temporal laws

def _is_commensurate(ratio: float) -> bool:
    approx = Fraction(ratio).limit_denominator(10 ** 6)
    return abs(ratio - float(approx)) <= 16 * _EPS * max(1.0, abs(ratio))


def check_rationally_independent(frequencies) -> None:
    """Reject frequency sets with a commensurate pair (continued-fraction
    test up to denominator 10^6)."""
    freqs = list(frequencies)
    if any(f == 0 for f in freqs):
        raise DomainError("frequencies must be nonzero")
    for i in range(len(freqs)):
        for j in range(i + 1, len(freqs)):
            if _is_commensurate(freqs[i] / freqs[j]):
                raise DomainError(
                    f"frequencies {freqs[i]} and {freqs[j]} are commensurate")


@dataclass(frozen=True)
class ConstantLaw:
    value: float = 1.0

    kind = "constant"
    period = None

    def __call__(self, t: float) -> float:
        return self.value

    def amp_bound(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class PeriodicLaw:
    """amplitude * cos(2 pi t / period + phase)"""

    period: float
    amplitude: float = 1.0
    phase: float = 0.0

    kind = "periodic"

    def __post_init__(self):
        if self.period <= 0:
            raise DomainError("period must be positive")

    def __call__(self, t: float) -> float:
        return self.amplitude * math.cos(2.0 * math.pi * t / self.period + self.phase)

    def amp_bound(self) -> float:
        return abs(self.amplitude)


@dataclass(frozen=True)
class HarmonicSumLaw:
    """sum_j amplitudes[j] * cos(frequencies[j]*t + phases[j]) with pairwise
    rationally independent frequencies.  Two harmonics give the
    quasiperiodic class; three or more with pairwise irrational ratios
    realize the almost-periodic class."""

    frequencies: tuple
    amplitudes: tuple
    phases: tuple = ()

    kind = "harmonic"
    period = None

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        amps = tuple(float(a) for a in self.amplitudes)
        phases = tuple(float(p) for p in self.phases) if self.phases else (0.0,) * len(freqs)
        if len(freqs) < 2:
            raise DomainError("harmonic sum needs at least two frequencies")
        if len(amps) != len(freqs) or len(phases) != len(freqs):
            raise DomainError("frequencies/amplitudes/phases length mismatch")
        check_rationally_independent(freqs)
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "phases", phases)

    def __call__(self, t: float) -> float:
        return math.fsum(
            a * math.cos(w * t + p)
            for w, a, p in zip(self.frequencies, self.amplitudes, self.phases)
        )

    def amp_bound(self) -> float:
        # triangle inequality; certified overestimate of sup_t |law(t)|
        return math.fsum(abs(a) for a in self.amplitudes)


# ---------------------------------------------------------------------------
# driving fields

@dataclass(frozen=True)
class DrivingField:
    """Separable field profile(n) * law(t + offset)."""

    profile: SpatialProfile
    law: object = field(default_factory=ConstantLaw)
    offset: float = 0.0

    def scalar(self, t: float) -> float:
        return self.law(t + self.offset)

    def sup_norm(self) -> float:
        return math.sqrt(self.profile.l2_norm_sq()) * self.law.amp_bound()

    @staticmethod
    def zero() -> "DrivingField":
        return DrivingField(SpatialProfile.zero(), ConstantLaw(0.0))


class _Sampler:
    """Driving realized on a fixed truncation, for fast rhs evaluation."""

    def __init__(self, spec: "DrivingSpec", n_sites: int):
        self.n_sites = n_sites
        self._g1 = spec.g1
        self._g2 = spec.g2
        self._p1 = spec.g1.profile.realize(n_sites) if spec.g1.sup_norm() > 0 else None
        self._p2 = spec.g2.profile.realize(n_sites) if spec.g2.sup_norm() > 0 else None

    def sample_values(self, t: float, n_sites: int):
        assert n_sites == self.n_sites
        g1 = None if self._p1 is None else self._p1 * self._g1.scalar(t)
        g2 = None if self._p2 is None else self._p2 * self._g2.scalar(t)
        return g1, g2


@dataclass(frozen=True)
class DrivingSpec:
    g1: DrivingField
    g2: DrivingField = field(default_factory=DrivingField.zero)

    def sampler(self, n_sites: int) -> _Sampler:
        return _Sampler(self, n_sites)

    @property
    def period(self) -> float | None:
        """Common driving period, if the time dependence is periodic.
        Constant laws are compatible with any period."""
        periods = [f.law.period for f in (self.g1, self.g2) if f.law.period is not None]
        if not periods:
            return None
        if len(periods) == 2 and not math.isclose(periods[0], periods[1], rel_tol=1e-12):
            raise DomainError("g1 and g2 have different periods")
        return periods[0]


def sample_driving(spec: DrivingSpec, t: float, n_sites: int,
                   bc: str = DIRICHLET) -> tuple[LatticeState, LatticeState]:
    """Both driving fields at time t, realized on the truncation."""
    g1, g2 = spec.sampler(n_sites).sample_values(t, n_sites)
    zero = np.zeros(n_sites, dtype=np.complex128)
    return (
        LatticeState(g1 if g1 is not None else zero, bc),
        LatticeState(g2 if g2 is not None else zero.copy(), bc),
    )


def translate(spec: DrivingSpec, h: float) -> DrivingSpec:
    """Hull translation: samples of the result at t equal samples of the
    original at t + h."""
    return DrivingSpec(
        g1=replace(spec.g1, offset=spec.g1.offset + h),
        g2=replace(spec.g2, offset=spec.g2.offset + h),
    )


def sup_norm(spec: DrivingSpec) -> tuple[float, float]:
    """Certified upper bounds for sup_t ||g1(t)|| and sup_t ||g2(t)||.
    Exact for constant/periodic laws, a triangle-inequality overestimate
    for harmonic sums; invariant under translation."""
    return spec.g1.sup_norm(), spec.g2.sup_norm()


def effective_damping(gamma: float, spec: DrivingSpec) -> float:
    """gamma - 2*sup||g2||, the decay rate entering every estimate."""
    return gamma - 2.0 * spec.g2.sup_norm()
