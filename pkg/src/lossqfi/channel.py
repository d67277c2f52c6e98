"""Lossy bosonic channel: Kraus evolution, the analytic derivative of the
output state with respect to the loss angle, and parametrization conversions.

The channel is parametrized by an angle phi in (0, pi/2) tied to the decay
exponent through tan(phi)^2 = exp(gamma t) - 1, so the transmissivity is
cos(phi)^2 and z = tan(phi)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .fock import DensityOperator, FockVector, amplitudes_of, matrix_of

__all__ = [
    "LossParameter", "loss_reparametrize", "kraus_operators",
    "evolve", "evolve_pure", "drho_dphi",
]

DEFAULT_PHI_MIN = 1e-3

# weights below this 1-norm no longer contribute to a Kraus sum
_KRAUS_TERM_FLOOR = 1e-16


@dataclass(frozen=True)
class LossParameter:
    """Loss angle phi with its equivalent views.

    The domain is the closed interval [phi_min, pi/2 - phi_min]; the guard
    keeps tan(phi) and the Kraus factors finite at both ends.
    """

    phi: float
    phi_min: float = DEFAULT_PHI_MIN

    def __post_init__(self):
        if not (0.0 < self.phi_min < np.pi / 4):
            raise DomainError("phi_min must lie in (0, pi/4)")
        if not (self.phi_min <= self.phi <= np.pi / 2 - self.phi_min):
            raise DomainError(
                f"phi={self.phi} outside [{self.phi_min}, pi/2 - {self.phi_min}]")

    @property
    def z(self) -> float:
        return math.tan(self.phi) ** 2

    @property
    def gamma_t(self) -> float:
        return math.log1p(self.z)

    @property
    def transmissivity(self) -> float:
        return math.cos(self.phi) ** 2

    @classmethod
    def from_gamma_t(cls, gamma_t: float, phi_min: float = DEFAULT_PHI_MIN):
        return cls(loss_reparametrize(gamma_t, "gamma_t", "phi"), phi_min)

    @classmethod
    def from_z(cls, z: float, phi_min: float = DEFAULT_PHI_MIN):
        return cls(loss_reparametrize(z, "z", "phi"), phi_min)

    @classmethod
    def from_transmissivity(cls, transmissivity: float, phi_min: float = DEFAULT_PHI_MIN):
        return cls(loss_reparametrize(transmissivity, "transmissivity", "phi"), phi_min)


def loss_reparametrize(value: float, source: str, target: str) -> float:
    """Convert between the views {phi, gamma_t, z, transmissivity}.

    All conversions go through phi; open-interval endpoints are rejected.
    """
    names = ("phi", "gamma_t", "z", "transmissivity")
    if source not in names or target not in names:
        raise DomainError(f"unknown parametrization; expected one of {names}")
    if source == "phi":
        if not (0.0 < value < np.pi / 2):
            raise DomainError("phi must lie strictly inside (0, pi/2)")
        phi = float(value)
    elif source == "gamma_t":
        if value <= 0.0:
            raise DomainError("gamma_t must be positive")
        phi = math.atan(math.sqrt(math.expm1(value)))
    elif source == "z":
        if value <= 0.0:
            raise DomainError("z must be positive")
        phi = math.atan(math.sqrt(value))
    else:
        if not (0.0 < value < 1.0):
            raise DomainError("transmissivity must lie strictly inside (0, 1)")
        phi = math.acos(math.sqrt(value))
    if target == "phi":
        return phi
    if target == "gamma_t":
        return math.log1p(math.tan(phi) ** 2)
    if target == "z":
        return math.tan(phi) ** 2
    return math.cos(phi) ** 2


def _phi_value(phi) -> float:
    return phi.phi if isinstance(phi, LossParameter) else float(phi)


def kraus_operators(phi, dim: int) -> list[np.ndarray]:
    """The dim Kraus operators K_n = sin(phi)^n / sqrt(n!) cos(phi)^N a^n.

    On a dim-level space a^n vanishes for n >= dim, so this finite family is
    exactly trace preserving: sum_n K_n+ K_n = 1.
    """
    if dim < 1:
        raise DomainError("dimension must be a positive integer")
    p = _phi_value(phi)
    s, c = math.sin(p), math.cos(p)
    levels = np.arange(dim)
    ops = []
    for n in range(dim):
        k = np.zeros((dim, dim), dtype=complex)
        m = levels[: dim - n]
        # <m| K_n |m+n> = s^n/sqrt(n!) c^m sqrt((m+n)!/m!)
        logmag = (n * math.log(s) if n else 0.0) \
            + 0.5 * (gammaln(m + n + 1.0) - gammaln(m + 1.0) - gammaln(n + 1.0)) \
            + m * math.log(c)
        k[m, m + n] = np.exp(logmag)
        ops.append(k)
    return ops


def evolve_pure(psi, phi) -> DensityOperator:
    """Propagate a pure state; returns sum_n (K_n psi)(K_n psi)+.

    The Kraus images are accumulated by repeatedly applying the scaled
    annihilator, ascending in n. Terms stop once the input population at or
    above level n drops below the floor: that mass bounds everything the
    remaining terms could contribute (individual term norms are not monotone
    in n, so testing only the current term would be unsound).
    """
    amps = amplitudes_of(psi)
    d = amps.size
    p = _phi_value(phi)
    s, c = math.sin(p), math.cos(p)
    cpow = c ** np.arange(d)
    sq = np.sqrt(np.arange(1, d))
    remaining = np.cumsum(np.abs(amps[::-1]) ** 2)[::-1]
    cols = np.zeros((d, d), dtype=complex)
    t = amps.astype(complex)
    cols[:, 0] = cpow * t
    for n in range(1, d):
        if remaining[n] < _KRAUS_TERM_FLOOR:
            break
        t = (s / math.sqrt(n)) * np.concatenate([sq * t[1:], [0.0]])
        cols[:, n] = cpow * t
    return DensityOperator(cols @ cols.conj().T)


def evolve(rho, phi) -> DensityOperator:
    """Propagate a state (pure vector or density operator) through the channel.

    For density operators the Kraus sum collapses to shifted diagonals:
    out[j,k] = sum_n w_n(j,k) rho[j+n, k+n], evaluated in log space so that
    the factorial factors never overflow.
    """
    if isinstance(rho, FockVector):
        return evolve_pure(rho, phi)
    arr = np.asarray(rho.matrix if isinstance(rho, DensityOperator) else rho, dtype=complex)
    if arr.ndim == 1:
        return evolve_pure(arr, phi)
    d = arr.shape[0]
    p = _phi_value(phi)
    s2 = math.sin(p) ** 2
    logc = math.log(math.cos(p))
    log_s2 = math.log(s2) if s2 > 0 else -math.inf
    levels = np.arange(d)
    half_lg = 0.5 * gammaln(levels + 1.0)
    # population at or above level n bounds the remaining Kraus terms
    remaining = np.cumsum(np.diag(arr).real[::-1])[::-1]
    out = np.zeros((d, d), dtype=complex)
    for n in range(d):
        if n and remaining[n] < _KRAUS_TERM_FLOOR:
            break
        j = levels[: d - n]
        # log sqrt((j+n)!/j!) per retained level
        lf = 0.5 * (gammaln(j + n + 1.0)) - half_lg[: d - n]
        logw = n * log_s2 - gammaln(n + 1.0) + lf[:, None] + lf[None, :]
        out[: d - n, : d - n] += np.exp(logw) * arr[n:, n:]
    cj = np.exp(logc * levels)
    out *= np.outer(cj, cj)
    return DensityOperator(out)


def drho_dphi(rho_phi, phi) -> np.ndarray:
    """Analytic derivative of the evolved state with respect to phi.

    Evaluates tan(phi) (2 a rho a+ - a+a rho - rho a+a) on the state already
    propagated to phi; the result is traceless and Hermitian.
    """
    m = matrix_of(rho_phi)
    d = m.shape[0]
    levels = np.arange(d)
    lowered = np.zeros_like(m)
    if d > 1:
        lowered[:-1, :-1] = m[1:, 1:] * np.sqrt(np.outer(levels[1:], levels[1:]))
    p = _phi_value(phi)
    return math.tan(p) * (2.0 * lowered - levels[:, None] * m - m * levels[None, :])
