"""Truncated single-mode Fock space: ladder operators, state constructors,
Hermitian eigendecompositions, overlaps and photon statistics.

All states live in the number basis |0>, ..., |D-1>. Construction routines
either take an explicit dimension or pick the smallest one whose neglected
tail population stays below a :class:`CutoffPolicy` tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln

from .errors import CutoffOverflowError, DegenerateStateError, DomainError

__all__ = [
    "CutoffPolicy", "FockVector", "DensityOperator", "Spectrum",
    "ladder_operators", "hermitian_eig", "fock_state", "coherent_state",
    "displaced_squeezed_vacuum", "fidelity", "mean_photon",
    "hermitize", "amplitudes_of", "matrix_of",
]

HERMITICITY_TOL = 1e-8
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class CutoffPolicy:
    """How truncation dimensions are chosen for continuous-variable states.

    ``tail_tol`` bounds the neglected population, ``cap`` is the largest
    dimension the policy will accept, and ``guard`` extra levels are kept
    above the working cutoff while exponentiating generators so that the
    retained amplitudes are unaffected by the truncation edge.
    """

    tail_tol: float = 1e-10
    cap: int = 200
    guard: int = 10


def _freeze(arr):
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FockVector:
    """Normalized pure state: complex amplitudes over photon numbers 0..D-1."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise DomainError("state needs a one-dimensional, non-empty amplitude vector")
        norm = np.linalg.norm(amps)
        if norm < 1e-15:
            raise DegenerateStateError("cannot normalize the zero vector")
        object.__setattr__(self, "amplitudes", _freeze(amps / norm))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def padded(self, dim: int) -> "FockVector":
        if dim <= self.dim:
            return self
        out = np.zeros(dim, dtype=complex)
        out[: self.dim] = self.amplitudes
        return FockVector(out)

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive, unit-trace matrix on the truncated Fock space.

    The matrix is symmetrized on construction, which absorbs floating-point
    asymmetry accumulated e.g. in Kraus sums.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("density operator must be a square matrix")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"trace {tr!r} deviates from 1 beyond {TRACE_TOL}")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def padded(self, dim: int) -> "DensityOperator":
        if dim <= self.dim:
            return self
        out = np.zeros((dim, dim), dtype=complex)
        out[: self.dim, : self.dim] = self.matrix
        return DensityOperator(out)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _freeze(np.asarray(self.eigenvalues, dtype=float)))
        object.__setattr__(self, "eigenvectors", _freeze(np.asarray(self.eigenvectors, dtype=complex)))


def amplitudes_of(state) -> np.ndarray:
    """Amplitude vector of a FockVector or a bare array-like."""
    if isinstance(state, FockVector):
        return state.amplitudes
    arr = np.asarray(state, dtype=complex)
    if arr.ndim != 1:
        raise DomainError("expected a state vector")
    return arr


def matrix_of(state) -> np.ndarray:
    """Density matrix of a FockVector, DensityOperator or bare array-like."""
    if isinstance(state, FockVector):
        return state.density().matrix
    if isinstance(state, DensityOperator):
        return state.matrix
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return np.outer(arr, arr.conj())
    return arr


def hermitize(matrix) -> np.ndarray:
    return 0.5 * (np.asarray(matrix, dtype=complex) + np.asarray(matrix, dtype=complex).conj().T)


def ladder_operators(dim: int):
    """Annihilation, creation and number operators on a dim-level space.

    a has sqrt(m) at (m-1, m); the commutator [a, a+] equals the identity
    everywhere except the top level, which the truncation necessarily breaks.
    """
    if dim < 1:
        raise DomainError("dimension must be a positive integer")
    a = np.zeros((dim, dim), dtype=complex)
    m = np.arange(1, dim)
    a[m - 1, m] = np.sqrt(m)
    number = np.diag(np.arange(dim, dtype=float)).astype(complex)
    return a, a.conj().T, number


def hermitian_eig(matrix, tol: float = HERMITICITY_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix with deterministic output.

    Eigenvalues are sorted in descending order and each eigenvector's
    largest-magnitude component is rotated to be real and non-negative,
    so repeated runs agree bit for bit.
    """
    m = np.asarray(matrix, dtype=complex)
    scale = max(np.linalg.norm(m), 1.0)
    if np.linalg.norm(m - m.conj().T) > tol * scale:
        raise DomainError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(hermitize(m))
    vals, vecs = vals[::-1], vecs[:, ::-1]
    for k in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, k])))
        pivot = vecs[i, k]
        if abs(pivot) > 0:
            vecs[:, k] *= np.conj(pivot) / abs(pivot)
    return Spectrum(vals, vecs)


def fock_state(n: int, dim: int | None = None) -> FockVector:
    """|n> in a space of dimension dim (defaults to n+1)."""
    if n < 0:
        raise DomainError("photon number must be non-negative")
    d = n + 1 if dim is None else dim
    if d <= n:
        raise DomainError("dimension too small to hold |n>")
    amps = np.zeros(d, dtype=complex)
    amps[n] = 1.0
    return FockVector(amps)


def _coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """Closed-form coherent amplitudes exp(-|a|^2/2) a^m / sqrt(m!)."""
    m = np.arange(dim)
    if alpha == 0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        return amps
    logmag = m * np.log(np.abs(alpha)) - 0.5 * gammaln(m + 1.0) - 0.5 * np.abs(alpha) ** 2
    return np.exp(logmag) * np.exp(1j * np.angle(alpha) * m)


def coherent_state(alpha: complex, dim: int | None = None,
                   policy: CutoffPolicy | None = None) -> FockVector:
    """Coherent state |alpha> using the closed-form number-basis expansion."""
    policy = policy or CutoffPolicy()
    if dim is not None:
        return FockVector(_coherent_amplitudes(alpha, dim))
    amps = _coherent_amplitudes(alpha, policy.cap + policy.guard)
    cut = _smallest_cutoff(amps, policy.cap, policy)
    if cut is None:
        raise CutoffOverflowError(
            f"tail tolerance {policy.tail_tol} not reachable under cap {policy.cap}")
    return FockVector(amps[:cut])


def _smallest_cutoff(amps: np.ndarray, usable: int, policy: CutoffPolicy) -> int | None:
    """Smallest D <= min(usable, cap) whose neglected population is below tail_tol.

    Only the first ``usable`` levels of the constructed window are trusted;
    the population beyond a candidate cutoff counts against the full norm.
    Returns None when no trustworthy cutoff exists at this window size.
    """
    pop = np.abs(amps) ** 2
    tail = float(pop.sum()) - np.cumsum(pop)
    limit = min(usable, policy.cap)
    ok = np.nonzero(tail[:limit] < policy.tail_tol)[0]
    if ok.size == 0:
        return None
    return int(ok[0]) + 1


def _squeeze_then_displace(eta: complex, xi: complex, dim: int) -> np.ndarray:
    """Amplitudes of D(eta) S(xi) |0> on a dim-level space.

    Both unitaries are applied by exponentiating the truncated generators,
    S(xi) = exp[(xi* a^2 - xi a+^2)/2] and D(eta) = exp[eta a+ - eta* a].
    """
    offd = np.sqrt(np.arange(1, dim))
    a = diags([offd], [1], shape=(dim, dim), format="csr", dtype=complex)
    ad = a.conj().T.tocsr()
    v = np.zeros(dim, dtype=complex)
    v[0] = 1.0
    if xi != 0:
        v = expm_multiply(0.5 * (np.conj(xi) * (a @ a) - xi * (ad @ ad)), v)
    if eta != 0:
        v = expm_multiply(eta * ad - np.conj(eta) * a, v)
    return v


def _window_guess(eta: complex, r: float, policy: CutoffPolicy) -> int:
    """Initial working cutoff for D(eta) S(r) |0> from the tail asymptotics.

    Squeezed-vacuum populations decay geometrically with ratio tanh(r)^2 per
    photon pair; displacement adds a Poissonian spread around |eta|^2.
    """
    levels = 8.0
    t2 = math.tanh(abs(r)) ** 2
    if t2 > 1e-12:
        levels += 2.0 * math.log(policy.tail_tol) / math.log(t2)
    levels += abs(eta) ** 2 + 9.0 * math.sqrt(abs(eta) ** 2 + 1.0)
    return int(min(max(16.0, levels), policy.cap))


def displaced_squeezed_vacuum(eta: complex, r: float, theta_rel: float = 0.0,
                              dim: int | None = None,
                              policy: CutoffPolicy | None = None) -> FockVector:
    """Displaced squeezed vacuum D(eta) S(r e^{i theta_rel}) |0>.

    The mean photon number is |eta|^2 + sinh(r)^2. With an explicit ``dim``
    the state is built at that dimension; otherwise the policy selects the
    smallest cutoff meeting its tail tolerance, growing the construction
    window as needed and raising CutoffOverflowError if the cap is too low.
    """
    policy = policy or CutoffPolicy()
    xi = r * np.exp(1j * theta_rel)
    if dim is not None:
        if dim < 1:
            raise DomainError("dimension must be a positive integer")
        amps = _squeeze_then_displace(eta, xi, dim + policy.guard)[:dim]
        return FockVector(amps)
    trial = _window_guess(eta, r, policy)
    while True:
        amps = _squeeze_then_displace(eta, xi, trial + policy.guard)
        cut = _smallest_cutoff(amps, trial, policy)
        if cut is not None:
            return FockVector(amps[:cut])
        if trial >= policy.cap:
            raise CutoffOverflowError(
                f"tail tolerance {policy.tail_tol} not reachable under cap {policy.cap}")
        trial = min(2 * trial, policy.cap)


def _match_dims(x, y):
    dx = x.shape[-1]
    dy = y.shape[-1]
    d = max(dx, dy)
    if x.ndim == 1:
        xp = np.zeros(d, dtype=complex)
        xp[:dx] = x
    else:
        xp = np.zeros((d, d), dtype=complex)
        xp[:dx, :dx] = x
    if y.ndim == 1:
        yp = np.zeros(d, dtype=complex)
        yp[:dy] = y
    else:
        yp = np.zeros((d, d), dtype=complex)
        yp[:dy, :dy] = y
    return xp, yp


def fidelity(x, y) -> float:
    """Overlap fidelity of two states; |<x|y>|^2 when both are pure.

    Mixed inputs use the trace overlap Tr[rho_x rho_y], which coincides with
    the squared amplitude overlap on pure states. States with different
    cutoffs are zero-padded to a common dimension.
    """
    xv = x.amplitudes if isinstance(x, FockVector) else None
    yv = y.amplitudes if isinstance(y, FockVector) else None
    if xv is None and not isinstance(x, DensityOperator):
        arr = np.asarray(x, dtype=complex)
        xv = arr if arr.ndim == 1 else None
    if yv is None and not isinstance(y, DensityOperator):
        arr = np.asarray(y, dtype=complex)
        yv = arr if arr.ndim == 1 else None
    if xv is not None and yv is not None:
        xp, yp = _match_dims(xv, yv)
        return float(min(np.abs(np.vdot(xp, yp)) ** 2, 1.0))
    xm, ym = _match_dims(matrix_of(x), matrix_of(y))
    return float(min(np.trace(xm @ ym).real, 1.0))


def mean_photon(state) -> float:
    """Expectation of the number operator a+ a."""
    if isinstance(state, DensityOperator) or (
            not isinstance(state, FockVector) and np.asarray(state).ndim == 2):
        m = matrix_of(state)
        return float(np.sum(np.arange(m.shape[0]) * np.diag(m).real))
    amps = amplitudes_of(state)
    return float(np.sum(np.arange(amps.size) * np.abs(amps) ** 2))
