"""Symmetric logarithmic derivative and quantum Fisher information for
loss estimation, with closed-form oracles, the optimal projective
measurement, classical Fisher information of arbitrary measurements, and
Cramer-Rao variance reporting.

The production pipeline is fully numeric: build the probe, propagate it,
differentiate analytically, and assemble the SLD in the eigenbasis of the
output state. Closed forms are kept as independent cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import LossParameter, drho_dphi, evolve
from .errors import DomainError
from .fock import (CutoffPolicy, Spectrum, hermitian_eig, matrix_of,
                   mean_photon)
from .probes import ProbeSpec, build_probe

__all__ = [
    "SLDOperator", "EstimationReport", "sld", "qfi", "qfi_of_state",
    "closed_form_qfi", "optimal_measurement", "classical_fisher", "cramer_rao",
]

# eigenvalue pairs with rho_p + rho_q below this fraction of the trace are
# outside the support and excluded from the SLD
RANK_EPS = 1e-12

ROUTE_AGREEMENT = 1e-9
BOUND_SLACK = 1e-6


@dataclass(frozen=True)
class SLDOperator:
    """The SLD matrix in the Fock basis together with its spectral data."""

    matrix: np.ndarray
    spectrum: Spectrum
    phi: LossParameter


@dataclass(frozen=True)
class EstimationReport:
    """Per-run QFI with the energy bound and the Cramer-Rao variance."""

    qfi: float
    ultimate_bound: float
    crlb_variance: float
    probe: ProbeSpec | None
    phi: LossParameter
    method: str
    runs: int = 1
    nbar: float = 0.0

    def __post_init__(self):
        if self.qfi < 0 or self.qfi > self.ultimate_bound * (1.0 + BOUND_SLACK):
            raise DomainError(
                f"QFI {self.qfi} violates the energy bound {self.ultimate_bound}")


def _as_loss(phi) -> LossParameter:
    return phi if isinstance(phi, LossParameter) else LossParameter(float(phi))


def _eig_frame(rho_matrix, drho):
    """Eigendecomposition of rho plus drho rotated into that eigenbasis."""
    spec = hermitian_eig(rho_matrix)
    lam = spec.eigenvalues
    d_eig = spec.eigenvectors.conj().T @ drho @ spec.eigenvectors
    return spec, lam, d_eig


def _sld_in_frame(lam, d_eig, trace):
    """SLD matrix elements 2 drho_qp / (lam_p + lam_q) on the support.

    Dividing by near-threshold eigenvalue sums amplifies the roundoff
    asymmetry of the rotated derivative, so the result is symmetrized; the
    exact solution is Hermitian by construction.
    """
    pair = lam[:, None] + lam[None, :]
    mask = pair > RANK_EPS * trace
    out = np.zeros_like(d_eig)
    out[mask] = 2.0 * d_eig[mask] / pair[mask]
    return 0.5 * (out + out.conj().T), mask


def _qfi_two_routes(rho_matrix, drho):
    trace = float(np.trace(rho_matrix).real)
    if trace <= 0:
        raise DomainError("state has non-positive trace")
    spec, lam, d_eig = _eig_frame(rho_matrix, drho)
    sld_eig, mask = _sld_in_frame(lam, d_eig, trace)
    pair = lam[:, None] + lam[None, :]
    h_pairs = float(np.sum(2.0 * np.abs(d_eig[mask]) ** 2 / pair[mask]))
    h_trace = float(np.real(np.sum(lam * np.einsum("qp,pq->q", sld_eig, sld_eig))))
    return h_pairs, h_trace, spec, sld_eig


def qfi_of_state(state, phi) -> float:
    """Numeric QFI of an already-built probe state at loss phi.

    Computes both the pairwise sum over eigenpairs and Tr[rho Lambda^2] and
    insists they agree; returns the pairwise-sum value, which never divides
    by a lone vanishing eigenvalue.
    """
    loss = _as_loss(phi)
    rho = evolve(state, loss)
    drho = drho_dphi(rho, loss)
    h_pairs, h_trace, _, _ = _qfi_two_routes(rho.matrix, drho)
    if abs(h_pairs - h_trace) > ROUTE_AGREEMENT * max(abs(h_pairs), abs(h_trace), 1e-9):
        raise ArithmeticError(
            f"QFI routes disagree: {h_pairs} vs {h_trace}")
    return h_pairs


def sld(rho_phi, drho, phi) -> SLDOperator:
    """Symmetric logarithmic derivative of the evolved state.

    Solves drho = (rho L + L rho)/2 in the eigenbasis of rho, restricted to
    eigenvalue pairs inside the support, and returns L in the Fock basis.
    """
    loss = _as_loss(phi)
    rho_matrix = matrix_of(rho_phi)
    trace = float(np.trace(rho_matrix).real)
    if trace <= 0:
        raise DomainError("state has non-positive trace")
    spec, lam, d_eig = _eig_frame(rho_matrix, np.asarray(drho, dtype=complex))
    sld_eig, _ = _sld_in_frame(lam, d_eig, trace)
    v = spec.eigenvectors
    matrix = v @ sld_eig @ v.conj().T
    return SLDOperator(matrix=matrix, spectrum=hermitian_eig(matrix), phi=loss)


def qfi(probe: ProbeSpec, phi, runs: int = 1,
        policy: CutoffPolicy | None = None) -> EstimationReport:
    """QFI of a probe family member, as an EstimationReport.

    The report carries the per-run QFI, the energy bound 4 nbar, and the
    Cramer-Rao variance floor 1/(runs * QFI) for the requested run count.
    """
    if runs < 1:
        raise DomainError("run count must be at least 1")
    loss = _as_loss(phi)
    state = build_probe(probe, policy)
    nbar = mean_photon(state)
    h = qfi_of_state(state, loss)
    crlb = (1.0 / (runs * h)) if h > 0 else math.inf
    return EstimationReport(qfi=h, ultimate_bound=4.0 * nbar, crlb_variance=crlb,
                            probe=probe, phi=loss, method="numeric",
                            runs=runs, nbar=nbar)


def closed_form_qfi(family: str, params: dict, phi) -> float:
    """Closed-form QFI oracles for the analytically solvable families.

    family is one of fock, qubit, qutrit02, gaussian_small_n, coherent.
    qutrit02 and gaussian_small_n are small-energy forms asserted for
    nbar <= 1; coherent follows from the pure coherent output |alpha cos phi>.
    """
    loss = _as_loss(phi)
    z = loss.z
    if family == "fock":
        n = params["n"]
        if n < 0 or n != int(n):
            raise DomainError("fock oracle needs a non-negative integer n")
        return 4.0 * float(n)
    if family == "qubit":
        nbar = params["nbar"]
        if not (0.0 <= nbar <= 1.0):
            raise DomainError("qubit oracle needs nbar in [0, 1]")
        return 4.0 * nbar * (1.0 - (1.0 - nbar) * math.cos(loss.phi) ** 2)
    if family == "qutrit02":
        nbar = params["nbar"]
        if not (0.0 < nbar <= 1.0):
            raise DomainError("qutrit02 oracle asserted for nbar in (0, 1]")
        return 4.0 * nbar * (1.0 + z * z) / (1.0 + (2.0 - nbar) * z + z * z)
    if family == "gaussian_small_n":
        nbar = params["nbar"]
        if not (0.0 < nbar <= 1.0):
            raise DomainError("gaussian_small_n oracle asserted for nbar in (0, 1]")
        return 4.0 * nbar * (1.0 + z * z) / (1.0 + 2.0 * z * (1.0 + nbar) + z * z)
    if family == "coherent":
        nbar = params["nbar"]
        if nbar < 0:
            raise DomainError("coherent oracle needs nbar >= 0")
        return 4.0 * nbar * math.sin(loss.phi) ** 2
    raise DomainError(f"unknown closed-form family {family!r}")


def optimal_measurement(sld_op: SLDOperator):
    """Rank-one projectors onto the SLD eigenvectors, with their eigenvalues.

    Returns a list of (eigenvalue, projector) pairs forming a complete
    orthonormal projective measurement; for Fock probes every projector is a
    number-basis projector.
    """
    vals = sld_op.spectrum.eigenvalues
    vecs = sld_op.spectrum.eigenvectors
    return [(float(vals[k]), np.outer(vecs[:, k], vecs[:, k].conj()))
            for k in range(vals.size)]


def classical_fisher(projectors, probe: ProbeSpec, phi,
                     policy: CutoffPolicy | None = None) -> float:
    """Fisher information of a projective measurement on the evolved probe.

    F = sum_x (dp_x)^2 / p_x over outcomes; outcomes with p_x < 1e-14 and
    |dp_x| < 1e-12 carry no information and are skipped, while a vanishing
    probability with a significant derivative returns math.inf (the
    unbounded-information flag) instead of crashing.
    """
    loss = _as_loss(phi)
    state = build_probe(probe, policy)
    rho = evolve(state, loss)
    drho = drho_dphi(rho, loss)
    dim = rho.dim
    total = 0.0
    for item in projectors:
        proj = np.asarray(item[1] if isinstance(item, tuple) else item, dtype=complex)
        if proj.shape[0] != dim:
            side = min(proj.shape[0], dim)
            p = float(np.trace(proj[:side, :side] @ rho.matrix[:side, :side]).real)
            dp = float(np.trace(proj[:side, :side] @ drho[:side, :side]).real)
        else:
            p = float(np.trace(proj @ rho.matrix).real)
            dp = float(np.trace(proj @ drho).real)
        if p < 1e-14:
            if abs(dp) < 1e-12:
                continue
            return math.inf
        total += dp * dp / p
    return total


def cramer_rao(h: float, runs: int, nbar: float):
    """Cramer-Rao variance floor 1/(N H) and the energy floor 1/(4 nbar N)."""
    if runs < 1:
        raise DomainError("run count must be at least 1")
    if nbar <= 0:
        raise DomainError("mean photon number must be positive")
    ultimate = 1.0 / (4.0 * nbar * runs)
    if h <= 0:
        return math.inf, ultimate
    return 1.0 / (runs * h), ultimate
