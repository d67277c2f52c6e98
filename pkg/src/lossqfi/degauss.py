"""De-Gaussification toolchain: photon subtraction, level truncation,
fidelity audits, and the attainable-region map of truncated photon-subtracted
states in (nbar, beta) coordinates.

The map (eta, r) -> (nbar, beta) is singular at the origin: every weight
angle accumulates there, so the default sampling lattice combines a uniform
grid with a geometric refinement toward small |eta| and |r|.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.sparse import diags
from scipy.sparse.linalg import expm_multiply

from .errors import CutoffOverflowError, DegenerateStateError, DomainError
from .fock import (CutoffPolicy, FockVector, _smallest_cutoff, _window_guess,
                   amplitudes_of, displaced_squeezed_vacuum)
from .probes import qutrit_coords

__all__ = [
    "RegionMap", "CoveragePoint", "CoverageReport",
    "photon_subtract", "truncate_levels", "default_region_grids",
    "region_map", "coverage_check",
]

# coverage tolerances are tied to the default lattice density
COVER_DELTA_NBAR = 0.02
COVER_DELTA_BETA = 0.03

# corner where near-degenerate performance excuses a coverage miss
EXCEPTION_PHI = 1.4
EXCEPTION_NBAR = 0.2


def photon_subtract(psi) -> FockVector:
    """Apply the annihilator and renormalize; errors on (near-)vacuum input."""
    amps = amplitudes_of(psi)
    levels = np.arange(1, amps.size)
    lowered = np.concatenate([np.sqrt(levels) * amps[1:], [0.0]])
    norm = np.linalg.norm(lowered)
    if norm < 1e-12:
        raise DegenerateStateError("photon subtraction annihilates the vacuum")
    return FockVector(lowered / norm)


def truncate_levels(psi, levels: int) -> FockVector:
    """Keep the lowest ``levels`` amplitudes and renormalize."""
    if levels < 1:
        raise DomainError("must keep at least one level")
    amps = amplitudes_of(psi)
    kept = amps[:levels]
    if np.linalg.norm(kept) ** 2 <= 1e-12:
        raise DegenerateStateError("all kept amplitudes are negligible")
    return FockVector(kept)


@dataclass(frozen=True)
class RegionMap:
    """Sampled attainable (nbar, beta) pairs of 3-level truncated subtracted states.

    ``points`` is a structured array with fields eta, r, nbar, beta holding
    one record per non-degenerate lattice point with nbar <= 1; the sampling
    lattices are kept alongside so the map is reproducible.
    """

    points: np.ndarray
    eta_grid: np.ndarray
    r_grid: np.ndarray
    skipped: int = 0


@dataclass(frozen=True)
class CoveragePoint:
    phi: float
    nbar: float
    beta_opt: float
    qfi_opt: float
    covered: bool
    exception: bool


@dataclass(frozen=True)
class CoverageReport:
    points: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.covered or p.exception for p in self.points)

    @property
    def failures(self) -> list:
        return [p for p in self.points if not (p.covered or p.exception)]


def default_region_grids():
    """Default (eta, r) lattices: uniform coverage plus near-origin refinement."""
    etas = np.unique(np.concatenate([
        np.linspace(0.0, 2.0, 161),
        np.geomspace(1e-3, 0.5, 60),
    ]))
    half = np.geomspace(1e-3, 0.5, 50)
    rs = np.unique(np.concatenate([np.linspace(-1.0, 1.0, 161), half, -half]))
    return etas, rs


def region_map(eta_grid=None, r_grid=None,
               policy: CutoffPolicy | None = None) -> RegionMap:
    """Sample the attainable (nbar, beta) region of 3-level truncations.

    For every lattice point: build D(eta) S(r) |0>, subtract one photon,
    keep three levels, and read off the qutrit coordinates. Points with
    nbar > 1 are dropped; degenerate points (the vacuum at eta = r = 0) are
    skipped and counted, never fatal.
    """
    if eta_grid is None and r_grid is None:
        eta_grid, r_grid = default_region_grids()
    eta_grid = np.atleast_1d(np.asarray(eta_grid, dtype=float))
    r_grid = np.atleast_1d(np.asarray(r_grid, dtype=float))
    if eta_grid.size == 0 or r_grid.size == 0:
        raise DomainError("region grids must be non-empty")
    if np.any(eta_grid < 0):
        raise DomainError("displacement lattice must be non-negative")
    policy = policy or CutoffPolicy()
    records = []
    skipped = 0
    for eta, amps in _batched_states(eta_grid, r_grid, policy):
        for r, vec in amps:
            try:
                state = photon_subtract(vec) if vec is not None else photon_subtract(
                    displaced_squeezed_vacuum(eta, r, 0.0, policy=policy))
                nbar, beta = qutrit_coords(truncate_levels(state, 3))
            except (DegenerateStateError, DomainError, CutoffOverflowError):
                skipped += 1
                continue
            if nbar <= 1.0:
                records.append((eta, r, nbar, beta))
    points = np.array(records, dtype=[("eta", float), ("r", float),
                                      ("nbar", float), ("beta", float)])
    return RegionMap(points=points, eta_grid=eta_grid, r_grid=r_grid, skipped=skipped)


def _batched_states(eta_grid, r_grid, policy):
    """Lattice states built on one shared window: squeezed-vacuum vectors are
    cached per r and a single dense displacement propagator serves each eta.

    Yields (eta, [(r, FockVector or None), ...]); a None entry means the
    shared window was insufficient for that pair and the caller should fall
    back to the adaptive single-state constructor.
    """
    window = _window_guess(float(np.max(eta_grid)), float(np.max(np.abs(r_grid))),
                           policy) + policy.guard
    off = np.sqrt(np.arange(1.0, window))
    a = diags([off], [1], shape=(window, window), format="csr", dtype=complex)
    ad = a.conj().T.tocsr()
    aa = (a @ a).tocsr()
    adad = (ad @ ad).tocsr()
    origin = np.zeros(window, dtype=complex)
    origin[0] = 1.0
    squeezed = []
    for r in r_grid:
        if r == 0.0:
            squeezed.append((r, origin))
        else:
            squeezed.append((r, expm_multiply(0.5 * r * (aa - adad), origin)))
    usable = window - policy.guard
    for eta in eta_grid:
        if eta == 0.0:
            propagator = None
        else:
            propagator = expm(eta * (ad - a).toarray())
        column = []
        for r, base in squeezed:
            vec = base if propagator is None else propagator @ base
            cut = _smallest_cutoff(vec, usable, policy)
            column.append((r, FockVector(vec[:cut]) if cut is not None else None))
        yield eta, column


def coverage_check(phi_list, nbar_grid, region: RegionMap,
                   delta_nbar: float = COVER_DELTA_NBAR,
                   delta_beta: float = COVER_DELTA_BETA,
                   policy: CutoffPolicy | None = None) -> CoverageReport:
    """Check that optimal qutrit weights are attainable by truncated states.

    For each (phi, nbar) the optimal beta is computed and the region is
    searched for a sample within (delta_nbar, delta_beta). Misses inside the
    extreme-loss / low-energy corner are flagged as the permitted exception
    (there, practically all probes perform at the same near-ultimate level).
    """
    from .optimize import optimize_qutrit

    if region.points.size == 0:
        raise DomainError("region map is empty")
    pts_n = region.points["nbar"]
    pts_b = region.points["beta"]
    out = []
    for phi in phi_list:
        phi_val = float(phi.phi) if hasattr(phi, "phi") else float(phi)
        for nbar in nbar_grid:
            result = optimize_qutrit(float(nbar), phi_val, policy=policy)
            beta = result.best_params["beta"]
            hit = bool(np.any((np.abs(pts_n - nbar) <= delta_nbar)
                              & (np.abs(pts_b - beta) <= delta_beta)))
            exc = (phi_val >= EXCEPTION_PHI) and (nbar <= EXCEPTION_NBAR)
            out.append(CoveragePoint(phi=phi_val, nbar=float(nbar),
                                     beta_opt=float(beta),
                                     qfi_opt=float(result.best_qfi),
                                     covered=hit, exception=exc))
    return CoverageReport(points=out)
