"""Probe-state factory: every input family the toolkit optimizes over,
plus the inverse coordinates used for the attainable-region analysis.

Each family has a small frozen spec type and a canonical text form used by
the command line, e.g. ``fock:n=2``, ``qutrit:nbar=0.5,beta=0.3``,
``subtracted:eta=1.0,r=0.4``, ``cat:alpha=1.2,sign=+``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DegenerateStateError, DomainError
from .fock import (CutoffPolicy, FockVector, amplitudes_of, coherent_state,
                   displaced_squeezed_vacuum, fock_state)

__all__ = [
    "Fock", "Qubit", "Qutrit", "Superposition", "Coherent", "Cat",
    "Gaussian", "PhotonSubtracted", "TruncatedSubtracted", "ProbeSpec",
    "build_probe", "truncated_subtracted_coeffs", "qutrit_coords",
    "parse_probe", "probe_label", "nominal_nbar",
    "cat_mean_photon", "cat_alpha_for_energy",
]


@dataclass(frozen=True)
class Fock:
    n: int

    def __post_init__(self):
        if self.n < 0 or self.n != int(self.n):
            raise DomainError("Fock index must be a non-negative integer")


@dataclass(frozen=True)
class Qubit:
    """cos(theta)|0> + e^{i varphi} sin(theta)|1>, mean photon sin(theta)^2."""

    theta: float
    varphi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi / 2):
            raise DomainError("qubit weight theta must lie in [0, pi/2]")

    @classmethod
    def from_nbar(cls, nbar: float, varphi: float = 0.0) -> "Qubit":
        if not (0.0 <= nbar <= 1.0):
            raise DomainError("qubit energy must lie in [0, 1]")
        return cls(math.asin(math.sqrt(nbar)), varphi)


@dataclass(frozen=True)
class Qutrit:
    """Three-level superposition at fixed energy nbar.

    cos(a)|0> + e^{i mu} sin(a) sin(beta)|1> + e^{i nu} sin(a) cos(beta)|2>
    with sin(a)^2 = 2 nbar / (cos(2 beta) + 3); phases default to the
    QFI-maximizing choice mu = nu = pi.
    """

    nbar: float
    beta: float
    mu: float = np.pi
    nu: float = np.pi

    def __post_init__(self):
        if not (0.0 < self.nbar <= 2.0):
            raise DomainError("qutrit energy must lie in (0, 2]")
        if not (0.0 <= self.beta <= np.pi / 2):
            raise DomainError("qutrit weight beta must lie in [0, pi/2]")
        if 2.0 * self.nbar / (math.cos(2.0 * self.beta) + 3.0) > 1.0 + 1e-12:
            raise DomainError(f"(nbar={self.nbar}, beta={self.beta}) leaves no real mixing angle")


@dataclass(frozen=True, init=False)
class Superposition:
    """Arbitrary finite superposition of the lowest Fock levels."""

    coefficients: tuple

    def __init__(self, coefficients):
        coeffs = tuple(complex(c) for c in coefficients)
        if len(coeffs) < 1 or not any(abs(c) > 0 for c in coeffs):
            raise DegenerateStateError("superposition needs at least one nonzero coefficient")
        norm = math.sqrt(sum(abs(c) ** 2 for c in coeffs))
        object.__setattr__(self, "coefficients", tuple(c / norm for c in coeffs))


@dataclass(frozen=True)
class Coherent:
    alpha: complex = 0.0


@dataclass(frozen=True)
class Cat:
    """Normalized |alpha> + sign |-alpha> with sign = +1 or -1."""

    alpha: float
    sign: int = +1

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise DomainError("cat sign must be +1 or -1")
        if self.alpha == 0:
            raise DegenerateStateError("cat state is degenerate at alpha = 0")


@dataclass(frozen=True)
class Gaussian:
    """Displaced squeezed vacuum D(eta) S(r e^{i theta_rel}) |0>."""

    eta: complex = 0.0
    r: float = 0.0
    theta_rel: float = 0.0


@dataclass(frozen=True)
class PhotonSubtracted:
    """a D(eta) S(r) |0>, renormalized."""

    eta: float
    r: float


@dataclass(frozen=True)
class TruncatedSubtracted:
    """Photon-subtracted displaced squeezed state kept on its lowest levels."""

    eta: float
    r: float
    levels: int = 3

    def __post_init__(self):
        if self.levels < 1:
            raise DomainError("truncation must keep at least one level")


ProbeSpec = Union[Fock, Qubit, Qutrit, Superposition, Coherent, Cat,
                  Gaussian, PhotonSubtracted, TruncatedSubtracted]


def truncated_subtracted_coeffs(eta: float, r: float) -> np.ndarray:
    """Three-level coefficients of the truncated photon-subtracted state.

    k0 = eta (tanh r + 1), k1 = k0^2 - tanh r, k2 = k0 (k0^2 - 3 tanh r)/sqrt(2),
    returned normalized. Both parameters real; eta >= 0.
    """
    if eta < 0:
        raise DomainError("displacement modulus must be non-negative")
    t = math.tanh(r)
    k0 = eta * (t + 1.0)
    k1 = k0 * k0 - t
    k2 = k0 * (k0 * k0 - 3.0 * t) / math.sqrt(2.0)
    k = np.array([k0, k1, k2])
    norm = np.linalg.norm(k)
    if norm < 1e-15:
        raise DegenerateStateError("all truncation coefficients vanish at this (eta, r)")
    return k / norm


def qutrit_coords(state) -> tuple[float, float]:
    """Energy and weight angle (nbar, beta) of a state living on levels 0..2.

    nbar = |c1|^2 + 2 |c2|^2 and beta = arctan(|c1| / |c2|); inverts the
    Qutrit parametrization up to phases.
    """
    amps = amplitudes_of(state)
    if amps.size > 3 and np.max(np.abs(amps[3:])) >= 1e-9:
        raise DomainError("state has support above level 2")
    amps = amps[:3] if amps.size >= 3 else np.pad(amps, (0, 3 - amps.size))
    amps = amps / np.linalg.norm(amps)
    c1, c2 = abs(amps[1]), abs(amps[2])
    if c1 + c2 < 1e-15:
        raise DegenerateStateError("beta is undefined for the vacuum")
    nbar = float(c1 ** 2 + 2.0 * c2 ** 2)
    beta = float(np.arctan2(c1, c2))
    return nbar, beta


def cat_mean_photon(alpha: float, sign: int) -> float:
    """Mean photon number of the normalized |alpha> + sign |-alpha>."""
    x = alpha * alpha
    if sign > 0:
        return x * math.tanh(x)
    return x / math.tanh(x) if x > 0 else 1.0


def cat_alpha_for_energy(nbar: float, sign: int) -> float:
    """Amplitude alpha > 0 such that the cat of given parity has energy nbar.

    Even cats reach any nbar > 0; odd cats only nbar > 1 (they tend to |1>
    as alpha -> 0), so a DomainError is raised for infeasible requests.
    """
    from scipy.optimize import brentq
    if sign > 0:
        if nbar <= 0:
            raise DomainError("even cat needs nbar > 0")
    elif nbar <= 1.0:
        raise DomainError("odd cat energy is always above 1")
    lo, hi = 1e-6, 1.0
    while cat_mean_photon(hi, sign) < nbar:
        hi *= 2.0
        if hi > 64:
            raise DomainError("cat energy out of reach")
    return float(brentq(lambda a: cat_mean_photon(a, sign) - nbar, lo, hi, xtol=1e-14))


def _qutrit_amplitudes(spec: Qutrit) -> np.ndarray:
    alpha = math.asin(math.sqrt(min(2.0 * spec.nbar / (math.cos(2.0 * spec.beta) + 3.0), 1.0)))
    return np.array([
        math.cos(alpha),
        np.exp(1j * spec.mu) * math.sin(alpha) * math.sin(spec.beta),
        np.exp(1j * spec.nu) * math.sin(alpha) * math.cos(spec.beta),
    ])


def build_probe(spec: ProbeSpec, policy: CutoffPolicy | None = None) -> FockVector:
    """Construct the normalized probe state for any spec family."""
    policy = policy or CutoffPolicy()
    if isinstance(spec, Fock):
        return fock_state(spec.n)
    if isinstance(spec, Qubit):
        return FockVector(np.array([math.cos(spec.theta),
                                    np.exp(1j * spec.varphi) * math.sin(spec.theta)]))
    if isinstance(spec, Qutrit):
        return FockVector(_qutrit_amplitudes(spec))
    if isinstance(spec, Superposition):
        return FockVector(np.array(spec.coefficients, dtype=complex))
    if isinstance(spec, Coherent):
        return coherent_state(spec.alpha, policy=policy)
    if isinstance(spec, Cat):
        base = coherent_state(spec.alpha, policy=policy).amplitudes
        parity = (-1.0) ** np.arange(base.size)
        return FockVector(base * (1.0 + spec.sign * parity))
    if isinstance(spec, Gaussian):
        return displaced_squeezed_vacuum(spec.eta, spec.r, spec.theta_rel, policy=policy)
    if isinstance(spec, PhotonSubtracted):
        from .degauss import photon_subtract
        return photon_subtract(
            displaced_squeezed_vacuum(spec.eta, spec.r, 0.0, policy=policy))
    if isinstance(spec, TruncatedSubtracted):
        from .degauss import photon_subtract, truncate_levels
        full = photon_subtract(
            displaced_squeezed_vacuum(spec.eta, spec.r, 0.0, policy=policy))
        return truncate_levels(full, spec.levels)
    raise DomainError(f"unknown probe spec {spec!r}")


def nominal_nbar(spec: ProbeSpec) -> float | None:
    """Declared mean photon number, when the family fixes one in closed form."""
    if isinstance(spec, Fock):
        return float(spec.n)
    if isinstance(spec, Qubit):
        return math.sin(spec.theta) ** 2
    if isinstance(spec, Qutrit):
        return spec.nbar
    if isinstance(spec, Superposition):
        return float(sum(m * abs(c) ** 2 for m, c in enumerate(spec.coefficients)))
    if isinstance(spec, Coherent):
        return abs(spec.alpha) ** 2
    if isinstance(spec, Cat):
        return cat_mean_photon(spec.alpha, spec.sign)
    if isinstance(spec, Gaussian):
        return abs(spec.eta) ** 2 + math.sinh(spec.r) ** 2
    return None


# ---------------------------------------------------------------------------
# canonical text forms

def _parse_kv(body: str) -> dict:
    out = {}
    if not body:
        return out
    for item in body.split(","):
        if "=" not in item:
            raise DomainError(f"expected key=value, got {item!r}")
        key, val = item.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _fnum(text: str) -> float:
    """Parse a float, allowing the convenience forms pi, x*pi and pi/x."""
    t = text.strip()
    try:
        return float(t)
    except ValueError:
        pass
    neg = t.startswith("-")
    if neg:
        t = t[1:]
    head, _, tail = t.partition("/")
    try:
        if head.endswith("*pi"):
            value = float(head[:-3]) * math.pi
        elif head == "pi":
            value = math.pi
        else:
            raise ValueError(t)
        if tail:
            value /= float(tail)
        return -value if neg else value
    except ValueError as exc:
        raise DomainError(f"cannot parse number {text!r}") from exc


def parse_probe(text: str) -> ProbeSpec:
    """Parse the canonical probe text form, e.g. ``qutrit:nbar=0.5,beta=0.3``."""
    if ":" in text:
        family, body = text.split(":", 1)
    else:
        family, body = text, ""
    family = family.strip().lower()
    kv = _parse_kv(body)
    try:
        if family == "fock":
            return Fock(int(kv["n"]))
        if family == "qubit":
            varphi = _fnum(kv.get("varphi", "0"))
            if "theta" in kv:
                return Qubit(_fnum(kv["theta"]), varphi)
            return Qubit.from_nbar(_fnum(kv["nbar"]), varphi)
        if family == "qutrit":
            return Qutrit(_fnum(kv["nbar"]), _fnum(kv["beta"]),
                          _fnum(kv.get("mu", "pi")), _fnum(kv.get("nu", "pi")))
        if family == "superposition":
            coeffs = [complex(c) for c in kv["c"].split("/")]
            return Superposition(coeffs)
        if family == "coherent":
            return Coherent(complex(kv["alpha"]))
        if family == "cat":
            sign = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}[kv.get("sign", "+")]
            return Cat(_fnum(kv["alpha"]), sign)
        if family == "gaussian":
            return Gaussian(complex(kv.get("eta", "0")), _fnum(kv.get("r", "0")),
                            _fnum(kv.get("theta", "0")))
        if family == "subtracted":
            return PhotonSubtracted(_fnum(kv["eta"]), _fnum(kv["r"]))
        if family == "truncsub":
            return TruncatedSubtracted(_fnum(kv["eta"]), _fnum(kv["r"]),
                                       int(kv.get("levels", "3")))
    except (KeyError, ValueError) as exc:
        raise DomainError(f"bad probe spec {text!r}: {exc}") from exc
    raise DomainError(f"unknown probe family {family!r}")


def probe_label(spec: ProbeSpec) -> str:
    """Canonical text form of a spec (inverse of parse_probe up to formatting)."""
    if isinstance(spec, Fock):
        return f"fock:n={spec.n}"
    if isinstance(spec, Qubit):
        return f"qubit:theta={spec.theta:.12g},varphi={spec.varphi:.12g}"
    if isinstance(spec, Qutrit):
        return (f"qutrit:nbar={spec.nbar:.12g},beta={spec.beta:.12g},"
                f"mu={spec.mu:.12g},nu={spec.nu:.12g}")
    if isinstance(spec, Superposition):
        parts = "/".join(f"{c.real:.12g}{c.imag:+.12g}j" for c in spec.coefficients)
        return f"superposition:c={parts}"
    if isinstance(spec, Coherent):
        return f"coherent:alpha={spec.alpha.real:.12g}" if spec.alpha.imag == 0 \
            else f"coherent:alpha={spec.alpha:.12g}"
    if isinstance(spec, Cat):
        return f"cat:alpha={spec.alpha:.12g},sign={'+' if spec.sign > 0 else '-'}"
    if isinstance(spec, Gaussian):
        eta = f"{spec.eta.real:.12g}" if spec.eta.imag == 0 else f"{spec.eta:.12g}"
        return f"gaussian:eta={eta},r={spec.r:.12g},theta={spec.theta_rel:.12g}"
    if isinstance(spec, PhotonSubtracted):
        return f"subtracted:eta={spec.eta:.12g},r={spec.r:.12g}"
    if isinstance(spec, TruncatedSubtracted):
        return f"truncsub:eta={spec.eta:.12g},r={spec.r:.12g},levels={spec.levels}"
    raise DomainError(f"unknown probe spec {spec!r}")
