"""Single-cavity Jaynes-Cummings algebra.

Energies are in absolute units with hbar = 1. A cavity holding ``n`` total
excitations (photons plus atomic excitation) lives in the two-dimensional
space spanned by ``|g,n>`` and ``|e,n-1>``; the empty cavity ``|g,0>`` is
one-dimensional and has zero energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import TruncationError

Branch = Literal["lower", "upper"]

DEFAULT_N_MAX = 20


@dataclass(frozen=True)
class SiteParams:
    """Physical constants of one cavity.

    omega is the cavity resonance, epsilon the atomic transition energy and
    beta the atom-photon coupling.
    """

    omega: float
    epsilon: float
    beta: float = 1.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not (math.isfinite(self.omega) and math.isfinite(self.epsilon)):
            raise ValueError("omega and epsilon must be finite")

    @property
    def delta(self) -> float:
        """Detuning omega - epsilon."""
        return self.omega - self.epsilon

    @classmethod
    def from_detuning(cls, delta: float, beta: float = 1.0, omega: float = 0.0) -> "SiteParams":
        return cls(omega=omega, epsilon=omega - delta, beta=beta)

    def shifted(self, c: float) -> "SiteParams":
        """Same cavity with omega and epsilon both moved by ``c``."""
        return SiteParams(self.omega + c, self.epsilon + c, self.beta)


@dataclass(frozen=True)
class DressedState:
    n: int
    branch: Branch
    c_g: float
    c_e: float
    energy: float


def _check_n(n) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"excitation number must be a non-negative integer, got {n}")
    return int(n)


def rabi_chi(n: int, site: SiteParams) -> float:
    """Generalized Rabi frequency sqrt(n beta^2 + delta^2 / 4)."""
    n = _check_n(n)
    return math.sqrt(n * site.beta**2 + 0.25 * site.delta**2)


def dressed_energy(n: int, site: SiteParams, branch: Branch = "lower") -> float:
    """Eigenvalue n*omega +/- chi(n) - delta/2; zero for the empty cavity."""
    n = _check_n(n)
    if n == 0:
        return 0.0
    chi = rabi_chi(n, site)
    sign = -1.0 if branch == "lower" else 1.0
    return n * site.omega + sign * chi - 0.5 * site.delta


def dressed_state(n: int, branch: Branch, site: SiteParams) -> DressedState:
    """Dressed eigenstate ``|branch, n>`` expanded on ``|g,n>`` and ``|e,n-1>``.

    For n = 0 the only state is ``|g,0>`` and ``branch`` is forced to lower.
    The amplitudes are written so that no cancellation occurs at large
    detuning of either sign.
    """
    n = _check_n(n)
    if branch not in ("lower", "upper"):
        raise ValueError(f"unknown branch {branch!r}")
    if n == 0:
        return DressedState(0, "lower", 1.0, 0.0, 0.0)
    chi = rabi_chi(n, site)
    half = 0.5 * site.delta
    coupling = site.beta * math.sqrt(n)
    # lower: (beta sqrt n, -(chi + delta/2)); upper: (beta sqrt n, chi - delta/2)
    if branch == "lower":
        s = chi + half if half >= 0 else coupling**2 / (chi - half)
        c_e_raw = -s
    else:
        s = chi - half if half <= 0 else coupling**2 / (chi + half)
        c_e_raw = s
    norm = math.hypot(coupling, c_e_raw)
    return DressedState(n, branch, coupling / norm, c_e_raw / norm, dressed_energy(n, site, branch))


def jc_block(n: int, site: SiteParams) -> np.ndarray:
    """JC Hamiltonian restricted to n >= 1 excitations, basis (|g,n>, |e,n-1>)."""
    n = _check_n(n)
    if n == 0:
        raise ValueError("the n = 0 sector is one-dimensional")
    b = site.beta * math.sqrt(n)
    return np.array([[n * site.omega, b], [b, (n - 1) * site.omega + site.epsilon]])


def atomic_limit_filling(site: SiteParams, mu: float, n_max: int = DEFAULT_N_MAX) -> int:
    """Filling n minimising E_{|-,n>} - mu*n over 0 <= n <= n_max.

    Ties go to the smaller n. Raises TruncationError when the minimiser is
    n_max itself, since the true minimum may then lie beyond the cutoff.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    best_n, best_e = 0, 0.0
    for n in range(1, n_max + 1):
        e = dressed_energy(n, site) - mu * n
        if e < best_e:
            best_n, best_e = n, e
    if best_n == n_max:
        raise TruncationError(
            f"atomic-limit filling reached n_max={n_max} at mu={mu}; raise n_max"
        )
    return best_n


def atomic_edge(n: int, site: SiteParams) -> float:
    """Chemical potential at which fillings n and n+1 are degenerate at zero hopping."""
    n = _check_n(n)
    return dressed_energy(n + 1, site) - dressed_energy(n, site)
