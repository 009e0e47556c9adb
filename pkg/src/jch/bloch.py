"""One-polariton and one-hole Bloch blocks for periodic 1D cavity chains.

A cell of ``m`` cavities sits on a background where cavity ``r`` holds the
lower dressed state ``|-, n_r>``. The particle sector adds one excitation to
a single cavity, the hole sector removes one. Translating the defect by one
cell multiplies its amplitude by ``exp(ik)``, so the infinite-lattice
problem reduces to a small Hermitian matrix per crystal momentum ``k``.

Block energies are measured relative to the background (grand-canonical,
``-mu N`` included), so a negative lowest eigenvalue means the background is
unstable against adding a polariton or a hole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import NumericalError
from .jc_core import SiteParams, dressed_energy, dressed_state, jc_block, rabi_chi

Sector = Literal["particle", "hole"]

HERMITIAN_TOL = 1e-14
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class UnitCellSpec:
    """Periodic cell: ordered cavities, their background fillings, hopping and mu."""

    sites: tuple
    fillings: tuple
    kappa: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "fillings", tuple(int(n) for n in self.fillings))
        if len(self.sites) == 0:
            raise ValueError("a unit cell needs at least one site")
        if len(self.sites) != len(self.fillings):
            raise ValueError("fillings and sites must have the same length")
        if any(n < 0 for n in self.fillings):
            raise ValueError("fillings must be non-negative")
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise ValueError(f"kappa must be finite and non-negative, got {self.kappa}")
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")

    @classmethod
    def uniform(cls, site: SiteParams, n: int, kappa: float, mu: float) -> "UnitCellSpec":
        return cls((site,), (n,), kappa, mu)

    @property
    def m(self) -> int:
        return len(self.sites)

    def background_energy(self) -> float:
        """Grand energy of the background per cell."""
        return sum(dressed_energy(n, s) - self.mu * n for s, n in zip(self.sites, self.fillings))


@dataclass
class BlochBlock:
    k: float
    sector: Sector
    matrix: np.ndarray
    basis_labels: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class Band:
    """Sorted eigenvalues of a sector on a k grid; ``energies[i]`` belongs to ``k_grid[i]``."""

    sector: Sector
    k_grid: np.ndarray
    energies: np.ndarray

    def lowest(self) -> np.ndarray:
        return self.energies[:, 0]

    def minimum(self) -> float:
        return float(self.energies[:, 0].min())


def _check_sector(sector):
    if sector not in ("particle", "hole"):
        raise ValueError(f"sector must be 'particle' or 'hole', got {sector!r}")


def hop_vector(site: SiteParams, n: int, sector: Sector) -> np.ndarray:
    """Matrix elements of the photon operator between the background and the defect states.

    particle: <X| a^dag |-,n> for X in (|g,n+1>, |e,n>).
    hole:     <X| a |-,n>     for X in (|g,n-1>, |e,n-2>), one component when n = 1.
    """
    _check_sector(sector)
    ds = dressed_state(n, "lower", site)
    if sector == "particle":
        return np.array([ds.c_g * math.sqrt(n + 1), ds.c_e * math.sqrt(n)])
    if n < 1:
        raise ValueError("no hole can be made on an empty cavity")
    if n == 1:
        return np.array([ds.c_g])
    return np.array([ds.c_g * math.sqrt(n), ds.c_e * math.sqrt(n - 1)])


def _onsite(site: SiteParams, n: int, sector: Sector, mu: float) -> np.ndarray:
    # local JC block of the defect cavity, relative to its background energy
    e_bg = dressed_energy(n, site) - mu * n
    if sector == "particle":
        return jc_block(n + 1, site) - (mu * (n + 1) + e_bg) * np.eye(2)
    if n == 1:
        return np.array([[-e_bg]])
    return jc_block(n - 1, site) - (mu * (n - 1) + e_bg) * np.eye(2)


def _local_dim(n: int, sector: Sector) -> int:
    if sector == "particle":
        return 2
    return 0 if n == 0 else (1 if n == 1 else 2)


def bloch_parts(cell: UnitCellSpec, sector: Sector):
    """Split the block as ``H(k) = H0 + exp(ik) T + exp(-ik) T^dag``.

    Returns (H0, T, labels). H0 holds the onsite terms and intra-cell hops,
    T the hop from the last cavity of a cell to the first of the next.
    """
    _check_sector(sector)
    dims = [_local_dim(n, sector) for n in cell.fillings]
    d = sum(dims)
    if d == 0:
        raise ValueError(f"no {sector} states for fillings {cell.fillings}")
    offsets = np.concatenate([[0], np.cumsum(dims)])
    labels = []
    vecs = []
    h0 = np.zeros((d, d))
    for r, (site, n) in enumerate(zip(cell.sites, cell.fillings)):
        if dims[r] == 0:
            vecs.append(None)
            continue
        sl = slice(offsets[r], offsets[r + 1])
        h0[sl, sl] = _onsite(site, n, sector, cell.mu)
        labels.extend((r, b) for b in ("g", "e")[: dims[r]])
        vecs.append(hop_vector(site, n, sector))

    def hop(r, s):
        # amplitude for the defect to move from cavity s to cavity r
        out = np.zeros((d, d))
        if vecs[r] is not None and vecs[s] is not None:
            out[offsets[r]:offsets[r + 1], offsets[s]:offsets[s + 1]] = -cell.kappa * np.outer(
                vecs[r], vecs[s]
            )
        return out

    for r in range(cell.m - 1):
        t = hop(r, r + 1)
        h0 += t + t.T
    boundary = hop(cell.m - 1, 0)
    return h0, boundary, labels


def _assemble(h0, t, ks):
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    phase = np.exp(1j * ks)[:, None, None]
    return h0[None] + phase * t[None] + np.conj(phase) * t.T[None]


def build_block(cell: UnitCellSpec, sector: Sector, k: float, defect_site: int = 0) -> BlochBlock:
    """Bloch block at crystal momentum ``k`` (per cell, in [-pi, pi]).

    ``defect_site`` is accepted for interface symmetry only: the defect hops
    across the whole cell, so the block always spans every cavity.
    """
    if not 0 <= defect_site < cell.m:
        raise ValueError(f"defect_site {defect_site} outside cell of size {cell.m}")
    if sector == "hole" and cell.m == 1 and cell.fillings[0] < 1:
        raise ValueError("hole sector needs a filled defect cavity")
    h0, t, labels = bloch_parts(cell, sector)
    mat = _assemble(h0, t, [k])[0]
    if cell.m == 1:
        mat = mat.real.astype(float)
    herm = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if herm > HERMITIAN_TOL * max(1.0, np.max(np.abs(mat))):
        raise NumericalError("assembled Bloch block is not Hermitian", {"k": k, "sector": sector})
    return BlochBlock(float(k), sector, mat, labels)


def _eigh_checked(mats, params):
    try:
        w, v = np.linalg.eigh(mats)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}", params) from exc
    scale = np.max(np.abs(mats), axis=(-2, -1), keepdims=True)[..., 0]
    resid = np.linalg.norm(mats @ v - v * w[..., None, :], axis=-2)
    if not np.all(resid <= RESIDUAL_TOL * np.maximum(scale, 1.0)):
        raise NumericalError("eigen-residual above tolerance", params)
    return w


def diagonalize(block: BlochBlock) -> np.ndarray:
    """Ascending real eigenvalues of a Bloch block."""
    mat = np.asarray(block.matrix)
    if mat.shape == (1, 1):
        return np.array([float(mat[0, 0].real)])
    return _eigh_checked(mat, {"k": block.k, "sector": block.sector})


def band_energies(cell: UnitCellSpec, sector: Sector, ks: Sequence[float]) -> np.ndarray:
    """Sorted eigenvalues for every k in ``ks``; shape (len(ks), d)."""
    h0, t, _ = bloch_parts(cell, sector)
    mats = _assemble(h0, t, ks)
    if cell.m == 1:
        mats = mats.real
    return _eigh_checked(mats, {"sector": sector, "fillings": cell.fillings,
                                "kappa": cell.kappa, "mu": cell.mu})


def k_grid(k_count: int) -> np.ndarray:
    if k_count < 2:
        raise ValueError("k_count must be at least 2")
    return np.linspace(-np.pi, np.pi, k_count)


def sample_band(cell: UnitCellSpec, sector: Sector, k_count: int = 65) -> Band:
    ks = k_grid(k_count)
    return Band(sector, ks, band_energies(cell, sector, ks))


def _coefficients(n, site):
    ds = dressed_state(n, "lower", site)
    return ds.c_g, ds.c_e


def closed_form_particle(n: int, k, site: SiteParams, kappa: float, mu: float):
    """Analytic one-polariton pair (E_minus, E_plus) above a uniform filling n.

    Evaluated literally from the closed-form expression, including chi(n) in the
    prefactor. At n = 0 with nonzero detuning this differs from the block
    eigenvalues by (|delta| + delta)/2; the block is the reference.
    """
    k = np.asarray(k, dtype=float)
    cg, ce = _coefficients(n, site)
    beta, delta = site.beta, site.delta
    kc = kappa * np.cos(k)
    h = (n + cg**2) * kc
    g = (4 * (n + 1) * math.sqrt(n) * beta * ce * cg + ((n + 1) * cg**2 - n * ce**2) * delta) * kc
    root = np.sqrt(np.maximum(h**2 - g + rabi_chi(n + 1, site) ** 2, 0.0))
    centre = site.omega - mu + rabi_chi(n, site) - h
    return centre - root, centre + root


def closed_form_hole(n: int, k, site: SiteParams, kappa: float, mu: float):
    """Analytic one-hole pair (E_minus, E_plus) below a uniform filling n >= 1.

    At n = 1 one member of the pair is the spurious flat root
    mu - omega + chi(1) - delta/2; see :func:`physical_hole_root`.
    """
    if n < 1:
        raise ValueError("hole energies need n >= 1")
    k = np.asarray(k, dtype=float)
    cg, ce = _coefficients(n, site)
    beta, delta = site.beta, site.delta
    kc = kappa * np.cos(k)
    h = (n - ce**2) * kc
    g = (4 * (n - 1) * math.sqrt(n) * beta * ce * cg + (n * cg**2 - (n - 1) * ce**2) * delta) * kc
    root = np.sqrt(np.maximum(h**2 - g + rabi_chi(n - 1, site) ** 2, 0.0))
    centre = mu - site.omega + rabi_chi(n, site) - h
    return centre - root, centre + root


def physical_hole_root(k, site: SiteParams, kappa: float, mu: float):
    """The k-dependent member of the n = 1 closed-form hole pair."""
    lo, hi = closed_form_hole(1, k, site, kappa, mu)
    flat = mu - site.omega + rabi_chi(1, site) - 0.5 * site.delta
    return np.where(np.abs(lo - flat) >= np.abs(hi - flat), lo, hi)
