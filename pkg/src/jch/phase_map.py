"""Mott lobes, excitation gaps and doped-lattice phase maps.

All chemical-potential dependence of the excitation energies is linear:
adding a polariton shifts the grand energy by ``-mu`` and removing one by
``+mu``. Lobe boundaries therefore follow from band minima evaluated once at
``mu = 0`` and no root finding in ``mu`` is needed anywhere in this module.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bloch import UnitCellSpec, band_energies, k_grid
from .errors import BracketError, JCHError, LobeClosedError, NumericalError
from .jc_core import DEFAULT_N_MAX, SiteParams, atomic_edge, atomic_limit_filling

DEFAULT_K_COUNT = 65
MOTT_THRESHOLD = 1e-9  # in units of beta
SUPERFLUID = "SF"
FAILED = "ERR"


def pattern_label(fillings) -> str:
    return "MI:" + "/".join(str(n) for n in fillings)


def _band_minimum(cell, sector, k_count):
    return float(band_energies(cell, sector, k_grid(k_count))[:, 0].min())


def excitation_gaps(cell: UnitCellSpec, k_count: int = DEFAULT_K_COUNT):
    """Raw (particle_gap, hole_gap): band minima over a k grid.

    Values are negative outside the lobe. When no hole can be made (every
    cavity empty) the hole gap is +inf.
    """
    particle = _band_minimum(cell, "particle", k_count)
    if any(cell.fillings):
        hole = _band_minimum(cell, "hole", k_count)
    else:
        hole = math.inf
    return particle, hole


def lobe_edges(fillings, sites, kappa: float, k_count: int = DEFAULT_K_COUNT):
    """(mu_lower, mu_upper) of the Mott region of a filling pattern, unchecked.

    mu_lower is -inf for an empty background.
    """
    cell = UnitCellSpec(tuple(sites), tuple(fillings), kappa, 0.0)
    particle, hole = excitation_gaps(cell, k_count)
    return -hole, particle


def lobe_boundary(fillings, sites, kappa: float, k_count: int = DEFAULT_K_COUNT):
    """Gap-closure chemical potentials (mu_lower, mu_upper) of a Mott lobe.

    Raises LobeClosedError once hopping has passed the lobe tip.
    """
    lower, upper = lobe_edges(fillings, sites, kappa, k_count)
    if upper < lower:
        raise LobeClosedError(
            f"lobe {tuple(fillings)} closed at kappa={kappa}: mu_upper={upper} < mu_lower={lower}"
        )
    return lower, upper


def lobe_tip(fillings, sites, k_count: int = DEFAULT_K_COUNT, rtol: float = 1e-8,
             kappa_start: float = 0.01, monotone_samples: int = 17) -> float:
    """Hopping at which the lobe width closes, by bisection."""
    sites = tuple(sites)

    def width(kappa):
        lo, hi = lobe_edges(fillings, sites, kappa, k_count)
        return hi - lo

    w0 = width(0.0)
    if not (w0 > 0 and math.isfinite(w0)):
        raise BracketError(f"lobe {tuple(fillings)} is not open and bounded at kappa = 0",
                           bracket=(0.0, 0.0))
    lo, hi = 0.0, kappa_start * sites[0].beta
    for _ in range(60):
        if width(hi) < 0:
            break
        lo, hi = hi, 2 * hi
    else:
        raise BracketError("no lobe closure found", bracket=(lo, hi))

    samples = [width(x) for x in np.linspace(0.0, hi, monotone_samples)]
    if np.any(np.diff(samples) > 1e-12 * sites[0].beta):
        raise NumericalError("lobe width is not monotone in kappa over the bracket",
                             {"fillings": tuple(fillings), "bracket": (0.0, hi)})

    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if width(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def doped_background(sites, mu: float, n_max: int = DEFAULT_N_MAX) -> tuple:
    """Per-cavity atomic-limit fillings; valid for small hopping."""
    return tuple(atomic_limit_filling(s, mu, n_max) for s in sites)


def filling_interval(site: SiteParams, n: int):
    """Open mu interval on which filling n is the zero-hopping ground state."""
    lo = -math.inf if n == 0 else atomic_edge(n - 1, site)
    return lo, atomic_edge(n, site)


def pattern_interval(sites, fillings):
    lo, hi = -math.inf, math.inf
    for s, n in zip(sites, fillings):
        a, b = filling_interval(s, n)
        lo, hi = max(lo, a), min(hi, b)
    return lo, hi


# -- interval-set helpers -----------------------------------------------------

def _merge(intervals):
    out = []
    for lo, hi in sorted((a, b) for a, b in intervals if b > a):
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def _intersect(a, b):
    out = []
    for x0, x1 in a:
        for y0, y1 in b:
            lo, hi = max(x0, y0), min(x1, y1)
            if hi > lo:
                out.append((lo, hi))
    return _merge(out)


def _subtract(a, b):
    out = list(a)
    for y0, y1 in b:
        nxt = []
        for x0, x1 in out:
            if y1 <= x0 or y0 >= x1:
                nxt.append((x0, x1))
                continue
            if y0 > x0:
                nxt.append((x0, y0))
            if y1 < x1:
                nxt.append((y1, x1))
        out = nxt
    return _merge(out)


def set_deviation(a, b) -> float:
    """Length of the largest piece of the symmetric difference of two interval sets."""
    a, b = _merge(a), _merge(b)
    diff = _subtract(a, b) + _subtract(b, a)
    return max((hi - lo for lo, hi in diff), default=0.0)


# -- phase maps ---------------------------------------------------------------

@dataclass
class PhaseGrid:
    """Gap map over (kappa, mu). Arrays are indexed [kappa_index, mu_index].

    ``intervals[i]`` lists the exact Mott intervals (mu_lo, mu_hi, label) of
    row i, clipped to the mu axis.
    """

    kappa: np.ndarray
    mu: np.ndarray
    gap: np.ndarray
    particle_gap: np.ndarray
    hole_gap: np.ndarray
    label: np.ndarray
    fillings: list
    sites: tuple
    intervals: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)

    @property
    def beta(self) -> float:
        return self.sites[0].beta

    def mott_mask(self) -> np.ndarray:
        return self.gap > MOTT_THRESHOLD * self.beta

    def lobe_count(self, row: int) -> int:
        return len(self.intervals[row])

    def mott_set(self, row: int):
        return _merge((lo, hi) for lo, hi, _ in self.intervals[row])


def _check_axis(axis, name):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size < 1:
        raise ValueError(f"{name} axis must be a non-empty 1D array")
    if axis.size > 1 and np.any(np.diff(axis) <= 0):
        raise ValueError(f"{name} axis must be strictly increasing")
    return axis


def _row(args):
    sites, kappa, mu_axis, fillings, k_count = args
    beta = sites[0].beta
    n = mu_axis.size
    pg = np.full(n, np.nan)
    hg = np.full(n, np.nan)
    labels = np.full(n, FAILED, dtype=object)
    errors = {}
    intervals = []
    patterns = {}
    for j, f in enumerate(fillings):
        if isinstance(f, str):
            errors[j] = f
            continue
        patterns.setdefault(f, []).append(j)
    for pattern, cols in patterns.items():
        try:
            lower, upper = lobe_edges(pattern, sites, kappa, k_count)
        except JCHError as exc:
            for j in cols:
                errors[j] = f"{type(exc).__name__}: {exc}"
            continue
        cols = np.array(cols)
        mus = mu_axis[cols]
        pg[cols] = upper - mus
        hg[cols] = mus - lower
        gmin = np.minimum(pg[cols], hg[cols])
        labels[cols] = np.where(gmin > MOTT_THRESHOLD * beta, pattern_label(pattern), SUPERFLUID)
        a, b = pattern_interval(sites, pattern)
        lo = max(a, lower, mu_axis[0])
        hi = min(b, upper, mu_axis[-1])
        if hi > lo:
            intervals.append((lo, hi, pattern_label(pattern)))
    gap = np.clip(np.minimum(pg, hg), 0.0, None)
    gap[labels == SUPERFLUID] = 0.0
    intervals.sort()
    return gap, pg, hg, labels, intervals, errors


def gap_map(sites, kappa_axis, mu_axis, k_count: int = DEFAULT_K_COUNT,
            n_max: int = DEFAULT_N_MAX, workers: int = 1) -> PhaseGrid:
    """Phase map of a periodic cell over (kappa, mu).

    Each point uses the zero-hopping filling pattern at its mu. Points whose
    pattern cannot be determined or solved are labelled ``ERR`` (gap NaN)
    with the reason kept in ``errors``; the rest of the grid is unaffected.
    """
    sites = tuple(sites)
    kappa_axis = _check_axis(kappa_axis, "kappa")
    mu_axis = _check_axis(mu_axis, "mu")
    if np.any(kappa_axis < 0):
        raise ValueError("kappa axis must be non-negative")

    fillings = []
    for mu in mu_axis:
        try:
            fillings.append(doped_background(sites, mu, n_max))
        except JCHError as exc:
            fillings.append(f"{type(exc).__name__}: {exc}")

    jobs = [(sites, float(kap), mu_axis, fillings, k_count) for kap in kappa_axis]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, jobs))
    else:
        rows = [_row(job) for job in jobs]

    shape = (kappa_axis.size, mu_axis.size)
    grid = PhaseGrid(
        kappa=kappa_axis,
        mu=mu_axis,
        gap=np.empty(shape),
        particle_gap=np.empty(shape),
        hole_gap=np.empty(shape),
        label=np.empty(shape, dtype=object),
        fillings=fillings,
        sites=sites,
    )
    for i, (gap, pg, hg, labels, intervals, errors) in enumerate(rows):
        grid.gap[i], grid.particle_gap[i], grid.hole_gap[i], grid.label[i] = gap, pg, hg, labels
        grid.intervals.append(intervals)
        for j, msg in errors.items():
            grid.errors[(i, j)] = msg
    return grid


def intersection_check(tuned: PhaseGrid, detuned: PhaseGrid, doped: PhaseGrid,
                       kappa_max_small: float = 1e-3, mu_tol: float | None = None):
    """Compare the doped Mott set with the pointwise intersection of the other two.

    Only rows with kappa <= kappa_max_small enter. Returns (ok, deviation)
    where deviation is the largest mismatch, in mu, over those rows.
    """
    for other in (detuned, doped):
        if not (np.array_equal(other.kappa, tuned.kappa) and np.array_equal(other.mu, tuned.mu)):
            raise ValueError("phase grids must share their kappa and mu axes")
    if mu_tol is None:
        mu_tol = 1e-3 * tuned.beta
    rows = np.flatnonzero(tuned.kappa <= kappa_max_small)
    if rows.size == 0:
        raise ValueError(f"no grid rows with kappa <= {kappa_max_small}")
    deviation = 0.0
    for i in rows:
        expected = _intersect(tuned.mott_set(i), detuned.mott_set(i))
        deviation = max(deviation, set_deviation(doped.mott_set(i), expected))
    return deviation <= mu_tol, deviation


def minimal_excitation(grid: PhaseGrid) -> np.ndarray:
    """'particle', 'hole' or '' per point, by the smaller raw gap inside Mott regions."""
    out = np.full(grid.gap.shape, "", dtype=object)
    mott = grid.mott_mask()
    out[mott & (grid.particle_gap < grid.hole_gap)] = "particle"
    out[mott & (grid.hole_gap < grid.particle_gap)] = "hole"
    return out
