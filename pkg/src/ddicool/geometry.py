"""Atom arrays and free-space dipole-dipole couplings.

Lengths are in units of the transition wavelength, so the dimensionless pair
distance is ``xi = 2*pi*s``.  The dipole orientation is a unit 3-vector shared
by all atoms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "AtomConfiguration",
    "CouplingMatrices",
    "CoincidentAtomsError",
    "shift_and_decay",
    "pair_couplings",
    "coupling_matrices",
    "find_magic_spacings",
    "magic_spacing",
    "dipole_at_angle",
    "build_single",
    "build_line",
    "build_equilateral_triangle",
    "build_isosceles",
    "build_hexagon_config",
    "MIN_SPACING",
]

Z_HAT = np.array([0.0, 0.0, 1.0])

#: below this the shift diverges too fast to resolve roots reliably
MIN_SPACING = 0.01

#: scan resolution for magic-spacing search, points per wavelength
SCAN_POINTS_PER_WAVELENGTH = 2000


class CoincidentAtomsError(ValueError):
    """Two atoms sit at the same position."""


@dataclass(frozen=True)
class AtomConfiguration:
    """Positions (N x 3, wavelength units), common dipole and target label."""

    positions: np.ndarray
    dipole: np.ndarray = field(default_factory=lambda: Z_HAT.copy())
    target_index: int = 0

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError(f"positions must be an (N, 3) array, got {pos.shape}")
        dip = np.asarray(self.dipole, dtype=float).reshape(3)
        if abs(np.linalg.norm(dip) - 1.0) > 1e-12:
            raise ValueError("dipole must have unit norm")
        if not 0 <= self.target_index < pos.shape[0]:
            raise ValueError(f"target_index {self.target_index} out of range")
        for i in range(pos.shape[0]):
            for j in range(i):
                if np.linalg.norm(pos[i] - pos[j]) == 0.0:
                    raise CoincidentAtomsError(f"coincident atoms {j} and {i}")
        pos.setflags(write=False)
        dip.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "dipole", dip)

    @property
    def n_atoms(self) -> int:
        return self.positions.shape[0]

    def distances(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.linalg.norm(diff, axis=-1)


@dataclass(frozen=True)
class CouplingMatrices:
    """Collective frequency shifts and decay rates between all atom pairs.

    ``shifts`` has zero diagonal, ``decays`` has ``gamma`` on the diagonal.
    Both carry the same energy unit as ``gamma``.
    """

    shifts: np.ndarray
    decays: np.ndarray
    gamma: float

    @property
    def n_atoms(self) -> int:
        return self.shifts.shape[0]

    def scaled(self, shift_factor: float = 1.0, decay_factor: float = 1.0) -> "CouplingMatrices":
        """Copy with the off-diagonal couplings multiplied by the given factors."""
        n = self.n_atoms
        off = ~np.eye(n, dtype=bool)
        decays = self.decays.copy()
        decays[off] *= decay_factor
        return CouplingMatrices(self.shifts * shift_factor, decays, self.gamma)


def shift_and_decay(s, cos_theta, gamma: float = 1.0):
    """Pair shift ``g`` and cross decay ``gamma_cross`` at distance ``s``.

    Vectorized over ``s`` and ``cos_theta``; ``cos_theta`` is the cosine of the
    angle between the dipole and the pair axis.
    """
    s = np.asarray(s, dtype=float)
    xi = 2.0 * np.pi * s
    c2 = np.asarray(cos_theta, dtype=float) ** 2
    transverse = 1.0 - c2
    near = 1.0 - 3.0 * c2
    sin_xi, cos_xi = np.sin(xi), np.cos(xi)
    g = 0.75 * gamma * (
        -transverse * cos_xi / xi + near * (sin_xi / xi**2 + cos_xi / xi**3)
    )
    # (xi cos xi - sin xi) / xi^3 cancels catastrophically for small xi
    x2 = xi * xi
    series = -1 / 3 + x2 * (1 / 30 - x2 * (1 / 840 - x2 / 45360))
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = cos_xi / xi**2 - sin_xi / xi**3
    near_decay = np.where(xi < 0.05, series, direct)
    gamma_cross = 1.5 * gamma * (transverse * np.sinc(xi / np.pi) + near * near_decay)
    return g, gamma_cross


def pair_couplings(separation, dipole, gamma: float) -> tuple[float, float]:
    """Return ``(g, gamma_cross)`` for one pair separated by ``separation``."""
    sep = np.asarray(separation, dtype=float).reshape(3)
    dist = float(np.linalg.norm(sep))
    if dist == 0.0:
        raise CoincidentAtomsError("coincident atoms")
    cos_theta = float(np.dot(dipole, sep)) / dist
    g, gc = shift_and_decay(dist, cos_theta, gamma)
    return float(g), float(gc)


def coupling_matrices(config: AtomConfiguration, gamma: float) -> CouplingMatrices:
    """Assemble shifts and decays for every ordered pair of ``config``."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n = config.n_atoms
    shifts = np.zeros((n, n))
    decays = np.eye(n) * gamma
    for mu in range(n):
        for nu in range(mu + 1, n):
            g, gc = pair_couplings(
                config.positions[mu] - config.positions[nu], config.dipole, gamma
            )
            shifts[mu, nu] = shifts[nu, mu] = g
            decays[mu, nu] = decays[nu, mu] = gc
    return CouplingMatrices(shifts, decays, float(gamma))


def find_magic_spacings(
    theta: float,
    s_range: tuple[float, float] = (MIN_SPACING, 1.0),
    tolerance: float = 1e-12,
    points_per_wavelength: int = SCAN_POINTS_PER_WAVELENGTH,
) -> list[float]:
    """Spacings in ``s_range`` where the pair shift vanishes.

    Roots are bracketed by sign changes on a uniform scan grid and refined to
    ``tolerance``.  Tangential zeros without a sign change are missed.

    Parameters
    ----------
    theta : float
        Angle between dipole and pair axis, in ``[0, pi/2]``.
    s_range : (float, float)
        Search interval in wavelengths; the lower end must be at least
        ``MIN_SPACING``.
    tolerance : float
        Root bracket width on exit.

    Returns
    -------
    list of float
        Ascending magic spacings; empty if there are none.
    """
    lo, hi = map(float, s_range)
    if not (lo >= MIN_SPACING and hi > lo):
        raise ValueError(f"invalid spacing range {s_range!r}")
    if not 0.0 <= theta <= np.pi / 2 + 1e-12:
        raise ValueError("theta must lie in [0, pi/2]")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    cos_theta = np.cos(theta)

    def g(s):
        return float(shift_and_decay(s, cos_theta)[0])

    n_pts = max(int(np.ceil((hi - lo) * points_per_wavelength)) + 1, 2)
    grid = np.linspace(lo, hi, n_pts)
    values = shift_and_decay(grid, cos_theta)[0]
    roots: list[float] = []
    for i in range(n_pts - 1):
        a, b = values[i], values[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0.0:
            roots.append(brentq(g, grid[i], grid[i + 1], xtol=tolerance, rtol=4 * np.finfo(float).eps))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    roots.sort()
    distinct = [r for k, r in enumerate(roots) if k == 0 or r - roots[k - 1] > tolerance]
    return distinct


@lru_cache(maxsize=None)
def magic_spacing() -> float:
    """The first magic spacing for a dipole perpendicular to the pair axis (~0.7133)."""
    return find_magic_spacings(np.pi / 2, (0.5, 1.0))[0]


def dipole_at_angle(theta: float) -> np.ndarray:
    """Unit dipole in the x-z plane at angle ``theta`` from the x axis."""
    return np.array([np.cos(theta), 0.0, np.sin(theta)])


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def build_single(dipole: Sequence[float] = Z_HAT) -> AtomConfiguration:
    return AtomConfiguration(np.zeros((1, 3)), np.asarray(dipole, float), 0)


def build_line(n: int, spacing: float, dipole: Sequence[float] = Z_HAT) -> AtomConfiguration:
    """``n`` atoms along x, target at the end (index 0)."""
    spacing = _positive("spacing", spacing)
    if n < 1:
        raise ValueError("need at least one atom")
    pos = np.zeros((n, 3))
    pos[:, 0] = spacing * np.arange(n)
    return AtomConfiguration(pos, np.asarray(dipole, float), 0)


def build_isosceles(side: float, phi: float, dipole: Sequence[float] = Z_HAT) -> AtomConfiguration:
    """Target at the apex (index 0), two spectators at distance ``side``.

    ``phi`` is the apex angle; ``phi = pi/3`` gives the equilateral triangle and
    ``phi = pi`` a line with the target in the middle.
    """
    side = _positive("side", side)
    if not 0.0 < phi <= np.pi:
        raise ValueError("apex angle must lie in (0, pi]")
    half = phi / 2.0
    pos = np.array(
        [
            [0.0, 0.0, 0.0],
            [-side * np.sin(half), -side * np.cos(half), 0.0],
            [side * np.sin(half), -side * np.cos(half), 0.0],
        ]
    )
    return AtomConfiguration(pos, np.asarray(dipole, float), 0)


def build_equilateral_triangle(side: float, dipole: Sequence[float] = Z_HAT) -> AtomConfiguration:
    return build_isosceles(side, np.pi / 3, dipole)


def build_hexagon_config(
    vertex_subset: Iterable[int], side: float, dipole: Sequence[float] = Z_HAT
) -> AtomConfiguration:
    """Target at the hexagon center (index 0), spectators on chosen vertices.

    Vertex ``k`` sits at angle ``k*pi/3`` on a circle of radius ``side``, so
    every spectator is one side length from the target.  Spectators are ordered
    by vertex index.
    """
    side = _positive("side", side)
    verts = sorted(set(int(v) for v in vertex_subset))
    if not verts:
        raise ValueError("vertex subset must be non-empty")
    if verts[0] < 0 or verts[-1] > 5:
        raise ValueError("hexagon vertex indices must lie in 0..5")
    angles = np.array(verts) * np.pi / 3
    pos = np.zeros((len(verts) + 1, 3))
    pos[1:, 0] = side * np.cos(angles)
    pos[1:, 1] = side * np.sin(angles)
    return AtomConfiguration(pos, np.asarray(dipole, float), 0)
