"""Access-point deployment: PPP and hexagonal layouts, worst-position search."""

import csv

import numpy as np
from dataclasses import dataclass, field
from scipy.spatial import cKDTree


@dataclass(frozen=True)
class Region:
    """Square region centered at the origin with side 2*half_width_km."""

    half_width_km: float = 5.0

    def __post_init__(self):
        if not self.half_width_km > 0:
            raise ValueError(f"half_width_km must be > 0, got {self.half_width_km}")

    @property
    def area_km2(self):
        return (2.0 * self.half_width_km) ** 2

    def contains(self, points):
        points = np.atleast_2d(points)
        hw = self.half_width_km
        return np.all(np.abs(points) <= hw + 1e-12, axis=-1)


@dataclass(frozen=True)
class NetworkLayout:
    """AP positions in km plus deployment metadata.

    All antennas of an AP are co-located; antenna i of AP m has flat index
    m * antennas_per_ap + i throughout the package.
    """

    positions: np.ndarray  # (n_aps, 2) km
    antennas_per_ap: int = 1
    deployment_kind: str = "ppp"
    region: Region = field(default_factory=Region)

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "positions", pos)
        if self.antennas_per_ap < 1:
            raise ValueError("antennas_per_ap must be >= 1")
        if self.deployment_kind not in ("ppp", "hexagonal"):
            raise ValueError(f"unknown deployment kind {self.deployment_kind!r}")
        if len(pos) == 0 and self.deployment_kind != "ppp":
            raise ValueError("only a ppp layout may be empty")
        if len(pos) and not self.region.contains(pos).all():
            raise ValueError("all AP positions must lie inside the region")

    @property
    def n_aps(self):
        return len(self.positions)

    @property
    def n_antennas(self):
        return self.n_aps * self.antennas_per_ap

    def antenna_positions(self):
        """Positions repeated per antenna, shape (n_antennas, 2)."""
        return np.repeat(self.positions, self.antennas_per_ap, axis=0)


class NoAccessPointsError(ValueError):
    """Raised when an operation needs at least one AP in the layout."""


def place_ppp(density, region, rng, antennas_per_ap=1):
    """Draw AP positions from a homogeneous Poisson point process.

    Parameters
    ----------
    density : float
        Intensity in APs per km^2 (>= 0).
    region : Region
        Deployment region; positions are i.i.d. uniform over it.
    rng : numpy.random.Generator

    The AP count is Poisson(density * area). No repulsion constraint is
    applied, so APs can be arbitrarily close to each other.
    """
    if density < 0:
        raise ValueError(f"density must be >= 0, got {density}")
    n = rng.poisson(density * region.area_km2)
    hw = region.half_width_km
    positions = rng.uniform(-hw, hw, size=(n, 2))
    return NetworkLayout(positions, antennas_per_ap, "ppp", region)


def hex_spacing(density):
    """Nearest-neighbor spacing of a triangular lattice with the given density."""
    return np.sqrt(2.0 / (np.sqrt(3.0) * density))


def place_hex(density, region, antennas_per_ap=1):
    """Deterministic triangular ("hexagonal") lattice clipped to the region.

    Every interior AP has six equidistant neighbors at distance
    s = sqrt(2 / (sqrt(3) * density)). The lattice is anchored with one point
    at the origin and then translated by half a cell, (s/2, s*sqrt(3)/4), so
    the origin terminal does not sit on a lattice point.
    """
    if density <= 0:
        raise ValueError(f"density must be > 0, got {density}")
    s = hex_spacing(density)
    row_step = s * np.sqrt(3.0) / 2.0
    hw = region.half_width_km
    shift = np.array([s / 2.0, row_step / 2.0])
    jmax = int(np.ceil((hw + abs(shift[1])) / row_step)) + 1
    imax = int(np.ceil((hw + abs(shift[0])) / s)) + 1
    rows = []
    for j in range(-jmax, jmax + 1):
        xoff = (s / 2.0) if (j % 2) else 0.0
        xs = np.arange(-imax, imax + 1) * s + xoff + shift[0]
        ys = np.full_like(xs, j * row_step + shift[1])
        rows.append(np.column_stack([xs, ys]))
    pts = np.concatenate(rows)
    pts = pts[np.all(np.abs(pts) <= hw, axis=1)]
    return NetworkLayout(pts, antennas_per_ap, "hexagonal", region)


def mean_nn_spacing(layout):
    """Mean nearest-neighbor distance between APs (km)."""
    if layout.n_aps < 2:
        raise NoAccessPointsError("need at least two APs for a spacing estimate")
    tree = cKDTree(layout.positions)
    d, _ = tree.query(layout.positions, k=2)
    return float(d[:, 1].mean())


def worst_position(layout, grid_resolution=None, region=None):
    """Grid point maximizing the minimum distance to any AP.

    Parameters
    ----------
    layout : NetworkLayout
    grid_resolution : float, optional
        Grid step in km. Defaults to one tenth of the mean nearest-neighbor
        spacing (or half_width/20 for a single-AP layout).
    region : Region, optional
        Search region; defaults to the layout's region. Ties are broken by
        the lowest row-major grid index.

    A finite grid finds a "bad" position, not necessarily the worst one,
    which is all the power heuristic needs.
    """
    if layout.n_aps == 0:
        raise NoAccessPointsError("worst_position needs a non-empty layout")
    region = region or layout.region
    if grid_resolution is None:
        if layout.n_aps < 2:
            grid_resolution = region.half_width_km / 20.0
        else:
            grid_resolution = mean_nn_spacing(layout) / 10.0
    hw = region.half_width_km
    axis = np.arange(-hw, hw + grid_resolution / 2.0, grid_resolution)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    tree = cKDTree(layout.positions)
    dmin, _ = tree.query(grid, k=1)
    best = int(np.argmax(dmin))  # argmax returns the first (lowest) index on ties
    return grid[best].copy()


def write_layout_csv(path, layout, grouping=None):
    """Export a layout as CSV with columns x_km, y_km, antennas[, group].

    When a grouping is given its per-antenna assignment is collapsed to one
    row per antenna (x/y repeated for co-located antennas).
    """
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        if grouping is None:
            writer.writerow(["x_km", "y_km", "antennas"])
            for x, y in layout.positions:
                writer.writerow([f"{x:.17g}", f"{y:.17g}", layout.antennas_per_ap])
        else:
            writer.writerow(["x_km", "y_km", "antennas", "group"])
            pos = layout.antenna_positions()
            for (x, y), g in zip(pos, grouping.assignment):
                writer.writerow([f"{x:.17g}", f"{y:.17g}", layout.antennas_per_ap, int(g)])


def read_layout_csv(path, deployment_kind="ppp", region=None):
    """Import a layout written by :func:`write_layout_csv` (group column ignored)."""
    positions = []
    antennas = 1
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not {"x_km", "y_km", "antennas"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns x_km,y_km,antennas")
        for row in reader:
            positions.append((float(row["x_km"]), float(row["y_km"])))
            antennas = int(row["antennas"])
    positions = np.array(positions, dtype=float).reshape(-1, 2)
    if "group" in (reader.fieldnames or []):  # one row per antenna: deduplicate
        positions = positions[::antennas]
    if region is None:
        hw = max(5.0, float(np.abs(positions).max()) if len(positions) else 5.0)
        region = Region(hw)
    return NetworkLayout(positions, antennas, deployment_kind, region)
