"""Strip-partitioned rectangles, region chains, and conforming triangulations.

The geometric setting is deliberately narrow: an axis-aligned rectangle cut
into N horizontal strips of equal thickness, optionally extended by one extra
strip glued below the bottom edge.  Every boundary between consecutive strips
is a flat horizontal segment, which is the structure the singular-solution
and probe machinery in the rest of the library relies on.

Meshes are structured right-triangle grids whose node rows always contain the
strip interfaces, so every triangle lies in exactly one region.  A concentric
ring triangulation of a disk is provided as a second, single-region domain
for spectral oracles.
"""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "InvalidSpecError",
    "NoChainError",
    "TooCoarseError",
    "GeometryError",
    "Rect",
    "Region",
    "Interface",
    "Partition",
    "Chain",
    "Mesh",
    "build_partition",
    "build_chain",
    "generate_mesh",
    "generate_disk_mesh",
    "write_mesh",
    "read_mesh",
    "mesh_hash",
]

MIN_ANGLE_FLOOR_DEG = 20.0


class InvalidSpecError(ValueError):
    """Partition request that cannot be realized."""


class NoChainError(ValueError):
    """No admissible chain of regions reaches the requested target."""


class TooCoarseError(ValueError):
    """Mesh size does not resolve the strip structure."""


class GeometryError(ValueError):
    """Geometric query outside its domain of validity."""


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise InvalidSpecError(f"degenerate rectangle {self!r}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, p, tol: float = 0.0) -> bool:
        x, y = float(p[0]), float(p[1])
        return (self.x0 - tol <= x <= self.x1 + tol
                and self.y0 - tol <= y <= self.y1 + tol)


@dataclass(frozen=True)
class Region:
    """One horizontal strip.  Label 0 is reserved for the extension strip."""

    label: int
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def thickness(self) -> float:
        return self.y1 - self.y0

    def polygon(self) -> np.ndarray:
        return np.array([[self.x0, self.y0], [self.x1, self.y0],
                         [self.x1, self.y1], [self.x0, self.y1]])

    def contains(self, p, tol: float = 0.0) -> bool:
        x, y = float(p[0]), float(p[1])
        return (self.x0 - tol <= x <= self.x1 + tol
                and self.y0 - tol <= y <= self.y1 + tol)


@dataclass(frozen=True)
class Interface:
    """Flat segment between the regions `below` and `above` at height `y`.

    Index 1 is the bottom edge of the coefficient-carrying rectangle; with an
    extension strip its `below` is label 0, otherwise None (domain boundary).
    The marked point is the segment midpoint.
    """

    index: int
    y: float
    x0: float
    x1: float
    below: int | None
    above: int
    point: tuple[float, float]

    @property
    def length(self) -> float:
        return self.x1 - self.x0


@dataclass(frozen=True)
class Partition:
    domain: Rect          # full meshed rectangle, includes the extension strip
    omega: Rect           # rectangle carrying the N unknown coefficients
    regions: tuple[Region, ...]
    interfaces: tuple[Interface, ...]
    r0: float
    L: float
    A: float
    n_strips: int
    with_extension: bool

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(r.label for r in self.regions)

    @property
    def strip_thickness(self) -> float:
        return self.r0

    def region_by_label(self, label: int) -> Region:
        for r in self.regions:
            if r.label == label:
                return r
        raise GeometryError(f"no region labelled {label}")

    def interface_by_index(self, index: int) -> Interface:
        for s in self.interfaces:
            if s.index == index:
                return s
        raise GeometryError(f"no interface with index {index}")

    def region_of_point(self, p) -> int:
        """Label of the region containing p (ties resolved upward)."""
        x, y = float(p[0]), float(p[1])
        if not self.domain.contains((x, y)):
            raise GeometryError(f"point {(x, y)} outside the domain")
        for r in self.regions:
            if r.y0 <= y < r.y1:
                return r.label
        return self.regions[-1].label

    def w_labels(self, k: int) -> set[int]:
        """Labels of the explored set: strips 1..k plus the extension."""
        out = set(range(1, k + 1))
        if self.with_extension:
            out.add(0)
        return out & set(self.labels)

    def u_labels(self, k: int) -> set[int]:
        """Labels of the unexplored set: strips k+1..N (never the extension)."""
        return set(range(k + 1, self.n_strips + 1))

    def chain_set_contains(self, p, tol: float = 1e-12) -> bool:
        """Membership in the probe set K.

        K is the middle-third vertical column of the strip stack (so it meets
        every interface well away from the lateral sides), together with the
        deep half of the extension strip when one is present.
        """
        x, y = float(p[0]), float(p[1])
        third = self.omega.width / 3.0
        in_column = (self.omega.x0 + third - tol <= x <= self.omega.x1 - third + tol
                     and self.domain.y0 - tol <= y <= self.omega.y1 + tol)
        if in_column:
            return True
        if self.with_extension:
            # K0: full-width part of the extension at depth >= r0/2
            if (self.domain.x0 - tol <= x <= self.domain.x1 + tol
                    and self.domain.y0 - tol <= y <= self.omega.y0 - self.r0 / 2 + tol):
                return True
        return False


@dataclass(frozen=True)
class Chain:
    """Ordered region labels from the boundary strip to a target region."""

    regions: tuple[int, ...]
    links: tuple[int, ...]    # interface index joining regions[i], regions[i+1]

    def __post_init__(self):
        if len(set(self.regions)) != len(self.regions):
            raise NoChainError("chain repeats a region")
        if len(self.links) != max(len(self.regions) - 1, 0):
            raise NoChainError("chain links do not match its regions")

    @property
    def depth(self) -> int:
        return len(self.regions)


def build_partition(n_strips: int, rect=(0.0, 0.0, 1.0, 1.0),
                    with_extension: bool = False) -> Partition:
    """Split `rect` into `n_strips` equal horizontal strips.

    Strips are labelled 1 (bottom) to N (top); interface k >= 2 sits between
    strips k-1 and k.  Interface 1 is the bottom edge of `rect`; with
    `with_extension` a strip of thickness r0 and label 0 is glued below it.
    r0 equals the strip thickness, the flatness constant L is 0, and A is the
    rectangle area measured in units of r0^2.
    """
    if not isinstance(n_strips, int) or n_strips < 1:
        raise InvalidSpecError(f"strip count must be a positive integer, got {n_strips}")
    omega = rect if isinstance(rect, Rect) else Rect(*map(float, rect))
    t = omega.height / n_strips
    r0 = t

    regions = []
    lo = omega.y0 - r0 if with_extension else omega.y0
    if with_extension:
        regions.append(Region(0, omega.x0, omega.x1, omega.y0 - r0, omega.y0))
    for j in range(1, n_strips + 1):
        regions.append(Region(j, omega.x0, omega.x1,
                              omega.y0 + (j - 1) * t, omega.y0 + j * t))

    interfaces = []
    mid = 0.5 * (omega.x0 + omega.x1)
    interfaces.append(Interface(1, omega.y0, omega.x0, omega.x1,
                                0 if with_extension else None, 1, (mid, omega.y0)))
    for k in range(2, n_strips + 1):
        yk = omega.y0 + (k - 1) * t
        interfaces.append(Interface(k, yk, omega.x0, omega.x1, k - 1, k, (mid, yk)))

    domain = Rect(omega.x0, lo, omega.x1, omega.y1)
    return Partition(domain=domain, omega=omega, regions=tuple(regions),
                     interfaces=tuple(interfaces), r0=r0, L=0.0,
                     A=omega.area / r0 ** 2, n_strips=n_strips,
                     with_extension=with_extension)


def build_chain(p: Partition, target: int) -> Chain:
    """Shortest chain of regions from the boundary strip to `target`.

    The chain starts at the extension strip when present, otherwise at strip 1,
    and moves through listed interfaces only.
    """
    labels = set(p.labels)
    if target not in labels:
        raise NoChainError(f"target region {target} not in partition labels {sorted(labels)}")
    start = 0 if p.with_extension else 1

    adj: dict[int, list[tuple[int, int]]] = {lbl: [] for lbl in labels}
    for s in p.interfaces:
        if s.below is not None and s.below in labels and s.above in labels:
            adj[s.below].append((s.above, s.index))
            adj[s.above].append((s.below, s.index))

    prev: dict[int, tuple[int, int]] = {}
    seen = {start}
    queue = [start]
    while queue:
        cur = queue.pop(0)
        if cur == target:
            break
        for nxt, link in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                prev[nxt] = (cur, link)
                queue.append(nxt)
    if target not in seen:
        raise NoChainError(f"region {target} is not reachable from region {start}")

    regions = [target]
    links = []
    while regions[-1] != start:
        cur, link = prev[regions[-1]]
        links.append(link)
        regions.append(cur)
    return Chain(regions=tuple(reversed(regions)), links=tuple(reversed(links)))


@dataclass
class Mesh:
    """Interface-conforming triangulation.

    Nodes are 2D points; triangle rows hold node triples plus the label of the
    region containing the triangle.  `boundary_nodes` walks the outer boundary
    counterclockwise and fixes the trace-basis ordering used by the boundary
    operators.  `interface_edges` maps an interface index to its node-pair
    rows.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    tri_region: np.ndarray
    boundary_nodes: np.ndarray
    interface_edges: dict[int, np.ndarray]
    h: float
    partition: Partition | None = None
    disk: tuple[float, float, float] | None = None   # (cx, cy, radius)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def boundary_edges(self) -> np.ndarray:
        bn = self.boundary_nodes
        return np.stack([bn, np.roll(bn, -1)], axis=1)

    def interior_nodes(self) -> np.ndarray:
        mask = np.ones(self.n_nodes, dtype=bool)
        mask[self.boundary_nodes] = False
        return np.nonzero(mask)[0]

    def tri_points(self) -> np.ndarray:
        return self.nodes[self.triangles]

    def areas(self) -> np.ndarray:
        if "areas" not in self._cache:
            pts = self.tri_points()
            e1 = pts[:, 1] - pts[:, 0]
            e2 = pts[:, 2] - pts[:, 0]
            self._cache["areas"] = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        return self._cache["areas"]

    def centroids(self) -> np.ndarray:
        if "centroids" not in self._cache:
            self._cache["centroids"] = self.tri_points().mean(axis=1)
        return self._cache["centroids"]

    def min_angle_deg(self) -> float:
        pts = self.tri_points()
        ang = []
        for i in range(3):
            a = pts[:, (i + 1) % 3] - pts[:, i]
            b = pts[:, (i + 2) % 3] - pts[:, i]
            na = np.linalg.norm(a, axis=1)
            nb = np.linalg.norm(b, axis=1)
            cosv = np.clip((a * b).sum(1) / (na * nb), -1.0, 1.0)
            ang.append(np.degrees(np.arccos(cosv)))
        return float(np.min(ang))

    def contains_ball(self, center, radius: float) -> bool:
        cx, cy = float(center[0]), float(center[1])
        if self.disk is not None:
            dx, dy, R = self.disk
            return math.hypot(cx - dx, cy - dy) + radius <= R + 1e-12
        lo = self.nodes.min(axis=0)
        hi = self.nodes.max(axis=0)
        return (lo[0] <= cx - radius and cx + radius <= hi[0]
                and lo[1] <= cy - radius and cy + radius <= hi[1])


def _orient_ccw(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    pts = nodes[tris]
    e1 = pts[:, 1] - pts[:, 0]
    e2 = pts[:, 2] - pts[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    flip = det < 0
    tris = tris.copy()
    tris[flip, 1], tris[flip, 2] = tris[flip, 2].copy(), tris[flip, 1].copy()
    return tris


def _subdivisions(extent: float, h: float) -> int:
    return max(1, int(math.ceil(extent / h - 1e-9)))


def generate_mesh(p: Partition, h: float) -> Mesh:
    """Structured right-triangle mesh of the partitioned rectangle.

    Each strip is subdivided into ceil(thickness/h) node rows, so every
    interface line is a row of nodes and conformity holds by construction.
    When h divides the strip thickness exactly, halving h doubles every
    subdivision count and the refined node set nests the coarse one.
    """
    if not (h > 0):
        raise InvalidSpecError(f"mesh size must be positive, got {h}")
    tmin = min(r.thickness for r in p.regions)
    if h >= tmin:
        raise TooCoarseError(f"mesh size {h} does not resolve strip thickness {tmin}")

    dom = p.domain
    nx = _subdivisions(dom.width, h)
    xs = np.linspace(dom.x0, dom.x1, nx + 1)

    ys_parts = [np.array([dom.y0])]
    row_region = []   # region label per cell row
    for r in sorted(p.regions, key=lambda r: r.y0):
        ny = _subdivisions(r.thickness, h)
        ys_parts.append(np.linspace(r.y0, r.y1, ny + 1)[1:])
        row_region.extend([r.label] * ny)
    ys = np.concatenate(ys_parts)
    nyrows = len(ys) - 1

    xx, yy = np.meshgrid(xs, ys)
    nodes = np.column_stack([xx.ravel(), yy.ravel()])
    W = nx + 1

    cells_i, cells_j = np.meshgrid(np.arange(nx), np.arange(nyrows))
    v00 = cells_j.ravel() * W + cells_i.ravel()
    v10 = v00 + 1
    v01 = v00 + W
    v11 = v01 + 1
    tris = np.empty((2 * nx * nyrows, 3), dtype=np.int64)
    tris[0::2] = np.column_stack([v00, v10, v11])
    tris[1::2] = np.column_stack([v00, v11, v01])
    region_per_cell = np.repeat(np.asarray(row_region, dtype=np.int64), nx)
    tri_region = np.repeat(region_per_cell, 2)

    bottom = np.arange(0, W)
    right = np.arange(2 * W - 1, nyrows * W + W, W)
    top = np.arange(nyrows * W + nx - 1, nyrows * W - 1, -1)
    left = np.arange((nyrows - 1) * W, 0, -W)
    boundary_nodes = np.concatenate([bottom, right, top, left])

    iface_edges: dict[int, np.ndarray] = {}
    for s in p.interfaces:
        rows = np.nonzero(np.abs(ys - s.y) <= 1e-12 * max(1.0, abs(s.y)) + 1e-15)[0]
        if len(rows) != 1:
            raise GeometryError(f"interface {s.index} not aligned with a node row")
        base = rows[0] * W
        ids = base + np.arange(W)
        iface_edges[s.index] = np.column_stack([ids[:-1], ids[1:]])

    mesh = Mesh(nodes=nodes, triangles=_orient_ccw(nodes, tris),
                tri_region=tri_region, boundary_nodes=boundary_nodes,
                interface_edges=iface_edges, h=float(h), partition=p)
    if mesh.min_angle_deg() < MIN_ANGLE_FLOOR_DEG:
        raise GeometryError("mesh quality below the minimum angle floor")
    return mesh


def generate_disk_mesh(h: float, radius: float = 1.0, center=(0.0, 0.0)) -> Mesh:
    """Concentric-ring triangulation of a disk, single region labelled 1.

    Ring i carries 6*i nodes, giving near-equilateral triangles throughout.
    The outermost ring, walked counterclockwise from angle 0, is the boundary
    trace basis.
    """
    if not (0 < h < radius):
        raise TooCoarseError(f"mesh size {h} invalid for disk radius {radius}")
    m = max(2, int(round(radius / h)))
    cx, cy = float(center[0]), float(center[1])

    pts = [(cx, cy)]
    ring_ids = [np.array([0])]
    for i in range(1, m + 1):
        n_i = 6 * i
        th = 2 * np.pi * np.arange(n_i) / n_i
        r_i = radius * i / m
        start = len(pts)
        pts.extend(zip(cx + r_i * np.cos(th), cy + r_i * np.sin(th)))
        ring_ids.append(start + np.arange(n_i))
    nodes = np.array(pts)

    tris = []
    inner = ring_ids[0]
    for j in range(6):
        tris.append([0, ring_ids[1][j], ring_ids[1][(j + 1) % 6]])
    for i in range(2, m + 1):
        inner = ring_ids[i - 1]
        outer = ring_ids[i]
        n1, n2 = len(inner), len(outer)
        ia = ib = 0
        while ia < n1 or ib < n2:
            a_next = (ia + 1) / n1
            b_next = (ib + 1) / n2
            if ib < n2 and (ia == n1 or b_next <= a_next):
                tris.append([outer[ib % n2], outer[(ib + 1) % n2], inner[ia % n1]])
                ib += 1
            else:
                tris.append([inner[(ia + 1) % n1], inner[ia % n1], outer[ib % n2]])
                ia += 1
    tris = np.asarray(tris, dtype=np.int64)

    mesh = Mesh(nodes=nodes, triangles=_orient_ccw(nodes, tris),
                tri_region=np.ones(len(tris), dtype=np.int64),
                boundary_nodes=ring_ids[m],
                interface_edges={}, h=radius / m, partition=None,
                disk=(cx, cy, radius))
    if mesh.min_angle_deg() < MIN_ANGLE_FLOOR_DEG:
        raise GeometryError("disk mesh quality below the minimum angle floor")
    return mesh


# --- plain-text mesh format -------------------------------------------------
#
# mesh v1 <nnodes> <ntris> <nbedges>
# x y            (node lines)
# i j k region   (triangle lines)
# i j            (boundary edge lines)

def _mesh_text(mesh: Mesh) -> str:
    out = io.StringIO()
    be = mesh.boundary_edges
    out.write(f"mesh v1 {mesh.n_nodes} {mesh.n_triangles} {len(be)}\n")
    for x, y in mesh.nodes:
        out.write(f"{float(x)!r} {float(y)!r}\n")
    for (i, j, k), reg in zip(mesh.triangles, mesh.tri_region):
        out.write(f"{i} {j} {k} {reg}\n")
    for i, j in be:
        out.write(f"{i} {j}\n")
    return out.getvalue()


def write_mesh(mesh: Mesh, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(_mesh_text(mesh))


def read_mesh(path) -> Mesh:
    with open(path, "r", encoding="ascii") as f:
        header = f.readline().split()
        if len(header) != 5 or header[0] != "mesh" or header[1] != "v1":
            raise InvalidSpecError(f"unrecognized mesh header {' '.join(header)!r}")
        nn, nt, nb = (int(v) for v in header[2:])
        nodes = np.array([[float(v) for v in f.readline().split()] for _ in range(nn)])
        rows = np.array([[int(v) for v in f.readline().split()] for _ in range(nt)])
        bedges = np.array([[int(v) for v in f.readline().split()] for _ in range(nb)])
    edge_len = np.linalg.norm(nodes[bedges[:, 0]] - nodes[bedges[:, 1]], axis=1)
    return Mesh(nodes=nodes, triangles=rows[:, :3], tri_region=rows[:, 3],
                boundary_nodes=bedges[:, 0], interface_edges={},
                h=float(edge_len.min()))


def mesh_hash(mesh: Mesh) -> str:
    return hashlib.sha256(_mesh_text(mesh).encode("ascii")).hexdigest()
