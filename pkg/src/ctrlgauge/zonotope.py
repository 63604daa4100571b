"""Origin-centred zonotopes: vertices, support, volume, projections, shape.

A zonotope here is Z = {sum_k t_k g_k : t_k in [-1, 1]} for generators g_k,
stored as the rows of an (m, n) array. Controllability regions of
discrete-time linear systems under unit input amplitude bounds are exactly
such sets, so this module carries the geometric half of the analysis.

Vertex enumeration never walks all 2^m sign patterns on the main path:

* n = 1 and rank 1: the two extreme sums.
* n = 2 (and rank-2 slices of higher dimensions): generators are flipped
  into the upper half-plane, merged when parallel, and sorted by angle;
  walking the sorted list yields the 2q polygon vertices directly.
* n = 3: every facet normal of a rank-3 zonotope is a cross product of two
  generators. Sweeping all pairs, splitting the generators into tied
  (orthogonal to the normal) and decided ones, and enumerating each face
  through the planar walk yields exactly the vertex set.
* n >= 4: full sign enumeration with a convex-hull filter, capped at
  MAX_GENERATORS generators.

Near-ties below 1e-12 (relative) are treated as exact ties and expanded on
both sides; inputs engineered with angle gaps between 1e-12 and 1e-9 are
outside the supported precision envelope.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadAxes,
    DegenerateZonotope,
    DimensionMismatch,
    NotConvex,
    TooManyGenerators,
    ZeroDirection,
)

DEDUP_TOL = 1e-9
RANK_TOL = 1e-9
TIE_TOL = 1e-12
MAX_GENERATORS = 20


class Zonotope:
    """Origin-symmetric zonotope given by generator rows (m, n)."""

    def __init__(self, generators):
        G = np.asarray(generators, dtype=float)
        if G.ndim == 1:
            G = G.reshape(1, -1)
        if G.ndim != 2 or G.shape[0] < 1 or G.shape[1] < 1:
            raise DimensionMismatch(
                f"generators must form a non-empty (m, n) array, got shape {G.shape}"
            )
        if not np.isfinite(G).all():
            raise DimensionMismatch("generators contain non-finite entries")
        self.generators = G.copy()
        self.generators.flags.writeable = False

    @property
    def m(self):
        return self.generators.shape[0]

    @property
    def n(self):
        return self.generators.shape[1]

    def __repr__(self):
        return f"Zonotope(m={self.m}, n={self.n})"

    def support(self, direction):
        """Support function h(d) = sum_k |d . g_k|."""
        d = np.asarray(direction, dtype=float).ravel()
        if d.size != self.n:
            raise DimensionMismatch(f"direction must have length {self.n}")
        if not np.isfinite(d).all() or not np.any(d):
            raise ZeroDirection("direction must be nonzero and finite")
        return float(np.abs(self.generators @ d).sum())

    def rank(self, tol=RANK_TOL):
        return _rank(self.generators, tol)

    def vertices(self):
        """All vertices as rows, deduplicated at 1e-9, lexicographically sorted."""
        if self.m > MAX_GENERATORS:
            raise TooManyGenerators(
                f"{self.m} generators exceed the enumeration cap {MAX_GENERATORS}"
            )
        return _vertices(self.generators)

    def volume(self):
        """Exact volume 2^n * sum over n-subsets of |det|; 0 when flat."""
        m, n = self.m, self.n
        if m < n or _rank(self.generators) < n:
            return 0.0
        subsets = np.array(list(itertools.combinations(range(m), n)))
        mats = self.generators[subsets]
        return float(2.0**n * np.abs(np.linalg.det(mats)).sum())

    def project_2d(self, axes):
        """Project onto two coordinate axes and build the polygon outline.

        Returns a Polygon2D whose points run counterclockwise; flat
        projections (rank below 2) come back flagged degenerate.
        """
        axes = _check_axes(axes, self.n)
        pgens = self.generators[:, list(axes)]
        scale = max(1.0, float(np.abs(pgens).max(initial=0.0)))
        keep = np.linalg.norm(pgens, axis=1) > TIE_TOL * scale
        pgens = pgens[keep]
        if pgens.shape[0] == 0:
            return Polygon2D(points=np.zeros((1, 2)), degenerate=True, axes=axes)
        merged = _merge_parallel(pgens)
        if merged.shape[0] == 1:
            h = merged[0]
            return Polygon2D(points=np.vstack([-h, h]), degenerate=True, axes=axes)
        start = -merged.sum(axis=0)
        pts = [start]
        for h in merged:
            pts.append(pts[-1] + 2.0 * h)
        for h in merged[:-1]:
            pts.append(pts[-1] - 2.0 * h)
        return Polygon2D(points=np.asarray(pts), degenerate=False, axes=axes)

    def shape_report(self):
        """Volume, circumscribing-box sides, and shape factors in [0, 1].

        The overall factor compares the volume against the box volume; the
        planar factors compare each 2-D projection's area against the
        projected box area. Degenerate axes produce zero factors.
        """
        G = self.generators
        n = self.n
        rank = _rank(G)
        half = np.abs(G).sum(axis=0)
        side_lengths = 2.0 * half
        vol = self.volume()
        box = float(np.prod(side_lengths)) if n >= 1 else 0.0
        overall = vol / box if box > 0.0 else 0.0
        planar = {}
        for i, j in itertools.combinations(range(n), 2):
            denom = 4.0 * half[i] * half[j]
            if denom <= 0.0:
                planar[(i, j)] = 0.0
                continue
            poly = self.project_2d((i, j))
            planar[(i, j)] = polygon_area(poly) / denom
        return ShapeReport(
            volume=vol,
            side_lengths=side_lengths,
            overall_shape_factor=overall,
            planar_shape_factors=planar,
            rank=rank,
        )


@dataclass
class Polygon2D:
    """Planar polygon outline; points are (k, 2), counterclockwise."""

    points: np.ndarray
    degenerate: bool = False
    axes: tuple | None = None


@dataclass
class ShapeReport:
    volume: float
    side_lengths: np.ndarray
    overall_shape_factor: float
    planar_shape_factors: dict
    rank: int

    def to_dict(self):
        return {
            "volume": self.volume,
            "sideLengths": self.side_lengths.tolist(),
            "overallShapeFactor": self.overall_shape_factor,
            "planarShapeFactors": {
                f"x{i + 1},x{j + 1}": v
                for (i, j), v in sorted(self.planar_shape_factors.items())
            },
            "rank": self.rank,
        }


def polygon_area(poly):
    """Shoelace area of a convex counterclockwise polygon.

    Degenerate polygons (fewer than three points) have area zero. Concave
    or clockwise inputs raise NotConvex.
    """
    pts = poly.points if isinstance(poly, Polygon2D) else np.asarray(poly, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DimensionMismatch("polygon points must be a (k, 2) array")
    k = pts.shape[0]
    if k < 3:
        return 0.0
    scale = max(1.0, float(np.abs(pts).max()))
    tol = 1e-9 * scale * scale
    x, y = pts[:, 0], pts[:, 1]
    signed = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    if signed < -tol:
        raise NotConvex("polygon is clockwise; counterclockwise order required")
    edges = np.roll(pts, -1, axis=0) - pts
    nxt = np.roll(edges, -1, axis=0)
    crosses = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
    if np.any(crosses < -tol):
        raise NotConvex("polygon has a concave corner")
    return abs(signed)


# --- vertex enumeration internals -------------------------------------------


def _rank(G, tol=RANK_TOL):
    s = np.linalg.svd(np.asarray(G, dtype=float), compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, float(s[0]))))


def _check_axes(axes, n):
    try:
        i, j = (int(a) for a in axes)
    except (TypeError, ValueError) as exc:
        raise BadAxes(f"axes must be a pair of integers, got {axes!r}") from exc
    if i == j or not (0 <= i < n) or not (0 <= j < n):
        raise BadAxes(f"axes must be distinct indices in [0, {n}), got ({i}, {j})")
    return (i, j)


def _dedup_rows(pts, tol=DEDUP_TOL):
    """Merge rows closer than tol (max-norm); output stays lexsorted."""
    pts = np.asarray(pts, dtype=float)
    if pts.shape[0] == 0:
        return pts
    order = np.lexsort(pts.T[::-1])
    pts = pts[order]
    kept = [pts[0]]
    arr = pts[0][np.newaxis, :]
    for p in pts[1:]:
        if np.min(np.max(np.abs(arr - p), axis=1)) > tol:
            kept.append(p)
            arr = np.asarray(kept)
    return np.asarray(kept)


def _canonical_flip(pgens):
    """Flip 2-D rows into the upper half-plane; returns (flipped, signs)."""
    flip = np.where(
        (pgens[:, 1] < 0) | ((pgens[:, 1] == 0) & (pgens[:, 0] < 0)), -1.0, 1.0
    )
    return pgens * flip[:, np.newaxis], flip


def _merge_parallel(pgens):
    """Sum parallel 2-D rows after canonical flipping; rows sorted by angle."""
    canon, _ = _canonical_flip(pgens)
    ang = np.arctan2(canon[:, 1], canon[:, 0])
    order = np.argsort(ang, kind="stable")
    merged = []
    last_ang = None
    for idx in order:
        if last_ang is not None and abs(ang[idx] - last_ang) <= TIE_TOL:
            merged[-1] = merged[-1] + canon[idx]
        else:
            merged.append(canon[idx].copy())
            last_ang = ang[idx]
    return np.asarray(merged)


def _planar_vertex_signs(pgens):
    """Sign patterns whose sums are the vertices of a planar zonotope.

    pgens rows must be nonzero. Parallel rows are grouped so they flip
    together; the walk over sorted angles visits each polygon vertex once.
    Returns a list of +-1 arrays aligned with the input rows.
    """
    m = pgens.shape[0]
    canon, flip = _canonical_flip(pgens)
    ang = np.arctan2(canon[:, 1], canon[:, 0])
    order = np.argsort(ang, kind="stable")
    groups = []
    last_ang = None
    for idx in order:
        if last_ang is not None and abs(ang[idx] - last_ang) <= TIE_TOL:
            groups[-1].append(idx)
        else:
            groups.append([idx])
            last_ang = ang[idx]
    if len(groups) == 1:
        return [flip.copy(), -flip]
    chain = []
    cur = -np.ones(m)
    chain.append(cur.copy())
    for g in groups[:-1]:
        cur[list(g)] = 1.0
        chain.append(cur.copy())
    patterns = chain + [-p for p in chain]
    return [p * flip for p in patterns]


def _planar_vertices(pgens):
    pats = _planar_vertex_signs(pgens)
    return np.asarray([p @ pgens for p in pats])


def _face_sweep_vertices(gens):
    """Vertices of a rank-3 zonotope in R^3 via facet-normal sweeping."""
    m = gens.shape[0]
    norms = np.linalg.norm(gens, axis=1)
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            d = np.cross(gens[i], gens[j])
            nd = float(np.linalg.norm(d))
            if nd <= TIE_TOL * norms[i] * norms[j]:
                continue
            b1 = gens[i] / norms[i]
            b2 = np.cross(d / nd, b1)
            for dd in (d, -d):
                dots = gens @ dd
                tied = np.abs(dots) <= TIE_TOL * norms * nd
                sgn = np.where(dots > 0.0, 1.0, -1.0)
                sgn[tied] = 0.0
                base = sgn @ gens
                face = gens[tied]
                plane = face @ np.stack([b1, b2], axis=1)
                for pat in _planar_vertex_signs(plane):
                    out.append(base + pat @ face)
    return np.asarray(out)


def _sign_enum_vertices(gens):
    """Fallback for n >= 4: all sign sums, then a convex-hull filter."""
    from scipy.spatial import ConvexHull, QhullError

    m, n = gens.shape
    keep = np.zeros((0, n))
    chunk_bits = min(m, 16)
    steps = 1 << (m - chunk_bits)
    base_bits = np.arange(1 << chunk_bits, dtype=np.int64)
    low_signs = (
        ((base_bits[:, np.newaxis] >> np.arange(chunk_bits)) & 1) * 2.0 - 1.0
    )
    filtered = False
    for hi in range(steps):
        hi_signs = ((hi >> np.arange(m - chunk_bits)) & 1) * 2.0 - 1.0
        pts = low_signs @ gens[:chunk_bits] + hi_signs @ gens[chunk_bits:]
        pool = np.vstack([keep, pts])
        try:
            hull = ConvexHull(pool)
            keep = pool[hull.vertices]
            filtered = True
        except QhullError:
            # chunk is flat; carry the raw points, the full pool is not flat
            keep = pool
            filtered = False
    if not filtered:
        hull = ConvexHull(keep)
        keep = keep[hull.vertices]
    return keep


def _vertices(G):
    scale = max(1.0, float(np.abs(G).max()))
    n = G.shape[1]
    gens = G[np.linalg.norm(G, axis=1) > TIE_TOL * scale]
    if gens.shape[0] == 0:
        return np.zeros((1, n))
    rank = _rank(gens)
    if rank < n:
        # flatten onto the row space, enumerate there, lift back
        _, _, vt = np.linalg.svd(gens, full_matrices=False)
        basis = vt[:rank]
        reduced = _vertices(gens @ basis.T)
        return _dedup_rows(reduced @ basis)
    if n == 1:
        s = float(np.abs(gens).sum())
        return np.asarray([[-s], [s]])
    if n == 2:
        pts = _planar_vertices(gens)
    elif n == 3:
        pts = _face_sweep_vertices(gens)
    else:
        pts = _sign_enum_vertices(gens)
    return _dedup_rows(pts)


# --- H-representation and membership -----------------------------------------


def _facet_normals(gens):
    """Unit normals covering every facet direction of a full-rank zonotope.

    Facet normals are orthogonal to n-1 independent generators, so rotated
    generators (n = 2), pair cross products (n = 3), and null vectors of
    (n-1)-subsets (n >= 4, capped at MAX_GENERATORS) cover them all. Extra
    non-facet normals are harmless: every support inequality is valid.
    """
    m, n = gens.shape
    if n == 1:
        return np.ones((1, 1))
    norms = np.linalg.norm(gens, axis=1)
    if n == 2:
        cand = np.stack([-gens[:, 1], gens[:, 0]], axis=1)
        return cand / norms[:, np.newaxis]
    if n == 3:
        out = []
        for i in range(m):
            for j in range(i + 1, m):
                d = np.cross(gens[i], gens[j])
                nd = float(np.linalg.norm(d))
                if nd > TIE_TOL * norms[i] * norms[j]:
                    out.append(d / nd)
        return np.asarray(out)
    if m > MAX_GENERATORS:
        raise TooManyGenerators(
            f"{m} generators exceed the H-representation cap {MAX_GENERATORS}"
        )
    out = []
    for subset in itertools.combinations(range(m), n - 1):
        sub = gens[list(subset)]
        s = np.linalg.svd(sub, compute_uv=False)
        if s[0] <= 0.0 or s[-1] <= RANK_TOL * s[0]:
            continue
        _, _, vt = np.linalg.svd(sub, full_matrices=True)
        out.append(vt[-1])
    if not out:
        raise DegenerateZonotope("no facet normals found")
    return np.asarray(out)


def halfspace_representation(z):
    """Exact H-form (unit normals D, offsets c): Z = {x : |D x| <= c}.

    Requires generators spanning R^n; flat zonotopes raise
    DegenerateZonotope (use contains_point for the rank-aware test).
    """
    gens = z.generators
    scale = max(1.0, float(np.abs(gens).max()))
    gens = gens[np.linalg.norm(gens, axis=1) > TIE_TOL * scale]
    if gens.shape[0] == 0 or _rank(gens) < z.n:
        raise DegenerateZonotope("generators do not span the space")
    normals = _facet_normals(gens)
    offsets = np.abs(normals @ gens.T).sum(axis=1)
    return normals, offsets


def contains_point(z, point, tol=DEDUP_TOL):
    """Membership test via the support inequalities; tol is a distance.

    Rank-deficient zonotopes are handled by projecting onto the row space
    after rejecting points that sit farther than tol from it.
    """
    x = np.asarray(point, dtype=float).ravel()
    if x.size != z.n:
        raise DimensionMismatch(f"point must have length {z.n}")
    if not np.isfinite(x).all():
        raise DimensionMismatch("point contains non-finite entries")
    return _contains(z.generators, x, tol)


def _contains(gens, x, tol):
    n = gens.shape[1]
    scale = max(1.0, float(np.abs(gens).max(initial=0.0)))
    gens = gens[np.linalg.norm(gens, axis=1) > TIE_TOL * scale]
    if gens.shape[0] == 0:
        return bool(np.abs(x).max(initial=0.0) <= tol)
    rank = _rank(gens)
    if rank < n:
        _, _, vt = np.linalg.svd(gens, full_matrices=False)
        basis = vt[:rank]
        coords = basis @ x
        resid = x - basis.T @ coords
        if np.abs(resid).max() > tol:
            return False
        return _contains(gens @ basis.T, coords, tol)
    if n == 1:
        return bool(abs(float(x[0])) <= float(np.abs(gens).sum()) + tol)
    normals = _facet_normals(gens)
    offsets = np.abs(normals @ gens.T).sum(axis=1)
    return bool(np.all(np.abs(normals @ x) <= offsets + tol))


# --- polygon exports ---------------------------------------------------------


def polygon_to_csv(poly):
    """CSV text with an "x,y" header; closing vertex not repeated."""
    pts = poly.points if isinstance(poly, Polygon2D) else np.asarray(poly, dtype=float)
    lines = ["x,y"]
    for x, y in pts:
        lines.append(f"{float(x)!r},{float(y)!r}")
    return "\n".join(lines) + "\n"


_SVG_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]


def svg_document(polygons, labels=None):
    """Standalone SVG drawing of one or more polygons, overlaid.

    The viewBox spans the joint bounding box with a 5 percent margin.
    Coordinates are emitted y-up (mirrored into SVG's y-down frame).
    """
    polys = [p.points if isinstance(p, Polygon2D) else np.asarray(p) for p in polygons]
    if not polys:
        raise DimensionMismatch("svg_document needs at least one polygon")
    allpts = np.vstack(polys)
    flipped = allpts * np.array([1.0, -1.0])
    lo = flipped.min(axis=0)
    hi = flipped.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
    margin = 0.05 * span
    x0, y0 = lo - margin
    w, h = (hi - lo) + 2 * margin
    stroke = 0.006 * span
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="640" '
        f'viewBox="{x0:.6g} {y0:.6g} {w:.6g} {h:.6g}">'
    ]
    for k, pts in enumerate(polys):
        color = _SVG_COLORS[k % len(_SVG_COLORS)]
        label = labels[k] if labels and k < len(labels) else None
        title = f"<title>{label}</title>" if label else ""
        mirrored = pts * np.array([1.0, -1.0])
        if mirrored.shape[0] == 1:
            x, y = mirrored[0]
            parts.append(
                f'<circle cx="{x:.6g}" cy="{y:.6g}" r="{stroke:.6g}" '
                f'fill="{color}">{title}</circle>'
            )
            continue
        coords = " L ".join(f"{x:.6g} {y:.6g}" for x, y in mirrored)
        closing = " Z" if mirrored.shape[0] > 2 else ""
        parts.append(
            f'<path d="M {coords}{closing}" fill="none" stroke="{color}" '
            f'stroke-width="{stroke:.6g}">{title}</path>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def polygon_to_svg(poly, label=None):
    return svg_document([poly], labels=[label] if label else None)
