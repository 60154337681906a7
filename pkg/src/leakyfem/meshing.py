"""Interface-conforming triangulation and degree-of-freedom maps.

triangulate() meshes the truncation box of a geometry with the interface
segments as constrained edges, refined to a target edge length and a
minimum-angle bound.  build_dofs() produces the two discrete spaces: a
continuous one (one dof per free node) and a broken one in which nodes on
the interface carry one dof per side, realizing functions that may jump
across the interface.

Optional inner rings (axis-aligned boxes at smaller halfwidths) can be
constrained into the mesh; restricting the assembled problem to nodes
strictly inside a ring then reproduces the smaller-box problem exactly,
which makes box-truncation studies monotone by construction.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import delaunay
from .errors import DomainError, MeshingError
from .geometry import InterfaceGeometry, OMEGA1, OMEGA2

CONTINUOUS = "continuous"
BROKEN = "broken"

_SHUFFLE_SEED = 987654321


@dataclass(frozen=True)
class Mesh:
    """Conforming triangulation of the truncation box.

    nodes            (N, 2) float64 coordinates
    triangles        (T, 3) int32 node triples, counterclockwise
    tri_region       (T,)  int8, OMEGA1 or OMEGA2 per triangle
    iface_edges      (E, 2) int32 node pairs lying on the interface
    iface_seg        (E,)  int32 geometry segment id per interface edge
    iface_tris       (E, 2) int32 adjacent triangles (Omega1 side, Omega2 side)
    boundary_edges   (B, 2) int32 node pairs on the outer box boundary
    boundary_dirichlet (B,) bool, True where the Dirichlet condition applies
    radial_weight    bool, True for the cone meridian domain
    """

    nodes: np.ndarray
    triangles: np.ndarray
    tri_region: np.ndarray
    iface_edges: np.ndarray
    iface_seg: np.ndarray
    iface_tris: np.ndarray
    boundary_edges: np.ndarray
    boundary_dirichlet: np.ndarray
    radial_weight: bool = False

    @property
    def num_nodes(self):
        return self.nodes.shape[0]

    @property
    def num_triangles(self):
        return self.triangles.shape[0]

    @property
    def boundary_nodes(self):
        """Sorted node ids pinned by the Dirichlet condition."""
        e = self.boundary_edges[self.boundary_dirichlet]
        return np.unique(e)

    @property
    def interface_nodes(self):
        return np.unique(self.iface_edges)

    def signed_areas(self):
        p = self.nodes[self.triangles]
        return 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))

    def edge_lengths(self):
        p = self.nodes[self.iface_edges]
        return np.hypot(p[:, 1, 0] - p[:, 0, 0], p[:, 1, 1] - p[:, 0, 1])

    def min_angle_deg(self):
        p = self.nodes[self.triangles]
        angs = []
        for i in range(3):
            a = p[:, (i + 1) % 3] - p[:, i]
            b = p[:, (i + 2) % 3] - p[:, i]
            na = np.hypot(a[:, 0], a[:, 1])
            nb = np.hypot(b[:, 0], b[:, 1])
            cosv = np.clip((a * b).sum(axis=1) / (na * nb), -1.0, 1.0)
            angs.append(np.degrees(np.arccos(cosv)))
        return float(np.min(np.stack(angs)))

    def max_edge(self):
        p = self.nodes[self.triangles]
        m = 0.0
        for i in range(3):
            d = p[:, i] - p[:, (i + 1) % 3]
            m = max(m, float(np.hypot(d[:, 0], d[:, 1]).max()))
        return m


@dataclass(frozen=True)
class DofMap:
    """Node-to-dof assignment for one of the two discrete spaces.

    node_dof1 / node_dof2 give the dof of a nodal value seen from the
    Omega1 / Omega2 side (-1 for Dirichlet nodes).  They coincide except
    at duplicated interface nodes of the broken map.  tri_dofs resolves
    each triangle's vertices to the side matching its region tag.
    """

    kind: str
    ndof: int
    node_dof1: np.ndarray
    node_dof2: np.ndarray
    tri_dofs: np.ndarray

    @property
    def duplicated_nodes(self):
        return np.nonzero(self.node_dof1 != self.node_dof2)[0]


def _segment_pieces(a, b, h):
    """Split segment a-b into pieces of length <= h (exact endpoints kept)."""
    ax, ay = a
    bx, by = b
    n = max(1, math.ceil(math.hypot(bx - ax, by - ay) / h))
    pts = [(ax + (bx - ax) * i / n, ay + (by - ay) * i / n) for i in range(1, n)]
    return [a] + pts + [b]


def _snap_points(points, tol):
    """Unify points closer than tol; returns canonical-point lookup."""
    canon = []
    lookup = {}
    for p in points:
        if p in lookup:
            continue
        hit = None
        for q in canon:
            if abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol:
                hit = q
                break
        if hit is None:
            canon.append(p)
            hit = p
        lookup[p] = hit
    return lookup


def _seg_param(a, b, p):
    dx, dy = b[0] - a[0], b[1] - a[1]
    return ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)


def _point_on_segment(a, b, p, tol):
    t = _seg_param(a, b, p)
    if t <= 0.0 or t >= 1.0:
        return None
    cx, cy = a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])
    if math.hypot(p[0] - cx, p[1] - cy) <= tol:
        return t
    return None


def _proper_intersection(a, b, c, d, tol):
    """Intersection params of segments a-b and c-d if they properly cross."""
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    denom = r[0] * s[1] - r[1] * s[0]
    if denom == 0.0:
        return None
    qp = (c[0] - a[0], c[1] - a[1])
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    u = (qp[0] * r[1] - qp[1] * r[0]) / denom
    la = math.hypot(*r)
    lc = math.hypot(*s)
    eps_t = tol / la
    eps_u = tol / lc
    if eps_t < t < 1 - eps_t and eps_u < u < 1 - eps_u:
        return t, u
    return None


def _build_pslg(geometry, h, inner_rings):
    """Segments with labels, split at mutual intersections, chopped to <= h.

    Returns (pieces, acute_corners): pieces is a list of (p, q, label);
    acute corners are junction points where constraints meet below 60 deg.
    """
    L = geometry.halfwidth
    tol = 1e-12 * L
    segs = []
    corners = geometry.box_corners
    for side in range(4):
        segs.append([corners[side], corners[(side + 1) % 4], ("box", side)])
    for sid, s in enumerate(geometry.segments):
        segs.append([s.a, s.b, ("iface", sid)])
    for k, Lr in enumerate(inner_rings or ()):
        if not (0 < Lr < L):
            raise DomainError(f"inner ring halfwidth {Lr} must lie in (0, {L})")
        if geometry.kind == "cone_meridian":
            ring = [(0.0, -Lr), (Lr, -Lr), (Lr, Lr), (0.0, Lr)]
            sides = [(0, 1), (1, 2), (2, 3)]  # leave the axis side open
        else:
            ring = [(-Lr, -Lr), (Lr, -Lr), (Lr, Lr), (-Lr, Lr)]
            sides = [(0, 1), (1, 2), (2, 3), (3, 0)]
        for i, j in sides:
            segs.append([ring[i], ring[j], ("ring", k)])

    snap = _snap_points([s[0] for s in segs] + [s[1] for s in segs], tol)
    for s in segs:
        s[0] = snap[s[0]]
        s[1] = snap[s[1]]

    cuts = [[] for _ in segs]
    for i in range(len(segs)):
        a, b, _ = segs[i]
        for j in range(len(segs)):
            if i == j:
                continue
            c, d, _ = segs[j]
            for p in (c, d):
                if p == a or p == b:
                    continue
                t = _point_on_segment(a, b, p, tol)
                if t is not None:
                    cuts[i].append((t, p))
            if j > i:
                hit = _proper_intersection(a, b, c, d, tol)
                if hit is not None:
                    t, u = hit
                    p = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
                    cuts[i].append((t, p))
                    cuts[j].append((u, p))

    split = []
    for (a, b, label), cl in zip(segs, cuts):
        pts = [a] + [p for _, p in sorted(cl, key=lambda c: c[0])] + [b]
        dedup = [pts[0]]
        for p in pts[1:]:
            if p != dedup[-1]:
                dedup.append(p)
        for k in range(len(dedup) - 1):
            split.append((dedup[k], dedup[k + 1], label))

    by_point = defaultdict(list)
    for a, b, label in split:
        d = math.hypot(b[0] - a[0], b[1] - a[1])
        by_point[a].append(((b[0] - a[0]) / d, (b[1] - a[1]) / d))
        by_point[b].append(((a[0] - b[0]) / d, (a[1] - b[1]) / d))
    acute = {}
    for p, dirs in by_point.items():
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                dot = dirs[i][0] * dirs[j][0] + dirs[i][1] * dirs[j][1]
                if dot > 0.5 + 1e-9:  # angle below 60 degrees
                    ang = math.degrees(math.acos(min(1.0, dot)))
                    acute[p] = min(ang, acute.get(p, 180.0))

    pieces = []
    for a, b, label in split:
        pts = _segment_pieces(a, b, h)
        for k in range(len(pts) - 1):
            pieces.append((pts[k], pts[k + 1], label))
    return pieces, acute


def _iface_adjacency(triangles, tri_region, iface_edges):
    """Adjacent (Omega1, Omega2) triangle per interface edge, with checks."""
    dir_tri = {}
    for t in range(triangles.shape[0]):
        a, b, c = (int(triangles[t, 0]), int(triangles[t, 1]),
                   int(triangles[t, 2]))
        dir_tri[(a, b)] = t
        dir_tri[(b, c)] = t
        dir_tri[(c, a)] = t
    out = np.empty((iface_edges.shape[0], 2), dtype=np.int32)
    for k in range(iface_edges.shape[0]):
        u, v = int(iface_edges[k, 0]), int(iface_edges[k, 1])
        t1 = dir_tri.get((u, v))
        t2 = dir_tri.get((v, u))
        if t1 is None or t2 is None:
            raise MeshingError("interface edge lacks a triangle on one side")
        r1, r2 = int(tri_region[t1]), int(tri_region[t2])
        if {r1, r2} != {OMEGA1, OMEGA2}:
            raise MeshingError("interface edge not separating the two regions")
        out[k] = (t1, t2) if r1 == OMEGA1 else (t2, t1)
    return out


def triangulate(geometry: InterfaceGeometry, h_target: float,
                min_angle_deg: float = 20.0, inner_rings=None,
                validate: bool = True) -> Mesh:
    """Conforming constrained Delaunay mesh of the truncation box.

    The interface segments (and any inner rings) become unions of mesh
    edges; triangles are refined until every edge is at most h_target
    (h_target/2 within h_target of an interface apex) and no angle is
    below min_angle_deg.  Raises MeshingError with diagnostics when the
    refinement budget is exhausted.
    """
    L = geometry.halfwidth
    if not (0 < h_target <= L / 4):
        raise DomainError(f"h_target must lie in (0, L/4], got {h_target}")
    pieces, acute = _build_pslg(geometry, h_target, inner_rings)

    tri = delaunay.Triangulation(geometry.box_corners)
    for side in range(4):
        u = tri.box_vertices[side]
        v = tri.box_vertices[(side + 1) % 4]
        tri.constraint[tri._ekey(u, v)] = ("box", side)

    rng = np.random.default_rng(_SHUFFLE_SEED)
    pts = []
    seen = set()
    for a, b, _ in pieces:
        for p in (a, b):
            if p not in seen:
                seen.add(p)
                pts.append(p)
    hint = None
    for idx in rng.permutation(len(pts)):
        x, y = pts[int(idx)]
        vid = tri.insert_point(x, y, hint)
        hint = tri.vtri.get(vid)
    for a, b, label in pieces:
        u = tri.coord_index[a]
        v = tri.coord_index[b]
        if u != v:
            tri.insert_segment(u, v, label)

    for p, ang in acute.items():
        vid = tri.coord_index.get(p)
        if vid is not None:
            tri.corner_of[vid] = vid
            tri.corner_angle[vid] = ang
    for (u, v) in list(tri.constraint.keys()):
        for a, b in ((u, v), (v, u)):
            if tri.corner_of.get(a) == a and b not in tri.corner_of:
                tri.corner_of[b] = a

    (x0, y0), (x1, y1) = geometry.box
    area = (x1 - x0) * (y1 - y0)
    expected = area / (0.433 * h_target * h_target)
    budget = int(64 + 10 * expected + 8 * sum(
        math.hypot(b[0] - a[0], b[1] - a[1]) for a, b, _ in pieces) / h_target)

    apexes = geometry.apex_points

    def size_fn(cx, cy):
        for ax, ay in apexes:
            if (cx - ax) ** 2 + (cy - ay) ** 2 <= h_target * h_target:
                return 0.5 * h_target
        return h_target

    tri.refine(min_angle_deg, size_fn, budget)
    mesh = _extract(tri, geometry)
    if validate:
        check_mesh(mesh, geometry, min_angle_deg)
    return mesh


def _extract(tri, geometry):
    nodes = np.column_stack([np.asarray(tri.px), np.asarray(tri.py)])
    tids = sorted(tri.tris.keys())
    triangles = np.asarray([tri.tris[t] for t in tids], dtype=np.int32)

    cent = nodes[triangles].mean(axis=1)
    region = geometry.classify_points(cent).astype(np.int8)
    if np.any(region == 0):
        raise MeshingError("triangle centroid classified on the interface")

    iface, iseg, bedges, bside = [], [], [], []
    for (u, v), label in sorted(tri.constraint.items()):
        if label[0] == "iface":
            iface.append((u, v))
            iseg.append(label[1])
        elif label[0] == "box":
            bedges.append((u, v))
            bside.append(label[1])
    iface = np.asarray(iface, dtype=np.int32).reshape(-1, 2)
    iseg = np.asarray(iseg, dtype=np.int32)
    bedges = np.asarray(bedges, dtype=np.int32).reshape(-1, 2)
    dirset = set(geometry.dirichlet_sides)
    bdir = np.asarray([s in dirset for s in bside], dtype=bool)
    itris = _iface_adjacency(triangles, region, iface)
    return Mesh(nodes=nodes, triangles=triangles, tri_region=region,
                iface_edges=iface, iface_seg=iseg, iface_tris=itris,
                boundary_edges=bedges, boundary_dirichlet=bdir,
                radial_weight=geometry.radial_weight)


def refine_uniform(m: Mesh) -> Mesh:
    """Red refinement: every triangle into four similar ones.

    The refined space contains the coarse one (nested meshes), interface
    and boundary edges are bisected, and all angles are preserved.
    """
    tris = m.triangles
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    uedges, inverse = np.unique(edges, axis=0, return_inverse=True)
    nv = m.num_nodes
    mids = 0.5 * (m.nodes[uedges[:, 0]] + m.nodes[uedges[:, 1]])
    nodes = np.vstack([m.nodes, mids])

    T = tris.shape[0]
    mid = (inverse.reshape(3, T).T + nv).astype(np.int32)  # [mab, mbc, mca]
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    mab, mbc, mca = mid[:, 0], mid[:, 1], mid[:, 2]
    children = np.empty((4 * T, 3), dtype=np.int32)
    children[0::4] = np.column_stack([a, mab, mca])
    children[1::4] = np.column_stack([mab, b, mbc])
    children[2::4] = np.column_stack([mca, mbc, c])
    children[3::4] = np.column_stack([mab, mbc, mca])
    region = np.repeat(m.tri_region, 4)

    edge_mid = {}
    for k in range(uedges.shape[0]):
        edge_mid[(int(uedges[k, 0]), int(uedges[k, 1]))] = nv + k

    def split_edges(earr):
        out = np.empty((2 * earr.shape[0], 2), dtype=np.int32)
        for k in range(earr.shape[0]):
            u, v = int(earr[k, 0]), int(earr[k, 1])
            w = edge_mid[(u, v) if u < v else (v, u)]
            out[2 * k] = (u, w)
            out[2 * k + 1] = (w, v)
        return out

    iface = split_edges(m.iface_edges)
    iseg = np.repeat(m.iface_seg, 2)
    bedges = split_edges(m.boundary_edges)
    bdir = np.repeat(m.boundary_dirichlet, 2)
    itris = _iface_adjacency(children, region, iface)
    return Mesh(nodes=nodes, triangles=children, tri_region=region,
                iface_edges=iface, iface_seg=iseg, iface_tris=itris,
                boundary_edges=bedges, boundary_dirichlet=bdir,
                radial_weight=m.radial_weight)


def build_dofs(m: Mesh, kind: str) -> DofMap:
    """Dof map for the continuous or the broken space.

    Continuous: one dof per non-Dirichlet node.  Broken: non-Dirichlet
    interface nodes additionally carry a second, Omega2-side dof; all
    other nodes keep a single shared dof.
    """
    if kind not in (CONTINUOUS, BROKEN):
        raise DomainError(f"unknown dof map kind {kind!r}")
    N = m.num_nodes
    dirichlet = np.zeros(N, dtype=bool)
    dirichlet[m.boundary_nodes] = True
    on_iface = np.zeros(N, dtype=bool)
    on_iface[m.interface_nodes] = True

    dof1 = np.full(N, -1, dtype=np.int64)
    dof2 = np.full(N, -1, dtype=np.int64)
    nxt = 0
    for n in range(N):
        if dirichlet[n]:
            continue
        dof1[n] = nxt
        nxt += 1
        if kind == BROKEN and on_iface[n]:
            dof2[n] = nxt
            nxt += 1
        else:
            dof2[n] = dof1[n]

    side1 = m.tri_region == OMEGA1
    tri_dofs = np.where(side1[:, None], dof1[m.triangles], dof2[m.triangles])
    return DofMap(kind=kind, ndof=nxt, node_dof1=dof1, node_dof2=dof2,
                  tri_dofs=tri_dofs.astype(np.int64))


@dataclass(frozen=True)
class InterfaceQuadrature:
    """Exact integration data for products of linear traces on interface edges.

    For each edge: its length, the parent segment id, endpoint nodes, the
    endpoint dofs in the continuous map and per side in the broken map,
    and the exact 2x2 edge mass matrix (with the radial weight folded in
    on meridian meshes).
    """

    lengths: np.ndarray             # (E,)
    seg: np.ndarray                 # (E,)
    nodes: np.ndarray               # (E, 2)
    edge_mass: np.ndarray           # (E, 2, 2)
    cont_dofs: np.ndarray | None    # (E, 2)
    brok_dofs: np.ndarray | None    # (E, 2, 2) [node, side]


def interface_quadrature(m: Mesh, continuous: DofMap | None = None,
                         broken: DofMap | None = None) -> InterfaceQuadrature:
    """Per-edge quadrature data for the interface integrals."""
    e = m.iface_edges
    p = m.nodes[e]
    ell = np.hypot(p[:, 1, 0] - p[:, 0, 0], p[:, 1, 1] - p[:, 0, 1])
    E = e.shape[0]
    mass = np.empty((E, 2, 2))
    if m.radial_weight:
        r1, r2 = p[:, 0, 0], p[:, 1, 0]
        mass[:, 0, 0] = ell * (r1 / 4 + r2 / 12)
        mass[:, 1, 1] = ell * (r1 / 12 + r2 / 4)
        mass[:, 0, 1] = mass[:, 1, 0] = ell * (r1 + r2) / 12
    else:
        mass[:, 0, 0] = mass[:, 1, 1] = ell / 3.0
        mass[:, 0, 1] = mass[:, 1, 0] = ell / 6.0
    cd = continuous.node_dof1[e] if continuous is not None else None
    bd = None
    if broken is not None:
        bd = np.stack([broken.node_dof1[e], broken.node_dof2[e]], axis=2)
    return InterfaceQuadrature(lengths=ell, seg=m.iface_seg.copy(),
                               nodes=e.copy(), edge_mass=mass,
                               cont_dofs=cd, brok_dofs=bd)


def check_mesh(m: Mesh, geometry: InterfaceGeometry, min_angle_deg=20.0):
    """Validate mesh invariants; raises MeshingError on violation."""
    areas = m.signed_areas()
    if np.any(areas <= 0):
        raise MeshingError("non-positive triangle area")
    ang = m.min_angle_deg()
    floor = min(min_angle_deg, _input_angle_floor(geometry)) - 1e-9
    if ang < floor:
        raise MeshingError(f"minimum angle {ang:.3f} below bound {floor:.3f}",
                           diagnostics={"min_angle": ang})
    cent = m.nodes[m.triangles].mean(axis=1)
    if np.any(geometry.classify_points(cent) != m.tri_region):
        raise MeshingError("region tag disagrees with side classification")
    # conformity: interface edges partition the geometry segments
    ell = m.edge_lengths()
    for sid, s in enumerate(geometry.segments):
        got = float(ell[m.iface_seg == sid].sum())
        if abs(got - s.length) > 1e-10 * max(1.0, s.length):
            raise MeshingError(
                f"segment {sid} of length {s.length} covered by edges "
                f"of total length {got}")
    _iface_adjacency(m.triangles, m.tri_region, m.iface_edges)
    return {"min_angle_deg": ang, "max_edge": m.max_edge(),
            "nodes": m.num_nodes, "triangles": m.num_triangles}


def _input_angle_floor(geometry):
    """Smallest admissible angle bound given sharp interface junctions."""
    if geometry.kind == "broken_line":
        return math.degrees(geometry.theta)  # half the apex angle
    if geometry.kind == "cone_meridian":
        return math.degrees(geometry.theta) / 2  # ray meets the axis at theta
    return 90.0


# -- mesh text format ---------------------------------------------------------

def write_mesh(m: Mesh, path):
    """Plain-text mesh format; coordinates as 17-significant-digit decimals."""
    with open(path, "w") as f:
        f.write("mesh 1\n")
        f.write(f"nodes {m.num_nodes}\n")
        for x, y in m.nodes:
            f.write("%.17g %.17g\n" % (x, y))
        f.write(f"triangles {m.num_triangles}\n")
        for (a, b, c), r in zip(m.triangles, m.tri_region):
            f.write("%d %d %d %d\n" % (a, b, c, r))
        f.write(f"iface {m.iface_edges.shape[0]}\n")
        for (u, v), s in zip(m.iface_edges, m.iface_seg):
            f.write("%d %d %d\n" % (u, v, s))


def read_mesh(path, geometry: InterfaceGeometry | None = None) -> Mesh:
    """Read the text format written by write_mesh.

    The file stores nodes, triangles, and interface edges only; boundary
    edges are recovered topologically.  Pass the geometry to restore the
    Dirichlet flags (needed for the meridian domain, where the symmetry
    axis carries no condition); without it every outer edge is Dirichlet.
    """
    with open(path) as f:
        tokens = f.read().split()
    it = iter(tokens)

    def expect(word):
        got = next(it)
        if got != word:
            raise DomainError(f"bad mesh file: expected {word!r}, got {got!r}")

    expect("mesh")
    expect("1")
    expect("nodes")
    n = int(next(it))
    nodes = np.empty((n, 2))
    for i in range(n):
        nodes[i, 0] = float(next(it))
        nodes[i, 1] = float(next(it))
    expect("triangles")
    t = int(next(it))
    triangles = np.empty((t, 3), dtype=np.int32)
    region = np.empty(t, dtype=np.int8)
    for i in range(t):
        triangles[i, 0] = int(next(it))
        triangles[i, 1] = int(next(it))
        triangles[i, 2] = int(next(it))
        region[i] = int(next(it))
    expect("iface")
    e = int(next(it))
    iface = np.empty((e, 2), dtype=np.int32)
    iseg = np.empty(e, dtype=np.int32)
    for i in range(e):
        iface[i, 0] = int(next(it))
        iface[i, 1] = int(next(it))
        iseg[i] = int(next(it))

    # outer boundary = edges with a single adjacent triangle
    edges = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]],
                            triangles[:, [2, 0]]])
    sedges = np.sort(edges, axis=1)
    uedges, counts = np.unique(sedges, axis=0, return_counts=True)
    bedges = uedges[counts == 1].astype(np.int32)
    if geometry is not None:
        bdir = _dirichlet_flags(nodes, bedges, geometry)
    else:
        bdir = np.ones(bedges.shape[0], dtype=bool)
    itris = _iface_adjacency(triangles, region, iface)
    rw = geometry.radial_weight if geometry is not None else False
    return Mesh(nodes=nodes, triangles=triangles, tri_region=region,
                iface_edges=iface, iface_seg=iseg, iface_tris=itris,
                boundary_edges=bedges, boundary_dirichlet=bdir,
                radial_weight=rw)


def _dirichlet_flags(nodes, bedges, geometry):
    (x0, y0), (x1, y1) = geometry.box
    tol = 1e-9 * geometry.halfwidth
    mid = 0.5 * (nodes[bedges[:, 0]] + nodes[bedges[:, 1]])
    side = np.full(bedges.shape[0], -1)
    side[np.abs(mid[:, 1] - y0) <= tol] = 0
    side[np.abs(mid[:, 0] - x1) <= tol] = 1
    side[np.abs(mid[:, 1] - y1) <= tol] = 2
    side[np.abs(mid[:, 0] - x0) <= tol] = 3
    if np.any(side < 0):
        raise DomainError("boundary edge not on any box side")
    dirset = set(geometry.dirichlet_sides)
    return np.asarray([s in dirset for s in side], dtype=bool)
