"""Ideal triangulations: face matchings, edge classes, cusp cross-sections.

A triangulation file stores nu ordered tetrahedra and 2*nu face gluings
(one record per matched face pair; the inverse direction is derived).
Vertex labels are 1..4 throughout; face f means the face opposite
vertex f.  All gluings must reverse the boundary orientation of the
matched faces.
"""

import json
from dataclasses import dataclass, field

from .decoration import BOUNDARY_CYCLE, CYCLIC, VERTICES
from .errors import TriangulationError


@dataclass(frozen=True)
class FaceGluing:
    """Face ``face`` of ``tet`` glued to ``to_face`` of ``to_tet``.

    ``vertex_map`` sends the three vertices of the source face to the
    vertices of the target face, stored as pairs sorted by source.
    """

    tet: int
    face: int
    to_tet: int
    to_face: int
    vertex_map: tuple

    @property
    def mapping(self):
        return dict(self.vertex_map)

    def inverse(self):
        inv = tuple(sorted((b, a) for a, b in self.vertex_map))
        return FaceGluing(self.to_tet, self.to_face, self.tet, self.face, inv)


@dataclass(frozen=True)
class Triangulation:
    name: str
    nu: int
    gluings: tuple


@dataclass(frozen=True)
class EdgeClass:
    """A geometric edge of the glued complex, with its fan of incidences.

    ``cycle`` lists (tet, (i, j)) in traversal order around the edge for
    the representative orientation; the reversed orientation is the
    element-wise transpose and gets its own gluing equation.
    """

    representative: tuple
    cycle: tuple

    @property
    def valence(self):
        return len(self.cycle)

    @property
    def transposed_cycle(self):
        return tuple((t, (j, i)) for t, (i, j) in self.cycle)


@dataclass(frozen=True)
class CuspSurface:
    """One component of the link surface (must be a torus).

    ``triangles`` are (tet, vertex) pairs.  ``side_glue`` maps a side
    (tet, vertex, face) to (to_tet, to_vertex, to_face, sigma) where
    sigma is the vertex correspondence of the underlying face gluing.
    ``signs`` orients each triangle: +1 means the corner cyclic order
    CYCLIC[vertex] is positive on the surface.  Corner (v, w) of
    triangle (t, v) carries coordinate z_vw.
    """

    index: int
    triangles: tuple
    side_glue: dict = field(hash=False, compare=False)
    signs: dict = field(hash=False, compare=False)
    corner_classes: tuple
    euler_characteristic: int

    def sides(self):
        return sorted(self.side_glue)


def _is_orientation_reversing(face, to_face, mapping):
    a, b, c = BOUNDARY_CYCLE[face]
    image = (mapping[a], mapping[b], mapping[c])
    rev = tuple(reversed(BOUNDARY_CYCLE[to_face]))
    rotations = {rev, rev[1:] + rev[:1], rev[2:] + rev[:2]}
    return image in rotations


def _schema_error(msg):
    raise TriangulationError(f"triangulation schema error: {msg}")


def parse_triangulation(text):
    """Parse and fully validate a triangulation file (UTF-8 JSON)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TriangulationError(
            f"syntax error at line {exc.lineno} column {exc.colno} (char {exc.pos}): {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        _schema_error("top level must be an object")
    extra = set(doc) - {"name", "tetrahedra", "gluings"}
    if extra:
        _schema_error(f"unknown keys {sorted(extra)}")
    for key in ("name", "tetrahedra", "gluings"):
        if key not in doc:
            _schema_error(f"missing key {key!r}")
    name = doc["name"]
    nu = doc["tetrahedra"]
    if not isinstance(name, str):
        _schema_error("'name' must be a string")
    if not isinstance(nu, int) or nu < 1:
        _schema_error("'tetrahedra' must be a positive integer")
    records = doc["gluings"]
    if not isinstance(records, list):
        _schema_error("'gluings' must be a list")
    gluings = []
    for rec in records:
        if not isinstance(rec, dict):
            _schema_error("each gluing must be an object")
        extra = set(rec) - {"tet", "face", "to_tet", "to_face", "vertex_map"}
        if extra:
            _schema_error(f"unknown gluing keys {sorted(extra)}")
        try:
            tet = int(rec["tet"]) - 1
            face = int(rec["face"])
            to_tet = int(rec["to_tet"]) - 1
            to_face = int(rec["to_face"])
            raw_map = rec["vertex_map"]
        except (KeyError, TypeError, ValueError) as exc:
            _schema_error(f"bad gluing record {rec!r} ({exc})")
        if not (0 <= tet < nu and 0 <= to_tet < nu):
            _schema_error(f"tet index out of range in {rec!r}")
        if face not in VERTICES or to_face not in VERTICES:
            _schema_error(f"face label out of range in {rec!r}")
        if not isinstance(raw_map, dict) or len(raw_map) != 3:
            _schema_error(f"vertex_map must have exactly 3 entries in {rec!r}")
        mapping = {}
        for key, value in raw_map.items():
            try:
                src, dst = int(key), int(value)
            except (TypeError, ValueError):
                _schema_error(f"vertex_map entries must be integers in {rec!r}")
                continue
            mapping[src] = dst
        src_face = set(VERTICES) - {face}
        dst_face = set(VERTICES) - {to_face}
        if set(mapping) != src_face or set(mapping.values()) != dst_face:
            _schema_error(f"vertex_map must biject face {face} onto face {to_face} in {rec!r}")
        gluings.append(FaceGluing(tet, face, to_tet, to_face, tuple(sorted(mapping.items()))))
    tri = Triangulation(name, nu, tuple(gluings))
    validate(tri)
    return tri


def to_json_doc(t):
    """Serialize back to the file schema (stored gluing directions only)."""
    return {
        "name": t.name,
        "tetrahedra": t.nu,
        "gluings": [
            {
                "tet": g.tet + 1,
                "face": g.face,
                "to_tet": g.to_tet + 1,
                "to_face": g.to_face,
                "vertex_map": {str(a): b for a, b in g.vertex_map},
            }
            for g in t.gluings
        ],
    }


def validate(t):
    """Check all triangulation invariants; raises TriangulationError."""
    seen = {}
    for g in t.gluings:
        for side in ((g.tet, g.face), (g.to_tet, g.to_face)):
            if side in seen:
                raise TriangulationError(
                    f"face multiply matched: tet {side[0] + 1} face {side[1]}"
                )
            seen[side] = g
    expected = {(tet, f) for tet in range(t.nu) for f in VERTICES}
    missing = expected - set(seen)
    if missing:
        tet, f = sorted(missing)[0]
        raise TriangulationError(f"unmatched face: tet {tet + 1} face {f}")
    for g in t.gluings:
        if not _is_orientation_reversing(g.face, g.to_face, g.mapping):
            raise TriangulationError(
                f"orientation-preserving gluing: tet {g.tet + 1} face {g.face} "
                f"-> tet {g.to_tet + 1} face {g.to_face}"
            )
    classes = edge_classes(t)
    if len(classes) != t.nu:
        raise TriangulationError(
            f"edge-count mismatch: {len(classes)} edge classes for {t.nu} tetrahedra"
        )
    cusp_links(t)  # raises on non-torus links
    return t


def face_pairing(t):
    """Both directions of every gluing: (tet, face) -> FaceGluing."""
    pairing = {}
    for g in t.gluings:
        pairing[(g.tet, g.face)] = g
        pairing[(g.to_tet, g.to_face)] = g.inverse()
    return pairing


def _faces_of_edge(i, j):
    return tuple(sorted(set(VERTICES) - {i, j}))


def edge_classes(t):
    """Partition tetrahedron edges into classes around geometric edges."""
    pairing = face_pairing(t)
    visited = set()
    classes = []
    for tet in range(t.nu):
        for i in VERTICES:
            for j in VERTICES:
                if i >= j or (tet, (i, j)) in visited:
                    continue
                cycle = []
                state = (tet, (i, j), min(_faces_of_edge(i, j)))
                start = state
                while True:
                    ct, (ci, cj), exit_face = state
                    cycle.append((ct, (ci, cj)))
                    g = pairing[(ct, exit_face)]
                    sigma = g.mapping
                    ni, nj = sigma[ci], sigma[cj]
                    entered = g.to_face
                    other = next(f for f in _faces_of_edge(ni, nj) if f != entered)
                    state = (g.to_tet, (ni, nj), other)
                    if state == start:
                        break
                    if len(cycle) > 6 * t.nu:
                        raise TriangulationError("edge cycle fails to close")
                for ct, (ci, cj) in cycle:
                    visited.add((ct, tuple(sorted((ci, cj)))))
                classes.append(_orient_edge_class(cycle))
    return classes


def _orient_edge_class(cycle):
    """Pick the representative orientation and starting incidence.

    The orientation listing more index-ascending pairs (i < j) comes
    first, matching the published equation sets; ties break to the
    lexicographically smaller sorted incidence list.  The cycle is then
    rotated to start at its lexicographically smallest incidence.
    """
    forward = tuple(cycle)
    backward = tuple((t, (j, i)) for t, (i, j) in cycle)
    asc_f = sum(1 for _, (i, j) in forward if i < j)
    asc_b = sum(1 for _, (i, j) in backward if i < j)
    if asc_b > asc_f or (asc_b == asc_f and sorted(backward) < sorted(forward)):
        chosen = backward
    else:
        chosen = forward
    rep = min(chosen)
    k = chosen.index(rep)
    rotated = chosen[k:] + chosen[:k]
    return EdgeClass(representative=rep, cycle=rotated)


def side_corners(v, f):
    """Corner labels (v, b), (v, c) on the side of triangle (t, v) in face f."""
    b, c = sorted(set(VERTICES) - {v, f})
    return b, c


def side_direction(v, f, sign):
    """Directed side opposite corner f, induced by the triangle orientation."""
    order = CYCLIC[v] if sign > 0 else tuple(reversed(CYCLIC[v]))
    k = order.index(f)
    return order[(k + 1) % 3], order[(k + 2) % 3]


def full_side_glue(t):
    """Side adjacency of the whole link surface.

    Maps (tet, v, f) to (to_tet, sigma(v), to_face, sigma) for every
    triangle side, where sigma is the face gluing's vertex map.
    """
    pairing = face_pairing(t)
    table = {}
    for (tet, f), g in pairing.items():
        sigma = g.mapping
        for v in set(VERTICES) - {f}:
            table[(tet, v, f)] = (g.to_tet, sigma[v], g.to_face, sigma)
    return table


def _corner_classes(triangles, side_glue):
    """Union-find of corners (tet, v, w) across glued sides."""
    tri_set = set(triangles)
    parent = {}

    def find(x):
        while parent.get(x, x) != x:
            parent[x] = parent.get(parent[x], parent[x])
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    corners = [(tet, v, w) for tet, v in triangles for w in set(VERTICES) - {v}]
    for c in corners:
        parent.setdefault(c, c)
    for (tet, v, f), (nt, nv, nf, sigma) in side_glue.items():
        if (tet, v) not in tri_set:
            continue
        for w in side_corners(v, f):
            union((tet, v, w), (nt, nv, sigma[w]))
    classes = {}
    for c in corners:
        classes.setdefault(find(c), []).append(c)
    return tuple(tuple(sorted(members)) for _, members in sorted(classes.items()))


def _propagate_orientation(comp, side_glue, index):
    """Orient all triangles of a component consistently, else raise."""
    signs = {comp[0]: 1}
    stack = [comp[0]]
    while stack:
        tet, v = stack.pop()
        s = signs[(tet, v)]
        for f in set(VERTICES) - {v}:
            nt, nv, nf, sigma = side_glue[(tet, v, f)]
            d_from, d_to = side_direction(v, f, s)
            mapped = (sigma[d_from], sigma[d_to])
            wanted = None
            for cand in (1, -1):
                nd = side_direction(nv, nf, cand)
                if mapped == (nd[1], nd[0]):
                    wanted = cand
                    break
            if wanted is None:
                raise TriangulationError(
                    f"non-torus cusp link: component {index} has a degenerate side gluing"
                )
            if (nt, nv) in signs:
                if signs[(nt, nv)] != wanted:
                    raise TriangulationError(
                        f"non-torus cusp link: component {index} is non-orientable"
                    )
            else:
                signs[(nt, nv)] = wanted
                stack.append((nt, nv))
    return signs


def cusp_links(t):
    """Assemble vertex links into cusp surfaces; verify each is a torus."""
    side_glue = full_side_glue(t)
    triangles = [(tet, v) for tet in range(t.nu) for v in VERTICES]

    component = {}
    comps = []
    for tri0 in triangles:
        if tri0 in component:
            continue
        comp = []
        stack = [tri0]
        component[tri0] = len(comps)
        while stack:
            tri = stack.pop()
            comp.append(tri)
            tet, v = tri
            for f in set(VERTICES) - {v}:
                nt, nv, _, _ = side_glue[(tet, v, f)]
                if (nt, nv) not in component:
                    component[(nt, nv)] = len(comps)
                    stack.append((nt, nv))
        comps.append(sorted(comp))

    surfaces = []
    for index, comp in enumerate(comps):
        signs = _propagate_orientation(comp, side_glue, index)
        corner_classes = _corner_classes(comp, side_glue)
        n_tri = len(comp)
        n_edge = 3 * n_tri // 2
        chi = len(corner_classes) - n_edge + n_tri
        if chi != 0:
            raise TriangulationError(
                f"non-torus cusp link: component {index} has Euler characteristic {chi}"
            )
        comp_set = set(comp)
        local_sides = {k: v for k, v in side_glue.items() if (k[0], k[1]) in comp_set}
        surfaces.append(
            CuspSurface(
                index=index,
                triangles=tuple(comp),
                side_glue=local_sides,
                signs=signs,
                corner_classes=tuple(corner_classes),
                euler_characteristic=chi,
            )
        )
    return surfaces
