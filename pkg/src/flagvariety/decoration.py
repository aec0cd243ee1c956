"""Coordinates attached to each tetrahedron and the reduced parametrization.

Each ordered tetrahedron carries 16 nonzero complex coordinates: one for
each of the 12 oriented edges (i, j) and one for each of the 4 faces.
Face coordinates are indexed by a canonical cyclic triple.  The internal
relations are

    Rel1:  z_ijk = -z_il * z_jl * z_kl      (face from edges, l missing)
    Rel2:  z_ij * z_ik * z_il = -1          (product at a vertex)
    Rel3:  z_next = 1 / (1 - z_prev)        (cyclically at a vertex)

where "cyclically" refers to the cyclic order that the orientation of
the tetrahedron induces on the three edges at a vertex.  A consistent
decoration is determined by one edge coordinate per vertex (4 per
tetrahedron), the reduced form used throughout the solver.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCoordinateError, InconsistentDecorationError, InputError
from .expressions import evaluate

VERTICES = (1, 2, 3, 4)

# Cyclic order of the other three vertices at each vertex, induced by the
# boundary orientation of the opposite face; the first entry is the
# representative edge rep(v) whose coordinate parametrizes the vertex.
CYCLIC = {1: (2, 3, 4), 2: (1, 4, 3), 3: (4, 1, 2), 4: (3, 2, 1)}
REP = {v: CYCLIC[v][0] for v in VERTICES}

# Canonical face triple keyed by the opposite vertex.  Each triple is the
# reverse of the boundary-induced orientation of that face.
FACE_TRIPLES = {1: (3, 2, 4), 2: (1, 3, 4), 3: (1, 4, 2), 4: (1, 2, 3)}

# Boundary-induced orientation of the face opposite each vertex.
BOUNDARY_CYCLE = {1: (2, 3, 4), 2: (1, 4, 3), 3: (1, 2, 4), 4: (1, 3, 2)}

EDGES = tuple((i, j) for i in VERTICES for j in VERTICES if i != j)
FACE_OPPS = VERTICES

_EDGE_SLOT = {e: k for k, e in enumerate(EDGES)}
_FACE_SLOT = {opp: 12 + k for k, opp in enumerate(FACE_OPPS)}

PER_TET = 16


@dataclass(frozen=True)
class CoordIndex:
    """One of the 16 coordinate slots of a tetrahedron."""

    tet: int
    kind: str  # "edge" or "face"
    edge: tuple = None  # (i, j) for kind == "edge"
    face_opp: int = None  # opposite vertex for kind == "face"

    @property
    def face(self):
        return FACE_TRIPLES[self.face_opp] if self.kind == "face" else None

    def __str__(self):
        if self.kind == "edge":
            return f"T{self.tet + 1}:{self.edge[0]}{self.edge[1]}"
        t = self.face
        return f"T{self.tet + 1}:{t[0]}{t[1]}{t[2]}"


def edge_index(tet, i, j):
    """Global slot of edge coordinate z_ij on tetrahedron ``tet`` (0-based)."""
    return PER_TET * tet + _EDGE_SLOT[(i, j)]


def face_index(tet, opp):
    """Global slot of the face coordinate opposite vertex ``opp``."""
    return PER_TET * tet + _FACE_SLOT[opp]


def coord_label(idx):
    tet, slot = divmod(idx, PER_TET)
    if slot < 12:
        return CoordIndex(tet, "edge", edge=EDGES[slot])
    return CoordIndex(tet, "face", face_opp=FACE_OPPS[slot - 12])


def all_labels(nu):
    return [coord_label(k) for k in range(PER_TET * nu)]


class Decoration:
    """A full 16-coordinates-per-tetrahedron assignment.

    Stored as a dense complex vector of length 16 * nu; the mapping view
    ``values`` is provided for inspection and serialization.
    """

    def __init__(self, nu, vec):
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (PER_TET * nu,):
            raise InputError(f"decoration vector must have length {PER_TET * nu}")
        if np.any(vec == 0):
            raise InputError("decoration coordinates must be nonzero")
        self.nu = nu
        self.vec = vec
        self.vec.setflags(write=False)

    def z(self, tet, i, j):
        return self.vec[edge_index(tet, i, j)]

    def face(self, tet, opp):
        return self.vec[face_index(tet, opp)]

    @property
    def values(self):
        return {coord_label(k): self.vec[k] for k in range(len(self.vec))}

    def conjugate(self):
        return Decoration(self.nu, np.conj(self.vec))

    def __eq__(self, other):
        return isinstance(other, Decoration) and self.nu == other.nu and np.array_equal(self.vec, other.vec)


class ReducedPoint:
    """One coordinate x_{t,v} = z_{v,rep(v)} per (tetrahedron, vertex)."""

    def __init__(self, nu, vec):
        vec = np.asarray(vec, dtype=complex)
        if vec.shape != (4 * nu,):
            raise InputError(f"reduced vector must have length {4 * nu}")
        self.nu = nu
        self.vec = vec
        self.vec.setflags(write=False)

    def x(self, tet, v):
        return self.vec[4 * tet + (v - 1)]

    def conjugate(self):
        return ReducedPoint(self.nu, np.conj(self.vec))

    @staticmethod
    def slot(tet, v):
        return 4 * tet + (v - 1)


def _check_away_from_excluded(value, guard, what):
    if abs(value) <= guard or abs(value - 1) <= guard:
        raise DegenerateCoordinateError(f"degenerate coordinate: {what} = {value}")


def expand_reduced(r, guard=1e-10):
    """Expand a reduced point to the full consistent decoration.

    At each vertex v with cyclic order (c1, c2, c3) and x = x_{t,v}:
    z_{v,c1} = x, z_{v,c2} = 1/(1-x), z_{v,c3} = 1 - 1/x.  Faces follow
    from Rel1.  Raises DegenerateCoordinateError if any edge value lands
    within ``guard`` of {0, 1}.
    """
    vec = np.zeros(PER_TET * r.nu, dtype=complex)
    for t in range(r.nu):
        for v in VERTICES:
            x = r.x(t, v)
            _check_away_from_excluded(x, guard, f"x[T{t + 1},{v}]")
            c1, c2, c3 = CYCLIC[v]
            triple = (x, 1.0 / (1.0 - x), 1.0 - 1.0 / x)
            for c, value in zip((c1, c2, c3), triple):
                _check_away_from_excluded(value, guard, f"z[T{t + 1},{v}{c}]")
                vec[edge_index(t, v, c)] = value
        for opp in FACE_OPPS:
            a, b, c = FACE_TRIPLES[opp]
            vec[face_index(t, opp)] = -(
                vec[edge_index(t, a, opp)] * vec[edge_index(t, b, opp)] * vec[edge_index(t, c, opp)]
            )
    return Decoration(r.nu, vec)


def consistency_error(d):
    """Max residual of Rel1, Rel2 and Rel3 over all tetrahedra."""
    worst = 0.0
    for t in range(d.nu):
        for opp in FACE_OPPS:
            a, b, c = FACE_TRIPLES[opp]
            rel1 = d.face(t, opp) + d.z(t, a, opp) * d.z(t, b, opp) * d.z(t, c, opp)
            worst = max(worst, abs(rel1))
        for v in VERTICES:
            c1, c2, c3 = CYCLIC[v]
            worst = max(worst, abs(d.z(t, v, c1) * d.z(t, v, c2) * d.z(t, v, c3) + 1))
            for p, q in ((c1, c2), (c2, c3), (c3, c1)):
                worst = max(worst, abs(d.z(t, v, q) * (1 - d.z(t, v, p)) - 1))
    return worst


def reduce(d, tol=1e-9):
    """Extract the reduced point from a consistent decoration."""
    err = consistency_error(d)
    if err > tol:
        raise InconsistentDecorationError(f"inconsistent decoration: relation residual {err:.3e} > {tol:.1e}")
    vec = np.array([d.z(t, v, REP[v]) for t in range(d.nu) for v in VERTICES], dtype=complex)
    return ReducedPoint(d.nu, vec)


def is_positive(d):
    """True iff every edge coordinate has strictly positive imaginary part."""
    for t in range(d.nu):
        for i, j in EDGES:
            if d.z(t, i, j).imag <= 0:
                return False
    return True


# ---------------------------------------------------------------------------
# JSON point files
# ---------------------------------------------------------------------------

def _coerce(value):
    if isinstance(value, str):
        return evaluate(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(value)
    raise InputError(f"cannot read coordinate value {value!r}")


def point_from_json(doc, nu=None):
    """Read a Decoration or ReducedPoint from a parsed point document.

    Accepts {"points": [{"tet": 1, "z": {"12": [re, im], ...}}, ...]} for
    full decorations or {"reduced": [{"tet": 1, "x": {"1": ..., ...}}]}.
    Values may be [re, im] pairs or expression strings.
    """
    if "reduced" in doc:
        entries = doc["reduced"]
        n = len(entries)
        if nu is not None and n != nu:
            raise InputError(f"expected {nu} tetrahedra in point file, got {n}")
        vec = np.zeros(4 * n, dtype=complex)
        seen = set()
        for entry in entries:
            t = int(entry["tet"]) - 1
            if t in seen or not 0 <= t < n:
                raise InputError(f"bad tet index {entry['tet']} in point file")
            seen.add(t)
            for key, raw in entry["x"].items():
                v = int(key)
                if v not in VERTICES:
                    raise InputError(f"bad vertex key {key!r} in point file")
                vec[ReducedPoint.slot(t, v)] = _coerce(raw)
        return ReducedPoint(n, vec)
    if "points" in doc:
        entries = doc["points"]
        n = len(entries)
        if nu is not None and n != nu:
            raise InputError(f"expected {nu} tetrahedra in point file, got {n}")
        vec = np.zeros(PER_TET * n, dtype=complex)
        seen = set()
        for entry in entries:
            t = int(entry["tet"]) - 1
            if t in seen or not 0 <= t < n:
                raise InputError(f"bad tet index {entry['tet']} in point file")
            seen.add(t)
            for key, raw in entry["z"].items():
                digits = [int(ch) for ch in key]
                if len(digits) == 2:
                    idx = edge_index(t, digits[0], digits[1])
                elif len(digits) == 3:
                    opp = next(o for o in FACE_OPPS if sorted(FACE_TRIPLES[o]) == sorted(digits))
                    idx = face_index(t, opp)
                else:
                    raise InputError(f"bad coordinate key {key!r} in point file")
                vec[idx] = _coerce(raw)
        return Decoration(n, vec)
    raise InputError("point file must contain 'points' or 'reduced'")


def reduced_to_json(r):
    return {
        "reduced": [
            {
                "tet": t + 1,
                "x": {str(v): [r.x(t, v).real, r.x(t, v).imag] for v in VERTICES},
            }
            for t in range(r.nu)
        ]
    }


def decoration_to_json(d):
    out = []
    for t in range(d.nu):
        zmap = {}
        for i, j in EDGES:
            val = d.z(t, i, j)
            zmap[f"{i}{j}"] = [val.real, val.imag]
        for opp in FACE_OPPS:
            a, b, c = FACE_TRIPLES[opp]
            val = d.face(t, opp)
            zmap[f"{a}{b}{c}"] = [val.real, val.imag]
        out.append({"tet": t + 1, "z": zmap})
    return {"points": out}
