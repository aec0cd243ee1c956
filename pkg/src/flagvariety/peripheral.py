"""Peripheral tori: corner paths, eigenvalue words, holonomy map.

A closed path on a cusp torus is recorded by the corners it cuts off:
inside each crossed triangle the path enters and leaves through two
sides meeting at one corner, seen to the Left or to the Right of the
travel direction.  The eigenvalue words follow the published rule:

  A   gains z_ij        for a Left corner (i, j), 1/z_ij for Right;
  A*  gains 1/z_ji      for a Left corner, z_kl*z_lk/z_ij for Right
                        (k, l the remaining two vertex labels).

Homology bases are built from fundamental cycles of the dual graph of
the cusp triangulation, with intersection numbers computed exactly
(rational coordinates in a model triangle), then normalized so that
the two returned curves meet once positively.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import decoration as deco
from .decoration import CYCLIC, PER_TET, VERTICES
from .errors import InputError
from .triangulation import cusp_links

# ---------------------------------------------------------------------------
# Corner steps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CornerStep:
    """One triangle crossing: cut corner (vertex, to) seen Left or Right."""

    tet: int
    vertex: int
    to: int  # the corner is the ordered pair (vertex, to)
    side: str  # "L" or "R"

    @property
    def corner(self):
        return (self.vertex, self.to)


@dataclass(frozen=True)
class HolonomyWord:
    """Laurent exponents of the two eigenvalue words of one curve."""

    exponents_A: tuple
    exponents_Astar: tuple

    def eval_A(self, d):
        return complex(np.exp(np.dot(self.exponents_A, np.log(d.vec))))

    def eval_Astar(self, d):
        return complex(np.exp(np.dot(self.exponents_Astar, np.log(d.vec))))


@dataclass
class CuspSystem:
    """Symplectic H1 basis of one cusp with its eigenvalue words."""

    cusp: int
    surface: object
    basis_a: list
    basis_b: list
    word_a: HolonomyWord
    word_b: HolonomyWord


def _step_faces(surface, step):
    """(entry_face, exit_face) of a corner step, from the orientation."""
    sign = surface.signs[(step.tet, step.vertex)]
    order = CYCLIC[step.vertex] if sign > 0 else tuple(reversed(CYCLIC[step.vertex]))
    if step.to not in order:
        raise InputError(f"corner {step.corner} is not a corner of triangle {(step.tet, step.vertex)}")
    k = order.index(step.to)
    succ, pred = order[(k + 1) % 3], order[(k + 2) % 3]
    if step.side == "R":
        return succ, pred
    if step.side == "L":
        return pred, succ
    raise InputError(f"corner step side must be 'L' or 'R', got {step.side!r}")


def check_closed(surface, path):
    """Verify consecutive steps cross identified sides and the path closes."""
    if not path:
        raise InputError("open path: empty step list")
    for k, step in enumerate(path):
        nxt = path[(k + 1) % len(path)]
        _, exit_face = _step_faces(surface, step)
        glued = surface.side_glue.get((step.tet, step.vertex, exit_face))
        if glued is None:
            raise InputError(f"step {k} exits through a side not on this cusp")
        nt, nv, nf, _ = glued
        entry_face, _ = _step_faces(surface, nxt)
        if (nt, nv) != (nxt.tet, nxt.vertex) or nf != entry_face:
            raise InputError(
                f"open path: step {k} exits to triangle {(nt, nv)} side {nf}, "
                f"step {k + 1} enters triangle {(nxt.tet, nxt.vertex)} side {entry_face}"
            )
    return True


def word_from_path(surface, path, nu):
    """Accumulate the A and A* Laurent exponents along a closed path."""
    check_closed(surface, path)
    n = PER_TET * nu
    expA = np.zeros(n, dtype=np.int64)
    expAstar = np.zeros(n, dtype=np.int64)
    for step in path:
        t, (i, j) = step.tet, step.corner
        k, l = sorted(set(VERTICES) - {i, j})
        if step.side == "L":
            expA[deco.edge_index(t, i, j)] += 1
            expAstar[deco.edge_index(t, j, i)] -= 1
        else:
            expA[deco.edge_index(t, i, j)] -= 1
            expAstar[deco.edge_index(t, k, l)] += 1
            expAstar[deco.edge_index(t, l, k)] += 1
            expAstar[deco.edge_index(t, i, j)] -= 1
    return HolonomyWord(tuple(int(x) for x in expA), tuple(int(x) for x in expAstar))


# ---------------------------------------------------------------------------
# Dual-graph walks and their corner-step form
# ---------------------------------------------------------------------------


def _sides_of_triangle(tri):
    t, v = tri
    return [(t, v, f) for f in sorted(set(VERTICES) - {v})]


def _walk_to_steps(surface, crossings):
    """Convert a cyclic list of directed side crossings to corner steps.

    A crossing is (from_side, to_side); the visit between consecutive
    crossings enters a triangle through one side and leaves through the
    next.  Immediate backtracks (in and out through the same side) are
    cancelled first; they do not change the homology class.
    """
    walk = list(crossings)
    changed = True
    while changed and walk:
        changed = False
        m = len(walk)
        for k in range(m):
            # visit after crossing k enters via walk[k].to and exits via
            # walk[k+1].from; equal sides form a removable backtrack
            nxt = (k + 1) % m
            if walk[k][1] == walk[nxt][0]:
                for idx in sorted((k, nxt), reverse=True):
                    del walk[idx]
                changed = True
                break
    if not walk:
        raise InputError("walk cancels to nothing")
    steps = []
    m = len(walk)
    for k in range(m):
        enter = walk[k][1]
        leave = walk[(k + 1) % m][0]
        t, v, f_in = enter
        t2, v2, f_out = leave
        if (t, v) != (t2, v2):
            raise InputError("inconsistent walk: visit spans two triangles")
        corner = next(w for w in VERTICES if w not in (v, f_in, f_out))
        sign = surface.signs[(t, v)]
        order = CYCLIC[v] if sign > 0 else tuple(reversed(CYCLIC[v]))
        k0 = order.index(corner)
        if f_in == order[(k0 + 1) % 3]:
            side = "R"
        else:
            side = "L"
        steps.append(CornerStep(t, v, corner, side))
    return steps


def _steps_to_crossings(surface, path):
    """Directed side crossings of a closed corner path."""
    crossings = []
    for k, step in enumerate(path):
        _, exit_face = _step_faces(surface, step)
        out_side = (step.tet, step.vertex, exit_face)
        nt, nv, nf, _ = surface.side_glue[out_side]
        crossings.append((out_side, (nt, nv, nf)))
    return crossings


# ---------------------------------------------------------------------------
# Exact intersection numbers
# ---------------------------------------------------------------------------


def _canonical_side(surface, side):
    partner = surface.side_glue[side][:3]
    return min(side, partner)


def _corner_param_zero(surface, side):
    """The corner label of ``side`` sitting at canonical parameter 0.

    The canonical view of a glued side is the lexicographically smaller
    of its two (tet, vertex, face) descriptions; parameter 0 sits at the
    smaller corner label of the canonical view.
    """
    t, v, f = side
    to_t, to_v, to_f, sigma = surface.side_glue[side]
    if side <= (to_t, to_v, to_f):
        b, _ = sorted(set(VERTICES) - {v, f})
        return b
    inv = {dst: src for src, dst in sigma.items()}
    b_r, _ = sorted(set(VERTICES) - {to_v, to_f})
    return inv[b_r]


class _Embedding:
    """Rational model coordinates for chords inside the triangles."""

    def __init__(self, surface):
        self.surface = surface
        self.corner_xy = {}
        for (t, v) in surface.triangles:
            order = CYCLIC[v]
            coords = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
            for w, xy in zip(order, coords):
                self.corner_xy[(t, v, w)] = xy

    def side_point(self, side, param):
        """Point at canonical parameter ``param`` on ``side`` in its triangle."""
        t, v, f = side
        b, c = sorted(set(VERTICES) - {v, f})
        zero_corner = _corner_param_zero(self.surface, side)
        one_corner = c if zero_corner == b else b
        x0, y0 = self.corner_xy[(t, v, zero_corner)]
        x1, y1 = self.corner_xy[(t, v, one_corner)]
        return (x0 + (x1 - x0) * param, y0 + (y1 - y0) * param)


def _orient(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _segments_cross(a, b, c, d):
    o1, o2 = _orient(a, b, c), _orient(a, b, d)
    o3, o4 = _orient(c, d, a), _orient(c, d, b)
    if (o1 > 0) == (o2 > 0) or o1 == 0 or o2 == 0:
        return 0
    if (o3 > 0) == (o4 > 0) or o3 == 0 or o4 == 0:
        return 0
    det = (b[0] - a[0]) * (d[1] - c[1]) - (b[1] - a[1]) * (d[0] - c[0])
    return 1 if det > 0 else -1


def intersection_number(surface, path1, path2):
    """Algebraic intersection number of two closed corner paths."""
    cr1 = _steps_to_crossings(surface, path1)
    cr2 = _steps_to_crossings(surface, path2)
    # assign one rational parameter per crossing, grouped per canonical side
    per_side = {}
    params = {}
    for tag, crossings in (("p1", cr1), ("p2", cr2)):
        for k, (out_side, _) in enumerate(crossings):
            canon = _canonical_side(surface, out_side)
            per_side.setdefault(canon, []).append((tag, k))
    for canon, uses in per_side.items():
        n = len(uses)
        for idx, use in enumerate(sorted(uses)):
            params[use] = Fraction(idx + 1, n + 1)

    emb = _Embedding(surface)

    def chords(tag, path, crossings):
        out = {}
        m = len(crossings)
        for k in range(m):
            in_cross = crossings[(k - 1) % m]
            in_side = in_cross[1]
            out_side = crossings[k][0]
            tri = (in_side[0], in_side[1])
            p_in = params[(tag, (k - 1) % m)]
            p_out = params[(tag, k)]
            a = emb.side_point(in_side, p_in)
            b = emb.side_point(out_side, p_out)
            out.setdefault(tri, []).append((a, b))
        return out

    ch1 = chords("p1", path1, cr1)
    ch2 = chords("p2", path2, cr2)
    total = 0
    for tri, segs1 in ch1.items():
        segs2 = ch2.get(tri)
        if not segs2:
            continue
        sign = surface.signs[tri]
        for a, b in segs1:
            for c, d in segs2:
                total += sign * _segments_cross(a, b, c, d)
    return total


# ---------------------------------------------------------------------------
# Homology basis
# ---------------------------------------------------------------------------


def _dual_edges(surface):
    edges = []
    seen = set()
    for side in sorted(surface.side_glue):
        canon = _canonical_side(surface, side)
        if canon in seen:
            continue
        seen.add(canon)
        partner = surface.side_glue[canon][:3]
        edges.append((canon, partner))
    return edges


def _fundamental_cycles(surface):
    """Closed walks generating H1 of the dual graph, deterministically."""
    triangles = sorted(surface.triangles)
    root = triangles[0]
    tree_parent = {root: None}
    order = [root]
    queue = [root]
    tree_sides = set()
    while queue:
        tri = queue.pop(0)
        for side in _sides_of_triangle(tri):
            nt, nv, nf, _ = surface.side_glue[side]
            if (nt, nv) not in tree_parent:
                tree_parent[(nt, nv)] = (tri, side, (nt, nv, nf))
                tree_sides.add(_canonical_side(surface, side))
                queue.append((nt, nv))
                order.append((nt, nv))

    def tree_path(tri):
        """Crossings from the root to ``tri`` along the tree."""
        chain = []
        cur = tri
        while tree_parent[cur] is not None:
            parent, out_side, in_side = tree_parent[cur]
            chain.append((out_side, in_side))
            cur = parent
        return list(reversed(chain))

    cycles = []
    for canon, partner in _dual_edges(surface):
        if canon in tree_sides:
            continue
        tri_u = (canon[0], canon[1])
        tri_v = (partner[0], partner[1])
        to_u = tree_path(tri_u)
        to_v = tree_path(tri_v)
        # strip the common prefix so the walk does not backtrack through root
        k = 0
        while k < min(len(to_u), len(to_v)) and to_u[k] == to_v[k]:
            k += 1
        cycles.append((canon, partner, to_u[k:], to_v[k:]))
    return cycles, tree_parent


def _cycle_walk(canon, partner, up_u, up_v):
    """Closed walk: junction -> tri_u -> (dual edge) -> tri_v -> junction."""
    down_u = up_u  # crossings junction..tri_u in forward direction
    back_v = [(b, a) for a, b in reversed(up_v)]
    return down_u + [(canon, partner)] + back_v


def homology_basis(surface, nu):
    """Symplectic basis (a, b) with intersection +1 on one cusp torus.

    Fundamental cycles of the dual graph are generated from a BFS tree
    rooted at the lexicographically smallest triangle; the first cycle
    pair with intersection +-1 is promoted to the basis (reversing b if
    needed).  If no pair pairs to +-1 directly, integer column moves on
    the Gram matrix produce one; the combined cycles are realized as
    closed walks by splicing at a shared triangle.
    """
    raw, _ = _fundamental_cycles(surface)
    walks = [_cycle_walk(c, p, u, v) for c, p, u, v in raw]
    paths = [_walk_to_steps(surface, w) for w in walks]
    m = len(paths)
    G = [[0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            G[i][j] = intersection_number(surface, paths[i], paths[j])
            G[j][i] = -G[i][j]
    for i in range(m):
        for j in range(m):
            if abs(G[i][j]) == 1:
                a_path, b_path = paths[i], paths[j]
                if G[i][j] == -1:
                    a_path, b_path = b_path, a_path
                return a_path, b_path
    # reduction fallback: combine cycles until a unimodular pair appears
    coeff = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def gram(ci, cj):
        return sum(
            coeff[ci][i] * coeff[cj][j] * G[i][j] for i in range(m) for j in range(m)
        )

    for _ in range(64):
        best = None
        for i in range(m):
            for j in range(m):
                g = gram(i, j)
                if g != 0 and (best is None or abs(g) < abs(best[2])):
                    best = (i, j, g)
        if best is None:
            raise InputError("cusp surface has degenerate intersection form")
        i0, j0, g = best
        if abs(g) == 1:
            a_walk = _combine_walks(surface, walks, coeff[i0])
            b_walk = _combine_walks(surface, walks, coeff[j0])
            a_path = _walk_to_steps(surface, a_walk)
            b_path = _walk_to_steps(surface, b_walk)
            if intersection_number(surface, a_path, b_path) == -1:
                a_path, b_path = b_path, a_path
            return a_path, b_path
        progressed = False
        for k in range(m):
            if k == j0:
                continue
            gk = gram(i0, k)
            q = gk // g if g else 0
            if q:
                coeff[k] = [x - q * y for x, y in zip(coeff[k], coeff[j0])]
                progressed = True
        if not progressed:
            raise InputError("intersection form reduction stalled")
    raise InputError("intersection form reduction did not converge")


def _combine_walks(surface, walks, coeffs):
    """Realize an integer combination of closed walks as one closed walk."""
    from collections import defaultdict

    out_edges = defaultdict(list)
    nodes = set()
    n_edges = 0
    for walk, c in zip(walks, coeffs):
        if c == 0:
            continue
        crossings = walk if c > 0 else [(b, a) for a, b in reversed(walk)]
        for _ in range(abs(c)):
            for a, b in crossings:
                out_edges[(a[0], a[1])].append((a, b))
                nodes.add((a[0], a[1]))
                nodes.add((b[0], b[1]))
                n_edges += 1
    if n_edges == 0:
        raise InputError("zero homology class cannot be realized as a walk")
    # connect components through tree paths (forward plus reverse detours)
    comps = []
    unvisited = set(nodes)
    while unvisited:
        start = unvisited.pop()
        comp = {start}
        stack = [start]
        while stack:
            tri = stack.pop()
            for a, b in out_edges.get(tri, ()):  # directed edges only
                other = (b[0], b[1])
                if other in unvisited:
                    unvisited.discard(other)
                    comp.add(other)
                    stack.append(other)
        comps.append(comp)
    if len(comps) > 1:
        base = comps[0]
        for comp in comps[1:]:
            path = _connect(surface, base, comp)
            for a, b in path:
                out_edges[(a[0], a[1])].append((a, b))
                out_edges[(b[0], b[1])].append((b, a))
                n_edges += 2
            base = base | comp
    return _hierholzer(out_edges)


def _hierholzer(out_edges):
    local = {k: list(v) for k, v in out_edges.items()}
    start = sorted(local)[0]
    tour = []

    def visit(node):
        walk = []
        cur = node
        while local.get(cur):
            a, b = local[cur].pop()
            walk.append((a, b))
            cur = (b[0], b[1])
        return walk

    tour = visit(start)
    k = 0
    while k < len(tour):
        node = (tour[k][0][0], tour[k][0][1])
        if local.get(node):
            tour = tour[:k] + visit(node) + tour[k:]
            k = 0
        else:
            k += 1
    return tour


def _connect(surface, comp_a, comp_b):
    """A dual-graph path between two triangle sets, as crossings."""
    from collections import deque

    prev = {}
    queue = deque(sorted(comp_a))
    seen = set(comp_a)
    target = None
    while queue:
        tri = queue.popleft()
        if tri in comp_b:
            target = tri
            break
        for side in _sides_of_triangle(tri):
            nt, nv, nf, _ = surface.side_glue[side]
            if (nt, nv) not in seen:
                seen.add((nt, nv))
                prev[(nt, nv)] = (tri, side, (nt, nv, nf))
                queue.append((nt, nv))
    if target is None:
        raise InputError("cusp dual graph is disconnected")
    path = []
    cur = target
    while cur not in comp_a:
        tri, out_side, in_side = prev[cur]
        path.append((out_side, in_side))
        cur = tri
    return list(reversed(path))


def cusp_systems(t):
    """Build the symplectic basis and words for every cusp of t."""
    systems = []
    for surface in cusp_links(t):
        a_path, b_path = homology_basis(surface, t.nu)
        word_a = word_from_path(surface, a_path, t.nu)
        word_b = word_from_path(surface, b_path, t.nu)
        systems.append(
            CuspSystem(
                cusp=surface.index,
                surface=surface,
                basis_a=a_path,
                basis_b=b_path,
                word_a=word_a,
                word_b=word_b,
            )
        )
    return systems


def hol(systems, d):
    """Eigenvalue pairs ((A, A*), (B, B*)) of every cusp at a decoration."""
    out = []
    for cs in systems:
        out.append(
            {
                "A": cs.word_a.eval_A(d),
                "Astar": cs.word_a.eval_Astar(d),
                "B": cs.word_b.eval_A(d),
                "Bstar": cs.word_b.eval_Astar(d),
            }
        )
    return out


def dlog_hol(systems, nu):
    """Integer matrix of word exponents, rows (A, A*, B, B*) per cusp."""
    rows = []
    for cs in systems:
        rows.append(cs.word_a.exponents_A)
        rows.append(cs.word_a.exponents_Astar)
        rows.append(cs.word_b.exponents_A)
        rows.append(cs.word_b.exponents_Astar)
    return np.array(rows, dtype=np.int64)


def vertex_loop(surface, corner_class, nu):
    """The null-homotopic corner path encircling one link vertex."""
    start = min(corner_class)
    t, v, w = start
    g1, g2 = sorted(set(VERTICES) - {v, w})
    steps = []
    state = (t, v, w, g1)  # will exit through side g1
    guard = 0
    while True:
        t, v, w, exit_face = state
        entry_face = next(f for f in VERTICES if f not in (v, w, exit_face))
        sign = surface.signs[(t, v)]
        order = CYCLIC[v] if sign > 0 else tuple(reversed(CYCLIC[v]))
        k0 = order.index(w)
        side = "R" if entry_face == order[(k0 + 1) % 3] else "L"
        steps.append(CornerStep(t, v, w, side))
        nt, nv, nf, sigma = surface.side_glue[(t, v, exit_face)]
        nw = sigma[w]
        n_exit = next(f for f in VERTICES if f not in (nv, nw, nf))
        state = (nt, nv, nw, n_exit)
        guard += 1
        if state == (start[0], start[1], start[2], g1):
            break
        if guard > 12 * nu:
            raise InputError("vertex loop fails to close")
    return steps
