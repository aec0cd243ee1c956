"""The equation system g = (h, a, f) and its linearization.

Monomial equations are stored as integer exponent rows with a sign, so
the log-Jacobian of those rows is exact integer data.  Only the a-rows
(the cross-ratio relations) depend on the point.  Row order is: per
tetrahedron 4 h-face rows and 4 h-vertex rows, then per tetrahedron the
4 a-rows, then the 2*nu oriented edge rows and the 2*nu face matching
rows, 16*nu rows in total.
"""

from dataclasses import dataclass

import numpy as np

from . import decoration as deco
from .decoration import CYCLIC, FACE_OPPS, FACE_TRIPLES, PER_TET, VERTICES
from .errors import InconsistentDecorationError
from .triangulation import edge_classes

_TET_LETTERS = "zwuvsrqp"


def tet_letter(t):
    return _TET_LETTERS[t] if t < len(_TET_LETTERS) else f"x{t + 1}_"


@dataclass(frozen=True)
class EquationRow:
    """One equation row; exponents is None exactly for a-rows."""

    label: str
    kind: str  # h-face | h-vertex | a-vertex | f-edge | f-face
    sign: int
    exponents: tuple
    tag: tuple


class EquationSystem:
    def __init__(self, nu, rows):
        self.nu = nu
        self.rows = rows
        self.h_rows = [k for k, r in enumerate(rows) if r.kind.startswith("h-")]
        self.a_rows = [k for k, r in enumerate(rows) if r.kind == "a-vertex"]
        self.f_rows = [k for k, r in enumerate(rows) if r.kind.startswith("f-")]
        self.monomial_rows = self.h_rows + self.f_rows
        n = PER_TET * nu
        self._mono = np.zeros((len(self.monomial_rows), n), dtype=np.int64)
        self._mono_sign = np.zeros(len(self.monomial_rows), dtype=np.int64)
        for k, idx in enumerate(self.monomial_rows):
            self._mono[k] = rows[idx].exponents
            self._mono_sign[k] = rows[idx].sign

    @property
    def n_coords(self):
        return PER_TET * self.nu

    def monomial_matrix(self):
        """Integer exponent matrix over rows h then f, with per-row signs."""
        return self._mono.copy(), self._mono_sign.copy()

    def f_matrix(self):
        """Exponent rows of the f-equations only (edge rows then face rows)."""
        return np.array([self.rows[k].exponents for k in self.f_rows], dtype=np.int64)


def build_equation_system(t):
    """Emit the 16*nu rows of g = (h, a, f) for a valid triangulation."""
    nu = t.nu
    n = PER_TET * nu
    rows = []

    for tet in range(nu):
        L = tet_letter(tet)
        for opp in FACE_OPPS:
            a, b, c = FACE_TRIPLES[opp]
            exps = np.zeros(n, dtype=np.int64)
            exps[deco.face_index(tet, opp)] = 1
            for w in (a, b, c):
                exps[deco.edge_index(tet, w, opp)] -= 1
            rows.append(
                EquationRow(
                    label=f"h-face({L}{a}{b}{c})",
                    kind="h-face",
                    sign=-1,
                    exponents=tuple(exps),
                    tag=(tet, opp),
                )
            )
        for v in VERTICES:
            exps = np.zeros(n, dtype=np.int64)
            for c in CYCLIC[v]:
                exps[deco.edge_index(tet, v, c)] += 1
            rows.append(
                EquationRow(
                    label=f"h-vertex({L},{v})",
                    kind="h-vertex",
                    sign=-1,
                    exponents=tuple(exps),
                    tag=(tet, v),
                )
            )

    for tet in range(nu):
        L = tet_letter(tet)
        for v in VERTICES:
            c1, c2, _ = CYCLIC[v]
            rows.append(
                EquationRow(
                    label=f"a-vertex({L},{v}): {L}{v}{c2}*(1-{L}{v}{c1})",
                    kind="a-vertex",
                    sign=1,
                    exponents=None,
                    tag=(tet, v),
                )
            )

    for k, cls in enumerate(edge_classes(t)):
        for orientation, cycle in (("+", cls.cycle), ("-", cls.transposed_cycle)):
            exps = np.zeros(n, dtype=np.int64)
            for tet, (i, j) in cycle:
                exps[deco.edge_index(tet, i, j)] += 1
            rows.append(
                EquationRow(
                    label=f"f-edge(e{k + 1},{orientation})",
                    kind="f-edge",
                    sign=1,
                    exponents=tuple(exps),
                    tag=(k, orientation, cls.cycle),
                )
            )

    for g in sorted(t.gluings, key=lambda g: min((g.tet, g.face), (g.to_tet, g.to_face))):
        exps = np.zeros(n, dtype=np.int64)
        exps[deco.face_index(g.tet, g.face)] += 1
        exps[deco.face_index(g.to_tet, g.to_face)] += 1
        rows.append(
            EquationRow(
                label=f"f-face({tet_letter(g.tet)}{g.face}|{tet_letter(g.to_tet)}{g.to_face})",
                kind="f-face",
                sign=1,
                exponents=tuple(exps),
                tag=((g.tet, g.face), (g.to_tet, g.to_face)),
            )
        )

    assert len(rows) == 16 * nu
    return EquationSystem(nu, rows)


def residual(sys, d):
    """Per-row equation value minus one."""
    out = np.zeros(len(sys.rows), dtype=complex)
    logz = np.log(d.vec)
    mono, signs = sys._mono, sys._mono_sign
    values = signs * np.exp(mono @ logz)
    for k, idx in enumerate(sys.monomial_rows):
        out[idx] = values[k] - 1.0
    for idx in sys.a_rows:
        tet, v = sys.rows[idx].tag
        c1, c2, _ = CYCLIC[v]
        out[idx] = d.z(tet, v, c2) * (1.0 - d.z(tet, v, c1)) - 1.0
    return out


def max_residual(sys, d):
    return float(np.max(np.abs(residual(sys, d))))


def jacobian_log(sys, d, consistency_tol=1e-9):
    """Differential of g in log coordinates xi_alpha = dz_alpha / z_alpha.

    Monomial rows are their integer exponent vectors.  The a-rows use
    the simplification valid at consistent points: coefficient 1 on the
    (v, c1) slot and z_{v,c3} on the (v, c2) slot.
    """
    err = deco.consistency_error(d)
    if err > consistency_tol:
        raise InconsistentDecorationError(
            f"inconsistent decoration: relation residual {err:.3e} exceeds {consistency_tol:.1e}"
        )
    n = sys.n_coords
    J = np.zeros((len(sys.rows), n), dtype=complex)
    for k, idx in enumerate(sys.monomial_rows):
        J[idx] = sys._mono[k]
    for idx in sys.a_rows:
        tet, v = sys.rows[idx].tag
        c1, c2, c3 = CYCLIC[v]
        J[idx, deco.edge_index(tet, v, c1)] = 1.0
        J[idx, deco.edge_index(tet, v, c2)] = d.z(tet, v, c3)
    return J


def tangent_A(d, consistency_tol=1e-9):
    """Bases of A_full(z) = Ker d_z a and A_J(z) = A_full intersect C (x) J*.

    A_full has dimension 12*nu: per vertex the relation
    xi(e_{v,c1}) + z_{v,c3} xi(e_{v,c2}) = 0 leaves xi(e_{v,c2}) and
    xi(e_{v,c3}) free, and all face slots are free.  A_J additionally
    imposes vanishing on Ker Omega^2, which pins xi(e_{v,c3}) and the
    face slots; it has dimension 4*nu.  Both bases are orthonormalized.
    """
    err = deco.consistency_error(d)
    if err > consistency_tol:
        raise InconsistentDecorationError(
            f"inconsistent decoration: relation residual {err:.3e} exceeds {consistency_tol:.1e}"
        )
    nu = d.nu
    n = PER_TET * nu
    full_cols = []
    j_cols = []
    for tet in range(nu):
        for v in VERTICES:
            c1, c2, c3 = CYCLIC[v]
            vec = np.zeros(n, dtype=complex)
            vec[deco.edge_index(tet, v, c2)] = 1.0
            vec[deco.edge_index(tet, v, c1)] = -d.z(tet, v, c3)
            full_cols.append(vec)
            free = np.zeros(n, dtype=complex)
            free[deco.edge_index(tet, v, c3)] = 1.0
            full_cols.append(free)
        for opp in FACE_OPPS:
            vec = np.zeros(n, dtype=complex)
            vec[deco.face_index(tet, opp)] = 1.0
            full_cols.append(vec)
        for v in VERTICES:
            c1, c2, c3 = CYCLIC[v]
            vec = np.zeros(n, dtype=complex)
            vec[deco.edge_index(tet, v, c2)] = 1.0
            vec[deco.edge_index(tet, v, c1)] = -d.z(tet, v, c3)
            vec[deco.edge_index(tet, v, c3)] = d.z(tet, v, c3) - 1.0
            j_cols.append(vec)
    # face slots of the A_J vectors follow from the face relations
    # xi(e_ijk) = xi(e_il) + xi(e_jl) + xi(e_kl).
    for col in j_cols:
        for tet in range(nu):
            for opp in FACE_OPPS:
                a, b, c = FACE_TRIPLES[opp]
                col[deco.face_index(tet, opp)] = (
                    col[deco.edge_index(tet, a, opp)]
                    + col[deco.edge_index(tet, b, opp)]
                    + col[deco.edge_index(tet, c, opp)]
                )
    A_full = np.linalg.qr(np.column_stack(full_cols))[0]
    A_J = np.linalg.qr(np.column_stack(j_cols))[0]
    return A_full, A_J


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _coord_name(idx):
    label = deco.coord_label(idx)
    L = tet_letter(label.tet)
    if label.kind == "edge":
        return f"{L}{label.edge[0]}{label.edge[1]}"
    tr = label.face
    return f"{L}{tr[0]}{tr[1]}{tr[2]}"


def _expand_faces(exponents):
    """Substitute Rel1 for face slots; returns (sign factor, edge exponents)."""
    exps = np.array(exponents, dtype=np.int64)
    sign = 1
    for idx in np.nonzero(exps)[0]:
        tet, slot = divmod(int(idx), PER_TET)
        if slot < 12:
            continue
        opp = FACE_OPPS[slot - 12]
        a, b, c = FACE_TRIPLES[opp]
        e = int(exps[idx])
        sign *= (-1) ** abs(e)
        for w in (a, b, c):
            exps[deco.edge_index(tet, w, opp)] += e
        exps[idx] = 0
    return sign, exps


def _monomial_text(sign, exponents):
    exps = np.asarray(exponents)
    num, den = [], []
    for i in np.nonzero(exps)[0]:
        e = int(exps[i])
        (num if e > 0 else den).extend([_coord_name(int(i))] * abs(e))
    text = "*".join(num) if num else "1"
    if den:
        text = f"{text}/({'*'.join(den)})" if len(den) > 1 else f"{text}/{den[0]}"
    if sign < 0:
        text = f"-{text}"
    return text


def row_text(sys, row):
    """Human-readable equation, face-matching rows expanded to edges.

    The two orientations of an edge row print in matched factor order:
    the representative orientation sorts its incidences, the reverse
    lists the transposed incidences in the same positions.
    """
    if row.kind == "a-vertex":
        tet, v = row.tag
        L = tet_letter(tet)
        c1, c2, _ = CYCLIC[v]
        return f"{L}{v}{c2}*(1-{L}{v}{c1}) = 1"
    if row.kind == "f-face":
        extra_sign, exps = _expand_faces(row.exponents)
        return f"{_monomial_text(row.sign * extra_sign, exps)} = 1"
    if row.kind == "f-edge":
        _, orientation, plus_cycle = row.tag
        factors = sorted(plus_cycle)
        if orientation == "-":
            factors = [(t, (j, i)) for t, (i, j) in factors]
        names = [f"{tet_letter(t)}{i}{j}" for t, (i, j) in factors]
        return f"{'*'.join(names)} = 1"
    return f"{_monomial_text(row.sign, np.array(row.exponents))} = 1"


def render_text(sys):
    return [row_text(sys, row) for row in sys.rows]


def edge_equation_texts(sys):
    """The f-edge rows as printed strings, in system order."""
    return [row_text(sys, sys.rows[k]) for k in sys.f_rows if sys.rows[k].kind == "f-edge"]


def face_equation_texts(sys):
    return [row_text(sys, sys.rows[k]) for k in sys.f_rows if sys.rows[k].kind == "f-face"]


def equations_to_json(sys):
    out = []
    for row in sys.rows:
        if row.kind == "a-vertex":
            tet, v = row.tag
            out.append(
                {
                    "label": row.label,
                    "kind": row.kind,
                    "tet": tet + 1,
                    "vertex": v,
                    "text": row_text(sys, row),
                }
            )
        else:
            exps = {
                str(deco.coord_label(int(i))): int(row.exponents[int(i)])
                for i in np.nonzero(np.asarray(row.exponents))[0]
            }
            out.append(
                {
                    "label": row.label,
                    "kind": row.kind,
                    "sign": row.sign,
                    "exponents": exps,
                    "text": row_text(sys, row),
                }
            )
    return {"rows": out}
