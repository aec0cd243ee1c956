"""Integer lattice maps F, p, F* and the symplectic pairings.

The skew form Omega^2 on the 16*nu coordinate lattice is realized as
the pullback q*Omega of the nondegenerate form Omega on the rank-8nu
quotient J: the quotient map q sends an edge generator e_{v,c} to the
class of that edge and a face generator e_{ijk} to e_il + e_jl + e_kl;
on J the pairs (e_{v,c1}, e_{v,c2}) at each vertex form a symplectic
basis with Omega(e_{v,c1}, e_{v,c2}) = 1 and distinct vertices
orthogonal.  This is the unique skew form with the documented kernel
and quotient pairing; the dimension identities below cross-check it.

All computations here are exact (Python ints / Fractions).
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exactla as xla
from .decoration import CYCLIC, FACE_OPPS, FACE_TRIPLES, PER_TET, VERTICES, edge_index, face_index
from .errors import IdentityViolationError, InputError
from .triangulation import cusp_links, edge_classes


def ker_omega2_generators(nu):
    """Integer generators of Ker Omega^2: vertex sums and face relations."""
    n = PER_TET * nu
    gens = []
    for t in range(nu):
        for v in VERTICES:
            vec = [0] * n
            for c in CYCLIC[v]:
                vec[edge_index(t, v, c)] = 1
            gens.append(vec)
        for opp in FACE_OPPS:
            vec = [0] * n
            vec[face_index(t, opp)] = 1
            a, b, c = FACE_TRIPLES[opp]
            for w in (a, b, c):
                vec[edge_index(t, w, opp)] -= 1
            gens.append(vec)
    return gens


def _quotient_matrix(nu):
    """Matrix of q: J^2 -> J over the basis (e_{v,c1}, e_{v,c2}) per vertex."""
    rows = 8 * nu
    n = PER_TET * nu
    Q = [[0] * n for _ in range(rows)]

    def row_of(t, v, which):
        return 8 * t + 2 * (v - 1) + which

    for t in range(nu):
        for v in VERTICES:
            c1, c2, c3 = CYCLIC[v]
            Q[row_of(t, v, 0)][edge_index(t, v, c1)] = 1
            Q[row_of(t, v, 1)][edge_index(t, v, c2)] = 1
            # e_{v,c3} maps to -e_{v,c1} - e_{v,c2}
            Q[row_of(t, v, 0)][edge_index(t, v, c3)] = -1
            Q[row_of(t, v, 1)][edge_index(t, v, c3)] = -1
        for opp in FACE_OPPS:
            # q(e_ijk) = q(e_il) + q(e_jl) + q(e_kl)
            col = face_index(t, opp)
            for w in FACE_TRIPLES[opp]:
                c1, c2, c3 = CYCLIC[w]
                if opp == c1:
                    Q[row_of(t, w, 0)][col] += 1
                elif opp == c2:
                    Q[row_of(t, w, 1)][col] += 1
                else:
                    Q[row_of(t, w, 0)][col] -= 1
                    Q[row_of(t, w, 1)][col] -= 1
    return Q


def _omega_J(nu):
    rows = 8 * nu
    O = [[0] * rows for _ in range(rows)]
    for k in range(4 * nu):
        O[2 * k][2 * k + 1] = 1
        O[2 * k + 1][2 * k] = -1
    return O


@dataclass
class LatticeMaps:
    """Exact matrices of the chain C1or+C2 -F-> J^2 -p-> (J^2)* -F*-> C1or+C2."""

    nu: int
    F: list  # 16nu x 4nu
    Fstar: list  # 4nu x 16nu (transpose of F)
    P: list  # 16nu x 16nu, matrix of p (skew)
    E: list  # 16nu x 16nu, Gram matrix of Omega^2
    W: list  # 16nu x 16nu, Gram matrix extending Omega* to (J^2)*
    column_labels: list = field(default_factory=list)


def build_lattice_maps(t):
    """Construct F, p = Omega^2(., .) and F* for a valid triangulation."""
    nu = t.nu
    n = PER_TET * nu
    Q = _quotient_matrix(nu)
    OJ = _omega_J(nu)
    E = xla.matmul(xla.matmul(xla.transpose(Q), OJ), Q)
    P = xla.transpose(E)

    cols = []
    labels = []
    for k, cls in enumerate(edge_classes(t)):
        for orientation, cycle in (("+", cls.cycle), ("-", cls.transposed_cycle)):
            vec = [0] * n
            for tet, (i, j) in cycle:
                vec[edge_index(tet, i, j)] += 1
            cols.append(vec)
            labels.append(("edge", k, orientation))
    for g in sorted(t.gluings, key=lambda g: min((g.tet, g.face), (g.to_tet, g.to_face))):
        vec = [0] * n
        vec[face_index(g.tet, g.face)] += 1
        vec[face_index(g.to_tet, g.to_face)] += 1
        cols.append(vec)
        labels.append(("face", (g.tet, g.face), (g.to_tet, g.to_face)))
    F = xla.from_columns(cols, n)
    W = [[0] * n for _ in range(n)]
    for tet in range(nu):
        for v in VERTICES:
            c1, c2, _ = CYCLIC[v]
            W[edge_index(tet, v, c1)][edge_index(tet, v, c2)] = 1
            W[edge_index(tet, v, c2)][edge_index(tet, v, c1)] = -1
    return LatticeMaps(nu=nu, F=F, Fstar=xla.transpose(F), P=P, E=E, W=W, column_labels=labels)


@dataclass
class DimensionReport:
    nu: int
    ell: int
    rank_F: int
    rank_p: int
    dim_ker_p: int
    dim_im_p_cap_ker_Fstar: int
    dim_ker_p_cap_im_F: int
    dim_im_pF: int
    kernel_identity_ok: bool
    smith_audit: dict
    checks: list

    @property
    def all_ok(self):
        return self.kernel_identity_ok and all(c["ok"] for c in self.checks)

    def to_json(self):
        return {
            "nu": self.nu,
            "ell": self.ell,
            "rank_F": self.rank_F,
            "rank_p": self.rank_p,
            "dim_ker_p": self.dim_ker_p,
            "dim_im_p_cap_ker_Fstar": self.dim_im_p_cap_ker_Fstar,
            "dim_ker_p_cap_im_F": self.dim_ker_p_cap_im_F,
            "dim_im_pF": self.dim_im_pF,
            "kernel_identity_ok": self.kernel_identity_ok,
            "smith_audit": self.smith_audit,
            "checks": self.checks,
            "all_ok": self.all_ok,
        }


def im_p_cap_ker_fstar(L):
    """Exact basis of Im(p) intersect Ker(F*) as columns in Z^{16nu}."""
    im_p = xla.column_span_basis(L.P)
    ker_fstar = xla.kernel_basis(L.Fstar)
    return xla.intersect_column_spans(
        xla.from_columns(im_p, PER_TET * L.nu), xla.from_columns(ker_fstar, PER_TET * L.nu)
    )


def im_pF(L):
    """Exact basis of Im(p o F)."""
    return xla.column_span_basis(xla.matmul(L.P, L.F))


def dimension_report(L, t, strict=True):
    """Exact dimension identities and the Prop-type kernel identity.

    Checks, with ell the number of cusps: rank F = 4nu, dim Ker p = 8nu,
    dim(Ker p cap Im F) = 2 ell, dim(Im p cap Ker F*) = 4nu + 2 ell, and
    Ker(Omega* restricted to Im p cap Ker F*) = Im(p o F) as saturated
    sublattices.  With strict=True a failure raises
    IdentityViolationError naming the offending generators.
    """
    nu = L.nu
    n = PER_TET * nu
    ell = len(cusp_links(t))
    rank_F = xla.rank(L.F)
    rank_p = xla.rank(L.P)
    ker_p = xla.kernel_basis(L.P)
    dim_ker_p = len(ker_p)

    inter = im_p_cap_ker_fstar(L)
    dim_inter = len(inter)

    ker_im = xla.intersect_column_spans(xla.from_columns(ker_p, n), L.F)
    dim_ker_p_cap_im_F = len(ker_im)

    pf = im_pF(L)
    dim_im_pF = len(pf)

    # Kernel of Omega* restricted to Im p cap Ker F*.
    inter_mat = xla.from_columns(inter, n)
    gram = xla.matmul(xla.matmul(xla.transpose(inter_mat), L.W), inter_mat)
    gram_kernel = xla.kernel_basis(gram) if gram else []
    restricted_kernel = [xla.mat_vec(inter_mat, k) for k in gram_kernel]
    rk_mat = xla.from_columns(restricted_kernel, n) if restricted_kernel else [[] for _ in range(n)]
    pf_mat = xla.from_columns(pf, n) if pf else [[] for _ in range(n)]
    sat_rk = xla.from_columns(xla.saturate_column_span(rk_mat), n) if restricted_kernel else [[] for _ in range(n)]
    sat_pf = xla.from_columns(xla.saturate_column_span(pf_mat), n) if pf else [[] for _ in range(n)]
    kernel_identity_ok = xla.saturated_spans_equal(sat_rk, sat_pf)

    smith_audit = {
        "ker_p": xla.smith_diagonal(xla.from_columns(ker_p, n)) if ker_p else [],
        "im_p_cap_ker_Fstar": xla.smith_diagonal(inter_mat) if inter else [],
        "im_pF": xla.smith_diagonal(pf_mat) if pf else [],
    }

    checks = [
        {"name": "rank_F", "expected": 4 * nu, "actual": rank_F, "ok": rank_F == 4 * nu},
        {"name": "p_skew", "expected": True, "actual": _is_skew(L.P), "ok": _is_skew(L.P)},
        {"name": "dim_ker_p", "expected": 8 * nu, "actual": dim_ker_p, "ok": dim_ker_p == 8 * nu},
        {"name": "rank_p", "expected": 8 * nu, "actual": rank_p, "ok": rank_p == 8 * nu},
        {
            "name": "dim_ker_p_cap_im_F",
            "expected": 2 * ell,
            "actual": dim_ker_p_cap_im_F,
            "ok": dim_ker_p_cap_im_F == 2 * ell,
        },
        {
            "name": "dim_im_p_cap_ker_Fstar",
            "expected": 4 * nu + 2 * ell,
            "actual": dim_inter,
            "ok": dim_inter == 4 * nu + 2 * ell,
        },
        {
            "name": "FstarPF_skew",
            "expected": True,
            "actual": _is_skew(xla.matmul(xla.matmul(L.Fstar, L.P), L.F)),
            "ok": _is_skew(xla.matmul(xla.matmul(L.Fstar, L.P), L.F)),
        },
    ]

    report = DimensionReport(
        nu=nu,
        ell=ell,
        rank_F=rank_F,
        rank_p=rank_p,
        dim_ker_p=dim_ker_p,
        dim_im_p_cap_ker_Fstar=dim_inter,
        dim_ker_p_cap_im_F=dim_ker_p_cap_im_F,
        dim_im_pF=dim_im_pF,
        kernel_identity_ok=kernel_identity_ok,
        smith_audit=smith_audit,
        checks=checks,
    )
    if strict and not report.all_ok:
        bad = [c["name"] for c in checks if not c["ok"]]
        if not kernel_identity_ok:
            bad.append("Ker(Omega*|) = Im(pF)")
            detail = f"; restricted-kernel generators {restricted_kernel[:2]}..."
        else:
            detail = ""
        raise IdentityViolationError(f"identity violated: {bad}{detail}")
    return report


def _is_skew(M):
    return all(M[i][j] == -M[j][i] for i in range(len(M)) for j in range(len(M)))


# ---------------------------------------------------------------------------
# Pairings
# ---------------------------------------------------------------------------

def check_in_J_star(xi, nu, tol=1e-10):
    """Verify a (complex) covector vanishes on Ker Omega^2."""
    xi = np.asarray(xi)
    scale = max(float(np.linalg.norm(xi)), 1.0)
    for gen in ker_omega2_generators(nu):
        val = complex(np.dot(xi, np.array(gen)))
        if abs(val) > tol * scale * 4:
            return False
    return True


def omega_star(xi, eta, nu=None, check=True, tol=1e-10):
    """The symplectic form on J*, evaluated on coordinate covectors.

    omega*(xi, eta) = sum over (tet, vertex) of
    xi(e_{v,c1}) eta(e_{v,c2}) - xi(e_{v,c2}) eta(e_{v,c1}).
    Both arguments must vanish on Ker Omega^2.
    """
    xi = np.asarray(xi, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    if nu is None:
        nu = len(xi) // PER_TET
    if len(xi) != PER_TET * nu or len(eta) != PER_TET * nu:
        raise InputError("omega_star arguments must be full coordinate covectors")
    if check:
        if not check_in_J_star(xi, nu, tol) or not check_in_J_star(eta, nu, tol):
            raise InputError("argument not in J*: does not vanish on Ker Omega^2")
    total = 0j
    for t in range(nu):
        for v in VERTICES:
            c1, c2, _ = CYCLIC[v]
            i1, i2 = edge_index(t, v, c1), edge_index(t, v, c2)
            total += xi[i1] * eta[i2] - xi[i2] * eta[i1]
    return total


@dataclass(frozen=True)
class WpVector:
    """Element of H^1(T_s, Q^2) split along the (a_s, b_s) duals."""

    cusp: int
    a_part: tuple
    b_part: tuple


def _root_product(u, v):
    n, m = u
    np_, mp = v
    if all(isinstance(x, (int, Fraction)) for x in (n, m, np_, mp)):
        return Fraction(2 * n * np_ + 2 * m * mp + n * mp + np_ * m, 3)
    return (2 * n * np_ + 2 * m * mp + n * mp + np_ * m) / 3


def wp_pairing(u, v):
    """wp(u, v) = <u_a, v_b> - <u_b, v_a> on one cusp torus."""
    if u.cusp != v.cusp:
        raise InputError("wp pairing requires vectors on the same cusp")
    return _root_product(u.a_part, v.b_part) - _root_product(u.b_part, v.a_part)
