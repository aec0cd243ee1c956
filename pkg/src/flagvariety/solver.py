"""Newton solving in the reduced coordinates and the unipotent families.

The unknowns are the 4*nu reduced coordinates; the internal relations
hold identically under expansion, so the residual stacks only the
f-equations and the holonomy-word equations minus their targets.  The
overdetermined system is solved by Gauss-Newton with backtracking; a
step is shrunk whenever it would drag any coordinate within the guard
distance of the excluded values {0, 1}.
"""

import cmath
from dataclasses import dataclass, field

import numpy as np

from . import decoration as deco
from . import gluing as gl
from . import peripheral as per
from .decoration import CYCLIC, FACE_OPPS, FACE_TRIPLES, PER_TET, VERTICES
from .errors import DegenerateCoordinateError, InputError, NonConvergenceError

STEP_GUARD = 1e-6


@dataclass(frozen=True)
class SolveTarget:
    """Prescribed boundary eigenvalues per cusp.

    ``values`` is a tuple with one dict per cusp; keys among
    "A", "Astar", "B", "Bstar".  Targets must be nonzero.
    """

    values: tuple

    @classmethod
    def unipotent(cls, ell):
        return cls(tuple({"A": 1.0, "Astar": 1.0, "B": 1.0, "Bstar": 1.0} for _ in range(ell)))

    @classmethod
    def eigenvalues(cls, pairs):
        """Targets on (A, A*) only, one (A, Astar) pair per cusp."""
        return cls(tuple({"A": a, "Astar": astar} for a, astar in pairs))

    def __post_init__(self):
        for entry in self.values:
            for key, val in entry.items():
                if key not in ("A", "Astar", "B", "Bstar"):
                    raise InputError(f"unknown eigenvalue key {key!r}")
                if val == 0:
                    raise InputError("eigenvalue targets must be nonzero")


@dataclass
class SolveResult:
    point: object
    converged: bool
    iterations: int
    max_residual: float
    residual_history: list
    left_positive_region: bool = False
    warnings: list = field(default_factory=list)


def _dlog_matrix(r):
    """16nu x 4nu matrix D with D[alpha, s] = d log z_alpha / d x_s."""
    nu = r.nu
    D = np.zeros((PER_TET * nu, 4 * nu), dtype=complex)
    for t in range(nu):
        for v in VERTICES:
            x = r.x(t, v)
            col = deco.ReducedPoint.slot(t, v)
            c1, c2, c3 = CYCLIC[v]
            D[deco.edge_index(t, v, c1), col] = 1.0 / x
            D[deco.edge_index(t, v, c2), col] = 1.0 / (1.0 - x)
            D[deco.edge_index(t, v, c3), col] = 1.0 / (x * (x - 1.0))
    for t in range(nu):
        for opp in FACE_OPPS:
            row = deco.face_index(t, opp)
            for w in FACE_TRIPLES[opp]:
                D[row] += D[deco.edge_index(t, w, opp)]
    return D


def _solve_rows(sys, cs, target):
    """Monomial rows (exponents, target value) over the full coordinates."""
    rows = []
    for k in sys.f_rows:
        rows.append((np.array(sys.rows[k].exponents, dtype=np.int64), 1.0 + 0j))
    for cusp, entry in zip(cs, target.values):
        words = {
            "A": cusp.word_a.exponents_A,
            "Astar": cusp.word_a.exponents_Astar,
            "B": cusp.word_b.exponents_A,
            "Bstar": cusp.word_b.exponents_Astar,
        }
        for key in ("A", "Astar", "B", "Bstar"):
            if key in entry:
                rows.append((np.array(words[key], dtype=np.int64), complex(entry[key])))
    E = np.array([row[0] for row in rows])
    targets = np.array([row[1] for row in rows])
    return E, targets


def _residuals(E, targets, d):
    values = np.exp(E.astype(complex) @ np.log(d.vec))
    return values - targets, values


def gauss_newton(E, targets, start_vec, nu, max_iter=100, tol=1e-12, guard=STEP_GUARD,
                 pinned=frozenset()):
    """Damped Gauss-Newton on the reduced coordinates.

    ``pinned`` slots are held fixed.  Success requires the max-norm of
    the residual below ``tol``; on failure the best iterate and the
    residual history are attached to the raised NonConvergenceError.
    """
    x = np.array(start_vec, dtype=complex)
    free = np.array([k for k in range(4 * nu) if k not in pinned], dtype=int)
    history = []
    best = (np.inf, x.copy(), 0)

    def expand(vec):
        return deco.expand_reduced(deco.ReducedPoint(nu, vec), guard=guard)

    try:
        d = expand(x)
    except DegenerateCoordinateError as exc:
        raise NonConvergenceError(f"degenerate step: {exc}", best=None, history=[]) from exc

    for it in range(max_iter):
        r = deco.ReducedPoint(nu, x)
        F, values = _residuals(E, targets, d)
        err = float(np.max(np.abs(F)))
        history.append(err)
        if err < best[0]:
            best = (err, x.copy(), it)
        if err <= tol:
            return SolveResult(
                point=deco.ReducedPoint(nu, x),
                converged=True,
                iterations=it,
                max_residual=err,
                residual_history=history,
            )
        D = _dlog_matrix(r)
        J = (values[:, None] * (E.astype(complex) @ D))[:, free]
        step_free, *_ = np.linalg.lstsq(J, -F, rcond=None)
        step = np.zeros_like(x)
        step[free] = step_free
        norm0 = float(np.linalg.norm(F))
        lam = 1.0
        moved = False
        while lam > 1e-14:
            trial = x + lam * step
            try:
                d_trial = expand(trial)
            except DegenerateCoordinateError:
                lam *= 0.5
                continue
            F_trial, _ = _residuals(E, targets, d_trial)
            if float(np.linalg.norm(F_trial)) < (1.0 - 0.25 * lam) * norm0 or (
                float(np.max(np.abs(F_trial))) < err
            ):
                x = trial
                d = d_trial
                moved = True
                break
            lam *= 0.5
        if not moved:
            raise NonConvergenceError(
                f"degenerate step: no acceptable step at iteration {it} (residual {err:.3e})",
                best=deco.ReducedPoint(nu, best[1]),
                history=history,
            )
    raise NonConvergenceError(
        f"no convergence within {max_iter} iterations (best residual {best[0]:.3e})",
        best=deco.ReducedPoint(nu, best[1]),
        history=history,
    )


def newton_solve(t, sys, cs, start, target, max_iter=100, tol=1e-12, pinned=frozenset()):
    """Solve the gluing + holonomy-target system from a reduced start."""
    if isinstance(target, str):
        if target != "unipotent":
            raise InputError(f"unknown target {target!r}")
        target = SolveTarget.unipotent(len(cs))
    E, targets = _solve_rows(sys, cs, target)
    return gauss_newton(E, targets, start.vec, t.nu, max_iter=max_iter, tol=tol, pinned=pinned)


def solve_hol_target(t, sys, cs, base, target_pairs, radius=0.05, max_iter=100,
                     tol=1e-12, hol_tol=1e-9):
    """Prescribe (A_s, A_s*) near a positive solution (local biholomorphism).

    ``target_pairs`` is one (A, Astar) pair per cusp, within ``radius``
    of the base point's holonomy in log coordinates.  The returned
    point matches the target to ``hol_tol`` and satisfies the gluing
    equations to ``tol``; leaving the positive region only sets a flag.
    """
    base_dec = deco.expand_reduced(base)
    if not deco.is_positive(base_dec):
        raise InputError("base point must lie in the positive region")
    base_hol = per.hol(cs, base_dec)
    if len(target_pairs) != len(cs):
        raise InputError("need one (A, Astar) target pair per cusp")
    for (a_t, astar_t), entry in zip(target_pairs, base_hol):
        for tgt, cur in ((a_t, entry["A"]), (astar_t, entry["Astar"])):
            if tgt == 0:
                raise InputError("eigenvalue targets must be nonzero")
            if abs(cmath.log(tgt / cur)) > radius:
                raise InputError(
                    f"target out of local range: |log(target/current)| > {radius}"
                )
    target = SolveTarget.eigenvalues(target_pairs)
    E, targets = _solve_rows(sys, cs, target)
    result = gauss_newton(E, targets, base.vec, t.nu, max_iter=max_iter, tol=tol)
    final = deco.expand_reduced(result.point)
    got = per.hol(cs, final)
    hol_err = max(
        abs(entry[k] - complex(tgt))
        for entry, (a_t, astar_t) in zip(got, target_pairs)
        for k, tgt in (("A", a_t), ("Astar", astar_t))
    )
    if hol_err > hol_tol:
        raise NonConvergenceError(
            f"no convergence: holonomy mismatch {hol_err:.3e} > {hol_tol:.1e}",
            best=result.point,
            history=result.residual_history,
        )
    if not deco.is_positive(final):
        result.left_positive_region = True
        result.warnings.append("left positive region")
    return result


# ---------------------------------------------------------------------------
# The published one-parameter families of the sister manifold
# ---------------------------------------------------------------------------

TAU_PLUS = (1.0 + 5.0 ** 0.5) / 2.0
TAU_MINUS = (1.0 - 5.0 ** 0.5) / 2.0


@dataclass(frozen=True)
class FamilyParametrization:
    """A one-parameter family Y -> reduced point (8 coordinates)."""

    id: str
    tau: float

    def reduced(self, Y):
        """Closed-form reduced coordinates at parameter Y; may raise."""
        Y = complex(Y)
        X = self.tau * Y
        if self.id.startswith("S1"):
            if abs(X - 1.0) < 1e-12 or abs(X) < 1e-12:
                raise DegenerateCoordinateError(f"excluded parameter Y = {Y}")
            z12 = (X + Y) / (X - 1.0)
            z21 = 1.0 + Y
            z34 = (X * X + X + Y) / (X * (X - 1.0))
            z43 = X
            vec = [z12, z21, z34, z43, z12, z21, z34, z43]
        elif self.id.startswith("S2"):
            if abs(Y - 1.0) < 1e-12 or abs(Y) < 1e-12:
                raise DegenerateCoordinateError(f"excluded parameter Y = {Y}")
            z21 = (X + Y - 1.0) / (Y - 1.0)
            z34 = X + Y
            z43 = 1.0 / Y
            # z12 = w21 recovered from the unipotent system with the other
            # six coordinates pinned (the printed formula is garbled); see
            # the census data for the derivation record.
            T = X * (1.0 - X - Y) * (Y - 1.0)
            denom = T - Y * (X + Y - 1.0)
            if abs(denom) < 1e-12:
                raise DegenerateCoordinateError(f"excluded parameter Y = {Y}")
            z12 = T / denom
            vec = [z12, z21, z34, z43, z21, z12, z43, z34]
        else:
            raise InputError(f"unknown family {self.id!r}")
        return deco.ReducedPoint(2, np.array(vec, dtype=complex))


def sister_families():
    return {
        "S1+": FamilyParametrization("S1+", TAU_PLUS),
        "S1-": FamilyParametrization("S1-", TAU_MINUS),
        "S2+": FamilyParametrization("S2+", TAU_PLUS),
        "S2-": FamilyParametrization("S2-", TAU_MINUS),
    }


def sample_family(family, params, sys=None, cs=None, t=None, residual_tol=1e-11):
    """Evaluate the family and verify gluing + unipotent equations.

    Returns a list of (ReducedPoint, report dict); the report carries the
    max gluing residual and the max |eigenvalue - 1| at the sample.
    """
    if sys is None or cs is None or t is None:
        raise InputError("sample_family needs the triangulation, system and cusps")
    target = SolveTarget.unipotent(len(cs))
    E, targets = _solve_rows(sys, cs, target)
    out = []
    for Y in params:
        r = family.reduced(Y)
        d = deco.expand_reduced(r)
        F, _ = _residuals(E, targets, d)
        err = float(np.max(np.abs(F)))
        report = {
            "Y": complex(Y),
            "max_residual": err,
            "ok": err <= residual_tol,
        }
        if err > residual_tol:
            report["ok"] = False
        out.append((r, report))
    return out


def random_reduced_starts(nu, count, seed, rmin=0.2, rmax=5.0, guard=0.05):
    """Deterministic random starts in an annulus avoiding {0, 1}."""
    rng = np.random.default_rng(seed)
    starts = []
    while len(starts) < count:
        logr = rng.uniform(np.log(rmin), np.log(rmax), size=4 * nu)
        ang = rng.uniform(0.0, 2.0 * np.pi, size=4 * nu)
        vec = np.exp(logr) * np.exp(1j * ang)
        if np.min(np.abs(vec)) < guard or np.min(np.abs(vec - 1.0)) < guard:
            continue
        starts.append(vec)
    return [deco.ReducedPoint(nu, v) for v in starts]
