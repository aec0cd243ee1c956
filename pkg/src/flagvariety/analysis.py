"""Tangent spaces, rigidity and positivity certificates at a solution.

The tangent space Ker d_z g is always computed two ways: as the numeric
kernel of the full Jacobian and as the intersection of the complexified
exact lattice Im(p) cap Ker(F*) with A_full(z).  Agreement of the two
(dimensions equal, principal angles small) is the artifact's main
self-check against convention errors; disagreement raises.
"""

from dataclasses import dataclass, field

import numpy as np

from . import exactla as xla
from . import gluing as gl
from . import lattice as lat
from . import numla
from . import peripheral as per
from .decoration import is_positive
from .errors import IdentityViolationError, InputError, NotASolutionError


@dataclass
class Tolerances:
    rank_tol: float = 1e-8
    residual_tol: float = 1e-12
    unipotent_tol: float = 1e-9
    solution_tol: float = 1e-10
    angle_tol: float = 1e-7
    degeneracy_guard: float = 1e-10

    def to_json(self):
        return {
            "rank_tol": self.rank_tol,
            "residual_tol": self.residual_tol,
            "unipotent_tol": self.unipotent_tol,
            "solution_tol": self.solution_tol,
            "angle_tol": self.angle_tol,
            "degeneracy_guard": self.degeneracy_guard,
        }


DEFAULT_TOL = Tolerances()


@dataclass
class AnalysisReport:
    dim_ker_dg: int
    dim_unipotent_tangent: int  # -1 when the point is not unipotent
    transversal: bool
    positive: bool
    unipotent: bool
    singular_spectrum: list
    kernel_gap: float
    prop54_dims: tuple
    prop54_max_angle: float
    max_residual: float
    hol_values: list
    warnings: list = field(default_factory=list)
    tolerances: Tolerances = field(default_factory=Tolerances)

    def to_json(self):
        return {
            "dim_ker_dg": self.dim_ker_dg,
            "dim_unipotent_tangent": self.dim_unipotent_tangent,
            "transversal": self.transversal,
            "positive": self.positive,
            "unipotent": self.unipotent,
            "singular_spectrum": [float(s) for s in self.singular_spectrum],
            "kernel_gap": float(self.kernel_gap),
            "prop54_dims": list(self.prop54_dims),
            "prop54_max_angle": float(self.prop54_max_angle),
            "max_residual": float(self.max_residual),
            "hol_values": [
                {k: [v.real, v.imag] for k, v in entry.items()} for entry in self.hol_values
            ],
            "warnings": list(self.warnings),
            "tolerances": self.tolerances.to_json(),
        }


def _require_solution(sys, d, tol):
    err = gl.max_residual(sys, d)
    if err > tol.solution_tol:
        raise NotASolutionError(
            f"not a solution point: max gluing residual {err:.3e} > {tol.solution_tol:.1e}"
        )
    return err


def _complexify_columns(int_basis, n):
    if not int_basis:
        return np.zeros((n, 0), dtype=complex)
    return np.array(int_basis, dtype=complex).T


def tangent_space(t, L, sys, cs, d, tol=DEFAULT_TOL):
    """Ker d_z g computed twice (numeric and lattice route), with report."""
    err = _require_solution(sys, d, tol)
    J = gl.jacobian_log(sys, d)
    kernel, rk = numla.null_space(J, tol.rank_tol)
    warnings = []
    if rk.indeterminate:
        warnings.append(f"indeterminate dimension: kernel gap {rk.gap:.3g} < 1e3")

    inter = lat.im_p_cap_ker_fstar(L)
    U = numla.orth(_complexify_columns(inter, sys.n_coords))
    A_full, _ = gl.tangent_A(d)
    basis2, dim2, rk2 = numla.intersect_subspaces(U, A_full, tol.rank_tol)
    if rk2.indeterminate:
        warnings.append(f"indeterminate dimension: lattice-route gap {rk2.gap:.3g} < 1e3")

    angles = numla.principal_angles(kernel, basis2)
    max_angle = float(np.max(angles)) if angles.size else 0.0
    if kernel.shape[1] != dim2 or max_angle > tol.angle_tol:
        raise IdentityViolationError(
            f"Prop 5.4 mismatch: numeric dim {kernel.shape[1]}, lattice dim {dim2}, "
            f"max principal angle {max_angle:.3e}"
        )

    hol_vals = per.hol(cs, d)
    unip = all(
        abs(entry[k] - 1) <= tol.unipotent_tol for entry in hol_vals for k in entry
    )
    report = AnalysisReport(
        dim_ker_dg=kernel.shape[1],
        dim_unipotent_tangent=-1,
        transversal=False,
        positive=is_positive(d),
        unipotent=unip,
        singular_spectrum=list(map(float, rk.singular_values)),
        kernel_gap=rk.gap,
        prop54_dims=(kernel.shape[1], dim2),
        prop54_max_angle=max_angle,
        max_residual=err,
        hol_values=hol_vals,
        warnings=warnings,
        tolerances=tol,
    )
    return kernel, report


def rigidity_test(t, L, d, sys=None, tol=DEFAULT_TOL):
    """Transversality test: C (x) Im(p o F) meets A_full(z) only in 0.

    Returns (is_rigid, diagnostics).  True reproduces the situation in
    which boundary holonomy must move under any deformation.
    """
    if sys is None:
        sys = gl.build_equation_system(t)
    _require_solution(sys, d, tol)
    pf = lat.im_pF(L)
    U = numla.orth(_complexify_columns(pf, sys.n_coords))
    A_full, _ = gl.tangent_A(d)
    _, dim, rk = numla.intersect_subspaces(U, A_full, tol.rank_tol)
    diagnostics = {
        "intersection_dim": dim,
        "dim_im_pF": U.shape[1],
        "dim_A_full": A_full.shape[1],
        "gap": rk.gap,
        "indeterminate": rk.indeterminate,
    }
    return dim == 0, diagnostics


def positivity_certificate(d, xi, tol=DEFAULT_TOL):
    """Omega*(xi, conj xi); guaranteed nonzero on the positive region.

    Valid only at positive points (every edge coordinate in the upper
    half plane) and for xi in A_J(z); both preconditions are enforced.
    """
    if not is_positive(d):
        raise InputError("point not positive: certificate requires Im z > 0 on all edges")
    xi = np.asarray(xi, dtype=complex)
    if not lat.check_in_J_star(xi, d.nu, tol=1e-10):
        raise InputError("xi not in A_J: does not vanish on Ker Omega^2")
    _, A_J = gl.tangent_A(d)
    proj = A_J @ (A_J.conj().T @ xi)
    norm = np.linalg.norm(xi)
    if norm > 0 and np.linalg.norm(xi - proj) > 1e-8 * norm:
        raise InputError("xi not in A_J: residual after projection too large")
    return lat.omega_star(xi, np.conj(xi), d.nu, check=False)


def unipotent_values_error(cs, d):
    vals = per.hol(cs, d)
    return max(abs(entry[k] - 1) for entry in vals for k in entry)


def unipotent_tangent_dim(t, L, sys, cs, d, tol=DEFAULT_TOL):
    """dim of Ker d_z g cap Ker(dlog hol); 0 certifies first-order isolation."""
    err = unipotent_values_error(cs, d)
    if err > tol.unipotent_tol:
        raise InputError(f"not unipotent: max |eigenvalue - 1| = {err:.3e}")
    _require_solution(sys, d, tol)
    J = gl.jacobian_log(sys, d)
    M = per.dlog_hol(cs, t.nu).astype(complex)
    stacked = np.vstack([J, M])
    kernel, rk = numla.null_space(stacked, tol.rank_tol)
    return kernel.shape[1]


def analyze(t, L, sys, cs, d, tol=DEFAULT_TOL):
    """Full report: tangent dims, rigidity, positivity, unipotence."""
    kernel, report = tangent_space(t, L, sys, cs, d, tol)
    rigid, diag = rigidity_test(t, L, d, sys=sys, tol=tol)
    report.transversal = rigid
    if diag.get("indeterminate"):
        report.warnings.append(
            f"indeterminate dimension: rigidity gap {diag['gap']:.3g} < 1e3"
        )
    if report.unipotent:
        report.dim_unipotent_tangent = unipotent_tangent_dim(t, L, sys, cs, d, tol)
    return report
