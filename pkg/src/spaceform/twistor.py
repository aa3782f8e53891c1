"""Twistor invariants, the induced connection on self-dual bivectors,
curvature and degeneracy diagnostics, and the dbar condition.

Real cases carry two invariant families labelled '+' and '-'; Lorentzian
cases carry one complex family labelled ''.  Each family comes with the
pair of 3x3 connection matrices of the induced covariant derivatives
along T1, T2 in its self-dual frame, and the discriminant Delta whose
vanishing marks degeneracy of the twistor lift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cases import FRAME_METRIC, FRAME_ORDER, METRIC_TYPE, SurfaceCase
from .errors import DegenerateDelta, InvalidCase, FrameNormalizationError
from .fundamental import FundamentalData
from .grids import Grid, d2_du, d2_dv, d_du, d_dv
from .geomcore import (
    BIVECTOR_PAIRS,
    bivector_coordinates,
    selfdual_frame,
    theta_components,
    wedge,
)

DELTA_THRESHOLD_FACTOR = 1e-10


@dataclass
class InvariantFamily:
    """One labelled family of twistor invariants on the grid."""

    W: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    delta: np.ndarray


@dataclass
class TwistorInvariants:
    case: SurfaceCase
    grid: Grid
    lam: np.ndarray
    families: dict  # {'+': ..., '-': ...} or {'': ...}

    @property
    def is_complex(self) -> bool:
        return "" in self.families

    def family(self, label: str = None) -> InvariantFamily:
        if label is None:
            label = "" if self.is_complex else "+"
        return self.families[label]


def family_labels(case: SurfaceCase):
    return ("",) if case.is_lorentzian else ("+", "-")


def twistor_invariants(data: FundamentalData) -> TwistorInvariants:
    """The W, X, Y, Z, phi, psi fields and discriminant Delta per family."""
    lam_u, lam_v = data.lam_derivatives()
    a1, a2, a3 = data.alpha1, data.alpha2, data.alpha3
    b1, b2, b3 = data.beta1, data.beta2, data.beta3
    m1, m2 = data.mu1, data.mu2
    case = data.case
    fams = {}
    if case is SurfaceCase.LOR_SPACE:
        W, X = a2 - 1j * b1, a2 + 1j * b3
        Y, Z = b2 - 1j * a1, b2 + 1j * a3
        fams[""] = InvariantFamily(W, X, Y, Z,
                                   lam_u - 1j * m2, lam_v + 1j * m1, W * X - Y * Z)
    elif case is SurfaceCase.LOR_TIME:
        W, X = a2 + 1j * b1, a2 + 1j * b3
        Y, Z = b2 - 1j * a1, b2 - 1j * a3
        fams[""] = InvariantFamily(W, X, Y, Z,
                                   lam_u - 1j * m2, lam_v - 1j * m1, W * X + Y * Z)
    else:
        Ws = {s: a2 + s * b1 for s in (1, -1)}
        Xs = {s: a2 + s * b3 for s in (1, -1)}
        Ys = {s: b2 + s * a1 for s in (1, -1)}
        Zs = {s: b2 + s * a3 for s in (1, -1)}
        for s in (1, -1):
            if case is SurfaceCase.NEUT_TIME:
                delta = Ws[s] * Xs[s] - Ys[s] * Zs[s]
            else:
                delta = Ws[-s] * Xs[s] + Ys[s] * Zs[-s]
            fams["+" if s > 0 else "-"] = InvariantFamily(
                Ws[s], Xs[s], Ys[s], Zs[s],
                lam_u - s * m2, lam_v - s * m1, delta)
    return TwistorInvariants(case=case, grid=data.grid, lam=data.lam, families=fams)


def hat_connection_matrices(data: FundamentalData, inv: TwistorInvariants = None) -> dict:
    """{label: (M1, M2)} of shape grid + (3, 3) per invariant family.

    M1 and M2 are the matrices of the induced covariant derivatives along
    T1 and T2 in the family's self-dual frame (the displayed frame per
    case: the mixed triple in the neutral cases, the conjugate triple in
    the Lorentzian time-like case).
    """
    if inv is None:
        inv = twistor_invariants(data)
    case = data.case
    shape = data.grid.shape
    dtype = complex if case.is_lorentzian else float
    out = {}
    for label in family_labels(case):
        f = inv.families[label]
        s = -1.0 if label == "-" else 1.0
        M1 = np.zeros(shape + (3, 3), dtype=dtype)
        M2 = np.zeros(shape + (3, 3), dtype=dtype)

        def skew(M, i, j, val):
            M[..., i, j] = val
            M[..., j, i] = -val

        if case is SurfaceCase.RIEM:
            fm = inv.families["-" if label == "+" else "+"]
            skew(M1, 0, 1, -f.W); skew(M1, 0, 2, -fm.Y); skew(M1, 1, 2, s * f.psi)
            skew(M2, 0, 1, -s * f.Z); skew(M2, 0, 2, s * fm.X); skew(M2, 1, 2, -s * fm.phi)
        elif case is SurfaceCase.NEUT_SPACE:
            fm = inv.families["-" if label == "+" else "+"]
            M1[..., 0, 1] = M1[..., 1, 0] = f.W
            M1[..., 0, 2] = M1[..., 2, 0] = fm.Y
            M1[..., 1, 2] = s * f.psi; M1[..., 2, 1] = -s * f.psi
            M2[..., 0, 1] = M2[..., 1, 0] = s * f.Z
            M2[..., 0, 2] = M2[..., 2, 0] = -s * fm.X
            M2[..., 1, 2] = -s * fm.phi; M2[..., 2, 1] = s * fm.phi
        elif case is SurfaceCase.NEUT_TIME:
            M1[..., 0, 1] = M1[..., 1, 0] = f.W
            M1[..., 0, 2] = M1[..., 2, 0] = -s * f.psi
            M1[..., 1, 2] = -f.Y; M1[..., 2, 1] = f.Y
            M2[..., 0, 1] = M2[..., 1, 0] = s * f.Z
            M2[..., 0, 2] = M2[..., 2, 0] = -s * f.phi
            M2[..., 1, 2] = -s * f.X; M2[..., 2, 1] = s * f.X
        elif case is SurfaceCase.LOR_SPACE:
            skew(M1, 0, 1, -f.W); skew(M1, 1, 2, f.psi)
            M1[..., 0, 2] = 1j * f.Y; M1[..., 2, 0] = -1j * f.Y
            skew(M2, 0, 2, f.X); skew(M2, 1, 2, -f.phi)
            M2[..., 0, 1] = 1j * f.Z; M2[..., 1, 0] = -1j * f.Z
        else:  # LOR_TIME, conjugate-Theta frame
            M1[..., 0, 1] = -1j * f.W; M1[..., 1, 0] = 1j * f.W
            M1[..., 0, 2] = -1j * f.Y; M1[..., 2, 0] = 1j * f.Y
            M1[..., 1, 2] = -1j * f.psi; M1[..., 2, 1] = 1j * f.psi
            skew(M2, 0, 1, f.Z); skew(M2, 0, 2, -f.X)
            M2[..., 1, 2] = -1j * f.phi; M2[..., 2, 1] = 1j * f.phi
        out[label] = (M1, M2)
    return out


def _hat_frame_rows(case: SurfaceCase, label: str) -> np.ndarray:
    """(3, 6) bivector components of the frame the hat matrices act in."""
    if case is SurfaceCase.LOR_SPACE:
        return selfdual_frame(case, 1)
    if case is SurfaceCase.LOR_TIME:
        return selfdual_frame(case, -1)
    return selfdual_frame(case, 1 if label == "+" else -1)


def curvature_structure(case: SurfaceCase, label: str) -> np.ndarray:
    """3x3 matrix M with curvature RHS = L0 exp(2 lam) * M per family.

    Computed from the constant-curvature ambient: R(T1,T2) acts on the
    frame as a rank-2 rotation/boost generator, which induces a
    derivation on bivectors; M is its matrix in the family's frame.
    """
    order = FRAME_ORDER[case]
    p1, p2 = order.index("T1"), order.index("T2")
    eps = FRAME_METRIC[METRIC_TYPE[case]]
    rho = np.zeros((4, 4))
    rho[p1, p2] = eps[p2]
    rho[p2, p1] = -eps[p1]
    deriv = np.zeros((6, 6), dtype=complex)
    eye = np.eye(4, dtype=complex)
    for col, (k, l) in enumerate(BIVECTOR_PAIRS):
        b = wedge(rho @ eye[k], eye[l]) + wedge(eye[k], rho @ eye[l])
        deriv[:, col] = b.comps
    rows = _hat_frame_rows(case, label)
    if case.is_lorentzian:
        other = np.conj(rows)
    else:
        other = _hat_frame_rows(case, "-" if label == "+" else "+")
    basis = np.vstack([rows, other])
    m = np.zeros((3, 3), dtype=complex)
    for col in range(3):
        coords = bivector_coordinates(deriv @ rows[col], basis)
        if np.max(np.abs(coords[3:])) > 1e-12:
            raise FrameNormalizationError("curvature derivation leaks across eigenspaces")
        m[:, col] = coords[:3]
    if not case.is_lorentzian:
        m = m.real
    return m


def curvature_residual(data: FundamentalData) -> dict:
    """{label: residual field grid + (3, 3)} of the curvature identity.

    Compares d_u(M2) - d_v(M1) + [M1, M2] against L0 exp(2 lam) times the
    constant structure matrix of the family.
    """
    mats = hat_connection_matrices(data)
    Le = data.model.L0 * data.e2l()
    out = {}
    for label, (M1, M2) in mats.items():
        R = (d_du(M2, data.grid) - d_dv(M1, data.grid)
             + np.einsum("...ij,...jk->...ik", M1, M2)
             - np.einsum("...ij,...jk->...ik", M2, M1))
        out[label] = R - Le[..., None, None] * curvature_structure(data.case, label)
    return out


def delta_threshold(lam: np.ndarray) -> np.ndarray:
    return DELTA_THRESHOLD_FACTOR * np.maximum(1.0, np.exp(2.0 * lam))


@dataclass
class DegeneracyReport:
    delta: dict                # {label: field}
    nondegenerate: bool
    K: np.ndarray
    K_minus_L0: np.ndarray
    rperp: np.ndarray


def degeneracy_report(data: FundamentalData, inv: TwistorInvariants = None) -> DegeneracyReport:
    """Twistor-lift degeneracy dichotomy: Delta vs (K - L0, normal curvature)."""
    if inv is None:
        inv = twistor_invariants(data)
    g = data.grid
    thr = delta_threshold(data.lam)
    deltas = {label: f.delta for label, f in inv.families.items()}
    nondeg = all(np.all(np.abs(d) > thr) for d in deltas.values())
    an = data.analytic
    if an is not None and an.lam_uu and an.lam_vv:
        U, V = g.mesh()
        lam_uu = np.broadcast_to(an.lam_uu(U, V), g.shape).astype(float)
        lam_vv = np.broadcast_to(an.lam_vv(U, V), g.shape).astype(float)
    elif an is not None and an.lam_u and an.lam_v:
        lam_u, lam_v = data.lam_derivatives()
        lam_uu, lam_vv = d_du(lam_u, g), d_dv(lam_v, g)
    else:
        lam_uu, lam_vv = d2_du(data.lam, g), d2_dv(data.lam, g)
    lap = lam_uu + (-1 if data.case.is_timelike else 1) * lam_vv
    K = -np.exp(-2.0 * data.lam) * lap
    rperp = d_dv(data.mu1, g) - d_du(data.mu2, g)
    return DegeneracyReport(delta=deltas, nondegenerate=nondeg, K=K,
                            K_minus_L0=K - data.model.L0, rperp=rperp)


# Per-family linear system M [phi; psi'] = d encoding the two Codazzi
# equations in the invariants; solving it yields the (A, B) functions.
def _d4u(f, grid):
    return d_du(f, grid, order=4)


def _d4v(f, grid):
    return d_dv(f, grid, order=4)


def _ab_system(case: SurfaceCase, inv: TwistorInvariants, label: str, grid: Grid):
    f = inv.families[label]
    s = -1.0 if label == "-" else 1.0
    if case in (SurfaceCase.RIEM, SurfaceCase.NEUT_SPACE):
        fm = inv.families["-" if label == "+" else "+"]
        M = np.stack([
            np.stack([s * fm.W, -fm.Z], axis=-1),
            np.stack([-s * f.Y, -f.X], axis=-1)], axis=-2)
        d = np.stack([
            _d4v(f.Y, grid) - s * _d4u(f.X, grid),
            _d4v(fm.W, grid) + s * _d4u(fm.Z, grid)], axis=-1)
    elif case is SurfaceCase.NEUT_TIME:
        M = np.stack([
            np.stack([s * f.W, -f.Z], axis=-1),
            np.stack([s * f.Y, -f.X], axis=-1)], axis=-2)
        d = np.stack([
            _d4v(f.Y, grid) - s * _d4u(f.X, grid),
            _d4v(f.W, grid) - s * _d4u(f.Z, grid)], axis=-1)
    elif case is SurfaceCase.LOR_SPACE:
        M = np.stack([
            np.stack([-1j * f.W, -f.Z], axis=-1),
            np.stack([-1j * f.Y, -f.X], axis=-1)], axis=-2)
        d = np.stack([
            _d4v(f.Y, grid) + 1j * _d4u(f.X, grid),
            _d4v(f.W, grid) + 1j * _d4u(f.Z, grid)], axis=-1)
    else:  # LOR_TIME
        M = np.stack([
            np.stack([-1j * f.W, -f.Z], axis=-1),
            np.stack([1j * f.Y, -f.X], axis=-1)], axis=-2)
        d = np.stack([
            _d4v(f.Y, grid) + 1j * _d4u(f.X, grid),
            _d4v(f.W, grid) - 1j * _d4u(f.Z, grid)], axis=-1)
    return M, d


def ab_functions(inv: TwistorInvariants) -> tuple:
    """(A, B) as {label: field} dicts from the Codazzi system in W, X, Y, Z.

    On data satisfying the compatibility equations, A and B reproduce phi
    and psi of the matching families.  Raises DegenerateDelta when |Delta|
    falls below the scale-aware threshold anywhere.
    """
    thr = delta_threshold(inv.lam)
    for label, f in inv.families.items():
        bad = np.abs(f.delta) <= thr
        if np.any(bad):
            loc = np.unravel_index(np.argmin(np.abs(f.delta)), f.delta.shape)
            raise DegenerateDelta(
                f"discriminant below threshold (family {label or 'complex'})",
                location=tuple(int(x) for x in loc),
                value=complex(f.delta[loc]) if inv.is_complex else float(f.delta[loc]),
            )
    A, B = {}, {}
    case = inv.case
    for label in inv.families:
        M, d = _ab_system(case, inv, label, inv.grid)
        sol = np.linalg.solve(M, d[..., None])[..., 0]
        if case in (SurfaceCase.RIEM, SurfaceCase.NEUT_SPACE):
            # solving family s gives (A_s, B_{-s})
            A[label] = sol[..., 0]
            B["-" if label == "+" else "+"] = sol[..., 1]
        else:
            A[label] = sol[..., 0]
            B[label] = sol[..., 1]
    return A, B


def delbar_residual(data: FundamentalData, inv: TwistorInvariants = None) -> tuple:
    """Components along Theta_2, Theta_3 of the dbar-derivative of Theta_1.

    Lorentzian space-like case only; returns ((W+Z)/2, -i(X+Y)/2), which
    vanishes exactly where W+Z = 0 and X+Y = 0.
    """
    if data.case is not SurfaceCase.LOR_SPACE:
        raise InvalidCase("dbar residual is defined in the Lorentzian space-like case")
    if inv is None:
        inv = twistor_invariants(data)
    f = inv.families[""]
    return (f.W + f.Z) / 2.0, -1j * (f.X + f.Y) / 2.0


def linear_dependence_check(data: FundamentalData, tol: float = 1e-10) -> dict:
    """Where (alpha1..3) and (beta1..3) are linearly dependent, with branches.

    Returns {'dependent': bool field, 'branch': string field} where the
    branch is 'zero-mean-curvature' (alpha1 + alpha3 = 0), 'p-zero'
    (alpha1 = alpha3 and alpha2 = 0), both comma-joined, or ''.
    """
    a = np.stack([data.alpha1, data.alpha2, data.alpha3])
    b = np.stack([data.beta1, data.beta2, data.beta3])
    minors = np.stack([a[i] * b[j] - a[j] * b[i]
                       for i, j in ((0, 1), (0, 2), (1, 2))])
    scale = np.maximum(1.0, np.max(np.abs(a), axis=0) * np.max(np.abs(b), axis=0))
    dependent = np.max(np.abs(minors), axis=0) <= tol * scale
    fscale = np.maximum(1.0, np.max(np.abs(a), axis=0))
    zmc = np.abs(data.alpha1 + data.alpha3) <= tol * fscale
    pz = (np.abs(data.alpha1 - data.alpha3) <= tol * fscale) \
        & (np.abs(data.alpha2) <= tol * fscale)
    branch = np.full(data.grid.shape, "", dtype=object)
    branch[zmc] = "zero-mean-curvature"
    branch[pz & zmc] = "zero-mean-curvature,p-zero"
    branch[pz & ~zmc] = "p-zero"
    return {"dependent": dependent, "branch": branch}


def so3c_connection_form(omega: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """3x3 complex form of the induced connection on self-dual bivectors.

    ``omega`` is a (..., 4, 4) connection form in a Lorentz-orthonormal
    frame (last axis time-like): skew in the first three indices,
    symmetric across the fourth, zero at (4, 4).
    """
    w = np.asarray(omega, dtype=float)
    if w.shape[-2:] != (4, 4):
        raise InvalidCase("connection form must be 4x4")
    sym = w[..., :3, :3] + np.swapaxes(w[..., :3, :3], -1, -2)
    mixed = w[..., :3, 3] - w[..., 3, :3]
    if (np.max(np.abs(sym)) > tol or np.max(np.abs(mixed)) > tol
            or np.max(np.abs(w[..., 3, 3])) > tol):
        raise FrameNormalizationError("connection form violates the Lorentz symmetries")
    hat = np.zeros(w.shape[:-2] + (3, 3), dtype=complex)
    e12 = -w[..., 2, 1] + 1j * w[..., 3, 0]
    e13 = w[..., 2, 0] + 1j * w[..., 3, 1]
    e23 = -w[..., 1, 0] + 1j * w[..., 3, 2]
    hat[..., 0, 1] = e12; hat[..., 1, 0] = -e12
    hat[..., 0, 2] = e13; hat[..., 2, 0] = -e13
    hat[..., 1, 2] = e23; hat[..., 2, 1] = -e23
    return hat
