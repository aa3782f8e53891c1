"""Frame integration and the inverse constructions.

Forward direction: integrate the frame ODEs Y_u = Y S, Y_v = Y T over the
grid (classical 4th-order steps) to recover the immersion; extract the
fundamental data back from a frame field by projecting derivatives onto
the frame.

Inverse direction: build fundamental data from prescribed twistor
invariant fields (flat and curved ambient), and from holomorphic data
under the dbar-vanishing condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cases import COLUMN_SIGNS, SurfaceCase
from .errors import (
    DegenerateDelta,
    DegenerateFrame,
    DomainViolation,
    HypothesisViolated,
    IncompatiblePair,
    InvalidCase,
    InvalidInitialFrame,
    LiouvilleViolated,
    NonFiniteState,
    SignMismatch,
    TotallyGeodesicRegion,
)
from .fundamental import (
    FIELD_NAMES,
    FundamentalData,
    SpaceFormModel,
    ambient_model,
    assemble_connection,
    canonical_frame,
    connection_grids,
    validate_frame,
)
from .grids import Grid, d2_du, d2_dv, d_du, d_dv, half_samples
from .twistor import (
    InvariantFamily,
    TwistorInvariants,
    _ab_system,
    ab_functions,
    delta_threshold,
    family_labels,
)


@dataclass
class FrameField:
    """Ambient frames (T1, T2, N1, N2, F) at every grid point.

    ``frames`` has shape (nu, nv, n, 5) with n = 4 (flat ambient, F is the
    position column) or 5.  ``diagnostics`` records constraint drift and
    path-consistency residuals from the integration that produced it.
    """

    model: SpaceFormModel
    grid: Grid
    frames: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    @property
    def position(self) -> np.ndarray:
        """F as an (nu, nv, n) array."""
        return self.frames[..., :, 4]

    def column(self, k: int) -> np.ndarray:
        return self.frames[..., :, k]


def _rk4_sweep(Y0, mats, mats_mid, h):
    """March Y' = Y M along one axis; Y0 (..., n, 5), mats (m, ..., 5, 5)."""
    steps = mats.shape[0] - 1
    out = np.empty((steps + 1,) + Y0.shape)
    out[0] = Y0
    y = Y0
    for i in range(steps):
        a, m, b = mats[i], mats_mid[i], mats[i + 1]
        k1 = y @ a
        k2 = (y + 0.5 * h * k1) @ m
        k3 = (y + 0.5 * h * k2) @ m
        k4 = (y + h * k3) @ b
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = y
    return out


def _analytic_connection(data: FundamentalData, U, V):
    """S, T evaluated from the analytic field providers at points (U, V)."""
    p = data.analytic
    vals = {n: getattr(p, n)(U, V) for n in FIELD_NAMES}
    return assemble_connection(
        data.case, data.model.L0, vals["lam"], p.lam_u(U, V), p.lam_v(U, V),
        vals["alpha1"], vals["alpha2"], vals["alpha3"],
        vals["beta1"], vals["beta2"], vals["beta3"], vals["mu1"], vals["mu2"],
    )


def _midpoint_matrices(data: FundamentalData, S, T):
    """Connection matrices halfway between nodes along u (for S) and v (for T).

    Uses the analytic field providers when complete (exact midpoints,
    preserving the 4th-order step), else cubic interpolation of the
    node matrices.
    """
    g = data.grid
    if data.analytic is not None and data.analytic.complete():
        uu = g.u[:-1] + g.du / 2.0
        Smid, _ = _analytic_connection(data, uu[:, None], g.v[None, :])
        vv = g.v[:-1] + g.dv / 2.0
        _, Tmid = _analytic_connection(data, g.u[:, None], vv[None, :])
        return Smid, Tmid
    return half_samples(S, axis=0), half_samples(T, axis=1)


def integrate_frame(data: FundamentalData, init: np.ndarray = None,
                    init_tol: float = 1e-8, check_transposed: bool = False) -> FrameField:
    """Integrate the moving frame over the grid from its value at (u0, v0).

    Classical 4th-order steps: first along the v = v0 row using S, then
    along every u-column using T.  Diagnostics report the frame-constraint
    drift, the residual of re-integrating the final row by S, and (on
    request) the max discrepancy against the transposed integration path.
    """
    model = data.model
    if init is None:
        init = canonical_frame(model, lam0=float(data.lam[0, 0]))
    init = np.asarray(init, dtype=float)
    if init.shape != (model.ambient_dim, 5):
        raise InvalidInitialFrame(
            f"initial frame must be {model.ambient_dim}x5, got {init.shape}")
    res0 = validate_frame(init, float(data.lam[0, 0]), data.case,
                          L0=model.L0, ambient=model.ambient)
    if np.max(np.abs(res0)) > init_tol * max(1.0, np.exp(2 * float(data.lam[0, 0]))):
        raise InvalidInitialFrame(
            f"initial frame violates the case normalization (residual {np.max(np.abs(res0)):.3e})")

    S, T = connection_grids(data)
    Smid, Tmid = _midpoint_matrices(data, S, T)
    g = data.grid

    # u-sweep along the first row, then v-sweeps for all columns at once
    row = _rk4_sweep(init, S[:, 0], Smid[:, 0], g.du)          # (nu, n, 5)
    frames = _rk4_sweep(row, np.moveaxis(T, 1, 0), np.moveaxis(Tmid, 1, 0), g.dv)
    frames = np.moveaxis(frames, 0, 1)                          # (nu, nv, n, 5)
    if not np.all(np.isfinite(frames)):
        raise NonFiniteState("frame integration produced non-finite values")

    diagnostics = {"drift": float(frame_drift(frames, data)),
                   "cross_consistency": float(np.max(np.abs(
                       _rk4_sweep(frames[0, -1], S[:, -1], Smid[:, -1], g.du)
                       - frames[:, -1])))}
    if check_transposed:
        col = _rk4_sweep(init, T[0], Tmid[0], g.dv)             # (nv, n, 5)
        alt = _rk4_sweep(col, S, Smid, g.du)                    # (nu, nv, n, 5)
        diagnostics["transposed_discrepancy"] = float(np.max(np.abs(alt - frames)))
    return FrameField(model=model, grid=g, frames=frames, diagnostics=diagnostics)


def frame_drift(frames: np.ndarray, data: FundamentalData) -> float:
    """Max violation of the frame inner-product constraints over the grid."""
    eta = np.asarray(data.model.ambient.diag, dtype=float)
    cols = frames[..., :4]
    gram = np.einsum("...ak,a,...al->...kl", cols, eta, cols)
    target = np.asarray(COLUMN_SIGNS[data.case], dtype=float) * data.e2l()[..., None]
    drift = np.max(np.abs(gram - np.eye(4) * target[..., None, :]))
    if data.model.L0 != 0.0:
        f = frames[..., 4]
        drift = max(drift, np.max(np.abs(
            np.einsum("...a,a,...a->...", f, eta, f) - 1.0 / data.model.L0)))
    return float(drift)


def extract_fundamental(frames: FrameField, model: SpaceFormModel = None,
                        min_e2l: float = 1e-12) -> FundamentalData:
    """Recover fundamental data from a frame field.

    lam comes from the squared norm of T1; the remaining fields are read
    off the connection matrices S = G^{-1} Y^t eta Y_u (and likewise T),
    with 4th-order differences on the frames.
    """
    if model is None:
        model = frames.model
    g = frames.grid
    Y = frames.frames
    eta = np.asarray(model.ambient.diag, dtype=float)
    e2l = np.einsum("...a,a,...a->...", Y[..., 0], eta, Y[..., 0])
    if np.min(e2l) < min_e2l:
        loc = np.unravel_index(np.argmin(e2l), e2l.shape)
        raise DegenerateFrame(f"tangent norm below threshold at {tuple(int(x) for x in loc)}")
    lam = 0.5 * np.log(e2l)

    # In the flat case the fifth column is the position, linearly dependent
    # on the others as a vector; restrict the projection to the frame
    # columns there (the fifth row of S, T vanishes identically anyway).
    ncols = 4 if model.L0 == 0.0 else 5
    Yc = Y[..., :ncols]
    Yu = d_du(Yc, g, order=4)
    Yv = d_dv(Yc, g, order=4)
    gram = np.einsum("...ak,a,...al->...kl", Yc, eta, Yc)
    S = np.linalg.solve(gram, np.einsum("...ak,a,...al->...kl", Yc, eta, Yu))
    T = np.linalg.solve(gram, np.einsum("...ak,a,...al->...kl", Yc, eta, Yv))
    return FundamentalData(
        model=model, grid=g, lam=lam,
        alpha1=S[..., 2, 0], alpha2=S[..., 2, 1], alpha3=T[..., 2, 1],
        beta1=S[..., 3, 0], beta2=S[..., 3, 1], beta3=T[..., 3, 1],
        mu1=S[..., 3, 2], mu2=T[..., 3, 2],
    )


def integrate_potential(P: np.ndarray, Q: np.ndarray, grid: Grid,
                        tol: float = None) -> np.ndarray:
    """Scalar field with the prescribed gradient, zero at the grid origin.

    Trapezoidal line integration of P du along the first row, then Q dv up
    each column.  Requires the compatibility P_v = Q_u within tolerance
    (default 100 h^2 at the data's scale).
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    compat = d_dv(P, grid) - d_du(Q, grid)
    if tol is None:
        scale = max(1.0, float(np.max(np.abs(P))), float(np.max(np.abs(Q))))
        tol = 100.0 * grid.h ** 2 * scale
    if np.max(np.abs(compat)) > tol:
        loc = np.unravel_index(np.argmax(np.abs(compat)), compat.shape)
        raise IncompatiblePair(
            f"cross-derivatives differ by {np.max(np.abs(compat)):.3e} "
            f"at {tuple(int(x) for x in loc)}")

    def cumtrapz(f, h, axis):
        f = np.moveaxis(f, axis, 0)
        out = np.zeros_like(f)
        np.cumsum((f[:-1] + f[1:]) * (h / 2.0), axis=0, out=out[1:])
        return np.moveaxis(out, 0, axis)

    lam = cumtrapz(P[:, :1], grid.du, axis=0) + cumtrapz(Q, grid.dv, axis=1)
    return lam


def _real_invariant(case: SurfaceCase, arr, name: str) -> np.ndarray:
    """Real-family invariants must be real; tolerate a complex dtype whose
    imaginary part is numerically zero (as produced by complex CSV files)."""
    arr = np.asarray(arr)
    if case.is_lorentzian or not np.iscomplexobj(arr):
        return arr
    scale = max(1.0, float(np.max(np.abs(arr))))
    if np.max(np.abs(arr.imag)) > 1e-12 * scale:
        raise HypothesisViolated(f"invariant {name} must be real for this case")
    return np.ascontiguousarray(arr.real)


def _coerce_invariants(inv, case: SurfaceCase, grid: Grid) -> TwistorInvariants:
    """Accept TwistorInvariants or {label: family-like with W, X, Y, Z}."""
    if isinstance(inv, TwistorInvariants):
        fams = inv.families
    else:
        fams = inv
    out = {}
    for label in family_labels(case):
        f = fams[label]
        W, X, Y, Z = (_real_invariant(case, getattr(f, n), n + label)
                      for n in "WXYZ")
        if case is SurfaceCase.NEUT_TIME:
            delta = W * X - Y * Z
        elif case.is_lorentzian:
            delta = W * X + (Y * Z if case is SurfaceCase.LOR_TIME else -Y * Z)
        else:
            other = "-" if label == "+" else "+"
            fm = fams[other]
            delta = (_real_invariant(case, fm.W, "W" + other) * X
                     + Y * _real_invariant(case, fm.Z, "Z" + other))
        out[label] = InvariantFamily(W, X, Y, Z, None, None, delta)
    return TwistorInvariants(case=case, grid=grid,
                             lam=np.zeros(grid.shape), families=out)


def _check_sum_identities(inv: TwistorInvariants, tol: float):
    if inv.is_complex:
        f = inv.families[""]
        pairs = (("W + conj(W) = X + conj(X)", 2 * f.W.real - 2 * f.X.real),
                 ("Y + conj(Y) = Z + conj(Z)", 2 * f.Y.real - 2 * f.Z.real))
    else:
        p, m = inv.families["+"], inv.families["-"]
        pairs = (("W+ + W- = X+ + X-", p.W + m.W - p.X - m.X),
                 ("Y+ + Y- = Z+ + Z-", p.Y + m.Y - p.Z - m.Z))
    for which, res in pairs:
        bad = np.abs(res)
        if np.max(bad) > tol:
            loc = np.unravel_index(np.argmax(bad), bad.shape)
            raise HypothesisViolated(which, location=tuple(int(x) for x in loc),
                                     value=float(np.max(bad)))


def _check_delta(inv: TwistorInvariants):
    thr = delta_threshold(inv.lam)
    for label, f in inv.families.items():
        if np.any(np.abs(f.delta) <= thr):
            loc = np.unravel_index(np.argmin(np.abs(f.delta)), f.delta.shape)
            raise DegenerateDelta(
                f"discriminant vanishes (family {label or 'complex'})",
                location=tuple(int(x) for x in loc),
                value=complex(f.delta[loc]) if inv.is_complex else float(f.delta[loc]))


def _solve_ab(inv: TwistorInvariants):
    A, B = {}, {}
    for label in inv.families:
        M, d = _ab_system(inv.case, inv, label, inv.grid)
        sol = np.linalg.solve(M, d[..., None])[..., 0]
        if inv.case in (SurfaceCase.RIEM, SurfaceCase.NEUT_SPACE):
            A[label] = sol[..., 0]
            B["-" if label == "+" else "+"] = sol[..., 1]
        else:
            A[label] = sol[..., 0]
            B[label] = sol[..., 1]
    return A, B


def _fields_from_invariants(case: SurfaceCase, inv: TwistorInvariants, A, B) -> dict:
    """alpha, beta, mu from the invariant fields (flat and curved cases alike)."""
    if case is SurfaceCase.RIEM:
        p, m = inv.families["+"], inv.families["-"]
        return {
            "alpha1": (p.Y - m.Y) / 2, "alpha2": (p.X + m.X) / 2,
            "alpha3": (p.Z - m.Z) / 2,
            "beta1": (p.W - m.W) / 2, "beta2": (p.Y + m.Y) / 2,
            "beta3": (p.X - m.X) / 2,
            "mu1": (B["-"] - B["+"]) / 2, "mu2": (A["-"] - A["+"]) / 2,
        }
    f = inv.families[""]
    a, b = A[""], B[""]
    return {
        "alpha1": -f.Y.imag, "alpha2": f.W.real, "alpha3": f.Z.imag,
        "beta1": -f.W.imag, "beta2": f.Y.real, "beta3": f.X.imag,
        "mu1": b.imag, "mu2": -a.imag,
    }


def _lam_gradient(case: SurfaceCase, A, B):
    if case is SurfaceCase.RIEM:
        return (A["+"] + A["-"]) / 2, (B["+"] + B["-"]) / 2
    return A[""].real, B[""].real


def construct_from_wxyz_flat(inv, case: SurfaceCase, grid: Grid,
                             tol: float = None) -> FundamentalData:
    """Fundamental data in a flat ambient from prescribed W, X, Y, Z fields.

    Implements the nondegenerate flat construction for the Riemannian and
    Lorentzian space-like cases.  ``inv`` is a TwistorInvariants or a
    {label: family} mapping carrying W, X, Y, Z per family.
    """
    if case not in (SurfaceCase.RIEM, SurfaceCase.LOR_SPACE):
        raise InvalidCase(
            "flat construction is available for the Riemannian and "
            "Lorentzian space-like cases")
    if tol is None:
        tol = 100.0 * grid.h ** 2
    tinv = _coerce_invariants(inv, case, grid)
    _check_sum_identities(tinv, tol)
    _check_delta(tinv)
    A, B = _solve_ab(tinv)

    # Delta must be exhausted by the derivative divergence (flat ambient)
    for label in tinv.families:
        blabel = ("-" if label == "+" else "+") if case is SurfaceCase.RIEM else label
        res = (d_du(A[label], grid) + d_dv(B[blabel], grid)
               - tinv.families[label].delta)
        scale = max(1.0, float(np.max(np.abs(tinv.families[label].delta))))
        if np.max(np.abs(res)) > tol * scale:
            loc = np.unravel_index(np.argmax(np.abs(res)), res.shape)
            raise HypothesisViolated("A_u + B_v = Delta",
                                     location=tuple(int(x) for x in loc),
                                     value=float(np.max(np.abs(res))))
    P, Q = _lam_gradient(case, A, B)
    lam = integrate_potential(P, Q, grid, tol=tol * max(1.0, float(np.max(np.abs(P)))))
    fields = _fields_from_invariants(case, tinv, A, B)
    return FundamentalData(model=ambient_model(case, 0.0), grid=grid, lam=lam, **fields)


def construct_from_wxyz_curved(inv, L0: float, case: SurfaceCase, grid: Grid,
                               tol: float = None) -> FundamentalData:
    """Fundamental data in a curved ambient (L0 != 0) from W, X, Y, Z fields.

    The conformal factor comes from f = Delta - A_u - B_v via
    lam = log(f / L0) / 2; requires f / L0 > 0 and the displayed
    constraints on f and Delta.
    """
    if case not in (SurfaceCase.RIEM, SurfaceCase.LOR_SPACE):
        raise InvalidCase(
            "curved construction is available for the Riemannian and "
            "Lorentzian space-like cases")
    if L0 == 0.0:
        raise InvalidCase("curved construction needs L0 != 0")
    if tol is None:
        tol = 100.0 * grid.h ** 2
    tinv = _coerce_invariants(inv, case, grid)
    _check_sum_identities(tinv, tol)
    _check_delta(tinv)
    A, B = _solve_ab(tinv)

    # order-4 derivatives keep f consistent with the solver that produced
    # A and B; a lower order leaves grid-scale roughness in lam that the
    # curvature stencils of downstream checks amplify
    d4u = lambda x: d_du(x, grid, order=4)
    d4v = lambda x: d_dv(x, grid, order=4)
    if case is SurfaceCase.RIEM:
        f = (tinv.families["+"].delta - d4u(A["+"]) - d4v(B["-"]))
        fminus = (tinv.families["-"].delta - d4u(A["-"]) - d4v(B["+"]))
        dres = f - fminus
        which = "Delta+ - Delta- = (A+ - A-)_u + (B- - B+)_v"
        sumA = A["+"] + A["-"]
        sumB = B["+"] + B["-"]
    else:
        fc = tinv.families[""].delta - d4u(A[""]) - d4v(B[""])
        f = fc.real
        dres = fc.imag
        which = "Delta - conj(Delta) = (A - conj(A))_u + (B - conj(B))_v"
        sumA = 2 * A[""].real
        sumB = 2 * B[""].real
    scale = max(1.0, float(np.max(np.abs(f))))
    if np.max(np.abs(dres)) > tol * scale:
        loc = np.unravel_index(np.argmax(np.abs(dres)), np.abs(dres).shape)
        raise HypothesisViolated(which, location=tuple(int(x) for x in loc),
                                 value=float(np.max(np.abs(dres))))
    for res, which in ((d4u(f) - f * sumA, "f_u = f (A + conj(A))"),
                       (d4v(f) - f * sumB, "f_v = f (B + conj(B))")):
        if np.max(np.abs(res)) > tol * scale:
            loc = np.unravel_index(np.argmax(np.abs(res)), res.shape)
            raise HypothesisViolated(which, location=tuple(int(x) for x in loc),
                                     value=float(np.max(np.abs(res))))
    ratio = f / L0
    if np.min(ratio) <= 0.0:
        loc = np.unravel_index(np.argmin(ratio), ratio.shape)
        raise SignMismatch("f / L0 must be positive",
                           location=tuple(int(x) for x in loc),
                           value=float(ratio[loc]))
    lam = 0.5 * np.log(ratio)
    fields = _fields_from_invariants(case, tinv, A, B)
    return FundamentalData(model=ambient_model(case, L0), grid=grid, lam=lam, **fields)


@dataclass(frozen=True)
class HolomorphicSpec:
    """Polynomial holomorphic function p(w), ascending complex coefficients."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))

    @classmethod
    def constant(cls, c) -> "HolomorphicSpec":
        return cls((c,))

    @classmethod
    def identity(cls) -> "HolomorphicSpec":
        return cls((0.0, 1.0))

    @classmethod
    def exp_truncation(cls, terms: int = 8) -> "HolomorphicSpec":
        from math import factorial
        return cls(tuple(1.0 / factorial(k) for k in range(terms)))

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros_like(w)
        for c in reversed(self.coeffs):
            out = out * w + c
        return out


@dataclass
class DelbarInput:
    """Inputs of the holomorphic construction (Lorentzian space-like case)."""

    L0: float
    grid: Grid
    p: HolomorphicSpec
    r: float = 0.0
    lam: Optional[np.ndarray] = None      # defaults to the Liouville profile
    gamma: Optional[np.ndarray] = None    # defaults to 0


def liouville_profile(L0: float, grid: Grid) -> np.ndarray:
    """Closed-form solution of lam_uu + lam_vv + L0 exp(2 lam) = 0.

    0 for flat; the standard spherical / hyperbolic profiles otherwise.
    The negative-curvature profile lives on the open unit disk and a grid
    touching its boundary circle is rejected.
    """
    U, V = grid.mesh()
    r2 = U ** 2 + V ** 2
    if L0 == 0.0:
        return np.zeros(grid.shape)
    if L0 > 0.0:
        return np.log(2.0 / (np.sqrt(L0) * (1.0 + r2)))
    if np.max(r2) >= 1.0:
        raise DomainViolation(
            "grid reaches the singular unit circle of the negative-curvature profile")
    return np.log(2.0 / (np.sqrt(-L0) * (1.0 - r2)))


def liouville_residual(lam: np.ndarray, L0: float, grid: Grid) -> np.ndarray:
    return d2_du(lam, grid) + d2_dv(lam, grid) + L0 * np.exp(2.0 * lam)


def _liouville_funcs(L0: float) -> dict:
    """Closed-form Liouville profile and its first/second derivatives."""
    if L0 == 0.0:
        z = lambda U, V: np.zeros_like(U)
        return {"lam": z, "lam_u": z, "lam_v": z, "lam_uu": z, "lam_vv": z}
    if L0 > 0.0:
        return {
            "lam": lambda U, V: np.log(2.0 / (np.sqrt(L0) * (1.0 + U**2 + V**2))),
            "lam_u": lambda U, V: -2.0 * U / (1.0 + U**2 + V**2),
            "lam_v": lambda U, V: -2.0 * V / (1.0 + U**2 + V**2),
            "lam_uu": lambda U, V: (-2.0 * (1.0 + U**2 + V**2) + 4.0 * U**2)
                                   / (1.0 + U**2 + V**2) ** 2,
            "lam_vv": lambda U, V: (-2.0 * (1.0 + U**2 + V**2) + 4.0 * V**2)
                                   / (1.0 + U**2 + V**2) ** 2,
        }
    return {
        "lam": lambda U, V: np.log(2.0 / (np.sqrt(-L0) * (1.0 - U**2 - V**2))),
        "lam_u": lambda U, V: 2.0 * U / (1.0 - U**2 - V**2),
        "lam_v": lambda U, V: 2.0 * V / (1.0 - U**2 - V**2),
        "lam_uu": lambda U, V: (2.0 * (1.0 - U**2 - V**2) + 4.0 * U**2)
                               / (1.0 - U**2 - V**2) ** 2,
        "lam_vv": lambda U, V: (2.0 * (1.0 - U**2 - V**2) + 4.0 * V**2)
                               / (1.0 - U**2 - V**2) ** 2,
    }


def construct_delbar(inp: DelbarInput, tol: float = None) -> FundamentalData:
    """Fundamental data with vanishing dbar-derivative of the twistor lift.

    W and X come from the holomorphic p, the real parameter r and the
    conformal factors; Z := -W and Y := -X enforce the dbar condition
    identically.  Output satisfies the compatibility system with the
    given L0.
    """
    grid = inp.grid
    if tol is None:
        tol = 100.0 * grid.h ** 2
    model = ambient_model(SurfaceCase.LOR_SPACE, inp.L0)

    if inp.lam is None and inp.gamma is None:
        # closed-form conformal factor: sample exactly and keep analytic
        # derivative providers so downstream residuals avoid FD error in lam
        lf = _liouville_funcs(inp.L0)
        if inp.L0 < 0.0:
            U, V = grid.mesh()
            if np.max(U**2 + V**2) >= 1.0:
                raise DomainViolation("grid reaches the singular unit circle "
                                      "of the negative-curvature profile")

        def wx(U, V):
            w = U + 1j * V
            elam = np.exp(lf["lam"](U, V))
            half = 0.5 * inp.p(w) / elam
            iso = 0.5j * inp.r * elam
            return half + iso, half - iso

        return FundamentalData.from_functions(
            model, grid,
            lam=lf["lam"], lam_u=lf["lam_u"], lam_v=lf["lam_v"],
            lam_uu=lf["lam_uu"], lam_vv=lf["lam_vv"],
            alpha1=lambda U, V: wx(U, V)[1].imag,
            alpha2=lambda U, V: wx(U, V)[0].real,
            alpha3=lambda U, V: -wx(U, V)[0].imag,
            beta1=lambda U, V: -wx(U, V)[0].imag,
            beta2=lambda U, V: -wx(U, V)[0].real,
            beta3=lambda U, V: wx(U, V)[1].imag,
        )

    lam = inp.lam if inp.lam is not None else liouville_profile(inp.L0, grid)
    lam = np.asarray(lam, dtype=float)
    lres = liouville_residual(lam, inp.L0, grid)
    scale = max(1.0, float(np.max(np.exp(2.0 * lam))))
    if np.max(np.abs(lres)) > tol * scale:
        raise LiouvilleViolated(
            f"conformal factor fails the Liouville equation "
            f"(residual {np.max(np.abs(lres)):.3e})")
    gamma = np.zeros(grid.shape) if inp.gamma is None else np.asarray(inp.gamma, dtype=float)

    U, V = grid.mesh()
    pw = inp.p(U + 1j * V)
    half = 0.5 * pw * np.exp(gamma - lam)
    iso = 0.5j * inp.r * np.exp(lam - gamma)
    W = half + iso
    X = half - iso
    return FundamentalData(
        model=model, grid=grid, lam=lam,
        alpha1=X.imag, alpha2=W.real, alpha3=-W.imag,
        beta1=-W.imag, beta2=-W.real, beta3=X.imag,
        mu1=d_du(gamma, grid), mu2=d_dv(gamma, grid),
    )


def mean_curvature_and_isotropy(data: FundamentalData, delbar: DelbarInput = None,
                                tol: float = 1e-9) -> dict:
    """Mean-curvature components, light-like-sigma locus, and the
    reparametrized isotropy relation (Lorentzian space-like case).

    With ``delbar`` given (r = 0, p nowhere zero on the grid) the relation
    sigma(T1', T2') = eps * sigma(T1', T1') under the coordinate change
    with (dw'/dw)^2 = (1 - eps i) p / 2 is evaluated for eps = +-1.
    """
    if data.case is not SurfaceCase.LOR_SPACE:
        raise InvalidCase("mean curvature report is for the Lorentzian space-like case")
    e2l = data.e2l()
    H = ((data.alpha1 + data.alpha3) / (2.0 * np.sqrt(e2l)),
         (data.beta1 + data.beta3) / (2.0 * np.sqrt(e2l)))
    scale = np.maximum(1.0, np.abs(data.alpha1) ** 2 + np.abs(data.beta1) ** 2
                       + np.abs(data.alpha2) ** 2 + np.abs(data.beta2) ** 2)
    lightlike = ((np.abs(data.alpha1 ** 2 - data.beta1 ** 2) <= tol * scale)
                 & (np.abs(data.alpha2 ** 2 - data.beta2 ** 2) <= tol * scale))
    out = {"H": H, "sigma_lightlike": lightlike, "eps_relation": None}
    if delbar is None:
        return out

    U, V = data.grid.mesh()
    pw = delbar.p(U + 1j * V)
    if np.min(np.abs(pw)) <= tol:
        loc = np.unravel_index(np.argmin(np.abs(pw)), pw.shape)
        raise TotallyGeodesicRegion(
            "isotropy relation untestable where p vanishes",
            location=tuple(int(x) for x in loc))
    # (2,0)- and (1,1)-parts of sigma in the (N1, N2) components
    s20 = (0.25 * ((data.alpha1 - data.alpha3) - 2j * data.alpha2),
           0.25 * ((data.beta1 - data.beta3) - 2j * data.beta2))
    s11 = (0.25 * (data.alpha1 + data.alpha3), 0.25 * (data.beta1 + data.beta3))
    report = {}
    for eps in (1, -1):
        c2 = 2.0 / ((1.0 - eps * 1j) * pw)
        res = 0.0
        for k in range(2):
            lhs = -2.0 * np.imag(c2 * s20[k])
            rhs = eps * (2.0 * np.real(c2 * s20[k]) + 2.0 * np.abs(c2) * s11[k])
            res = max(res, float(np.max(np.abs(lhs - rhs))))
        report[eps] = res
    out["eps_relation"] = report
    return out
