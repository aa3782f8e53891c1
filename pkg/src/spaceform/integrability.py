"""Residuals of the compatibility systems tying the fundamental data together.

Three views of the same integrability content:

* ``gcr_residuals`` — the scalar Gauss, Codazzi (four) and Ricci equations,
  case-dispatched, as LHS - RHS fields;
* ``lax_residual`` — the matrix zero-curvature condition
  S_v - T_u = ST - TS on the 5x5 connection matrices;
* ``equivalence_check`` — the exact constant-coefficient combinations
  relating the invariant-based residual family (Gauss-Ricci combination
  and the two Codazzi equations written in W, X, Y, Z) back to the scalar
  system.  The combinations hold identically on *any* data, solution or
  not, because both families are evaluated from the same derivative jets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cases import SurfaceCase
from .fundamental import FundamentalData, connection_grids
from .grids import d2_du, d2_dv, d_du, d_dv


@dataclass
class GCRResiduals:
    """Pointwise residual fields of the scalar compatibility system."""

    gauss: np.ndarray
    codazzi: tuple  # four arrays
    ricci: np.ndarray

    def max_abs(self) -> float:
        return max(
            float(np.max(np.abs(self.gauss))),
            *(float(np.max(np.abs(c))) for c in self.codazzi),
            float(np.max(np.abs(self.ricci))),
        )

    def as_dict(self) -> dict:
        out = {"gauss": self.gauss, "ricci": self.ricci}
        for k, c in enumerate(self.codazzi, start=1):
            out[f"codazzi{k}"] = c
        return out


def field_jets(data: FundamentalData) -> dict:
    """First derivatives of all fields plus second derivatives of lam.

    All residual evaluators share this dictionary so that linear
    combinations between residual families cancel to rounding error.
    """
    g = data.grid
    j = dict(data.fields)
    j["lam_u"], j["lam_v"] = data.lam_derivatives()
    an = data.analytic
    if an is not None and an.lam_uu and an.lam_vv:
        U, V = g.mesh()
        j["lam_uu"] = np.broadcast_to(an.lam_uu(U, V), g.shape).astype(float)
        j["lam_vv"] = np.broadcast_to(an.lam_vv(U, V), g.shape).astype(float)
    elif an is not None and an.lam_u and an.lam_v:
        j["lam_uu"] = d_du(j["lam_u"], g)
        j["lam_vv"] = d_dv(j["lam_v"], g)
    else:
        # differencing the gradient twice drops to O(h) at the boundary;
        # use the direct second-difference stencils instead
        j["lam_uu"] = d2_du(data.lam, g)
        j["lam_vv"] = d2_dv(data.lam, g)
    for n in ("alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "mu1", "mu2"):
        j[n + "_u"] = d_du(j[n], g)
        j[n + "_v"] = d_dv(j[n], g)
    j["E"] = data.model.L0 * data.e2l()
    return j


# Gauss residual: lam_uu + t*lam_vv + E - rhs, with rhs coefficients on
# (a1*a3, b1*b3, a2^2, b2^2); t = -1 in the time-like cases.
_GAUSS = {
    SurfaceCase.RIEM: (1, (-1, -1, 1, 1)),
    SurfaceCase.NEUT_SPACE: (1, (1, 1, -1, -1)),
    SurfaceCase.NEUT_TIME: (-1, (1, -1, -1, 1)),
    SurfaceCase.LOR_SPACE: (1, (-1, 1, 1, -1)),
    SurfaceCase.LOR_TIME: (-1, (1, 1, -1, -1)),
}

# Ricci RHS coefficients on (a1*b2, a2*b1, a2*b3, a3*b2).
_RICCI = {
    SurfaceCase.RIEM: (1, -1, 1, -1),
    SurfaceCase.NEUT_SPACE: (-1, 1, -1, 1),
    SurfaceCase.NEUT_TIME: (1, -1, -1, 1),
    SurfaceCase.LOR_SPACE: (1, -1, 1, -1),
    SurfaceCase.LOR_TIME: (1, -1, -1, 1),
}

# Codazzi RHS sign pattern: each of the four equations is
#   d(f1)/dv - d(f2)/du = c0*g1*lam_u + c1*g2*lam_v + c2*h1*mu1 + c3*h2*mu2
# with the field symbols fixed per row; only the signs c vary by case.
# Rows: (a1,a2 | a2,a3 | b1,b2 | b2,b3).
_CODAZZI = {
    SurfaceCase.RIEM: (
        (1, 1, -1, 1), (-1, -1, -1, 1), (1, 1, 1, -1), (-1, -1, 1, -1)),
    SurfaceCase.NEUT_SPACE: (
        (1, 1, -1, 1), (-1, -1, -1, 1), (1, 1, 1, -1), (-1, -1, 1, -1)),
    SurfaceCase.NEUT_TIME: (
        (1, -1, 1, -1), (1, -1, 1, -1), (1, -1, 1, -1), (1, -1, 1, -1)),
    SurfaceCase.LOR_SPACE: (
        (1, 1, 1, -1), (-1, -1, 1, -1), (1, 1, 1, -1), (-1, -1, 1, -1)),
    SurfaceCase.LOR_TIME: (
        (1, -1, -1, 1), (1, -1, -1, 1), (1, -1, 1, -1), (1, -1, 1, -1)),
}

# (g1, g2, h1, h2) per Codazzi row: multipliers of lam_u, lam_v, mu1, mu2.
_CODAZZI_FIELDS = (
    ("alpha1", "alpha2", "alpha2", "alpha3", "beta2", "beta1"),
    ("alpha2", "alpha3", "alpha1", "alpha2", "beta3", "beta2"),
    ("beta1", "beta2", "beta2", "beta3", "alpha2", "alpha1"),
    ("beta2", "beta3", "beta1", "beta2", "alpha3", "alpha2"),
)


def gcr_residuals(data: FundamentalData, jets: dict = None) -> GCRResiduals:
    """LHS - RHS of the Gauss, Codazzi and Ricci equations of the case."""
    j = jets if jets is not None else field_jets(data)
    case = data.case
    t, (cg1, cg2, cg3, cg4) = _GAUSS[case]
    gauss = (j["lam_uu"] + t * j["lam_vv"] + j["E"]
             - (cg1 * j["alpha1"] * j["alpha3"] + cg2 * j["beta1"] * j["beta3"]
                + cg3 * j["alpha2"] ** 2 + cg4 * j["beta2"] ** 2))
    codazzi = []
    for row, (c0, c1, c2, c3) in zip(_CODAZZI_FIELDS, _CODAZZI[case]):
        f1, f2, g1, g2, h1, h2 = row
        rhs = (c0 * j[g1] * j["lam_u"] + c1 * j[g2] * j["lam_v"]
               + c2 * j[h1] * j["mu1"] + c3 * j[h2] * j["mu2"])
        codazzi.append(j[f1 + "_v"] - j[f2 + "_u"] - rhs)
    r1, r2, r3, r4 = _RICCI[case]
    ricci = (j["mu1_v"] - j["mu2_u"]
             - (r1 * j["alpha1"] * j["beta2"] + r2 * j["alpha2"] * j["beta1"]
                + r3 * j["alpha2"] * j["beta3"] + r4 * j["alpha3"] * j["beta2"]))
    return GCRResiduals(gauss=gauss, codazzi=tuple(codazzi), ricci=ricci)


def lax_residual(data: FundamentalData) -> np.ndarray:
    """Max-norm field of S_v - T_u - (ST - TS), shape (nu, nv)."""
    S, T = connection_grids(data)
    Sv = d_dv(S, data.grid)
    Tu = d_du(T, data.grid)
    comm = np.einsum("...ij,...jk->...ik", S, T) - np.einsum("...ij,...jk->...ik", T, S)
    res = Sv - Tu - comm
    return np.max(np.abs(res), axis=(-2, -1))


def _family_residuals(data: FundamentalData, j: dict):
    """Gauss-Ricci and Codazzi residuals written in the twistor invariants.

    Returns {label: (Rgr, C1, C2)} with labels '+', '-' for real cases and
    '' (complex-valued) for Lorentzian ones, evaluated on the shared jets.
    """

    def D(coefs, d):
        """Derivative of a linear combination {field: coef} along d."""
        out = 0
        for name, c in coefs.items():
            key = ("lam_uu" if d == "u" else "lam_vv") if name == "lam" else name + "_" + d
            out = out + c * j[key]
        return out

    def val(coefs):
        out = 0
        for name, c in coefs.items():
            out = out + c * (j["lam_u"] if name == "lam" else j[name])
        return out

    case = data.case
    E = j["E"]
    out = {}
    if case in (SurfaceCase.LOR_SPACE, SurfaceCase.LOR_TIME):
        i = 1j
        # component signs of (beta1, beta3, alpha1, alpha3, mu1) inside
        # W, X, Y, Z, psi; both cases share phi = lam_u - i*mu2
        sb1, sb3, sa1, sa3, sm1 = (
            (-1, 1, -1, 1, 1) if case is SurfaceCase.LOR_SPACE else (1, 1, -1, -1, -1))
        W = j["alpha2"] + sb1 * i * j["beta1"]
        X = j["alpha2"] + sb3 * i * j["beta3"]
        Y = j["beta2"] + sa1 * i * j["alpha1"]
        Z = j["beta2"] + sa3 * i * j["alpha3"]
        phi = j["lam_u"] - i * j["mu2"]
        psi = j["lam_v"] + sm1 * i * j["mu1"]
        phi_u = j["lam_uu"] - i * j["mu2_u"]
        psi_v = j["lam_vv"] + sm1 * i * j["mu1_v"]
        Y_v = j["beta2_v"] + sa1 * i * j["alpha1_v"]
        X_u = j["alpha2_u"] + sb3 * i * j["beta3_u"]
        W_v = j["alpha2_v"] + sb1 * i * j["beta1_v"]
        Z_u = j["beta2_u"] + sa3 * i * j["alpha3_u"]
        if case is SurfaceCase.LOR_SPACE:
            Rgr = W * X - Y * Z - E - phi_u - psi_v
            C1 = Y_v + i * X_u - (-i * W * phi - Z * psi)
            C2 = W_v + i * Z_u - (-i * Y * phi - X * psi)
        else:
            Rgr = W * X + Y * Z + E + phi_u - psi_v
            C1 = Y_v + i * X_u - (-i * W * phi - Z * psi)
            C2 = W_v - i * Z_u - (i * Y * phi - X * psi)
        out[""] = (Rgr, C1, C2)
        return out

    for s in (1.0, -1.0):
        Wc = {"alpha2": 1, "beta1": s}; Xc = {"alpha2": 1, "beta3": s}
        Yc = {"beta2": 1, "alpha1": s}; Zc = {"beta2": 1, "alpha3": s}
        Wmc = {"alpha2": 1, "beta1": -s}; Zmc = {"beta2": 1, "alpha3": -s}
        W, X, Y, Z = val(Wc), val(Xc), val(Yc), val(Zc)
        Wm, Zm = val(Wmc), val(Zmc)
        phi = j["lam_u"] - s * j["mu2"]
        phi_u = j["lam_uu"] - s * j["mu2_u"]
        if case is SurfaceCase.NEUT_TIME:
            psi = j["lam_v"] - s * j["mu1"]
            psi_v = j["lam_vv"] - s * j["mu1_v"]
            Rgr = W * X - Y * Z + E + phi_u - psi_v
            C1 = D(Yc, "v") - s * D(Xc, "u") - (s * W * phi - Z * psi)
            C2 = D(Wc, "v") - s * D(Zc, "u") - (s * Y * phi - X * psi)
        else:
            psi_m = j["lam_v"] + s * j["mu1"]          # psi_{-s}
            psi_m_v = j["lam_vv"] + s * j["mu1_v"]
            if case is SurfaceCase.RIEM:
                Rgr = Wm * X + Y * Zm - E - phi_u - psi_m_v
            else:  # NEUT_SPACE
                Rgr = Wm * X + Y * Zm + E + phi_u + psi_m_v
            C1 = D(Yc, "v") - s * D(Xc, "u") - (s * Wm * phi - Zm * psi_m)
            C2 = D(Wmc, "v") + s * D(Zmc, "u") - (-s * Y * phi - X * psi_m)
        out["+" if s > 0 else "-"] = (Rgr, C1, C2)
    return out


# Combination coefficients: for family label s, the identities are
#   Rgr = cg*gauss + cr*ricci,   C1 = x1*cod1 + x4*cod4,   C2 = y2*cod2 + y3*cod3
# (fixed beforehand by a brute-force solve on symbolic jets).
_COMBOS = {
    SurfaceCase.RIEM: lambda s: ((-1, -s), (s, 1), (1, -s)),
    SurfaceCase.NEUT_SPACE: lambda s: ((1, s), (s, 1), (1, -s)),
    SurfaceCase.NEUT_TIME: lambda s: ((1, s), (s, 1), (1, s)),
    SurfaceCase.LOR_SPACE: lambda s: ((-1, -1j), (-1j, 1), (1, -1j)),
    SurfaceCase.LOR_TIME: lambda s: ((1, 1j), (-1j, 1), (1, 1j)),
}


def equivalence_check(data: FundamentalData) -> dict:
    """Residuals of the exact identities relating the two residual families.

    Returns a dict of max-abs-zero fields keyed 'gaussricci<s>',
    'codazzi1<s>', 'codazzi2<s>'; values are ~1e-14 on any data since
    both families are linear images of one derivative jet.
    """
    j = field_jets(data)
    scalar = gcr_residuals(data, jets=j)
    fams = _family_residuals(data, j)
    out = {}
    for label, (Rgr, C1, C2) in fams.items():
        s = 1.0 if label in ("+", "") else -1.0
        (cg, cr), (x1, x4), (y2, y3) = _COMBOS[data.case](s)
        out["gaussricci" + label] = Rgr - (cg * scalar.gauss + cr * scalar.ricci)
        out["codazzi1" + label] = C1 - (x1 * scalar.codazzi[0] + x4 * scalar.codazzi[3])
        out["codazzi2" + label] = C2 - (y2 * scalar.codazzi[1] + y3 * scalar.codazzi[2])
    return out
