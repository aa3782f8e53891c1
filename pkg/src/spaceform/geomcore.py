"""Pseudo-Euclidean linear algebra on vectors and bivectors of a rank-4 bundle.

Bivector components are always stored in the fixed order

    (12, 13, 14, 23, 24, 34)

as complex numbers; real cases simply carry zero imaginary parts.  The
Hodge star of each metric flavour is precomputed as a 6x6 matrix against
this order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cases import (
    EUCLIDEAN,
    FRAME_METRIC,
    LORENTZ,
    METRIC_TYPE,
    NEUTRAL,
    SurfaceCase,
)
from .errors import DimensionMismatch, FrameNormalizationError

BIVECTOR_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_PAIR_INDEX = {p: k for k, p in enumerate(BIVECTOR_PAIRS)}

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class AmbientSignature:
    """Diagonal +-1 metric of a flat ambient space of dimension 4 or 5."""

    diag: tuple

    def __post_init__(self):
        if len(self.diag) not in (4, 5):
            raise DimensionMismatch(f"ambient dimension must be 4 or 5, got {len(self.diag)}")
        if any(s not in (1, -1) for s in self.diag):
            raise DimensionMismatch("signature entries must be +1 or -1")

    @property
    def dim(self) -> int:
        return len(self.diag)

    def matrix(self) -> np.ndarray:
        return np.diag(np.asarray(self.diag, dtype=float))


def pseudo_inner(x, y, sig: AmbientSignature):
    """Inner product sum_i diag[i] * x[i] * y[i].

    Broadcasts over leading axes; the last axis is the ambient index.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape[-1] != sig.dim or y.shape[-1] != sig.dim:
        raise DimensionMismatch(
            f"vectors of dimension {x.shape[-1]}/{y.shape[-1]} vs signature {sig.dim}"
        )
    d = np.asarray(sig.diag)
    return np.sum(d * x * y, axis=-1)


@dataclass
class Bivector:
    """Element of the two-fold exterior power, in a declared ordered frame."""

    comps: np.ndarray = field(default_factory=lambda: np.zeros(6, dtype=complex))

    def __post_init__(self):
        c = np.asarray(self.comps, dtype=complex)
        if c.shape != (6,):
            raise DimensionMismatch(f"bivector needs 6 components, got shape {c.shape}")
        self.comps = c

    @classmethod
    def wedge_basis(cls, i: int, j: int, coeff=1.0) -> "Bivector":
        """coeff * e_i ^ e_j for 1-based i < j."""
        sign = 1.0
        if i > j:
            i, j = j, i
            sign = -1.0
        c = np.zeros(6, dtype=complex)
        c[_PAIR_INDEX[(i - 1, j - 1)]] = sign * coeff
        return cls(c)

    def __add__(self, other):
        return Bivector(self.comps + other.comps)

    def __sub__(self, other):
        return Bivector(self.comps - other.comps)

    def __mul__(self, s):
        return Bivector(self.comps * s)

    __rmul__ = __mul__

    def conj(self):
        return Bivector(np.conj(self.comps))

    def norm(self):
        return float(np.max(np.abs(self.comps)))


def wedge(x, y) -> Bivector:
    """Wedge of two 4-vectors, components in the frame the vectors use."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    c = np.empty(6, dtype=complex)
    for k, (i, j) in enumerate(BIVECTOR_PAIRS):
        c[k] = x[i] * y[j] - x[j] * y[i]
    return Bivector(c)


def _star_matrix(metric_type: str) -> np.ndarray:
    a = np.zeros((6, 6))

    def put(src, dst, s):
        a[_PAIR_INDEX[dst], _PAIR_INDEX[src]] = s

    if metric_type == EUCLIDEAN:
        put((0, 1), (2, 3), 1); put((2, 3), (0, 1), 1)
        put((0, 2), (1, 3), -1); put((1, 3), (0, 2), -1)
        put((0, 3), (1, 2), 1); put((1, 2), (0, 3), 1)
    elif metric_type == NEUTRAL:
        put((0, 1), (2, 3), -1); put((2, 3), (0, 1), -1)
        put((0, 2), (1, 3), -1); put((1, 3), (0, 2), -1)
        put((0, 3), (1, 2), 1); put((1, 2), (0, 3), 1)
    elif metric_type == LORENTZ:
        put((0, 1), (2, 3), -1); put((2, 3), (0, 1), 1)
        put((0, 2), (1, 3), 1); put((1, 3), (0, 2), -1)
        put((0, 3), (1, 2), 1); put((1, 2), (0, 3), -1)
    else:
        raise ValueError(metric_type)
    return a


STAR_MATRICES = {m: _star_matrix(m) for m in (EUCLIDEAN, NEUTRAL, LORENTZ)}


def star_matrix(case: SurfaceCase) -> np.ndarray:
    return STAR_MATRICES[METRIC_TYPE[case]]


def hodge_star(b: Bivector, case: SurfaceCase) -> Bivector:
    """Hodge star in the oriented pseudo-orthonormal frame of the case."""
    return Bivector(star_matrix(case) @ b.comps)


def star_square_sign(case: SurfaceCase) -> int:
    """+1 when * is an involution, -1 when *^2 = -Id (Lorentzian)."""
    return -1 if METRIC_TYPE[case] == LORENTZ else 1


def selfdual_split(b: Bivector, case: SurfaceCase):
    """Eigen-decomposition b = plus + minus with *plus = s*plus, *minus = -s*minus.

    s = 1 in the real cases and s = sqrt(-1) in the Lorentzian cases.
    """
    sb = star_matrix(case) @ b.comps
    if star_square_sign(case) == 1:
        plus = (b.comps + sb) / 2
        minus = (b.comps - sb) / 2
    else:
        plus = (b.comps - 1j * sb) / 2
        minus = (b.comps + 1j * sb) / 2
    return Bivector(plus), Bivector(minus)


def _theta_components(metric_type: str):
    """The six Theta bivectors of the case's eigen-frames, as rows.

    Real flavours: returns (plus_family, minus_family) where family s holds
    Theta_{s,1..3} built from (e1^e2 + s e3^e4)/sqrt2 etc.  Lorentz flavour:
    (Theta_1..3, conjugates).
    """
    z = np.zeros((3, 6), dtype=complex)
    if metric_type == LORENTZ:
        z[0, _PAIR_INDEX[(0, 1)]] = 1 / SQRT2
        z[0, _PAIR_INDEX[(2, 3)]] = 1j / SQRT2
        z[1, _PAIR_INDEX[(0, 2)]] = 1 / SQRT2
        z[1, _PAIR_INDEX[(1, 3)]] = -1j / SQRT2   # e4 ^ e2 = -e2 ^ e4
        z[2, _PAIR_INDEX[(0, 3)]] = 1j / SQRT2
        z[2, _PAIR_INDEX[(1, 2)]] = 1 / SQRT2
        return z, np.conj(z)
    plus = np.zeros((3, 6), dtype=complex)
    minus = np.zeros((3, 6), dtype=complex)
    for fam, s in ((plus, 1.0), (minus, -1.0)):
        fam[0, _PAIR_INDEX[(0, 1)]] = 1 / SQRT2
        fam[0, _PAIR_INDEX[(2, 3)]] = s / SQRT2
        fam[1, _PAIR_INDEX[(0, 2)]] = 1 / SQRT2
        fam[1, _PAIR_INDEX[(1, 3)]] = -s / SQRT2
        fam[2, _PAIR_INDEX[(0, 3)]] = 1 / SQRT2
        fam[2, _PAIR_INDEX[(1, 2)]] = s / SQRT2
    return plus, minus


_THETA = {m: _theta_components(m) for m in (EUCLIDEAN, NEUTRAL, LORENTZ)}


@dataclass
class ThetaBasis:
    """The six Theta bivectors of a case, split into the two labelled triples.

    For real cases ``plus``/``minus`` hold Theta_{+,1..3} and Theta_{-,1..3};
    for Lorentzian cases ``plus`` holds Theta_1..3 and ``minus`` their
    componentwise conjugates.
    """

    case: SurfaceCase
    plus: tuple
    minus: tuple


def theta_components(case: SurfaceCase):
    """Raw (3, 6) component arrays of the two labelled Theta triples."""
    return _THETA[METRIC_TYPE[case]]


def selfdual_frame(case: SurfaceCase, eigen_sign: int) -> np.ndarray:
    """(3, 6) components of the frame of the eigenvalue `eigen_sign` subbundle.

    Real cases: eigenvalue eigen_sign of *.  In the neutral cases the
    eigen-frame mixes the labels: the +1 eigenspace is spanned by
    (Theta_{-,1}, Theta_{+,2}, Theta_{+,3}).  Lorentzian cases: eigenvalue
    eigen_sign * sqrt(-1).
    """
    plus, minus = theta_components(case)
    mt = METRIC_TYPE[case]
    if mt == NEUTRAL:
        a, b = (plus, minus) if eigen_sign == 1 else (minus, plus)
        return np.stack([b[0], a[1], a[2]])
    return plus if eigen_sign == 1 else minus


def theta_basis(frame, case: SurfaceCase, lam: float = 0.0, tol: float = 1e-9) -> ThetaBasis:
    """Theta bivectors for an ordered 4-frame satisfying the case normalization.

    ``frame`` is a (4, n) array whose rows are the ambient vectors
    (e1..e4) in the case's declared order, expected pseudo-orthonormal
    after removing the conformal factor exp(lam).
    """
    frame = np.asarray(frame, dtype=float)
    if frame.ndim != 2 or frame.shape[0] != 4:
        raise DimensionMismatch("frame must be 4 ambient row vectors")
    target = np.diag(np.asarray(FRAME_METRIC[METRIC_TYPE[case]], dtype=float)) * np.exp(2 * lam)
    gram = np.empty((4, 4))
    amb = _ambient_for_frame(case, frame.shape[1])
    for i in range(4):
        for j in range(4):
            gram[i, j] = pseudo_inner(frame[i], frame[j], amb)
    resid = np.max(np.abs(gram - target))
    if resid > tol * max(1.0, np.exp(2 * lam)):
        raise FrameNormalizationError(
            f"frame fails {case.name} normalization (residual {resid:.3e})"
        )
    plus, minus = theta_components(case)
    return ThetaBasis(
        case=case,
        plus=tuple(Bivector(row.copy()) for row in plus),
        minus=tuple(Bivector(row.copy()) for row in minus),
    )


def _ambient_for_frame(case: SurfaceCase, dim: int) -> AmbientSignature:
    """Ambient signature assumed when validating a raw coordinate frame.

    For dimension 4 this is the case's own frame metric in coordinate
    order; callers with nontrivial ambient embeddings should validate via
    :func:`spaceform.fundamental.validate_frame` instead.
    """
    base = FRAME_METRIC[METRIC_TYPE[case]]
    if dim == 4:
        return AmbientSignature(tuple(base))
    return AmbientSignature(tuple(base) + (1,))


def bivector_coordinates(comps, basis_rows: np.ndarray) -> np.ndarray:
    """Coordinates of a bivector in a 6-element bivector basis.

    ``basis_rows`` is (6, 6), one basis bivector per row.  Broadcasts over
    leading axes of ``comps``.
    """
    comps = np.asarray(comps, dtype=complex)
    return np.linalg.solve(basis_rows.T, comps[..., None])[..., 0]


def induced_bivector_map(p: np.ndarray) -> np.ndarray:
    """6x6 matrix of the map e_i ^ e_j -> (P e_i) ^ (P e_j)."""
    p = np.asarray(p, dtype=complex)
    m = np.empty((6, 6), dtype=complex)
    for col, (k, l) in enumerate(BIVECTOR_PAIRS):
        for row, (i, j) in enumerate(BIVECTOR_PAIRS):
            m[row, col] = p[i, k] * p[j, l] - p[i, l] * p[j, k]
    return m
