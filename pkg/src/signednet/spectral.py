"""Signed Laplacians, their spectra, inertia counts and positivity tests.

The Laplacian convention throughout is ``l_ii = sum_k w_ik`` and
``l_ij = -w_ij``, so that the flow ``xdot = -L x`` reads
``xdot_i = sum_j w_ij (x_j - x_i)``.  A compensation vector ``k`` adds
``diag(k)`` to that matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DisconnectedInput, NotSymmetric
from .graph import (
    CutKind,
    SignedGraph,
    classify_negative_cut,
    count_components,
    is_connected,
    split_components,
)
from .linalg import eigvals_general, inverse_iteration, jacobi_eigh, normalize_sign

ZERO_REL = 1e-8  # eps_zero = ZERO_REL * ||L||_F
CLUSTER_REL = 1e-7  # band used to group eigenvalues as one multiple root
RESID_REL = 1e-9


def _as_vector(k, n: int) -> np.ndarray:
    vec = np.asarray(getattr(k, "k", k), dtype=float).reshape(-1)
    if vec.shape != (n,):
        from .errors import LengthMismatch

        raise LengthMismatch(f"compensation vector has length {vec.size}, expected {n}")
    return vec


def zero_tolerance(m) -> float:
    """Dead-band ``eps_zero`` for classifying eigenvalues as zero."""
    return ZERO_REL * float(np.linalg.norm(np.asarray(m, dtype=float)))


def residual_tolerance(m) -> float:
    """Residual bound for eigenpairs of ``m``."""
    return RESID_REL * max(float(np.linalg.norm(np.asarray(m, dtype=float))), 1.0)


# -- construction -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SignedLaplacian:
    """Dense signed Laplacian of ``source``, optionally compensated.

    Attributes
    ----------
    matrix : ndarray, shape (n, n)
        ``L`` or ``L + diag(k)``.
    source : SignedGraph
        Graph the matrix was built from.
    compensation : object or None
        The compensation vector (anything exposing ``.k`` or a plain array).
    """

    matrix: np.ndarray
    source: SignedGraph
    compensation: object = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def symmetric(self) -> bool:
        return not self.source.directed

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def laplacian_matrix(g: SignedGraph, k=None) -> np.ndarray:
    """Plain array ``L(g)`` or ``L(g) + diag(k)``."""
    w = g.adjacency()
    lap = np.diag(w.sum(axis=1)) - w
    if k is not None:
        lap = lap + np.diag(_as_vector(k, g.n))
    return lap


def laplacian(g: SignedGraph, k=None) -> SignedLaplacian:
    """Signed Laplacian of ``g``, with ``diag(k)`` added when ``k`` is given.

    Examples
    --------
    >>> from signednet.graph import SignedGraph
    >>> laplacian(SignedGraph(2, [(0, 1, 1.0)])).matrix
    array([[ 1., -1.],
           [-1.,  1.]])
    """
    mat = laplacian_matrix(g, k)
    mat.setflags(write=False)
    return SignedLaplacian(mat, g, k)


# -- spectra ----------------------------------------------------------------


def _matrix_of(m) -> np.ndarray:
    return np.asarray(getattr(m, "matrix", m), dtype=float)


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Spectrum, inertia counts and the extremal eigenpair of a matrix.

    ``eigenvalues`` are sorted by real part, then imaginary part.  The
    extremal eigenvalue ``lambda1`` is the first of them.  ``v_right`` is unit
    norm.  ``v_left`` satisfies ``v_left @ v_right == 1`` and is ``None`` when
    ``lambda1`` is not simple.
    """

    eigenvalues: np.ndarray
    n_negative: int
    n_zero: int
    n_positive: int
    eps_zero: float
    symmetric: bool
    lambda1: complex
    v_right: np.ndarray
    v_left: np.ndarray | None
    multiplicity1: int = 1
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def min_real_part(self) -> float:
        return float(self.eigenvalues[0].real)

    @property
    def lambda1_is_real(self) -> bool:
        return self.lambda1.imag == 0.0

    @property
    def stable(self) -> bool:
        """True when no eigenvalue has real part below ``-eps_zero``."""
        return self.n_negative == 0

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [{"re": float(z.real), "im": float(z.imag)} for z in self.eigenvalues],
            "n_negative": self.n_negative,
            "n_zero": self.n_zero,
            "n_positive": self.n_positive,
            "v1_right": _vector_json(self.v_right),
            "v1_left": None if self.v_left is None else _vector_json(self.v_left),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _vector_json(v):
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return [{"re": float(z.real), "im": float(z.imag)} for z in v]
    return [float(x) for x in v]


def _sorted(vals: np.ndarray) -> np.ndarray:
    vals = np.asarray(vals, dtype=complex)
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def _counts(vals: np.ndarray, eps: float, symmetric: bool):
    re = vals.real
    neg = int(np.sum(re < -eps))
    if symmetric:
        zero = int(np.sum(np.abs(vals) <= eps))
    else:
        zero = int(np.sum(np.abs(re) <= eps))
    return neg, zero, len(vals) - neg - zero


def eig_symmetric(m) -> SpectralReport:
    """Full real spectrum of a symmetric matrix by cyclic Jacobi.

    Raises
    ------
    NotSymmetric
        If ``m`` is not symmetric within a relative ``1e-12``.
    """
    a = _matrix_of(m)
    scale = float(np.linalg.norm(a))
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12 * max(scale, 1.0):
        raise NotSymmetric("matrix is not symmetric")
    w, v = jacobi_eigh(a)
    eps = ZERO_REL * scale
    neg, zero, pos = _counts(w.astype(complex), eps, True)
    band = CLUSTER_REL * scale
    mult = int(np.sum(w - w[0] <= band))
    v1 = normalize_sign(v[:, 0].copy())
    return SpectralReport(
        eigenvalues=w.astype(complex),
        n_negative=neg,
        n_zero=zero,
        n_positive=pos,
        eps_zero=eps,
        symmetric=True,
        lambda1=complex(w[0]),
        v_right=v1,
        v_left=v1.copy() if mult == 1 else None,
        multiplicity1=mult,
        eigenvectors=v,
    )


def _snap_real(vals: np.ndarray, scale: float) -> np.ndarray:
    """Zero out imaginary parts that are pure rounding noise."""
    vals = vals.copy()
    noise = np.abs(vals.imag) <= 1e-12 * max(scale, 1.0)
    vals[noise] = vals[noise].real
    return vals


def eig_general(m) -> SpectralReport:
    """Complex spectrum of a general real matrix by Francis QR.

    The extremal (smallest real part) eigenvalue gets a right eigenvector by
    inverse iteration, and a left eigenvector from the transposed problem,
    scaled so ``v_left @ v_right == 1``.

    Raises
    ------
    NoConvergence
        If the QR iteration stalls.
    """
    a = _matrix_of(m)
    scale = float(np.linalg.norm(a))
    vals = _sorted(_snap_real(eigvals_general(a), scale))
    eps = ZERO_REL * scale
    neg, zero, pos = _counts(vals, eps, False)
    lam1 = complex(vals[0])
    band = CLUSTER_REL * max(scale, 1.0)
    mult = int(np.sum(np.abs(vals - lam1) <= band))
    right = inverse_iteration(a, lam1)
    right = right / np.linalg.norm(right)
    left = None
    if mult == 1:
        # the transposed problem has the same spectrum; pair by nearest value
        left_vals = _sorted(_snap_real(eigvals_general(a.T), scale))
        lam_left = left_vals[int(np.argmin(np.abs(left_vals - lam1)))]
        if abs(lam_left - lam1) > band:
            lam_left = lam1
        left = inverse_iteration(a.T, lam_left)
        left = left / (left @ right)
    return SpectralReport(
        eigenvalues=vals,
        n_negative=neg,
        n_zero=zero,
        n_positive=pos,
        eps_zero=eps,
        symmetric=False,
        lambda1=lam1,
        v_right=right,
        v_left=left,
        multiplicity1=mult,
    )


def spectrum(m) -> SpectralReport:
    """Dispatch to :func:`eig_symmetric` or :func:`eig_general`."""
    a = _matrix_of(m)
    if isinstance(m, SignedLaplacian):
        symmetric = m.symmetric
    else:
        symmetric = bool(np.max(np.abs(a - a.T), initial=0.0) <= 1e-12 * max(np.linalg.norm(a), 1.0))
    return eig_symmetric(a) if symmetric else eig_general(a)


def min_real_part(m) -> float:
    """Smallest real part over the spectrum of ``m``."""
    return spectrum(m).min_real_part


# -- inertia ----------------------------------------------------------------


def inertia_negative(m) -> int:
    """Number of eigenvalues with real part below ``-eps_zero``."""
    return spectrum(m).n_negative


@dataclass(frozen=True)
class InertiaBounds:
    """Closed interval ``[lower, upper]`` for the negative inertia."""

    lower: int
    upper: int

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError(f"invalid inertia bounds ({self.lower}, {self.upper})")

    def __contains__(self, value: int) -> bool:
        return self.lower <= value <= self.upper

    def as_tuple(self) -> tuple[int, int]:
        return (self.lower, self.upper)


def bronski_bounds(g: SignedGraph) -> InertiaBounds:
    """Bounds ``tau(G+) - 1 <= i_-(L) <= n - tau(G-)`` from component counts.

    Raises
    ------
    DisconnectedInput
        If ``g`` is not (weakly) connected.
    """
    if not is_connected(g):
        raise DisconnectedInput("inertia bounds need a connected graph")
    gplus, gminus = split_components(g)
    return InertiaBounds(count_components(gplus).count - 1, g.n - count_components(gminus).count)


@dataclass(frozen=True)
class InertiaPrediction:
    """Graph-theoretic prediction of ``i_-(L)``.

    ``rule`` names the structural condition used: ``"no-negative-edges"``,
    ``"negative-bridges"``, ``"negative-cut-mixed"``, ``"circle-all-negative"``,
    ``"circle"`` or ``"indeterminate"`` (component-count bounds only).
    """

    lower: int
    upper: int
    rule: str

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> int | None:
        return self.lower if self.exact else None

    def __contains__(self, value: int) -> bool:
        return self.lower <= value <= self.upper


def is_circle(g: SignedGraph) -> bool:
    """True for an undirected cycle through all ``n >= 3`` nodes."""
    if g.directed or g.n < 3 or len(g.edges) != g.n or not is_connected(g):
        return False
    deg = np.zeros(g.n, dtype=int)
    for i, j, _ in g.edges:
        deg[i] += 1
        deg[j] += 1
    return bool(np.all(deg == 2))


def predict_inertia_from_cut(g: SignedGraph) -> InertiaPrediction:
    """Predict the negative inertia of ``L(g)`` from negative-edge structure.

    * no negative edges: exactly 0;
    * every negative edge is a bridge whose joint removal disconnects ``g``:
      exactly the number of negative edges;
    * negative edges disconnect ``g`` but are not all bridges: at most their
      number (intersected with the component-count bounds);
    * circles: ``n - 1`` when all edges are negative, otherwise within one
      below the number of negative edges;
    * anything else, or a directed graph: component-count bounds only.

    Raises
    ------
    DisconnectedInput
        If ``g`` is not (weakly) connected.
    """
    bounds = bronski_bounds(g)
    if g.directed:
        return InertiaPrediction(bounds.lower, bounds.upper, "indeterminate")
    cut = classify_negative_cut(g)
    if cut.kind is CutKind.NO_NEGATIVE_EDGES:
        return InertiaPrediction(0, 0, "no-negative-edges")
    if cut.kind is CutKind.CUT_SET_ALL_BRIDGES:
        return InertiaPrediction(cut.size, cut.size, "negative-bridges")
    if is_circle(g):
        m = len(g.negative_edges())
        if m == g.n:
            return InertiaPrediction(g.n - 1, g.n - 1, "circle-all-negative")
        lo, hi = max(m - 1, bounds.lower), min(m, bounds.upper)
        return InertiaPrediction(lo, hi, "circle")
    if cut.kind is CutKind.CUT_SET_MIXED:
        return InertiaPrediction(bounds.lower, min(cut.size, bounds.upper), "negative-cut-mixed")
    return InertiaPrediction(bounds.lower, bounds.upper, "indeterminate")


# -- eventual positivity ----------------------------------------------------

POSITIVITY_REL = 1e-8
POWER_LIMIT = 50


def _perron_data(a: np.ndarray, key):
    """Dominant eigenvalue under ``key`` with its right and left vectors.

    Returns ``None`` when the dominant eigenvalue is not real, not simple or
    not strictly dominant.
    """
    scale = max(float(np.linalg.norm(a)), 1.0)
    tol = POSITIVITY_REL * scale
    vals = eigvals_general(a)
    score = key(vals)
    top = int(np.argmax(score))
    lam = vals[top]
    if abs(lam.imag) > tol:
        return None
    others = np.delete(score, top)
    if others.size and np.max(others) > score[top] - tol:
        return None
    right = inverse_iteration(a, lam.real)
    left = inverse_iteration(a.T, lam.real)
    return lam.real, right, left


def _positive_vector(v: np.ndarray) -> bool:
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return False
    v = v / np.max(np.abs(v))
    return bool(np.all(v >= POSITIVITY_REL) or np.all(v <= -POSITIVITY_REL))


def has_strong_perron_frobenius(m) -> bool:
    """True when the spectral radius is a simple, strictly modulus-dominant
    eigenvalue with entrywise positive right and left eigenvectors."""
    a = _matrix_of(m)
    if a.shape[0] == 1:
        return bool(a[0, 0] > 0)
    data = _perron_data(a, np.abs)
    if data is None:
        return False
    lam, right, left = data
    return lam > 0 and _positive_vector(right) and _positive_vector(left)


def powers_eventually_positive(m, k_max: int = POWER_LIMIT) -> bool:
    """Cross-check by explicit powering: are ``M^k`` for the last few
    ``k <= k_max`` all entrywise positive?

    Only a heuristic witness; powering alone cannot decide the property.
    """
    a = _matrix_of(m)
    norm = max(float(np.max(np.abs(a))), 1e-300)
    p = np.eye(a.shape[0])
    tail = []
    for _ in range(k_max):
        p = p @ (a / norm)
        p /= max(float(np.max(np.abs(p))), 1e-300)
        tail.append(bool(np.all(p > 1e-12)))
    return all(tail[-5:])


def is_eventually_positive(m) -> bool:
    """Whether ``M^k > 0`` entrywise for all sufficiently large ``k``.

    Decided by the strong Perron-Frobenius property of both ``M`` and ``M.T``
    (the left vector of ``M`` is the right vector of ``M.T``).

    Examples
    --------
    >>> is_eventually_positive([[1.0, 1.0], [1.0, 1.0]])
    True
    >>> is_eventually_positive([[0.0, 1.0], [1.0, 0.0]])
    False
    """
    return has_strong_perron_frobenius(m)


def positivity_shift(m) -> float:
    """A shift ``s >= 0`` large enough that ``sI + M`` puts the rightmost
    eigenvalue of ``M`` strictly ahead of all others in modulus.

    Making the diagonal nonnegative is not enough for this: with complex
    eigenvalues far from the real axis, a larger shift is needed.  For
    ``mu`` rightmost and every other eigenvalue ``z`` we need
    ``(s + mu)^2 > (s + Re z)^2 + (Im z)^2``; the bound below satisfies it.
    """
    a = _matrix_of(m)
    vals = eigvals_general(a)
    mu = float(np.max(vals.real))
    s = max(0.0, float(np.max(-np.diag(a))) if a.size else 0.0) + 1.0
    s = max(s, -mu + 1.0)
    for z in vals:
        gap = mu - z.real
        if gap > 0:
            # need 2 (s + Re z) gap + gap^2 > Im(z)^2
            s = max(s, (z.imag**2 - gap**2) / (2 * gap) - z.real + 1.0)
    return s


def is_eventually_exp_positive(m) -> bool:
    """Whether ``exp(tM) > 0`` entrywise for all sufficiently large ``t``.

    Equivalent to ``sI + M`` being eventually positive for some ``s >= 0``.
    With ``s`` from :func:`positivity_shift` this reduces to: the rightmost
    eigenvalue of ``M`` is real, simple and strictly ahead of every other
    eigenvalue in real part, with entrywise positive right and left vectors.
    """
    a = _matrix_of(m)
    if a.shape[0] == 1:
        return True
    data = _perron_data(a, lambda v: v.real)
    if data is None:
        return False
    _, right, left = data
    return _positive_vector(right) and _positive_vector(left)


def is_psd_simple_zero(m) -> bool:
    """Symmetric ``m`` is positive semidefinite with a simple zero eigenvalue."""
    rep = eig_symmetric(m)
    return rep.n_negative == 0 and rep.n_zero == 1
