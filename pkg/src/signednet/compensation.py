"""Self-loop compensation: gain vectors, regime classification and sweeps.

A compensation vector ``k`` turns the flow into ``xdot = -(L + diag(k)) x``.
The reference vector is ``delta_i = sum_j (|w_ij| - w_ij)``, twice the
total negative weight at node ``i``; adding it makes every diagonal entry
equal the absolute row strength.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    ComplexLeadingEigenvalue,
    DisconnectedInput,
    Divergent,
    GraphInputError,
    IndeterminateRegime,
    LengthMismatch,
    NotBalanced,
    NotPSD,
    StructurallyBalanced,
)
from .graph import (
    GaugePartition,
    SignedGraph,
    is_connected,
    is_strongly_connected,
    is_weight_balanced,
    structural_balance,
)
from .spectral import (
    CLUSTER_REL,
    eig_general,
    eig_symmetric,
    laplacian_matrix,
    spectrum,
)


# -- vectors ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CompensationVector:
    """Per-node damping gains ``k`` with a tag saying how they were built.

    ``regime`` is one of ``"delta"``, ``"cluster"``, ``"cluster-clipped"``,
    ``"stabilizing"``, ``"sweep"`` or ``"custom"``.  Only the cluster family
    may hold negative entries.
    """

    k: np.ndarray
    regime: str = "custom"

    def __post_init__(self):
        vec = np.array(self.k, dtype=float).reshape(-1)
        vec.setflags(write=False)
        object.__setattr__(self, "k", vec)

    def __len__(self) -> int:
        return self.k.size

    def __array__(self, dtype=None, copy=None):
        return self.k if dtype is None else self.k.astype(dtype)

    @property
    def active_set(self) -> list[int]:
        """Nodes with a nonzero gain."""
        return [int(i) for i in np.flatnonzero(self.k)]

    def to_list(self) -> list[float]:
        return [float(x) for x in self.k]


def as_compensation(k, n: int | None = None) -> CompensationVector:
    """Wrap ``k`` as a :class:`CompensationVector`, checking its length."""
    cv = k if isinstance(k, CompensationVector) else CompensationVector(k)
    if n is not None and len(cv) != n:
        raise LengthMismatch(f"compensation vector has length {len(cv)}, expected {n}")
    return cv


def delta(g: SignedGraph) -> CompensationVector:
    """Reference gains ``delta_i = sum_j (|w_ij| - w_ij)``.

    Examples
    --------
    >>> from signednet.graph import SignedGraph
    >>> delta(SignedGraph(2, [(0, 1, -1.0)])).to_list()
    [2.0, 2.0]
    """
    w = g.adjacency()
    return CompensationVector((np.abs(w) - w).sum(axis=1), "delta")


class DeltaComparison(enum.Enum):
    EQUAL = "Equal"
    BELOW_NOT_EQUAL = "BelowNotEqual"
    ABOVE_NOT_EQUAL = "AboveNotEqual"
    INCOMPARABLE = "Incomparable"

    def __str__(self):
        return self.value


def compare_delta(k, d, atol: float | None = None) -> DeltaComparison:
    """Entrywise comparison of ``k`` against ``d``.

    Differences within ``atol`` (default ``1e-8 * max(1, max|d|)``) count as
    equal.  ``Incomparable`` means strict deviations in both directions.

    Raises
    ------
    LengthMismatch
        If the vectors differ in length.
    """
    kv = np.asarray(getattr(k, "k", k), dtype=float).reshape(-1)
    dv = np.asarray(getattr(d, "k", d), dtype=float).reshape(-1)
    if kv.shape != dv.shape:
        raise LengthMismatch(f"cannot compare vectors of lengths {kv.size} and {dv.size}")
    if atol is None:
        atol = 1e-8 * max(1.0, float(np.max(np.abs(dv), initial=0.0)))
    diff = kv - dv
    above = bool(np.any(diff > atol))
    below = bool(np.any(diff < -atol))
    if above and below:
        return DeltaComparison.INCOMPARABLE
    if above:
        return DeltaComparison.ABOVE_NOT_EQUAL
    if below:
        return DeltaComparison.BELOW_NOT_EQUAL
    return DeltaComparison.EQUAL


# -- regimes ----------------------------------------------------------------


class Regime(enum.Enum):
    UNSTABLE = "Unstable"
    TRIVIAL = "TrivialConsensus"
    BIPARTITE = "BipartiteConsensus"
    CLUSTER = "ClusterConsensus"
    NO_BIPARTITE = "NoBipartiteConsensus"
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value

    @property
    def has_steady_state(self) -> bool:
        return self in (Regime.TRIVIAL, Regime.BIPARTITE, Regime.CLUSTER)


@dataclass(frozen=True, eq=False)
class BehaviorPrediction:
    """Predicted collective behaviour of the compensated flow.

    Attributes
    ----------
    regime : Regime
    steady_state_map : ndarray or None
        Projection ``P`` with ``x(t) -> P x(0)``; present exactly for the
        trivial, bipartite and cluster regimes.
    certificate : str
        The conditions that justified the regime.
    spectral_verdict : str
        ``"stable"``, ``"marginally-stable"`` or ``"unstable"`` from the
        spectrum of ``L + diag(k)``, reported independently of the regime.
    """

    regime: Regime
    steady_state_map: np.ndarray | None
    certificate: str
    spectral_verdict: str
    k: CompensationVector | None = None

    def steady_state(self, x0) -> np.ndarray:
        if self.steady_state_map is None:
            raise IndeterminateRegime(f"no steady-state map for regime {self.regime}")
        return self.steady_state_map @ np.asarray(x0, dtype=float)

    def to_dict(self) -> dict:
        p = self.steady_state_map
        return {
            "regime": self.regime.value,
            "certificate": self.certificate,
            "spectral_verdict": self.spectral_verdict,
            "steady_state_map": None if p is None else [[float(x) for x in row] for row in p],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def spectral_verdict(rep) -> str:
    if rep.n_negative:
        return "unstable"
    if rep.n_zero:
        return "marginally-stable"
    return "stable"


def _require_connected(g: SignedGraph) -> None:
    if not is_connected(g):
        raise DisconnectedInput("graph is not connected")


def _gauge_map(g: SignedGraph, gauge: GaugePartition, k_delta: np.ndarray) -> np.ndarray:
    """Bipartite projection ``G 1 p^T G`` with ``p^T 1 = 1``."""
    s = gauge.vector
    n = g.n
    if not g.directed:
        p = np.full(n, 1.0 / n)
    else:
        # left null vector of the gauge-flipped matrix G L^delta G
        m = s[:, None] * laplacian_matrix(g, k_delta) * s[None, :]
        rep = eig_general(m)
        p = np.real(rep.v_left)
        p = p / p.sum()
    return np.outer(s, p * s)


def _cluster_map_undirected(l_delta: np.ndarray):
    rep = eig_symmetric(l_delta)
    band = CLUSTER_REL * max(float(np.linalg.norm(l_delta)), 1.0)
    w = rep.eigenvalues.real
    vecs = rep.eigenvectors[:, w - w[0] <= band]
    return rep.lambda1.real, vecs @ vecs.T


def _cluster_map_directed(l_delta: np.ndarray):
    rep = eig_general(l_delta)
    if rep.lambda1.imag != 0.0 or rep.v_left is None:
        raise ComplexLeadingEigenvalue(
            "smallest eigenvalue of L + diag(delta) is not real and simple"
        )
    return rep.lambda1.real, np.outer(np.real(rep.v_right), np.real(rep.v_left))


def classify(g: SignedGraph, k) -> BehaviorPrediction:
    """Predict the behaviour of ``xdot = -(L + diag(k)) x`` on ``g``.

    Dispatch, for a connected ``g`` (strongly connected when directed):

    * structurally balanced: ``k = delta`` gives bipartite consensus, ``k``
      below ``delta`` is unstable, ``k`` above ``delta`` reaches zero, and
      ``k`` incomparable with ``delta`` rules out bipartite consensus;
    * structurally imbalanced: ``k >= delta`` reaches zero.  With
      ``c = delta - lambda_1(L + diag(delta)) 1``, ``k = c`` gives cluster
      consensus, ``k > c`` in every entry reaches zero and (undirected)
      ``k < c`` in every entry is unstable;
    * weight-balanced digraphs also reach zero when ``k`` exceeds
      ``delta - lambda_1(sym(L + diag(delta))) 1`` in every entry.

    Anything else is ``Indeterminate``.  The spectral verdict is always
    attached but never promoted to a regime.

    Raises
    ------
    DisconnectedInput
        If ``g`` is not weakly connected.
    LengthMismatch
        If ``k`` has the wrong length.
    """
    _require_connected(g)
    kv = as_compensation(k, g.n)
    d = delta(g).k
    lk = laplacian_matrix(g, kv.k)
    verdict = spectral_verdict(spectrum(lk) if g.directed else eig_symmetric(lk))
    n = g.n
    zero_map = np.zeros((n, n))

    def result(regime, cert, pmap=None):
        if regime is Regime.TRIVIAL:
            pmap = zero_map
        return BehaviorPrediction(regime, pmap, cert, verdict, kv)

    if g.directed and not is_strongly_connected(g):
        return result(Regime.INDETERMINATE, "directed graph is not strongly connected")

    kind = "directed" if g.directed else "undirected"
    balance = structural_balance(g)
    cmp = compare_delta(kv, d)
    if isinstance(balance, GaugePartition):
        if cmp is DeltaComparison.EQUAL:
            return result(
                Regime.BIPARTITE,
                f"structurally balanced {kind} graph with k = delta: simple zero "
                "eigenvalue with gauge vector G1, states converge to the gauge average",
                _gauge_map(g, balance, d),
            )
        if cmp is DeltaComparison.BELOW_NOT_EQUAL:
            return result(
                Regime.UNSTABLE,
                f"structurally balanced {kind} graph with k <= delta, k != delta: "
                "the gauge-flipped matrix loses its zero row sums and gains a "
                "negative eigenvalue",
            )
        if cmp is DeltaComparison.ABOVE_NOT_EQUAL:
            return result(
                Regime.TRIVIAL,
                f"structurally balanced {kind} graph with k >= delta, k != delta: "
                "all eigenvalues have positive real part",
            )
        return result(
            Regime.NO_BIPARTITE,
            f"structurally balanced {kind} graph with k incomparable to delta: "
            "the null space cannot be spanned by a gauge vector",
        )

    if cmp in (DeltaComparison.EQUAL, DeltaComparison.ABOVE_NOT_EQUAL):
        return result(
            Regime.TRIVIAL,
            f"structurally imbalanced {kind} graph with k >= delta: irreducibly "
            "diagonally dominant matrix without a zero eigenvalue",
        )

    l_delta = laplacian_matrix(g, d)
    try:
        if g.directed:
            lam1, pmap = _cluster_map_directed(l_delta)
        else:
            lam1, pmap = _cluster_map_undirected(l_delta)
    except ComplexLeadingEigenvalue:
        lam1 = pmap = None
    if lam1 is not None:
        c = d - lam1
        ccmp = compare_delta(kv, c, atol=1e-8 * max(1.0, float(np.max(np.abs(c)))))
        if ccmp is DeltaComparison.EQUAL:
            return result(
                Regime.CLUSTER,
                f"structurally imbalanced {kind} graph with k = delta - "
                "lambda_1(L + diag(delta)) 1: states converge to the projection "
                "onto the lowest eigenvectors",
                pmap,
            )
        if np.all(kv.k > c + 1e-12 * max(1.0, float(np.max(np.abs(c))))):
            return result(
                Regime.TRIVIAL,
                f"structurally imbalanced {kind} graph with k > delta - "
                "lambda_1(L + diag(delta)) 1 in every entry: all eigenvalues have "
                "positive real part",
            )
        if not g.directed and np.all(kv.k < c - 1e-12 * max(1.0, float(np.max(np.abs(c))))):
            return result(
                Regime.UNSTABLE,
                "structurally imbalanced undirected graph with k < delta - "
                "lambda_1(L + diag(delta)) 1 in every entry: a negative eigenvalue "
                "appears",
            )

    if g.directed and is_weight_balanced(g):
        sym = 0.5 * (l_delta + l_delta.T)
        mu = eig_symmetric(sym).lambda1.real
        c = d - mu
        if np.all(kv.k > c + 1e-12 * max(1.0, float(np.max(np.abs(c))))):
            return result(
                Regime.TRIVIAL,
                "structurally imbalanced weight-balanced digraph with k > delta - "
                "lambda_1(sym(L + diag(delta))) 1 in every entry: the symmetric "
                "part is positive definite",
            )

    return result(
        Regime.INDETERMINATE,
        f"structurally imbalanced {kind} graph: no structural condition decides "
        f"this k; spectral verdict {verdict}",
    )


# -- special vectors --------------------------------------------------------


def cluster_compensation(g: SignedGraph, clip: bool = False) -> CompensationVector:
    """Gains ``delta - lambda_1(L + diag(delta)) 1`` for cluster consensus.

    The result may have negative entries at nodes with ``delta_i = 0``.
    ``clip=True`` replaces those by zero (the clipped vector no longer gives
    cluster consensus in general).

    Raises
    ------
    DisconnectedInput
        If ``g`` is not connected (strongly connected when directed).
    StructurallyBalanced
        If ``lambda_1 = 0``, so the vector collapses to ``delta``.
    ComplexLeadingEigenvalue
        For digraphs whose smallest eigenvalue is not real and simple.
    """
    _require_connected(g)
    if g.directed and not is_strongly_connected(g):
        raise DisconnectedInput("directed graph is not strongly connected")
    if isinstance(structural_balance(g), GaugePartition):
        raise StructurallyBalanced("graph is structurally balanced; the cluster vector equals delta")
    d = delta(g).k
    l_delta = laplacian_matrix(g, d)
    if g.directed:
        lam1, _ = _cluster_map_directed(l_delta)
    else:
        lam1 = eig_symmetric(l_delta).lambda1.real
    k = d - lam1
    if clip:
        return CompensationVector(np.maximum(k, 0.0), "cluster-clipped")
    return CompensationVector(k, "cluster")


def stabilizing_compensation(g: SignedGraph) -> CompensationVector:
    """Gains below ``delta`` that still stabilize an imbalanced undirected graph.

    Uses ``delta - (lambda_1(L + diag(delta)) / 2) 1`` clipped at zero.  The
    smallest eigenvalue of ``L + diag(k)`` is then at least
    ``lambda_1 / 2 > 0``, since clipping only adds a nonnegative diagonal.

    Raises
    ------
    GraphInputError
        For directed graphs.
    StructurallyBalanced
        If no gain below ``delta`` can stabilize the graph.
    """
    if g.directed:
        raise GraphInputError("stabilizing gains are defined for undirected graphs only")
    _require_connected(g)
    if isinstance(structural_balance(g), GaugePartition):
        raise StructurallyBalanced("structurally balanced graphs need k >= delta")
    d = delta(g).k
    lam1 = eig_symmetric(laplacian_matrix(g, d)).lambda1.real
    return CompensationVector(np.maximum(d - 0.5 * lam1, 0.0), "stabilizing")


# -- steady states and optimality -------------------------------------------


def predict_steady_state(g: SignedGraph, k, x0) -> np.ndarray:
    """Closed-form limit of ``x(t)`` for the compensated flow.

    Raises
    ------
    Divergent
        If the regime is unstable.
    IndeterminateRegime
        If the regime has no closed-form limit.
    LengthMismatch
        If ``x0`` has the wrong length.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != g.n:
        raise LengthMismatch(f"x0 has length {x0.size}, expected {g.n}")
    pred = classify(g, k)
    if pred.regime is Regime.UNSTABLE:
        raise Divergent(pred.certificate)
    if pred.steady_state_map is None:
        raise IndeterminateRegime(f"{pred.regime}: {pred.certificate}")
    return pred.steady_state_map @ x0


def optimality_gap(g: SignedGraph, k) -> float:
    """``||k||_1 - ||delta||_1`` for a PSD-making ``k`` on a balanced graph.

    Raises
    ------
    NotBalanced
        If ``g`` is directed, disconnected or structurally imbalanced.
    NotPSD
        If ``L + diag(k)`` has a negative eigenvalue.
    """
    if g.directed or not is_connected(g) or not isinstance(structural_balance(g), GaugePartition):
        raise NotBalanced("needs a connected, undirected, structurally balanced graph")
    kv = as_compensation(k, g.n)
    rep = eig_symmetric(laplacian_matrix(g, kv.k))
    if rep.n_negative:
        raise NotPSD(f"L + diag(k) has {rep.n_negative} negative eigenvalue(s)")
    return float(np.sum(np.abs(kv.k)) - np.sum(np.abs(delta(g).k)))


# -- sweeps -----------------------------------------------------------------


def default_q_grid(qmin: float = 0.0, qmax: float = 2.0, steps: int = 201) -> np.ndarray:
    return np.linspace(qmin, qmax, steps)


def resolve_active(g: SignedGraph, active) -> list[int]:
    """Turn ``"vminus"``, ``"all"`` or an iterable of indices into indices."""
    if isinstance(active, str):
        if active == "vminus":
            return list(g.v_minus())
        if active == "all":
            return list(range(g.n))
        raise ValueError(f"unknown active-set keyword {active!r}")
    idx = sorted({int(i) for i in active})
    if any(i < 0 or i >= g.n for i in idx):
        raise GraphInputError("active node index out of range")
    return idx


@dataclass(frozen=True)
class SweepPoint:
    q: float
    min_real_part: float


def sweep(g: SignedGraph, active="vminus", q_grid=None) -> list[SweepPoint]:
    """Smallest real part of the spectrum of ``L + diag(q * delta|active)``.

    Parameters
    ----------
    g : SignedGraph
    active : str or iterable of int
        Nodes that compensate; ``"vminus"`` selects nodes touching a negative
        edge.
    q_grid : sequence of float, optional
        Scale factors; 201 points on ``[0, 2]`` by default.
    """
    idx = resolve_active(g, active)
    grid = default_q_grid() if q_grid is None else np.asarray(q_grid, dtype=float)
    mask = np.zeros(g.n)
    mask[idx] = 1.0
    base = delta(g).k * mask
    lap = laplacian_matrix(g)
    out = []
    for q in grid:
        m = lap + np.diag(q * base)
        rep = eig_general(m) if g.directed else eig_symmetric(m)
        out.append(SweepPoint(float(q), rep.min_real_part))
    return out


def zero_crossings(points, tol: float = 1e-6) -> list[float]:
    """Values of ``q`` where the sweep curve changes sign.

    Points within ``tol`` of zero count as exact roots.  A strict sign change
    between neighbours is located by linear interpolation.
    """
    pts = list(points)
    signs = [0 if abs(p.min_real_part) <= tol else (1 if p.min_real_part > 0 else -1) for p in pts]
    roots = []
    for i, (p, s) in enumerate(zip(pts, signs)):
        if s == 0:
            left = signs[i - 1] if i > 0 else 0
            right = signs[i + 1] if i + 1 < len(pts) else 0
            if left != right or left == 0:
                roots.append(p.q)
        elif i + 1 < len(pts) and s * signs[i + 1] == -1:
            a, b = pts[i], pts[i + 1]
            t = a.min_real_part / (a.min_real_part - b.min_real_part)
            roots.append(a.q + t * (b.q - a.q))
    return roots


def format_sweep_csv(points) -> str:
    lines = ["q,min_real_part"]
    lines += [f"{p.q:.6e},{p.min_real_part:.6e}" for p in points]
    return "\n".join(lines) + "\n"
