"""Integration of the compensated flow ``xdot_i = sum_j w_ij (x_j - x_i) - k_i x_i``.

The right-hand side is evaluated agent by agent from neighbour lists
(:func:`step_local`), which keeps the simulator independent of the spectral
code it is used to cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch, RegimeMismatch, StepInstability
from .graph import GaugePartition, SignedGraph, structural_balance

RK4_STABILITY_LIMIT = 2.5


@dataclass(frozen=True)
class SimulationConfig:
    """Fixed-step RK4 settings.

    Attributes
    ----------
    dt : float
        Step size.
    t_max : float
        Final time.
    converge_tol : float
        Stop once ``||xdot||_inf`` drops to this value.
    diverge_threshold : float
        Stop once ``||x||_inf`` reaches this value.
    sample_stride : int
        Record every ``sample_stride``-th step (the terminal state is always
        recorded).
    """

    dt: float = 0.01
    t_max: float = 100.0
    converge_tol: float = 1e-9
    diverge_threshold: float = 1e6
    sample_stride: int = 10

    def __post_init__(self):
        for name in ("dt", "t_max", "converge_tol", "diverge_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if int(self.sample_stride) < 1:
            raise ValueError("sample_stride must be a positive integer")


class _LocalRule:
    """Neighbour lists in flat arrays so one evaluation is a few gathers."""

    def __init__(self, g: SignedGraph, k):
        arcs = g.arcs()
        self.n = g.n
        self.src = np.array([i for i, _, _ in arcs], dtype=int)
        self.dst = np.array([j for _, j, _ in arcs], dtype=int)
        self.w = np.array([w for _, _, w in arcs], dtype=float)
        kv = np.asarray(getattr(k, "k", k), dtype=float).reshape(-1)
        if kv.size != g.n:
            raise LengthMismatch(f"compensation vector has length {kv.size}, expected {g.n}")
        self.k = kv

    def __call__(self, x: np.ndarray) -> np.ndarray:
        # agent i only reads x_i and the states of its in-neighbours j
        flow = self.w * (x[self.dst] - x[self.src])
        out = np.bincount(self.src, weights=flow, minlength=self.n)
        return out - self.k * x

    def inf_norm(self) -> float:
        """``||L + diag(k)||_inf`` from the local data."""
        rows = np.abs(self.k + np.bincount(self.src, weights=self.w, minlength=self.n))
        rows += np.bincount(self.src, weights=np.abs(self.w), minlength=self.n)
        return float(np.max(rows, initial=0.0))


def step_local(g: SignedGraph, k, x) -> np.ndarray:
    """Time derivative of every agent computed from its own neighbourhood.

    Raises
    ------
    LengthMismatch
        If ``k`` or ``x`` does not have one entry per node.

    Examples
    --------
    >>> from signednet.graph import SignedGraph
    >>> step_local(SignedGraph(2, [(0, 1, -1.0)]), [0, 0], [1.0, 0.0])
    array([ 1., -1.])
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != g.n:
        raise LengthMismatch(f"state has length {x.size}, expected {g.n}")
    return _LocalRule(g, k)(x)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution of the compensated flow."""

    times: np.ndarray
    states: np.ndarray
    dt: float
    converged: bool
    diverged: bool
    final_residual: float
    x0: np.ndarray = field(repr=False, default=None)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    def to_csv(self) -> str:
        n = self.states.shape[1]
        lines = ["t," + ",".join(f"x{i}" for i in range(n))]
        for t, row in zip(self.times, self.states):
            lines.append(f"{t:.6e}," + ",".join(f"{v:.6e}" for v in row))
        return "\n".join(lines) + "\n"


def integrate(g: SignedGraph, k, x0, cfg: SimulationConfig | None = None) -> Trajectory:
    """Classical fourth-order Runge-Kutta integration of the compensated flow.

    Stops at convergence (``||xdot||_inf <= converge_tol``), divergence
    (``||x||_inf >= diverge_threshold``) or ``t_max``, whichever comes first.
    The last step is shortened so the run ends exactly at ``t_max``.

    Raises
    ------
    ValueError
        If ``dt * ||L + diag(k)||_inf`` breaks the explicit-step guard.
    StepInstability
        If the state becomes non-finite.
    """
    cfg = cfg or SimulationConfig()
    rule = _LocalRule(g, k)
    x = np.array(x0, dtype=float).reshape(-1)
    if x.size != g.n:
        raise LengthMismatch(f"x0 has length {x.size}, expected {g.n}")
    if cfg.dt * rule.inf_norm() >= RK4_STABILITY_LIMIT:
        raise ValueError(
            f"dt={cfg.dt} too large: dt * ||L^k||_inf must stay below {RK4_STABILITY_LIMIT}"
        )
    start = x.copy()
    times, states = [0.0], [x.copy()]
    t = 0.0
    step = 0
    f = rule(x)
    residual = float(np.max(np.abs(f), initial=0.0))
    converged = residual <= cfg.converge_tol
    diverged = False
    while not converged and t < cfg.t_max * (1 - 1e-15):
        h = min(cfg.dt, cfg.t_max - t)
        k1 = f
        k2 = rule(x + 0.5 * h * k1)
        k3 = rule(x + 0.5 * h * k2)
        k4 = rule(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        step += 1
        t = step * cfg.dt if h == cfg.dt else cfg.t_max
        if not np.all(np.isfinite(x)):
            raise StepInstability(f"non-finite state at t={t:g}")
        f = rule(x)
        residual = float(np.max(np.abs(f), initial=0.0))
        converged = residual <= cfg.converge_tol
        diverged = float(np.max(np.abs(x))) >= cfg.diverge_threshold
        done = converged or diverged or t >= cfg.t_max * (1 - 1e-15)
        if done or step % cfg.sample_stride == 0:
            times.append(t)
            states.append(x.copy())
        if diverged:
            break
    return Trajectory(
        times=np.array(times),
        states=np.array(states),
        dt=cfg.dt,
        converged=converged,
        diverged=diverged,
        final_residual=residual,
        x0=start,
    )


# -- reconciliation ---------------------------------------------------------


@dataclass(frozen=True)
class ReconcileReport:
    """Comparison of a simulated run with a predicted regime."""

    predicted: str
    simulated: str
    agree: bool
    max_deviation: float | None
    detail: str

    def to_dict(self) -> dict:
        return {
            "predicted": self.predicted,
            "simulated": self.simulated,
            "agree": self.agree,
            "max_deviation": self.max_deviation,
            "detail": self.detail,
        }


def simulated_outcome(traj: Trajectory) -> str:
    if traj.diverged:
        return "Divergent"
    if traj.converged:
        return "Converged"
    return "Unsettled"


def reconcile(traj: Trajectory, prediction, atol: float = 1e-4, strict: bool = True) -> ReconcileReport:
    """Check a trajectory against a :class:`BehaviorPrediction`.

    Unstable predictions must diverge.  Regimes with a steady-state map must
    converge to ``P x0`` within ``atol``.  Bipartite runs are additionally
    checked for equal magnitudes whose signs follow the gauge.  Regimes
    without a map only need the run to have settled or diverged consistently
    with the spectral verdict.

    Raises
    ------
    RegimeMismatch
        When ``strict`` and the run disagrees with the prediction.
    """
    from .compensation import Regime

    regime = prediction.regime
    sim = simulated_outcome(traj)
    deviation = None
    if regime is Regime.UNSTABLE:
        agree = sim == "Divergent"
        detail = "expected divergence"
    elif prediction.steady_state_map is not None:
        target = prediction.steady_state_map @ traj.x0
        deviation = float(np.max(np.abs(traj.final_state - target), initial=0.0))
        agree = sim == "Converged" and deviation <= atol
        detail = f"max |x_final - P x0| = {deviation:.3e} (atol {atol:g})"
        if agree and regime is Regime.BIPARTITE:
            agree, extra = _bipartite_pattern(traj, prediction, atol)
            detail += "; " + extra
    else:
        verdict = prediction.spectral_verdict
        expected = "Divergent" if verdict == "unstable" else "Converged"
        agree = sim == expected
        detail = f"no closed form; spectral verdict {verdict} expects {expected}"
    report = ReconcileReport(str(regime), sim, bool(agree), deviation, detail)
    if strict and not report.agree:
        raise RegimeMismatch(report)
    return report


def _bipartite_pattern(traj: Trajectory, prediction, atol: float):
    x = traj.final_state
    mags = np.abs(x)
    if float(np.max(mags) - np.min(mags)) > atol:
        return False, "magnitudes differ"
    if float(np.max(mags)) <= atol:
        return True, "bipartite state collapsed to zero (x0 orthogonal to the gauge vector)"
    pmap = prediction.steady_state_map
    col = pmap[:, int(np.argmax(np.abs(pmap).sum(axis=0)))]
    signs = np.sign(col)
    same = np.all(np.sign(x) == signs) or np.all(np.sign(x) == -signs)
    return bool(same), "signs follow the gauge" if same else "signs do not follow the gauge"


def gauge_of(g: SignedGraph) -> np.ndarray | None:
    """Gauge sign vector of a structurally balanced graph, else ``None``."""
    part = structural_balance(g)
    return part.vector if isinstance(part, GaugePartition) else None
