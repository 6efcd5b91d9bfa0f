"""Mass-action vector field, Jacobian, adaptive integration and equilibrium refinement."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from . import exact
from .errors import (
    MaxIterations,
    NegativeOvershoot,
    NegativeState,
    NonpositiveState,
    NotConserved,
    SingularJacobian,
    StepLimitExceeded,
)
from .model import MassActionSystem, ReactionNetwork
from .structure import conservation_laws


def _as_state(sys: MassActionSystem, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (sys.network.n_species,):
        raise ValueError(f"state must have length {sys.network.n_species}, got shape {x.shape}")
    return x


def _flux(sys: MassActionSystem, x: np.ndarray) -> np.ndarray:
    # numpy gives 0.0 ** 0.0 == 1.0, so empty-source reactions fire at rate k
    return sys.k * np.prod(x ** sys.source_exponents, axis=1)


def rhs(sys: MassActionSystem, x: Sequence[float]) -> np.ndarray:
    """dx/dt = sum_e k_e x^{y_e} (y'_e - y_e)."""
    x = _as_state(sys, x)
    if np.any(~(x >= 0)):
        raise NegativeState(f"state must be nonnegative, got {x.tolist()}")
    return sys.reaction_matrix @ _flux(sys, x)


def _jacobian(sys: MassActionSystem, x: np.ndarray) -> np.ndarray:
    # d/dx_j x^y = y_j x^(y - e_j); valid on the closed orthant
    Y = sys.source_exponents
    n = x.size
    dflux = np.empty((Y.shape[0], n))
    for j in range(n):
        expo = Y.copy()
        expo[:, j] = np.maximum(expo[:, j] - 1.0, 0.0)
        dflux[:, j] = sys.k * Y[:, j] * np.prod(x ** expo, axis=1)
    return sys.reaction_matrix @ dflux


def jacobian(sys: MassActionSystem, x: Sequence[float]) -> np.ndarray:
    x = _as_state(sys, x)
    if np.any(~(x > 0)):
        raise NonpositiveState(f"state must be strictly positive, got {x.tolist()}")
    return _jacobian(sys, x)


# -- integration ----------------------------------------------------------------


@dataclass(frozen=True)
class IntegrateOptions:
    t_end: float
    rtol: float = 1e-8
    atol: float = 1e-10
    max_steps: int = 1_000_000
    dense_output_stride: float | None = None  # None: one sample per accepted step

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not (self.rtol > 0 and self.atol > 0):
            raise ValueError("rtol and atol must be positive")
        if self.dense_output_stride is not None and not self.dense_output_stride > 0:
            raise ValueError("dense_output_stride must be positive")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # one row per time
    species: tuple[str, ...]
    meta: dict = field(default_factory=dict)
    network: ReactionNetwork | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float).reshape(len(self.times), -1)

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def write_csv(self, out: str | Path | TextIO) -> None:
        """Write ``t,<species...>`` rows with round-trippable floats."""
        if isinstance(out, (str, Path)):
            with open(out, "w", newline="", encoding="utf-8") as fh:
                self.write_csv(fh)
            return
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", *self.species])
        for t, x in zip(self.times, self.states):
            w.writerow([repr(float(t)), *(repr(float(v)) for v in x)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    @classmethod
    def read_csv(cls, src: str | Path | TextIO) -> "Trajectory":
        if isinstance(src, (str, Path)):
            with open(src, newline="", encoding="utf-8") as fh:
                return cls.read_csv(fh)
        rows = list(csv.reader(src))
        if not rows or not rows[0] or rows[0][0] != "t" or len(rows[0]) < 2:
            raise ValueError("trajectory CSV must start with a 't,<species...>' header")
        header = rows[0]
        data = []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                data.append([float(v) for v in row])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if not data:
            raise ValueError("trajectory CSV has no samples")
        arr = np.array(data)
        if np.any(np.diff(arr[:, 0]) <= 0):
            raise ValueError("times must be strictly increasing")
        return cls(arr[:, 0], arr[:, 1:], tuple(header[1:]))


# Dormand-Prince 5(4) tableau (autonomous form, so no stage times) and its
# 4th-order continuous extension.
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_BETA = 0.04  # PI controller, Hairer & Wanner's choice for DOPRI5
_ALPHA = 0.2 - 0.75 * _BETA
_MIN_FACTOR, _MAX_FACTOR = 0.2, 10.0


def _initial_step(f, x0, f0, rtol, atol, t_end):
    scale = atol + rtol * np.abs(x0)
    d0 = np.max(np.abs(x0) / scale)
    d1 = np.max(np.abs(f0) / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, t_end)
    f1 = f(x0 + h0 * f0)
    d2 = np.max(np.abs(f1 - f0) / scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, t_end)


def integrate(sys: MassActionSystem, x0: Sequence[float], opts: IntegrateOptions) -> Trajectory:
    """Integrate the mass-action ODE from ``x0`` over ``[0, opts.t_end]``.

    Dormand-Prince 5(4) with PI step-size control and a componentwise error
    test ``|err_i| <= atol + rtol * max(|x_i|, |x_i_new|)``. Components that
    land in ``(-atol, 0)`` are set to zero; a step producing anything below
    ``-atol`` is rejected and retried with a smaller step, and
    :class:`NegativeOvershoot` is raised only if that cannot be avoided.
    Zero components in ``x0`` are allowed since the closed orthant is
    forward invariant.
    """
    x = _as_state(sys, x0).copy()
    if np.any(~(x >= 0)):
        raise NegativeState(f"initial state must be nonnegative, got {x.tolist()}")
    rtol, atol, t_end = opts.rtol, opts.atol, float(opts.t_end)
    R, Y, kk = sys.reaction_matrix, sys.source_exponents, sys.k

    def f(v):
        # finite-time blow-up overflows here; the step test rejects non-finite stages
        with np.errstate(over="ignore", invalid="ignore"):
            return R @ (kk * np.prod(v ** Y, axis=1))

    stride = opts.dense_output_stride
    if stride is not None:
        n_out = int(math.floor(t_end / stride + 1e-9))
        grid = [i * stride for i in range(n_out + 1)]
        if t_end - grid[-1] > 1e-12 * t_end:
            grid.append(t_end)
        grid[-1] = t_end
        next_out = 1
    times = [0.0]
    states = [x.copy()]

    K = np.empty((7, x.size))
    K[0] = f(x)
    nfev = 1
    h = _initial_step(f, x, K[0], rtol, atol, t_end)
    nfev += 1
    t = 0.0
    accepted = rejected = clamped = 0
    err_prev = 1e-4
    min_step = 16 * np.finfo(float).eps * t_end
    steps = 0
    while t < t_end:
        if steps >= opts.max_steps:
            raise StepLimitExceeded(f"exceeded {opts.max_steps} steps at t={t}")
        steps += 1
        h = min(h, t_end - t)
        if t_end - (t + h) < min_step:
            h = t_end - t
        for s in range(1, 6):
            K[s] = f(x + h * (np.dot(_A[s], K[:s])))
        x_new = x + h * np.dot(_B, K[:6])
        K[6] = f(x_new)
        nfev += 6
        with np.errstate(over="ignore", invalid="ignore"):
            scale = atol + rtol * np.maximum(np.abs(x), np.abs(x_new))
            err = np.max(np.abs(h * np.dot(_E, K)) / scale)
        negative = bool(np.any(x_new < -atol))
        if err > 1.0 or negative or not np.isfinite(err):
            rejected += 1
            if negative and err <= 1.0:
                factor = 0.5
            elif np.isfinite(err):
                factor = max(_MIN_FACTOR, _SAFETY * err ** (-1 / 5))
            else:
                factor = _MIN_FACTOR
            h *= factor
            if h < min_step:
                if negative:
                    raise NegativeOvershoot(
                        f"state left the nonnegative orthant beyond atol at t={t}: {x_new.tolist()}"
                    )
                hint = "" if np.isfinite(err) else " (non-finite state, solution likely blows up)"
                raise StepLimitExceeded(f"step size underflow at t={t}{hint}")
            continue

        t_new = t + h if t_end - (t + h) > min_step else t_end
        if stride is not None:
            while next_out < len(grid) and grid[next_out] <= t_new:
                theta = (grid[next_out] - t) / h
                q = np.cumprod(np.full(4, theta))
                x_out = x + h * (K.T @ (_P @ q))
                # the interpolant inherits the step's accuracy; clip its rounding below zero
                x_out = np.maximum(x_out, 0.0)
                if grid[next_out] == t_new:
                    x_out = np.where(x_new < 0, 0.0, x_new)
                times.append(grid[next_out])
                states.append(x_out)
                next_out += 1
        if np.any(x_new < 0):
            clamped += 1
            x_new = np.where(x_new < 0, 0.0, x_new)
            K[6] = f(x_new)
            nfev += 1
        accepted += 1
        t, x = t_new, x_new
        K[0] = K[6]
        if stride is None:
            times.append(t)
            states.append(x.copy())
        err = max(err, 1e-10)
        factor = _SAFETY * err ** (-_ALPHA) * err_prev**_BETA
        h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        err_prev = err

    traj = Trajectory(
        np.array(times),
        np.array(states),
        sys.network.species,
        meta={
            "accepted_steps": accepted,
            "rejected_steps": rejected,
            "clamped_steps": clamped,
            "rhs_evaluations": nfev,
            "rtol": rtol,
            "atol": atol,
            "t_end": t_end,
        },
        network=sys.network,
    )
    laws = conservation_laws(sys.network)
    traj.meta["conservation_drift"] = {
        ",".join(map(str, c)): conservation_drift(traj, c) for c in laws
    }
    return traj


def conservation_drift(traj: Trajectory, c: Sequence, network: ReactionNetwork | None = None) -> float:
    """Largest ``|c . x(t) - c . x(0)|`` along the trajectory.

    Raises:
        NotConserved: ``c`` is not orthogonal to every reaction vector.
    """
    net = network if network is not None else traj.network
    if net is None:
        raise ValueError("a network is needed to check that c is conserved")
    if len(c) != net.n_species:
        raise NotConserved(f"c has length {len(c)}, expected {net.n_species}")
    for j, r in enumerate(net.reaction_vectors):
        if exact.dot(c, r) != 0:
            raise NotConserved(f"c . (y' - y) != 0 on edge {j} ({net.reaction_str(j)})")
    cf = np.array([float(v) for v in c])
    totals = traj.states @ cf
    return float(np.max(np.abs(totals - totals[0])))


# -- equilibria -----------------------------------------------------------------


def subspace_basis(net: ReactionNetwork) -> np.ndarray:
    """Orthonormal basis (columns) of the stoichiometric subspace."""
    cols = exact.column_basis(net.reaction_vectors, net.n_species)
    if not cols:
        return np.zeros((net.n_species, 0))
    Q, _ = np.linalg.qr(np.array([[float(v) for v in c] for c in cols]).T)
    return Q


def refine_equilibrium(
    sys: MassActionSystem, seed: Sequence[float], tol: float = 1e-12, max_iter: int = 50
) -> np.ndarray:
    """Damped Newton iteration for ``rhs = 0`` inside the compatibility class of ``seed``.

    Newton steps are taken in coordinates of the stoichiometric subspace so
    the iterate never leaves ``seed + S``; steps are halved until the state
    stays nonnegative and the residual decreases.

    Raises:
        MaxIterations: ``||rhs||_inf >= tol`` after ``max_iter`` steps.
        SingularJacobian: the restricted Jacobian cannot be inverted.
    """
    x = _as_state(sys, seed).copy()
    if np.any(~(x >= 0)):
        raise NegativeState(f"seed must be nonnegative, got {x.tolist()}")
    Q = subspace_basis(sys.network)
    fx = rhs(sys, x)
    res = np.max(np.abs(fx))
    for _ in range(max_iter):
        if res < tol:
            return x
        Jg = Q.T @ _jacobian(sys, x) @ Q
        g = Q.T @ fx
        if Jg.size == 0 or np.linalg.cond(Jg) > 1e14:
            raise SingularJacobian(f"restricted Jacobian is singular at {x.tolist()}")
        step = Q @ np.linalg.solve(Jg, -g)
        lam = 1.0
        while True:
            trial = x + lam * step
            if np.all(trial >= 0):
                f_trial = rhs(sys, trial)
                r_trial = np.max(np.abs(f_trial))
                if r_trial < res or lam < 1e-3:
                    break
            lam *= 0.5
            if lam < 1e-12:
                raise SingularJacobian(f"no admissible Newton step from {x.tolist()}")
        x, fx, res = trial, f_trial, r_trial
    if res < tol:
        return x
    raise MaxIterations(f"||rhs||_inf = {res:.3e} after {max_iter} iterations")
