"""Instance data and the fixed variable layout shared by every problem builder."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from vsl_dro.core.errors import ScheduleError
from vsl_dro.core.models import HighwayConfig, ScenarioSample, SpeedSchedule
from vsl_dro.highway.fundamental import planning_config
from vsl_dro.scenario.generator import validate_sample
from vsl_dro.solver.problem import INF, LpProblem


@dataclass
class VariableIndex:
    """Column numbers of every variable family.

    Layout: the sample-independent speed binaries ``x`` first (time, edge,
    menu index), then per sample, per slot, per edge the block
    ``rho, mu, nu, eta, [s], [theta], y_1..y_m, z_1..z_m, [q_1..q_K]``,
    and ``lam`` last. Array shapes: ``x`` (T, n, m); ``y``/``z`` (N, T, n, m);
    ``rho``/``mu``/``nu``/``eta``/``s``/``theta`` (N, T, n); ``q`` (N, T, n, K).
    """

    size: int
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    rho: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    eta: np.ndarray
    s: np.ndarray | None = None
    theta: np.ndarray | None = None
    q: np.ndarray | None = None
    lam: int | None = None
    names: list[str] = field(default_factory=list)

    @classmethod
    def build(
        cls,
        n_samples: int,
        horizon: int,
        n_edges: int,
        n_levels: int,
        with_s: bool = True,
        with_lambda: bool = True,
        grid_size: int = 0,
    ) -> VariableIndex:
        big_n, big_t, n, m = n_samples, horizon, n_edges, n_levels
        names: list[str] = []

        def take(label: str) -> int:
            names.append(label)
            return len(names) - 1

        x = np.empty((big_t, n, m), dtype=int)
        for t in range(big_t):
            for e in range(n):
                for i in range(m):
                    x[t, e, i] = take(f"x[e{e + 1},i{i + 1},t{t}]")
        y = np.empty((big_n, big_t, n, m), dtype=int)
        z = np.empty((big_n, big_t, n, m), dtype=int)
        rho, mu, nu, eta = (np.empty((big_n, big_t, n), dtype=int) for _ in range(4))
        s = np.empty((big_n, big_t, n), dtype=int) if with_s else None
        theta = np.empty((big_n, big_t, n), dtype=int) if grid_size else None
        q = np.empty((big_n, big_t, n, grid_size), dtype=int) if grid_size else None
        for sample in range(big_n):
            for t in range(big_t):
                for e in range(n):
                    tag = f"l{sample},e{e + 1},t{t}"
                    rho[sample, t, e] = take(f"rho[{tag}]")
                    mu[sample, t, e] = take(f"mu[{tag}]")
                    nu[sample, t, e] = take(f"nu[{tag}]")
                    eta[sample, t, e] = take(f"eta[{tag}]")
                    if s is not None:
                        s[sample, t, e] = take(f"s[{tag}]")
                    if theta is not None:
                        theta[sample, t, e] = take(f"theta[{tag}]")
                    for i in range(m):
                        y[sample, t, e, i] = take(f"y[{tag},i{i + 1}]")
                    for i in range(m):
                        z[sample, t, e, i] = take(f"z[{tag},i{i + 1}]")
                    if q is not None:
                        for k in range(grid_size):
                            q[sample, t, e, k] = take(f"q[{tag},k{k + 1}]")
        lam = take("lambda") if with_lambda else None
        return cls(size=len(names), x=x, y=y, z=z, rho=rho, mu=mu, nu=nu, eta=eta, s=s, theta=theta, q=q,
                   lam=lam, names=names)


@dataclass
class InstanceData:
    """Highway, samples, radius and dual bound of one planning problem.

    Events active at slot 0 are frozen into the edges for the whole horizon.

    ``include_radius`` False drops the lambda variable and the radius term
    (the sample-average problem).
    """

    cfg: HighwayConfig
    samples: list[ScenarioSample]
    epsilon: float
    eta_bar: float
    hold_slots: int = 1
    include_radius: bool = True

    def __post_init__(self) -> None:
        if not self.samples:
            raise ValueError("instance needs at least one sample")
        self.cfg = planning_config(self.cfg)
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.eta_bar <= 0:
            raise ValueError(f"eta_bar must be positive, got {self.eta_bar}")
        if self.hold_slots < 1:
            raise ValueError(f"hold_slots must be >= 1, got {self.hold_slots}")
        for i, sample in enumerate(self.samples):
            validate_sample(self.cfg, sample, label=f"sample {i}")
        if not self.include_radius:
            self.epsilon = 0.0

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    @property
    def nu_bar(self) -> np.ndarray:
        """Per-edge bound u_free * (1/T + rho_jam * eta_bar) on nu."""
        cfg = self.cfg
        return cfg.u_free * (1.0 / cfg.horizon + cfg.rho_jam * self.eta_bar)

    @property
    def rho_c_free(self) -> np.ndarray:
        """Critical density under free-flow speed, f_cap / u_free."""
        return self.cfg.f_cap / self.cfg.u_free

    def dual_coefficient(self, u: np.ndarray) -> np.ndarray:
        """a = f_cap + (rho_jam - f_cap/u_free) * u, broadcast over the edge axis."""
        u = np.asarray(u, dtype=float)
        shape = (-1,) + (1,) * (u.ndim - 1)
        return self.cfg.f_cap.reshape(shape) + (self.cfg.rho_jam - self.rho_c_free).reshape(shape) * u

    def with_eta_bar(self, eta_bar: float) -> InstanceData:
        return dataclasses.replace(self, eta_bar=eta_bar)

    def with_epsilon(self, epsilon: float) -> InstanceData:
        return dataclasses.replace(self, epsilon=epsilon)

    def block_starts(self) -> list[int]:
        return list(range(0, self.cfg.horizon, self.hold_slots))

    def check_schedule(self, schedule: SpeedSchedule) -> None:
        if schedule.u.shape != (self.cfg.n, self.cfg.horizon):
            raise ScheduleError(
                f"schedule shape {schedule.u.shape} does not match (n, T) = {(self.cfg.n, self.cfg.horizon)}"
            )
        if tuple(schedule.gamma) != tuple(self.cfg.gamma):
            raise ScheduleError("schedule menu differs from the highway menu")

    def new_problem(self, index: VariableIndex, nu_nonnegative: bool = True) -> LpProblem:
        """Empty maximization problem with every indexed variable and its box."""
        cfg = self.cfg
        lp = LpProblem(maximize=True)
        lower = np.full(index.size, -INF)
        upper = np.full(index.size, INF)
        lower[index.x] = 0.0
        upper[index.x] = 1.0
        rho_jam = cfg.rho_jam
        lower[index.y] = 0.0
        upper[index.y] = np.broadcast_to(rho_jam[None, None, :, None], index.y.shape)
        lower[index.z] = 0.0
        upper[index.z] = self.eta_bar
        lower[index.rho] = 0.0
        upper[index.rho] = np.broadcast_to(rho_jam[None, None, :], index.rho.shape)
        lower[index.eta] = 0.0
        upper[index.eta] = self.eta_bar
        if nu_nonnegative:
            lower[index.nu] = 0.0
            upper[index.nu] = np.broadcast_to(self.nu_bar[None, None, :], index.nu.shape)
        if index.s is not None:
            lower[index.s] = 0.0
        if index.lam is not None:
            lower[index.lam] = 0.0
        lp.objective = [0.0] * index.size
        lp.lower = lower.tolist()
        lp.upper = upper.tolist()
        lp.names = list(index.names)
        return lp
