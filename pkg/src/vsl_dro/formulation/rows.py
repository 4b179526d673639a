"""Row families of the mixed-integer reformulation.

Each function returns plain ``LinearRow`` lists over a ``VariableIndex`` so
the upper-bounding problem and the cone analysis problem can share them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vsl_dro.core.models import SpeedSchedule
from vsl_dro.formulation.instance import InstanceData, VariableIndex
from vsl_dro.solver.problem import LinearRow, Sense
from vsl_dro.traffic.ctm import junction_ratio


@dataclass
class CutSet:
    """Examined binary assignments; each excluded by one canonical integer cut."""

    supports: list[SpeedSchedule] = field(default_factory=list)
    _keys: set[tuple[int, ...]] = field(default_factory=set, repr=False)

    def add(self, schedule: SpeedSchedule) -> bool:
        key = schedule.key()
        if key in self._keys:
            return False
        self._keys.add(key)
        self.supports.append(schedule)
        return True

    def __contains__(self, schedule: SpeedSchedule) -> bool:
        return schedule.key() in self._keys

    def __len__(self) -> int:
        return len(self.supports)


def glover_rows(inst: InstanceData, index: VariableIndex) -> list[LinearRow]:
    """Exact products z = x * eta and y = x * rho, plus the regularization sums."""
    eta_bar = inst.eta_bar
    rho_jam = inst.cfg.rho_jam
    rows: list[LinearRow] = []
    big_n, big_t, n, m = index.y.shape
    for sample in range(big_n):
        for t in range(big_t):
            for e in range(n):
                eta = int(index.eta[sample, t, e])
                rho = int(index.rho[sample, t, e])
                rj = float(rho_jam[e])
                for i in range(m):
                    x = int(index.x[t, e, i])
                    z = int(index.z[sample, t, e, i])
                    y = int(index.y[sample, t, e, i])
                    tag = f"l{sample}_e{e + 1}_i{i + 1}_t{t}"
                    rows.append(LinearRow({z: 1.0, x: -eta_bar}, Sense.LE, 0.0, f"gz_ub_{tag}"))
                    rows.append(LinearRow({eta: 1.0, x: eta_bar, z: -1.0}, Sense.LE, eta_bar, f"gz_lb_{tag}"))
                    rows.append(LinearRow({z: 1.0, eta: -1.0}, Sense.LE, 0.0, f"gz_eta_{tag}"))
                    rows.append(LinearRow({y: 1.0, x: -rj}, Sense.LE, 0.0, f"gy_ub_{tag}"))
                    rows.append(LinearRow({rho: 1.0, x: rj, y: -1.0}, Sense.LE, rj, f"gy_lb_{tag}"))
                    rows.append(LinearRow({y: 1.0, rho: -1.0}, Sense.LE, 0.0, f"gy_rho_{tag}"))
                tag = f"l{sample}_e{e + 1}_t{t}"
                zsum = {int(j): 1.0 for j in index.z[sample, t, e]}
                zsum[eta] = -1.0
                rows.append(LinearRow(zsum, Sense.EQ, 0.0, f"reg_z_{tag}"))
                ysum = {int(j): 1.0 for j in index.y[sample, t, e]}
                ysum[rho] = -1.0
                rows.append(LinearRow(ysum, Sense.EQ, 0.0, f"reg_y_{tag}"))
    return rows


def speed_rows(inst: InstanceData, index: VariableIndex) -> list[LinearRow]:
    """One menu level per (edge, slot); x(t) tied to x(t-1) inside each hold block."""
    big_t, n, m = index.x.shape
    rows: list[LinearRow] = []
    for t in range(big_t):
        for e in range(n):
            rows.append(LinearRow({int(j): 1.0 for j in index.x[t, e]}, Sense.EQ, 1.0, f"pick_e{e + 1}_t{t}"))
    for t in range(big_t):
        if t % inst.hold_slots == 0:
            continue
        for e in range(n):
            for i in range(m):
                rows.append(LinearRow(
                    {int(index.x[t, e, i]): 1.0, int(index.x[t - 1, e, i]): -1.0}, Sense.EQ, 0.0,
                    f"hold_e{e + 1}_i{i + 1}_t{t}",
                ))
    return rows


def trajectory_rows(inst: InstanceData, index: VariableIndex) -> list[LinearRow]:
    """Linear density dynamics with y in place of x * rho, and junction demand rows."""
    cfg = inst.cfg
    menu = cfg.menu
    h = cfg.h
    supply_slope = cfg.tau * cfg.u_free
    rows: list[LinearRow] = []
    big_n, big_t, n, m = index.y.shape
    for sample_no, sample in enumerate(inst.samples):
        ratio = junction_ratio(sample)
        for e in range(n):
            rows.append(LinearRow(
                {int(index.rho[sample_no, 0, e]): 1.0}, Sense.EQ, float(sample.rho0[e]), f"init_l{sample_no}_e{e + 1}"
            ))
        for t in range(big_t):
            for e in range(n):
                tag = f"l{sample_no}_e{e + 1}_t{t}"
                if t + 1 < big_t:
                    coeffs: dict[int, float] = {
                        int(index.rho[sample_no, t + 1, e]): 1.0,
                        int(index.rho[sample_no, t, e]): -1.0,
                    }
                    for i in range(m):
                        coeffs[int(index.y[sample_no, t, e, i])] = float(h[e] * menu[i])
                    rhs = 0.0
                    if e == 0:
                        rhs = float(h[0] * sample.omega[t])
                    else:
                        k = float(ratio[e - 1, t])
                        for i in range(m):
                            coeffs[int(index.y[sample_no, t, e - 1, i])] = -float(h[e] * k * menu[i])
                    rows.append(LinearRow(coeffs, Sense.EQ, rhs, f"dyn_{tag}"))
                if e == 0:
                    continue
                k = float(ratio[e - 1, t])
                demand = {int(index.y[sample_no, t, e - 1, i]): float(k * menu[i]) for i in range(m)}
                rows.append(LinearRow(dict(demand), Sense.LE, float(cfg.f_cap[e]), f"cap_{tag}"))
                space = dict(demand)
                space[int(index.rho[sample_no, t, e])] = float(supply_slope[e])
                rows.append(LinearRow(space, Sense.LE, float(supply_slope[e] * cfg.rho_jam[e]), f"space_{tag}"))
    return rows


def dual_rows(inst: InstanceData, index: VariableIndex) -> list[LinearRow]:
    """Dual feasibility: congestion-penalty row, nu = mu + u/T and the max-norm bound."""
    cfg = inst.cfg
    menu = cfg.menu
    horizon = cfg.horizon
    slope = cfg.rho_jam - inst.rho_c_free
    rows: list[LinearRow] = []
    big_n, big_t, n, m = index.z.shape
    for sample in range(big_n):
        for t in range(big_t):
            for e in range(n):
                tag = f"l{sample}_e{e + 1}_t{t}"
                mu = int(index.mu[sample, t, e])
                nu = int(index.nu[sample, t, e])
                eta = int(index.eta[sample, t, e])
                penalty = {int(index.z[sample, t, e, i]): float(menu[i] * slope[e]) for i in range(m)}
                penalty[mu] = -1.0
                penalty[eta] = float(cfg.f_cap[e])
                rows.append(LinearRow(penalty, Sense.GE, 0.0, f"pen_{tag}"))
                shift = {nu: 1.0, mu: -1.0}
                for i in range(m):
                    shift[int(index.x[t, e, i])] = -float(menu[i]) / horizon
                rows.append(LinearRow(shift, Sense.EQ, 0.0, f"shift_{tag}"))
                if index.lam is not None:
                    rows.append(LinearRow({nu: 1.0, index.lam: -1.0}, Sense.LE, 0.0, f"norm_ub_{tag}"))
                    rows.append(LinearRow({nu: 1.0, index.lam: 1.0}, Sense.GE, 0.0, f"norm_lb_{tag}"))
    return rows


def mccormick_rows(inst: InstanceData, index: VariableIndex) -> list[LinearRow]:
    """Envelope of s = nu * rho over [0, nu_bar] x [0, rho_jam]."""
    if index.s is None:
        return []
    nu_bar = inst.nu_bar
    rho_jam = inst.cfg.rho_jam
    rows: list[LinearRow] = []
    big_n, big_t, n = index.s.shape
    for sample in range(big_n):
        for t in range(big_t):
            for e in range(n):
                tag = f"l{sample}_e{e + 1}_t{t}"
                s = int(index.s[sample, t, e])
                nu = int(index.nu[sample, t, e])
                rho = int(index.rho[sample, t, e])
                vb, rj = float(nu_bar[e]), float(rho_jam[e])
                rows.append(LinearRow({s: 1.0, rho: -vb, nu: -rj}, Sense.GE, -vb * rj, f"mc_lo_{tag}"))
                rows.append(LinearRow({s: 1.0, rho: -vb}, Sense.LE, 0.0, f"mc_rho_{tag}"))
                rows.append(LinearRow({s: 1.0, nu: -rj}, Sense.LE, 0.0, f"mc_nu_{tag}"))
    return rows


def cut_row(index: VariableIndex, schedule: SpeedSchedule, label: str = "") -> LinearRow:
    """sum over the support of x minus sum over its complement <= |support| - 1."""
    x = index.x  # (T, n, m)
    onehot = np.transpose(schedule.x, (2, 0, 1))  # (T, n, m)
    coeffs = {int(j): (1.0 if on else -1.0) for j, on in zip(x.reshape(-1), onehot.reshape(-1))}
    support = int(onehot.sum())
    return LinearRow(coeffs, Sense.LE, float(support - 1), label or f"cut_{support}")


def cut_rows(index: VariableIndex, cuts: CutSet) -> list[LinearRow]:
    return [cut_row(index, sched, f"cut_{p}") for p, sched in enumerate(cuts.supports)]


def x_values(index: VariableIndex, x: np.ndarray) -> np.ndarray:
    """Binary block of a solution vector reshaped to (n, m, T)."""
    return np.transpose(np.asarray(x)[index.x], (1, 2, 0))


def start_values(index: VariableIndex, schedule: SpeedSchedule) -> dict[int, float]:
    """The binary block of ``schedule`` keyed by column, for use as a MIP start."""
    onehot = np.zeros(index.x.shape)
    big_t, n, _ = index.x.shape
    slots, edges = np.meshgrid(np.arange(big_t), np.arange(n), indexing="ij")
    onehot[slots, edges, schedule.indices.T] = 1.0
    return {int(col): float(v) for col, v in zip(index.x.reshape(-1), onehot.reshape(-1))}
