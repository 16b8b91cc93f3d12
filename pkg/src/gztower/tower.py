"""Action-angle variables, rational spectral data and Hamiltonian flows.

Each level n of the tower carries the punctured rational curve with
punctures at the roots gamma[n,j] of A_n, the basis of differentials

    Omega_n^(k) = lam^(k-1) / A_n(lam) dlam,      k = 1..n,

whose partial-fraction residues are gamma[n,j]^(k-1) / A_n'(gamma[n,j]),
the action values h[n,k] (coefficients of A_n), and the angle values

    tau[n,k] = sum_i int(lam0 -> e[n,i])  lam^(n-k)/A_n
             - sum_i int(lam0 -> gamma[n-1,i]) lam^(n-k)/A_n,

where e[n,i] are the zeros of the lowering minor C_n.  All integrals are
elementary: residue-weighted logarithms continued along deterministic
straight paths, deflected around punctures by small semicircles.

The literal tau formula leaves tau[n,1] non-conjugate to h[n,1] (and gives
tau[1,1] = 0 at level one); augmenting tau[n,1] by log of the leading
coefficient of C_n restores the full canonical pairing
{h[n,k], tau[m,l]} = d(n,m) d(k,l) at every level, so the augmented values
are the default and the literal ones are kept alongside for reporting.

Hamiltonian flows are integrated in Lax form u' = [grad h, u] with the
exact symbolic gradient of h; the conjugate tau then moves with unit speed
while every action and the spectrum stay fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .families import char_minor
from .orbits import (
    DEFAULT_MINOR_CONVENTION,
    MinorConvention,
    OrbitPoint,
    lowering_minor_coeffs,
    regularity_margin,
)
from .poisson import U, evaluate_at
from .polytools import (
    match_points,
    min_pairwise_gap,
    principal_charpoly,
    roots_polished,
    sort_points,
)

__all__ = [
    "TowerError", "PathThroughPunctureError", "BranchJumpError",
    "RegularityLostError", "LevelDifferentials", "differentials",
    "path_log_increments", "AngleResult", "angle_variables",
    "TowerLevel", "TowerDescriptor", "build_tower",
    "FlowResult", "hamiltonian_flow", "trajectory_records",
    "LinearizationReport", "linearization_check", "default_base_point",
]


class TowerError(RuntimeError):
    pass


class PathThroughPunctureError(TowerError):
    """An integration endpoint or path hits a puncture."""


class BranchJumpError(TowerError):
    """A tracked angle jumped by more than pi between samples."""


class RegularityLostError(TowerError):
    """The flow left the regular locus of the nested-minor chart."""

    def __init__(self, time: float):
        super().__init__(f"regularity lost at t = {time}")
        self.time = time


# ---------------------------------------------------------------------------
# differentials and residue tables
# ---------------------------------------------------------------------------

@dataclass
class LevelDifferentials:
    """Partial-fraction data of lam^(k-1)/A_n for one level.

    residues[j][k-1] is the residue of Omega^(k) at puncture j; arithmetic
    is exact when the punctures are Fractions, complex otherwise.
    """

    punctures: list
    residues: list[list]

    def residue_column(self, power: int) -> list:
        """Residues of lam^power / A_n at all punctures (0 <= power < n)."""
        return [row[power] for row in self.residues]

    def residue_sums(self) -> list:
        """sum_j residues of Omega^(k), k = 1..n; equals delta(k, n)."""
        n = len(self.punctures)
        return [sum(self.residue_column(k)) for k in range(n)]


def differentials(punctures) -> LevelDifferentials:
    """Residue table of the basis lam^(k-1)/A_n(lam), A_n = prod(lam - g_j)."""
    pts = list(punctures)
    n = len(pts)
    if n == 0:
        raise ValueError("a level needs at least one puncture")
    residues = []
    for j, gj in enumerate(pts):
        denom = 1
        for s, gs in enumerate(pts):
            if s != j:
                denom = denom * (gj - gs)
        if denom == 0:
            raise ValueError("punctures must be distinct (square-free A_n)")
        row = []
        power = 1
        for _ in range(n):
            row.append(power / denom)
            power = power * gj
        residues.append(row)
    return LevelDifferentials(punctures=pts, residues=residues)


# ---------------------------------------------------------------------------
# branch-tracked elementary integrals
# ---------------------------------------------------------------------------

def _deflected_path(a: complex, b: complex, punctures, radius: float) -> list[complex]:
    """Polyline from a to b, bulging around punctures closer than radius."""
    seg = b - a
    length = abs(seg)
    if length == 0.0:
        return [a, b]
    if len(punctures) > 1:
        radius = min(radius, min_pairwise_gap(np.asarray(punctures)) / 4.0)
    dirn = seg / length
    events = []
    for g in punctures:
        w = (g - a) / seg
        tproj = w.real
        dist = abs(g - (a + tproj * seg))
        if dist < radius and -radius / length <= tproj <= 1.0 + radius / length:
            events.append((tproj, g, dist))
    if not events:
        return [a, b]
    events.sort(key=lambda e: e[0])
    path = [a]
    for tproj, g, dist in events:
        half = (max(radius ** 2 - dist ** 2, 0.0) ** 0.5) / length
        t_in = min(max(tproj - half, 0.0), 1.0)
        t_out = min(max(tproj + half, 0.0), 1.0)
        z_in = a + t_in * seg
        z_out = a + t_out * seg
        # bulge away from the puncture's side of the line (left -> bulge right)
        off = ((g - a) / dirn).imag
        side = -1.0 if off >= 0.0 else 1.0
        th_in = np.angle(z_in - g)
        th_out = np.angle(z_out - g)
        th_mid = np.angle(side * 1j * dirn)
        ccw_total = (th_out - th_in) % (2.0 * np.pi)
        ccw_mid = (th_mid - th_in) % (2.0 * np.pi)
        sweep = ccw_total if ccw_mid <= ccw_total else ccw_total - 2.0 * np.pi
        r_in, r_out = abs(z_in - g), abs(z_out - g)
        arc_steps = 12
        for s in range(arc_steps + 1):
            frac = s / arc_steps
            r = r_in + (r_out - r_in) * frac
            path.append(g + r * np.exp(1j * (th_in + sweep * frac)))
    path.append(b)
    return path


def path_log_increments(a: complex, b: complex, punctures,
                        radius: float = 1e-3,
                        endpoint_floor: float = 1e-8) -> list[complex]:
    """Continuous increments of log(lam - g_j) from a to b, one per puncture.

    The path is the straight segment deflected around punctures; every
    straight piece subtends less than pi at each off-path puncture, so the
    per-piece principal logarithms compose to the true continuation.
    """
    for z in (a, b):
        for g in punctures:
            if abs(z - g) < endpoint_floor:
                raise PathThroughPunctureError(
                    f"integration endpoint within {endpoint_floor} of a puncture")
    path = _deflected_path(complex(a), complex(b), punctures, radius)
    out = []
    for g in punctures:
        total = 0j
        for p, q in zip(path, path[1:]):
            if p == q:
                continue
            num, den = q - g, p - g
            if num == 0 or den == 0:
                raise PathThroughPunctureError("path touched a puncture")
            total += np.log(num / den)
        out.append(total)
    return out


# ---------------------------------------------------------------------------
# angle variables
# ---------------------------------------------------------------------------

@dataclass
class AngleResult:
    tau: list[complex]
    tau_literal: list[complex]
    augmentation: complex | None
    branch_record: list[list[dict]]


def angle_variables(gamma_n, e_points, gamma_prev, lam0: complex,
                    leading_coeff: complex | None = None, augment: bool = True,
                    deflect_radius: float = 1e-3) -> AngleResult:
    """Angle values tau[n,k], k = 1..n, for one level.

    gamma_n are the level punctures, e_points the zeros of the lowering
    minor, gamma_prev the previous-level roots; lam0 is the common base
    point of all integrals.  With augment=True (the default) tau[n,1] is
    shifted by log(leading_coeff); this is the correction that makes the
    whole (h, tau) table canonical, and it also supplies the level-one
    angle, where the literal double sum is empty.
    """
    gamma_n = [complex(z) for z in gamma_n]
    n = len(gamma_n)
    diffs = differentials(gamma_n)
    dlog_cache: dict[complex, list[complex]] = {}

    def dlogs(endpoint: complex) -> list[complex]:
        endpoint = complex(endpoint)
        if endpoint not in dlog_cache:
            dlog_cache[endpoint] = path_log_increments(
                complex(lam0), endpoint, gamma_n, radius=deflect_radius)
        return dlog_cache[endpoint]

    taus_literal = []
    records: list[list[dict]] = []
    for k in range(1, n + 1):
        power = n - k
        column = diffs.residue_column(power)
        total = 0j
        rec = []
        for kind, pts, sign in (("e", e_points, 1.0), ("gamma_prev", gamma_prev, -1.0)):
            for z in pts:
                d = dlogs(z)
                total += sign * sum(r * dl for r, dl in zip(column, d))
                rec.append({"kind": kind, "endpoint": [float(complex(z).real), float(complex(z).imag)],
                            "dlog_imag": [float(dl.imag) for dl in d]})
        taus_literal.append(total)
        records.append(rec)
    taus = list(taus_literal)
    augmentation = None
    if augment:
        if leading_coeff is None:
            raise ValueError("augmentation requires the leading coefficient of C_n")
        augmentation = complex(np.log(complex(leading_coeff)))
        taus[0] = taus[0] + augmentation
    return AngleResult(tau=taus, tau_literal=taus_literal,
                       augmentation=augmentation, branch_record=records)


# ---------------------------------------------------------------------------
# the tower
# ---------------------------------------------------------------------------

@dataclass
class TowerLevel:
    n: int
    gamma: np.ndarray
    h: np.ndarray                      # h[n,k], k = 1..n (h[n,0] = 1 implicit)
    e: np.ndarray                      # zeros of C_n (empty at the top level)
    tau: list[complex]                 # augmented angles (empty at the top level)
    tau_literal: list[complex]
    base_point: complex
    leading_coeff: complex | None
    jacobian: list[complex]            # exp(tau), coordinates in (C*)^n

    def differentials(self) -> LevelDifferentials:
        return differentials(self.gamma)

    def to_json(self) -> dict:
        enc = lambda xs: [[float(complex(z).real), float(complex(z).imag)] for z in xs]
        return {
            "n": self.n,
            "gamma": enc(self.gamma),
            "h": enc(self.h),
            "e": enc(self.e),
            "tau": enc(self.tau),
            "tau_literal": enc(self.tau_literal),
            "base_point": [float(complex(self.base_point).real), float(complex(self.base_point).imag)],
            "leading_coeff": None if self.leading_coeff is None
            else [float(self.leading_coeff.real), float(self.leading_coeff.imag)],
            "jacobian": enc(self.jacobian),
        }


@dataclass
class TowerDescriptor:
    levels: list[TowerLevel]
    zero_section: dict[int, list[complex]]
    convention: str
    base_point: complex

    def to_json(self) -> dict:
        enc = lambda xs: [[float(complex(z).real), float(complex(z).imag)] for z in xs]
        return {
            "levels": [lv.to_json() for lv in self.levels],
            "zero_section": {str(n): enc(v) for n, v in self.zero_section.items()},
            "minor_convention": self.convention,
            "base_point": [float(complex(self.base_point).real), float(complex(self.base_point).imag)],
        }


def default_base_point(pt: OrbitPoint) -> complex:
    """Deterministic real base point to the right of every root of A_N."""
    chart_radius = max(abs(z) for z in np.linalg.eigvals(pt.u))
    return complex(np.ceil(chart_radius) + 2.0)


def build_tower(pt: OrbitPoint, lam0: complex | None = None,
                convention: MinorConvention = DEFAULT_MINOR_CONVENTION,
                augment: bool = True, deflect_radius: float = 1e-3,
                separation_floor: float = 1e-8) -> TowerDescriptor:
    """Assemble every level: punctures, actions, divisor points, angles.

    The top level N carries its punctures and (Casimir) action values but no
    e-points or angles: the lowering minor needs row/column N+1, and the
    corresponding angles are not functions on the orbit.
    """
    N = pt.n
    u = pt.u
    if lam0 is None:
        lam0 = default_base_point(pt)
    lam0 = complex(lam0)
    levels: list[TowerLevel] = []
    zero_section: dict[int, list[complex]] = {}
    gammas: list[np.ndarray] = []
    for n in range(1, N + 1):
        acoeffs = principal_charpoly(u, n)
        gamma = sort_points(roots_polished(acoeffs))
        gammas.append(gamma)
        h = acoeffs[1:]
        sym = np.poly(gamma)
        if np.max(np.abs(sym - acoeffs)) > 1e-10:
            raise TowerError(f"level {n}: actions disagree with the "
                             "elementary symmetric functions of the punctures")
        if n < N:
            ccoeffs = lowering_minor_coeffs(u, n, convention)
            lead = complex(ccoeffs[0])
            if abs(lead) < 1e-10:
                raise TowerError(f"level {n}: lowering minor degenerates")
            e_pts = sort_points(roots_polished(ccoeffs))
            if len(e_pts) and min(abs(ei - gj) for ei in e_pts for gj in gamma) < separation_floor:
                raise TowerError(f"level {n}: divisor point collides with a puncture")
            res = angle_variables(gamma, e_pts, gammas[n - 2] if n >= 2 else [],
                                  lam0, leading_coeff=lead, augment=augment,
                                  deflect_radius=deflect_radius)
            tau, tau_lit = res.tau, res.tau_literal
        else:
            e_pts = np.zeros(0, dtype=complex)
            lead = None
            tau, tau_lit = [], []
        levels.append(TowerLevel(
            n=n, gamma=gamma, h=h, e=np.asarray(e_pts, dtype=complex),
            tau=tau, tau_literal=tau_lit, base_point=lam0,
            leading_coeff=lead, jacobian=[complex(np.exp(t)) for t in tau]))
        if n >= 2:
            diffs = differentials(gamma)
            section = []
            for k in range(1, n + 1):
                column = diffs.residue_column(k - 1)
                total = 0j
                for z in gammas[n - 2]:
                    d = path_log_increments(lam0, complex(z), list(gamma),
                                            radius=deflect_radius)
                    total += sum(r * dl for r, dl in zip(column, d))
                section.append(total)
            zero_section[n] = section
    return TowerDescriptor(levels=levels, zero_section=zero_section,
                           convention=convention.label(), base_point=lam0)


# ---------------------------------------------------------------------------
# Hamiltonian flows
# ---------------------------------------------------------------------------

def _gradient_polys(N: int, level: int, k: int):
    """Symbolic partials of h[level,k] with respect to every u entry."""
    if not (1 <= level <= N and 1 <= k <= level):
        raise ValueError(f"no action h[{level},{k}] at ambient size {N}")
    hpoly = char_minor(N, level, side="left").coefficient_of_lambda(level - k)
    grads = {}
    for i in range(1, N + 1):
        for j in range(1, N + 1):
            d = hpoly.differentiate((U, i, j))
            if not d.is_zero():
                grads[(i, j)] = d
    return grads


def _gradient_matrix(grads, u: np.ndarray) -> np.ndarray:
    """(grad h)[i,j] = dh/du[j,i], evaluated numerically."""
    N = u.shape[0]
    out = np.zeros((N, N), dtype=complex)
    for (i, j), poly in grads.items():
        out[j - 1, i - 1] = evaluate_at(poly, u=u)
    return out


@dataclass
class FlowResult:
    selector: tuple[int, int]
    times: np.ndarray
    points: list[np.ndarray]


def hamiltonian_flow(pt: OrbitPoint, selector: tuple[int, int],
                     t_final: float = 1.0, steps: int = 1000,
                     reg_gap: float = 1e-6, sample_every: int = 1,
                     check_every: int = 10) -> FlowResult:
    """Fixed-step fourth-order integration of u' = [grad h, u].

    Level-N actions are Casimirs and produce a stationary flow; they are
    accepted and simply conserve u.  Regularity of the moving point is
    monitored and RegularityLostError carries the first offending time.
    """
    N = pt.n
    grads = _gradient_polys(N, selector[0], selector[1])
    dt = t_final / steps

    def rhs(u):
        gm = _gradient_matrix(grads, u)
        return gm @ u - u @ gm

    u = pt.u.copy()
    if regularity_margin(u) < reg_gap:
        raise RegularityLostError(0.0)
    times = [0.0]
    points = [u.copy()]
    for step_idx in range(1, steps + 1):
        k1 = rhs(u)
        k2 = rhs(u + 0.5 * dt * k1)
        k3 = rhs(u + 0.5 * dt * k2)
        k4 = rhs(u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = step_idx * dt
        if step_idx % check_every == 0 or step_idx == steps:
            if regularity_margin(u) < reg_gap:
                raise RegularityLostError(t)
        if step_idx % sample_every == 0 or step_idx == steps:
            times.append(t)
            points.append(u.copy())
    return FlowResult(selector=selector, times=np.array(times), points=points)


class _TauTracker:
    """Branch-continuous tau (and h) values along or near a base trajectory.

    The state holds one configuration (roots, divisor points, continued
    augmentation logs).  ``values_near`` evaluates at a nearby matrix by
    matching against the state without mutating it, which is what gradient
    stencils need; ``step`` advances the state along a trajectory and
    enforces branch continuity.
    """

    def __init__(self, u0: np.ndarray, convention: MinorConvention,
                 lam0: complex, deflect_radius: float = 1e-3):
        self.N = u0.shape[0]
        self.convention = convention
        self.lam0 = complex(lam0)
        self.radius = deflect_radius
        self.gamma: list[np.ndarray] = []
        self.e: list[np.ndarray] = []
        self.lead: list[complex] = []
        self.aug_log: list[complex] = []
        self.tau: dict[tuple[int, int], complex] = {}
        self._init_state(u0)

    def _init_state(self, u0: np.ndarray) -> None:
        N = self.N
        for n in range(1, N + 1):
            self.gamma.append(sort_points(roots_polished(principal_charpoly(u0, n))))
        for n in range(1, N):
            ccoeffs = lowering_minor_coeffs(u0, n, self.convention)
            self.e.append(sort_points(roots_polished(ccoeffs)))
            self.lead.append(complex(ccoeffs[0]))
            self.aug_log.append(complex(np.log(complex(ccoeffs[0]))))
        taus, _, _, _, _, _ = self.values_near(u0)
        self.tau = taus

    def values_near(self, u: np.ndarray):
        """(tau, h, gammas, es, leads, aug_logs) at u, matched to the state."""
        N = self.N
        taus: dict[tuple[int, int], complex] = {}
        hs: dict[tuple[int, int], complex] = {}
        gammas = []
        for n in range(1, N + 1):
            acoeffs = principal_charpoly(u, n)
            gammas.append(match_points(self.gamma[n - 1], roots_polished(acoeffs)))
            for k in range(1, n + 1):
                hs[(n, k)] = complex(acoeffs[k])
        es = []
        leads = []
        aug_logs = []
        for n in range(1, N):
            ccoeffs = lowering_minor_coeffs(u, n, self.convention)
            lead = complex(ccoeffs[0])
            es.append(match_points(self.e[n - 1], roots_polished(ccoeffs)))
            leads.append(lead)
            aug_logs.append(self.aug_log[n - 1] + complex(np.log(lead / self.lead[n - 1])))
            res = angle_variables(gammas[n - 1], es[n - 1],
                                  gammas[n - 2] if n >= 2 else [],
                                  self.lam0, augment=False,
                                  deflect_radius=self.radius)
            for k in range(1, n + 1):
                val = res.tau_literal[k - 1]
                if k == 1:
                    val = val + aug_logs[n - 1]
                taus[(n, k)] = val
        return taus, hs, gammas, es, leads, aug_logs

    def step(self, u: np.ndarray) -> tuple[dict, dict, dict]:
        """Advance to u; returns (tau values, h values, branch flags)."""
        taus, hs, gammas, es, leads, aug_logs = self.values_near(u)
        flags: dict[int, bool] = {n: False for n in range(1, self.N)}
        for (n, k), val in taus.items():
            jump = abs(val - self.tau[(n, k)]) if self.tau else 0.0
            if jump > np.pi:
                raise BranchJumpError(
                    f"tau[{n},{k}] jumped by {jump:.3f} between samples")
            flags[n] = flags[n] or jump > np.pi / 2.0
        self.gamma, self.e, self.lead, self.aug_log, self.tau = \
            gammas, es, leads, aug_logs, taus
        return taus, hs, flags


def trajectory_records(pt: OrbitPoint, selector: tuple[int, int],
                       t_final: float = 1.0, steps: int = 1000,
                       samples: int = 40,
                       convention: MinorConvention = DEFAULT_MINOR_CONVENTION,
                       lam0: complex | None = None,
                       reg_gap: float = 1e-6) -> list[dict]:
    """Sampled trajectory with branch-tracked h and tau values, JSON-ready."""
    if lam0 is None:
        lam0 = default_base_point(pt)
    flow = hamiltonian_flow(pt, selector, t_final=t_final, steps=steps,
                            reg_gap=reg_gap,
                            sample_every=max(1, steps // samples))
    tracker = _TauTracker(pt.u, convention, lam0)
    records = []
    for t, u in zip(flow.times, flow.points):
        taus, hs, flags = tracker.step(u)
        records.append({
            "t": float(t),
            "u": [[float(z.real), float(z.imag)] for z in u.ravel()],
            "h": {f"{n},{k}": [v.real, v.imag] for (n, k), v in sorted(hs.items())},
            "tau": {f"{n},{k}": [v.real, v.imag] for (n, k), v in sorted(taus.items())},
            "branch_flags": {str(n): bool(f) for n, f in sorted(flags.items())},
        })
    return records


@dataclass
class ActionAngleReport:
    n: int
    step: float
    tolerance: float
    h_tau: dict[tuple, complex]
    h_h: dict[tuple, complex]
    max_deviation_upper: float     # levels n, m >= 2 against the delta pattern
    level_one: dict[tuple, complex]
    status: str

    def to_json(self) -> dict:
        fmt = lambda table: {f"{a[0]},{a[1]}|{b[0]},{b[1]}": [v.real, v.imag]
                             for (a, b), v in sorted(table.items())}
        return {
            "n": self.n,
            "step": self.step,
            "tolerance": self.tolerance,
            "h_tau": fmt(self.h_tau),
            "h_h": fmt(self.h_h),
            "max_deviation_upper_levels": self.max_deviation_upper,
            "level_one": fmt(self.level_one),
            "status": self.status,
        }


def action_angle_bracket_table(pt: OrbitPoint,
                               convention: MinorConvention = DEFAULT_MINOR_CONVENTION,
                               lam0: complex | None = None, step: float = 1e-6,
                               tolerance: float = 1e-4) -> ActionAngleReport:
    """Oracle brackets {h[n,k], tau[m,l]} and {h, h} over levels 1..N-1.

    With the augmented angles the full table is canonical,
    {h[n,k], tau[m,l]} = d(n,m) d(k,l); the status only grades levels
    n, m >= 2, and the level-one row is reported separately (the literal
    level-one angle is identically zero, so only the augmentation makes it
    conjugate to h[1,1]).
    """
    N = pt.n
    u = pt.u
    if lam0 is None:
        lam0 = default_base_point(pt)
    tracker = _TauTracker(u, convention, lam0)
    keys = [(n, k) for n in range(1, N) for k in range(1, n + 1)]

    tau_grad = {key: np.zeros((N, N), dtype=complex) for key in keys}
    for a in range(N):
        for b in range(N):
            h = step * max(1.0, abs(u[a, b]))
            vals = []
            for sgn in (1.0, -1.0):
                u2 = u.copy()
                u2[a, b] += sgn * h
                vals.append(tracker.values_near(u2)[0])
            for key in keys:
                tau_grad[key][a, b] = (vals[0][key] - vals[1][key]) / (2.0 * h)

    h_nabla = {key: _gradient_matrix(_gradient_polys(N, key[0], key[1]), u)
               for key in keys}
    tau_nabla = {key: tau_grad[key].T for key in keys}

    def kk(nab_f, nab_h):
        return complex(np.trace(u @ (nab_h @ nab_f - nab_f @ nab_h)))

    h_tau = {}
    h_h = {}
    level_one = {}
    worst = 0.0
    for ka in keys:
        for kb in keys:
            val = kk(h_nabla[ka], tau_nabla[kb])
            h_tau[(ka, kb)] = val
            expected = 1.0 if ka == kb else 0.0
            if ka[0] >= 2 and kb[0] >= 2:
                worst = max(worst, abs(val - expected))
            if ka[0] == 1 or kb[0] == 1:
                level_one[(ka, kb)] = val
        for kb in keys:
            if kb <= ka:
                continue
            val = kk(h_nabla[ka], h_nabla[kb])
            h_h[(ka, kb)] = val
            if ka[0] >= 2 and kb[0] >= 2:
                worst = max(worst, abs(val))
    return ActionAngleReport(
        n=N, step=step, tolerance=tolerance, h_tau=h_tau, h_h=h_h,
        max_deviation_upper=worst, level_one=level_one,
        status="ok" if worst <= tolerance else "violation")


@dataclass
class LinearizationReport:
    selector: tuple[int, int]
    samples: int
    slopes: dict[tuple[int, int], complex]
    tolerance: float
    max_error: float
    status: str

    def to_json(self) -> dict:
        return {
            "selector": list(self.selector),
            "samples": self.samples,
            "slopes": {f"{n},{k}": [v.real, v.imag]
                       for (n, k), v in sorted(self.slopes.items())},
            "tolerance": self.tolerance,
            "max_error": self.max_error,
            "status": self.status,
        }


def linearization_check(pt: OrbitPoint, selector: tuple[int, int],
                        t_final: float = 0.1, steps: int = 200,
                        samples: int = 25, tol: float = 1e-3,
                        convention: MinorConvention = DEFAULT_MINOR_CONVENTION,
                        lam0: complex | None = None) -> LinearizationReport:
    """Least-squares slopes of every tau along the selected action's flow.

    The conjugate tau must move with slope one, every other tau with slope
    zero (Casimir-level selectors expect all zeros).  Branch continuity is
    enforced stepwise; a jump above pi raises BranchJumpError.
    """
    if lam0 is None:
        lam0 = default_base_point(pt)
    flow = hamiltonian_flow(pt, selector, t_final=t_final, steps=steps,
                            sample_every=max(1, steps // samples))
    tracker = _TauTracker(pt.u, convention, lam0)
    series: dict[tuple[int, int], list[complex]] = {}
    for u in flow.points:
        taus, _, _ = tracker.step(u)
        for key, val in taus.items():
            series.setdefault(key, []).append(val)
    times = np.asarray(flow.times, dtype=float)
    tbar = times - times.mean()
    denom = float(np.sum(tbar * tbar))
    slopes = {}
    max_err = 0.0
    for key, vals in series.items():
        ys = np.asarray(vals, dtype=complex)
        slope = complex(np.sum(tbar * (ys - ys.mean())) / denom)
        slopes[key] = slope
        expected = 1.0 if key == selector else 0.0
        max_err = max(max_err, abs(slope - expected))
    return LinearizationReport(
        selector=selector, samples=len(times), slopes=slopes, tolerance=tol,
        max_error=max_err, status="ok" if max_err <= tol else "violation")
