"""Passive and proactive eavesdropping of a single suspicious link by one SID.

The SID is full duplex with perfect self-interference cancellation, so its
own eavesdropping rate ``r1`` never depends on what it transmits.  What it
transmits changes Bob's SNR and therefore the suspicious rate ``r0``:

* a forwarded (amplify-and-forward) copy of the eavesdropped signal, phase
  aligned with the direct path either constructively or destructively;
* artificial Gaussian noise.

Because the SID forwards what it *received*, a share ``1 / (1 + gamma_as)``
of the forwarded power is relayed receiver noise.  At Bob::

    snr = (sqrt(g_ab) +/- sqrt(g_f * rho))**2 / (1 + g_f * (1 - rho) + g_n)

with ``rho = g_as / (1 + g_as)`` and ``g_f``, ``g_n`` the forwarded and noise
powers as received at Bob, normalised by Bob's noise.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .core import AxisScenario, ChannelModel, InvalidInput, Node, capacity, channel_gain, link_snr
from .search import bisect_threshold, grid_then_golden

POWER_TOL_W = 1e-9
# bisections run to float resolution: near Bob a nanowatt of forwarded power still moves r0
BISECT_TOL_W = 1e-15
RATE_IMPROVEMENT_TOL = 1e-6
AUTO_GRID = 64


class Sign(Enum):
    CONSTRUCTIVE = 1
    DESTRUCTIVE = -1


@dataclass(frozen=True)
class SidControl:
    sign: Sign = Sign.CONSTRUCTIVE
    forward_power_w: float = 0.0
    noise_power_w: float = 0.0

    def __post_init__(self):
        if not (self.forward_power_w >= 0 and self.noise_power_w >= 0):
            raise InvalidInput("SID powers must be >= 0")

    @property
    def total_power_w(self) -> float:
        return self.forward_power_w + self.noise_power_w


ZERO_CONTROL = SidControl()


class Mode(str, Enum):
    PASSIVE = "passive"
    NOISE_JAM = "noise_jam"
    COMBINED_JAM = "combined_jam"
    RELAY = "relay"
    AUTO = "auto"


@dataclass(frozen=True)
class SurveillanceOutcome:
    r0: float
    r1: float
    r_eav: float
    mode: Mode
    control: SidControl
    noise_rise_db: float
    signal_drop_db: float


def eavesdropping_rate(r0: float, r1: float) -> float:
    """Rate the SID decodes: all of ``r0`` if its own link supports it, else nothing."""
    if r0 < 0 or r1 < 0:
        raise InvalidInput("rates must be >= 0")
    return r0 if r1 >= r0 else 0.0


def _received_terms(gamma_ab, gamma_as, gamma_f, gamma_n, sign):
    """Numerator (coherent signal) and distortion (relay noise + jamming) at Bob.

    Works elementwise on numpy arrays as well as on floats.
    """
    relay_noise = gamma_f / (1.0 + gamma_as)
    amp = np.sqrt(gamma_ab) + sign * np.sqrt(gamma_f * gamma_as / (1.0 + gamma_as))
    numerator = np.where(gamma_f == 0, gamma_ab, amp * amp)
    return numerator, relay_noise + gamma_n


def bob_snr_under_control(gamma_ab: float, gamma_as: float, g_sb: float,
                          control: SidControl, noise_w: float) -> float:
    """Bob's SNR when the SID applies ``control``; ``g_sb`` is the SID-to-Bob power gain."""
    if min(gamma_ab, gamma_as, g_sb) < 0 or noise_w <= 0:
        raise InvalidInput("gains must be >= 0 and noise > 0")
    gamma_f = control.forward_power_w * g_sb / noise_w
    gamma_n = control.noise_power_w * g_sb / noise_w
    if gamma_f == 0.0:
        # identity path kept free of sqrt round-off
        return gamma_ab / (1.0 + gamma_n)
    num, dist = _received_terms(gamma_ab, gamma_as, gamma_f, gamma_n, control.sign.value)
    return float(num) / (1.0 + float(dist))


@dataclass(frozen=True)
class LinkState:
    """Normalised quantities of one Alice -> Bob link observed by one SID."""

    gamma_ab: float
    gamma_as: float
    g_sb: float
    bob_noise_w: float
    budget_w: float

    @classmethod
    def from_nodes(cls, alice: Node, bob: Node, sid: Node, model: ChannelModel) -> LinkState:
        return cls(
            gamma_ab=link_snr(alice, bob, model).snr,
            gamma_as=link_snr(alice, sid, model).snr,
            g_sb=channel_gain(sid, bob, model),
            bob_noise_w=bob.noise_power_w,
            budget_w=sid.tx_power_w,
        )

    @property
    def r0_passive(self) -> float:
        return capacity(self.gamma_ab)

    @property
    def r1(self) -> float:
        return capacity(self.gamma_as)

    def snr(self, control: SidControl) -> float:
        return bob_snr_under_control(self.gamma_ab, self.gamma_as, self.g_sb, control,
                                     self.bob_noise_w)

    def r0(self, control: SidControl) -> float:
        return capacity(self.snr(control))

    def snr_grid(self, sign: Sign, pf: np.ndarray, pn: np.ndarray) -> np.ndarray:
        scale = self.g_sb / self.bob_noise_w
        num, dist = _received_terms(self.gamma_ab, self.gamma_as, pf * scale, pn * scale,
                                    sign.value)
        return num / (1.0 + dist)

    def noise_rise_db(self, control: SidControl) -> float:
        scale = self.g_sb / self.bob_noise_w
        extra = (control.forward_power_w * scale / (1.0 + self.gamma_as)
                 + control.noise_power_w * scale)
        return 10.0 * math.log10(1.0 + extra)

    def signal_drop_db(self, control: SidControl) -> float:
        """Drop of the coherent signal term at Bob (negative when relaying boosts it)."""
        if control.forward_power_w == 0.0:
            return 0.0
        scale = self.g_sb / self.bob_noise_w
        num, _ = _received_terms(self.gamma_ab, self.gamma_as, control.forward_power_w * scale,
                                 0.0, control.sign.value)
        num = float(num)
        if num == 0.0:
            return math.inf
        if self.gamma_ab == 0.0:
            return -math.inf
        return 10.0 * math.log10(self.gamma_ab / num)

    def outcome(self, control: SidControl, mode: Mode) -> SurveillanceOutcome:
        r0 = self.r0(control) if control.total_power_w > 0 else self.r0_passive
        r1 = self.r1
        return SurveillanceOutcome(
            r0=r0, r1=r1, r_eav=eavesdropping_rate(r0, r1), mode=mode, control=control,
            noise_rise_db=self.noise_rise_db(control), signal_drop_db=self.signal_drop_db(control),
        )


def _state(alice, bob, sid, model) -> LinkState:
    return LinkState.from_nodes(alice, bob, sid, model)


def passive_eavesdrop(alice: Node, bob: Node, sid: Node, model: ChannelModel) -> SurveillanceOutcome:
    return _state(alice, bob, sid, model).outcome(ZERO_CONTROL, Mode.PASSIVE)


# ---------------------------------------------------------------------------
# Fixed-mode strategies, expressed on a LinkState so the network planner can
# reuse them without rebuilding nodes.
# ---------------------------------------------------------------------------

def noise_jam_control(st: LinkState) -> SidControl:
    """Smallest pure-noise power that brings ``r0`` down to ``r1`` (full budget if impossible)."""
    r1 = st.r1
    if st.budget_w == 0.0 or st.r0_passive <= r1:
        return ZERO_CONTROL
    full = SidControl(noise_power_w=st.budget_w)
    if st.r0(full) > r1:
        return full
    pn = bisect_threshold(lambda p: st.r0(SidControl(noise_power_w=p)) <= r1,
                          0.0, st.budget_w, tol=BISECT_TOL_W)
    return SidControl(noise_power_w=pn)


def relay_control(st: LinkState) -> SidControl:
    """Constructive forwarding without noise, as strong as decodability allows."""
    r1, budget = st.r1, st.budget_w
    if budget == 0.0 or st.r0_passive > r1:
        # boosting Bob can only widen the gap
        return ZERO_CONTROL

    def r0_at(pf: float) -> float:
        return st.r0(SidControl(Sign.CONSTRUCTIVE, pf, 0.0))

    def r0_vec(pf: np.ndarray) -> np.ndarray:
        return np.log2(1.0 + st.snr_grid(Sign.CONSTRUCTIVE, pf, np.zeros_like(pf)))

    pf_best, r0_best = grid_then_golden(r0_at, 0.0, budget, tol=POWER_TOL_W, f_vec=r0_vec)
    if r0_best <= r1:
        return SidControl(Sign.CONSTRUCTIVE, pf_best, 0.0)
    # r0 overshoots r1 somewhere: take the first crossing, staying on the decodable side
    xs = np.linspace(0.0, pf_best, 257)
    over = np.nonzero(r0_vec(xs) > r1)[0]
    hi = float(xs[over[0]]) if over.size else pf_best
    lo = float(xs[over[0] - 1]) if over.size and over[0] > 0 else 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= BISECT_TOL_W or mid in (lo, hi):
            break
        if r0_at(mid) > r1:
            hi = mid
        else:
            lo = mid
    pf = lo
    return SidControl(Sign.CONSTRUCTIVE, pf, 0.0)


def best_destructive_split(st: LinkState, total_w: float) -> tuple[float, float]:
    """Best destructive split of ``total_w``: returns (forward power, Bob SNR)."""
    if total_w == 0.0:
        return 0.0, st.gamma_ab

    def neg_snr(pf: float) -> float:
        return -st.snr(SidControl(Sign.DESTRUCTIVE, pf, total_w - pf))

    def neg_snr_vec(pf: np.ndarray) -> np.ndarray:
        return -st.snr_grid(Sign.DESTRUCTIVE, pf, total_w - pf)

    pf, neg = grid_then_golden(neg_snr, 0.0, total_w, n_grid=129, tol=POWER_TOL_W,
                               f_vec=neg_snr_vec)
    return pf, -neg


def combined_jam_control(st: LinkState) -> SidControl:
    """Least total power (destructive forwarding plus noise) that gets ``r0 <= r1``.

    If even the full budget is not enough, the split that minimises ``r0`` at
    full power is returned.
    """
    r1, budget = st.r1, st.budget_w
    if budget == 0.0 or st.r0_passive <= r1:
        return ZERO_CONTROL

    def control_at(total: float) -> SidControl:
        pf, _ = best_destructive_split(st, total)
        return SidControl(Sign.DESTRUCTIVE, pf, max(total - pf, 0.0))

    full = control_at(budget)
    if st.r0(full) > r1:
        return full
    total = bisect_threshold(lambda t: st.r0(control_at(t)) <= r1, 0.0, budget,
                             tol=BISECT_TOL_W)
    return control_at(total)


def _grid_best(st: LinkState, n: int = AUTO_GRID) -> tuple[float, SidControl]:
    """Coarse search over both signs and the (forward, noise) power simplex."""
    r1 = st.r1
    levels = np.linspace(0.0, st.budget_w, n)
    pf, pn = np.meshgrid(levels, levels, indexing="ij")
    inside = pf + pn <= st.budget_w * (1 + 1e-12)
    best_rate, best = -1.0, ZERO_CONTROL
    for sign in (Sign.CONSTRUCTIVE, Sign.DESTRUCTIVE):
        r0 = np.log2(1.0 + st.snr_grid(sign, pf, pn))
        r_eav = np.where(inside & (r0 <= r1), r0, 0.0)
        # ties go to the lower total power
        order = np.lexsort(((pf + pn).ravel(), -r_eav.ravel()))
        k = order[0]
        if r_eav.ravel()[k] > best_rate:
            best_rate = float(r_eav.ravel()[k])
            best = SidControl(sign, float(pf.ravel()[k]), float(pn.ravel()[k]))
    return best_rate, best


def auto_control(st: LinkState) -> SidControl:
    """Best control over both forwarding signs and every power split."""
    if st.budget_w == 0.0:
        return ZERO_CONTROL
    if st.r0_passive <= st.r1:
        candidate = relay_control(st)
    else:
        candidate = combined_jam_control(st)
        if st.r0(candidate) > st.r1:
            candidate = ZERO_CONTROL  # nothing decodable; spend nothing
    cand_rate = st.outcome(candidate, Mode.AUTO).r_eav
    grid_rate, grid_control = _grid_best(st)
    if grid_rate > cand_rate + RATE_IMPROVEMENT_TOL:
        return grid_control
    return candidate


def proactive_noise_jam(alice, bob, sid, model) -> SurveillanceOutcome:
    st = _state(alice, bob, sid, model)
    return st.outcome(noise_jam_control(st), Mode.NOISE_JAM)


def proactive_combined_jam(alice, bob, sid, model) -> SurveillanceOutcome:
    st = _state(alice, bob, sid, model)
    return st.outcome(combined_jam_control(st), Mode.COMBINED_JAM)


def proactive_relay(alice, bob, sid, model) -> SurveillanceOutcome:
    st = _state(alice, bob, sid, model)
    return st.outcome(relay_control(st), Mode.RELAY)


def proactive_auto(alice, bob, sid, model) -> SurveillanceOutcome:
    st = _state(alice, bob, sid, model)
    return st.outcome(auto_control(st), Mode.AUTO)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _eav_row(args: tuple[AxisScenario, float]) -> tuple[float, float, float]:
    scenario, x = args
    alice, bob, sid = scenario.nodes(x)
    passive = passive_eavesdrop(alice, bob, sid, scenario.model)
    proactive = proactive_auto(alice, bob, sid, scenario.model)
    return float(x), passive.r_eav, proactive.r_eav


def run_rows(worker, scenario, x_values: Sequence[float], jobs: int):
    tasks = [(scenario, float(x)) for x in x_values]
    if not tasks:
        raise InvalidInput("x_values must not be empty")
    if jobs <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, tasks))


def sweep_eavesdropping(x_values: Iterable[float], scenario: AxisScenario | None = None,
                        jobs: int = 1) -> list[tuple[float, float, float]]:
    """Rows of ``(x, passive r_eav, proactive r_eav)`` with the SID at ``(0, x)``."""
    return run_rows(_eav_row, scenario or AxisScenario(), list(x_values), jobs)
