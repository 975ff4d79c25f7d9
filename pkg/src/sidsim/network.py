"""Multi-SID planning: association of SIDs to suspicious links, mode choice,
joint detection / jamming and criticality ranking of suspicious users.

Each SID picks at most one target link and one working mode and operates on
that link's band.  The control it applies for a mode comes from the
single-link strategies in :mod:`sidsim.surveillance` and
:mod:`sidsim.intervention`; the plan is then scored with every same-band
transmission counted as interference at every same-band receiver (suspicious
receivers, other SIDs' eavesdropping antennas and rightful users alike).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable, Sequence

import networkx as nx

from .core import ChannelModel, InvalidInput, Node, capacity, channel_gain, link_snr
from .intervention import optimal_cancellation
from .surveillance import (ZERO_CONTROL, LinkState, SidControl, Sign, best_destructive_split,
                           combined_jam_control, relay_control)

EXHAUSTIVE_LIMIT = 100_000


class AssignMode(str, Enum):
    EAVESDROP = "eavesdrop"
    JAM = "jam"
    RELAY = "relay"
    SPOOF = "spoof"
    IDLE = "idle"


class Objective(str, Enum):
    MAX_TOTAL_EAV_RATE = "max_total_eav_rate"
    MIN_TOTAL_MALICIOUS_RATE = "min_total_malicious_rate"


# modes that make sense for each objective (spoofing does not help decoding,
# relaying and pure listening do not lower the malicious rate)
OBJECTIVE_MODES = {
    Objective.MAX_TOTAL_EAV_RATE: (AssignMode.EAVESDROP, AssignMode.JAM, AssignMode.RELAY),
    Objective.MIN_TOTAL_MALICIOUS_RATE: (AssignMode.JAM, AssignMode.SPOOF),
}


@dataclass(frozen=True)
class SuspiciousLink:
    tx: str
    rx: str
    band: str


@dataclass(frozen=True)
class LegitReceiver:
    node: str
    band: str
    max_interference_w: float


@dataclass
class Scenario:
    nodes: list[Node]
    suspicious_links: list[SuspiciousLink]
    sids: list[str]
    legit_receivers: list[LegitReceiver] = field(default_factory=list)
    bands: list[str] = field(default_factory=list)
    model: ChannelModel = field(default_factory=ChannelModel)

    def __post_init__(self):
        self._by_id = {}
        for n in self.nodes:
            if n.id in self._by_id:
                raise InvalidInput(f"duplicate node id {n.id!r}")
            self._by_id[n.id] = n
        if not self.bands:
            self.bands = sorted({l.band for l in self.suspicious_links}
                                | {r.band for r in self.legit_receivers})
        self.validate()

    def validate(self) -> None:
        known_bands = set(self.bands)
        for i, link in enumerate(self.suspicious_links):
            for end in (link.tx, link.rx):
                if end not in self._by_id:
                    raise InvalidInput(f"links[{i}] references unknown node {end!r}")
            if link.tx == link.rx:
                raise InvalidInput(f"links[{i}] connects {link.tx!r} to itself")
            if link.band not in known_bands:
                raise InvalidInput(f"links[{i}] uses unknown band {link.band!r}")
        for sid in self.sids:
            if sid not in self._by_id:
                raise InvalidInput(f"sids references unknown node {sid!r}")
        if len(set(self.sids)) != len(self.sids):
            raise InvalidInput("duplicate SID ids")
        for i, legit in enumerate(self.legit_receivers):
            if legit.node not in self._by_id:
                raise InvalidInput(f"legit[{i}] references unknown node {legit.node!r}")
            if legit.band not in known_bands:
                raise InvalidInput(f"legit[{i}] uses unknown band {legit.band!r}")
            if not legit.max_interference_w >= 0:
                raise InvalidInput(f"legit[{i}].max_interference_w must be >= 0")

    def node(self, node_id: str) -> Node:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise InvalidInput(f"unknown node {node_id!r}") from None


# ---------------------------------------------------------------------------
# Cooperative primitives
# ---------------------------------------------------------------------------

def joint_detection_rate(sid_ids: Sequence[str], tx_id: str, scenario: Scenario,
                         model: ChannelModel | None = None) -> float:
    """Rate at which the SIDs jointly decode ``tx_id`` with ideal combining (SNRs add)."""
    if not sid_ids:
        raise InvalidInput("need at least one SID")
    model = model or scenario.model
    tx = scenario.node(tx_id)
    return capacity(math.fsum(link_snr(tx, scenario.node(s), model).snr for s in sid_ids))


def joint_jamming_power(sid_ids: Sequence[str], rx_id: str, scenario: Scenario,
                        model: ChannelModel | None = None, coherent: bool = False) -> float:
    """Jamming power received at ``rx_id`` when every SID transmits at full budget.

    Independent noise adds in power; jointly precoded signals add in amplitude.
    """
    if not sid_ids:
        raise InvalidInput("need at least one SID")
    model = model or scenario.model
    rx = scenario.node(rx_id)
    powers = [scenario.node(s).tx_power_w * channel_gain(scenario.node(s), rx, model)
              for s in sid_ids]
    if coherent:
        return math.fsum(math.sqrt(p) for p in powers) ** 2
    return math.fsum(powers)


def criticality_rank(links: Iterable[tuple[Hashable, Hashable]]) -> list[Hashable]:
    """Nodes of a directed suspicious topology by descending betweenness, ties by id."""
    graph = nx.DiGraph()
    graph.add_edges_from(links)
    if graph.number_of_nodes() == 0:
        raise InvalidInput("topology must not be empty")
    score = nx.betweenness_centrality(graph, normalized=False)
    return sorted(score, key=lambda n: (-score[n], n))


# ---------------------------------------------------------------------------
# Plan evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Decision:
    link: SuspiciousLink | None
    mode: AssignMode
    band: str | None

    @classmethod
    def idle(cls) -> Decision:
        return cls(None, AssignMode.IDLE, None)


@dataclass(frozen=True)
class _Action:
    """What one SID transmits for a (link, mode) choice."""

    control: SidControl = ZERO_CONTROL
    cancel_w: float = 0.0  # clean (regenerated) anti-phase copy of the link's source
    fake_w: float = 0.0

    @property
    def total_w(self) -> float:
        return self.control.total_power_w + self.cancel_w + self.fake_w


@dataclass(frozen=True)
class LinkResult:
    link: SuspiciousLink
    r0: float
    r1: float
    r_eav: float
    spoofed: bool


@dataclass
class AssignmentPlan:
    decisions: dict[str, Decision]
    objective: Objective
    objective_value: float
    constraint_slacks: dict[str, float]
    links: list[LinkResult]
    feasible: bool = True
    method: str = "exhaustive"


class _Evaluator:
    def __init__(self, scenario: Scenario, objective: Objective, model: ChannelModel):
        self.sc = scenario
        self.objective = objective
        self.model = model
        self.links = list(scenario.suspicious_links)
        self.sids = sorted(scenario.sids)
        self._gain: dict[tuple[str, str], float] = {}
        self.options: list[tuple[int, AssignMode] | None] = [None] + [
            (l, m) for l in range(len(self.links)) for m in OBJECTIVE_MODES[objective]]
        self.actions = {(s, opt): self._action(s, opt) for s in self.sids
                        for opt in self.options if opt is not None}

    def gain(self, a: str, b: str) -> float:
        key = (a, b)
        if key not in self._gain:
            self._gain[key] = channel_gain(self.sc.node(a), self.sc.node(b), self.model)
        return self._gain[key]

    def state(self, sid: str, l: int) -> LinkState:
        link = self.links[l]
        return LinkState.from_nodes(self.sc.node(link.tx), self.sc.node(link.rx),
                                    self.sc.node(sid), self.model)

    def _action(self, sid: str, opt: tuple[int, AssignMode]) -> _Action:
        l, mode = opt
        st = self.state(sid, l)
        if mode is AssignMode.RELAY:
            return _Action(relay_control(st))
        if mode is AssignMode.JAM:
            if self.objective is Objective.MAX_TOTAL_EAV_RATE:
                return _Action(combined_jam_control(st))
            pf, _ = best_destructive_split(st, st.budget_w)
            return _Action(SidControl(Sign.DESTRUCTIVE, pf, max(st.budget_w - pf, 0.0)))
        if mode is AssignMode.SPOOF:
            if st.budget_w == 0.0 or st.g_sb == 0.0:
                return _Action()
            fake_snr = st.budget_w * st.g_sb / st.bob_noise_w
            if st.r1 >= st.r0_passive:
                c, _ = optimal_cancellation(fake_snr, st.gamma_ab)
            else:
                c = 0.0  # cannot regenerate what it cannot decode
            cancel_w = min(c * st.bob_noise_w / st.g_sb, st.budget_w)
            return _Action(cancel_w=cancel_w, fake_w=st.budget_w - cancel_w)
        return _Action()

    def evaluate(self, choice: Sequence[tuple[int, AssignMode] | None]):
        """Score one joint choice (aligned with ``self.sids``)."""
        active = {s: (opt, self.actions[(s, opt)]) for s, opt in zip(self.sids, choice)
                  if opt is not None}

        def band_of(s):
            return self.links[active[s][0][0]].band

        slacks = {}
        for legit in self.sc.legit_receivers:
            interference = math.fsum(
                act.total_w * self.gain(s, legit.node)
                for s, (opt, act) in active.items()
                if band_of(s) == legit.band and act.total_w > 0)
            slacks[legit.node] = legit.max_interference_w - interference

        results = []
        for l, link in enumerate(self.links):
            alice, bob = self.sc.node(link.tx), self.sc.node(link.rx)
            noise_b = bob.noise_power_w
            # co-channel: other suspicious sources and SIDs serving other links
            foreign_tx = [other.tx for other in self.links
                          if other.band == link.band and other.tx != link.tx]
            ext_b = math.fsum(self.sc.node(t).tx_power_w * self.gain(t, link.rx)
                              for t in foreign_tx) / noise_b
            own = [(s, opt[1], act) for s, (opt, act) in active.items() if opt[0] == l]
            others = [(s, act) for s, (opt, act) in active.items()
                      if opt[0] != l and band_of(s) == link.band and act.total_w > 0]
            ext_b += math.fsum(act.total_w * self.gain(s, link.rx) for s, act in others) / noise_b

            # eavesdropping SINR at every listener on this link
            listeners = {}
            for s, _mode, _act in own:
                sid = self.sc.node(s)
                noise_s = sid.noise_power_w
                interf = math.fsum(self.sc.node(t).tx_power_w * self.gain(t, s)
                                   for t in foreign_tx)
                interf += math.fsum(a.total_w * self.gain(o, s)
                                    for o, (oopt, a) in active.items()
                                    if o != s and band_of(o) == link.band and a.total_w > 0)
                gamma = link_snr(alice, sid, self.model).snr
                listeners[s] = gamma / (1.0 + interf / noise_s) if interf > 0 else gamma

            gamma_ab = link_snr(alice, bob, self.model).snr
            amp = math.sqrt(gamma_ab)
            coherent = False
            noise_like = 0.0
            for s, _mode, act in own:
                g = self.gain(s, link.rx)
                c = act.control
                if c.forward_power_w > 0:
                    gamma_f = c.forward_power_w * g / noise_b
                    q = listeners[s]
                    amp = amp + c.sign.value * math.sqrt(gamma_f * q / (1.0 + q))
                    noise_like += gamma_f / (1.0 + q)
                    coherent = True
                if act.cancel_w > 0:
                    amp = amp - math.sqrt(act.cancel_w * g / noise_b)
                    coherent = True
                noise_like += c.noise_power_w * g / noise_b + act.fake_w * g / noise_b
            signal = amp * amp if coherent else gamma_ab
            bob_snr = signal / (1.0 + noise_like + ext_b)
            r0 = capacity(bob_snr)
            r1 = capacity(math.fsum(listeners.values())) if listeners else 0.0
            r_eav = r0 if listeners and r1 >= r0 else 0.0

            spoofed = False
            for s, mode, act in own:
                if mode is AssignMode.SPOOF and act.fake_w > 0:
                    fake = act.fake_w * self.gain(s, link.rx) / noise_b
                    # the fake signal competes with the residual direct path and everything else
                    rest = noise_like - fake
                    if fake / (signal + 1.0 + rest + ext_b) >= 1.0:
                        spoofed = True
            results.append(LinkResult(link, r0, r1, r_eav, spoofed))

        if self.objective is Objective.MAX_TOTAL_EAV_RATE:
            value = math.fsum(r.r_eav for r in results)
        else:
            value = math.fsum(0.0 if r.spoofed else r.r0 for r in results)
        feasible = all(v >= 0 for v in slacks.values())
        return value, slacks, results, feasible

    def better(self, a: float, b: float) -> bool:
        if self.objective is Objective.MAX_TOTAL_EAV_RATE:
            return a > b
        return a < b

    def plan(self, choice, value, slacks, results, feasible, method) -> AssignmentPlan:
        decisions = {}
        for s, opt in zip(self.sids, choice):
            if opt is None:
                decisions[s] = Decision.idle()
            else:
                link = self.links[opt[0]]
                decisions[s] = Decision(link, opt[1], link.band)
        return AssignmentPlan(decisions, self.objective, value, slacks, results, feasible, method)


def plan_count(scenario: Scenario, objective: Objective) -> int:
    per_sid = 1 + len(scenario.suspicious_links) * len(OBJECTIVE_MODES[objective])
    return per_sid ** len(scenario.sids)


def evaluate_plan(scenario: Scenario, decisions: dict[str, Decision], objective: Objective,
                  model: ChannelModel | None = None) -> AssignmentPlan:
    """Score an explicit plan (used to re-check feasibility of optimiser output)."""
    ev = _Evaluator(scenario, objective, model or scenario.model)
    choice = []
    for s in ev.sids:
        d = decisions.get(s, Decision.idle())
        if d.mode is AssignMode.IDLE:
            choice.append(None)
        else:
            choice.append((ev.links.index(d.link), d.mode))
    return ev.plan(choice, *ev.evaluate(choice), method="given")


def _exhaustive(ev: _Evaluator):
    best = None
    for choice in itertools.product(ev.options, repeat=len(ev.sids)):
        value, slacks, results, feasible = ev.evaluate(choice)
        if not feasible:
            continue
        if best is None or ev.better(value, best[1]):
            best = (choice, value, slacks, results)
    return best


def _greedy(ev: _Evaluator):
    choice: list = [None] * len(ev.sids)
    best = None
    for i in range(len(ev.sids)):
        best_i = None
        for opt in ev.options:
            trial = choice[:i] + [opt] + choice[i + 1:]
            value, slacks, results, feasible = ev.evaluate(trial)
            if feasible and (best_i is None or ev.better(value, best_i[1])):
                best_i = (trial, value, slacks, results)
        if best_i is not None:
            choice = list(best_i[0])
            best = best_i
    return best


def optimize_assignment(scenario: Scenario, objective: Objective = Objective.MAX_TOTAL_EAV_RATE,
                        model: ChannelModel | None = None, method: str = "auto") -> AssignmentPlan:
    """Pick (link, mode) per SID to optimise ``objective`` under the interference caps.

    ``method`` is ``"exhaustive"``, ``"greedy"`` or ``"auto"`` (exhaustive when
    the joint plan count is at most ``EXHAUSTIVE_LIMIT``).
    """
    ev = _Evaluator(scenario, objective, model or scenario.model)
    if method == "auto":
        method = "exhaustive" if plan_count(scenario, objective) <= EXHAUSTIVE_LIMIT else "greedy"
    if method == "exhaustive":
        best = _exhaustive(ev)
    elif method == "greedy":
        best = _greedy(ev)
    else:
        raise InvalidInput(f"unknown method {method!r}")
    if best is None:
        idle = [None] * len(ev.sids)
        value, slacks, results, _ = ev.evaluate(idle)
        return ev.plan(idle, value, slacks, results, False, method)
    choice, value, slacks, results = best
    return ev.plan(choice, value, slacks, results, True, method)
