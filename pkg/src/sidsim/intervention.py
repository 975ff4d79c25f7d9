"""Jamming-based disruption and spoofing of a malicious Alice -> Bob link."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .core import (AxisScenario, ChannelModel, InvalidInput, Node, capacity, channel_gain,
                   linear_to_db, link_snr, sinr)
from .search import grid_then_golden
from .surveillance import LinkState, SidControl, Sign, best_destructive_split, run_rows

SPOOF_TOL = 1e-9


class Strategy(str, Enum):
    NOISE_ONLY = "noise_only"
    COMBINED = "combined"


@dataclass(frozen=True)
class DisruptionOutcome:
    r0_before: float
    r0_after: float
    disabled: bool
    noise_rise_db: float
    signal_drop_db: float
    control: SidControl


@dataclass(frozen=True)
class SpoofingOutcome:
    sinr_direct: float
    sinr_symbol_level: float
    cancel_power_w: float
    fake_power_w: float
    decodable_at_sid: bool
    noise_rise_db: float = 0.0
    signal_drop_db: float = 0.0


def disrupt(alice: Node, bob: Node, sid: Node, model: ChannelModel,
            strategy: Strategy = Strategy.NOISE_ONLY, qos: float = 0.0) -> DisruptionOutcome:
    """Spend the SID's whole budget to push Bob's rate down.

    ``disabled`` reports whether the jammed rate falls below the ``qos``
    threshold, at which point Alice is assumed to stop transmitting.
    """
    if qos < 0:
        raise InvalidInput("qos must be >= 0")
    st = LinkState.from_nodes(alice, bob, sid, model)
    budget = st.budget_w
    if strategy is Strategy.NOISE_ONLY:
        control = SidControl(noise_power_w=budget)
    else:
        pf, _ = best_destructive_split(st, budget)
        control = SidControl(Sign.DESTRUCTIVE, pf, max(budget - pf, 0.0))
    r0_before = st.r0_passive
    r0_after = st.r0(control) if budget > 0 else r0_before
    return DisruptionOutcome(
        r0_before=r0_before, r0_after=r0_after, disabled=r0_after < qos,
        noise_rise_db=st.noise_rise_db(control), signal_drop_db=st.signal_drop_db(control),
        control=control,
    )


def direct_spoof_sinr(alice: Node, bob: Node, sid: Node, model: ChannelModel) -> float:
    """Fake-signal power over Alice's direct-link power plus noise, at Bob."""
    fake_rx = sid.tx_power_w * channel_gain(sid, bob, model)
    direct_rx = link_snr(alice, bob, model).rx_power_w
    return sinr(fake_rx, [direct_rx], bob.noise_power_w)


def _spoof_sinr(fake_snr: float, amp_ab: float, cancel_snr):
    """SINR when ``cancel_snr`` of the budget regenerates an anti-phase copy of Alice."""
    residual = (amp_ab - np.sqrt(cancel_snr)) ** 2
    return (fake_snr - cancel_snr) / (residual + 1.0)


def optimal_cancellation(fake_snr: float, gamma_ab: float) -> tuple[float, float]:
    """Split of the normalised budget ``fake_snr`` between cancellation and fake signal.

    Returns ``(cancel, sinr)``.  Cancelling beyond ``4 * gamma_ab`` overshoots
    the direct-path amplitude by more than its own size, which is always worse
    than not cancelling at all, so the search stops there.
    """
    amp = math.sqrt(gamma_ab)
    hi = min(fake_snr, 4.0 * gamma_ab)
    if hi <= 0.0:
        return 0.0, fake_snr / (gamma_ab + 1.0)
    c, value = grid_then_golden(
        lambda c: float(_spoof_sinr(fake_snr, amp, c)), 0.0, hi, n_grid=513, tol=SPOOF_TOL,
        f_vec=lambda cs: _spoof_sinr(fake_snr, amp, cs))
    return c, value


def symbol_level_spoof_sinr(alice: Node, bob: Node, sid: Node, model: ChannelModel) -> SpoofingOutcome:
    """Superpose a fake signal and a clean (decoded and regenerated) cancellation of Alice."""
    gamma_ab = link_snr(alice, bob, model).snr
    gamma_as = link_snr(alice, sid, model).snr
    g_sb = channel_gain(sid, bob, model)
    noise_w = bob.noise_power_w
    budget = sid.tx_power_w
    fake_snr = budget * g_sb / noise_w
    c, best = optimal_cancellation(fake_snr, gamma_ab)
    direct = direct_spoof_sinr(alice, bob, sid, model)
    cancel_w = min(c * noise_w / g_sb, budget) if g_sb > 0 else 0.0
    residual = (math.sqrt(gamma_ab) - math.sqrt(c)) ** 2
    # a regenerated waveform carries no receiver noise of the SID, so Bob's noise floor is untouched
    relay_noise = 0.0
    return SpoofingOutcome(
        sinr_direct=direct,
        sinr_symbol_level=max(best, direct),
        cancel_power_w=cancel_w,
        fake_power_w=budget - cancel_w,
        decodable_at_sid=capacity(gamma_as) >= capacity(gamma_ab),
        noise_rise_db=10.0 * math.log10(1.0 + relay_noise),
        signal_drop_db=(math.inf if residual == 0.0 else 10.0 * math.log10(gamma_ab / residual))
        if gamma_ab > 0 else 0.0,
    )


def _spoof_row(args: tuple[AxisScenario, float]) -> tuple[float, float, float]:
    scenario, x = args
    alice, bob, sid = scenario.nodes(x)
    out = symbol_level_spoof_sinr(alice, bob, sid, scenario.model)
    return float(x), linear_to_db(out.sinr_direct), linear_to_db(out.sinr_symbol_level)


def sweep_spoofing(x_values: Iterable[float], scenario: AxisScenario | None = None,
                   jobs: int = 1) -> list[tuple[float, float, float]]:
    """Rows of ``(x, direct dB, symbol-level dB)`` with the SID at ``(0, x)``."""
    return run_rows(_spoof_row, scenario or AxisScenario(), list(x_values), jobs)
