"""Round-level models of control-plane interventions.

* HARQ ACK->NACK spoofing: every spoofed NACK buys the SID one more copy of
  the same packet, which it chase-combines (SNRs add).
* Selective spoofing on a block-fading channel, to trade eavesdropping
  throughput against how often the SID has to tamper with feedback.
* TDD pilot spoofing of a multi-antenna transmitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import InvalidInput, capacity


@dataclass(frozen=True)
class HarqPlan:
    k_star: int
    spoofed_nacks: int
    effective_throughput: float
    exposure: float
    feasible: bool = True


def harq_spoof_plan(gamma_as: float, r0: float, max_rounds: int) -> HarqPlan:
    """Fewest transmissions of one packet after which the SID can decode it.

    Bob acknowledges every round, so ``k_star - 1`` of the ``k_star`` ACKs are
    rewritten; that share is the plan's exposure.  When ``max_rounds`` is not
    enough the SID does not bother spoofing and the plan is infeasible.
    """
    if gamma_as < 0 or r0 <= 0 or max_rounds < 1:
        raise InvalidInput("need gamma_as >= 0, r0 > 0, max_rounds >= 1")
    for k in range(1, int(max_rounds) + 1):
        if capacity(k * gamma_as) >= r0:
            return HarqPlan(k_star=k, spoofed_nacks=k - 1, effective_throughput=r0 / k,
                            exposure=(k - 1) / k)
    return HarqPlan(k_star=1, spoofed_nacks=0, effective_throughput=0.0, exposure=0.0,
                    feasible=False)


class FadingProcess:
    """Reproducible unit-mean exponential (Rayleigh power) block-fading draws."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._rng = np.random.default_rng(self.seed)

    def draw(self, n: int) -> np.ndarray:
        return self._rng.exponential(1.0, size=n)


@dataclass(frozen=True)
class SelectiveSpoofResult:
    throughput: float
    exposure: float
    spoofed_packets: int
    decoded_packets: int


def harq_selective_spoof(fading: FadingProcess, n_packets: int, gamma_as_mean: float,
                         gamma_ab_mean: float, r0: float, threshold: float,
                         max_rounds: int = 4) -> SelectiveSpoofResult:
    """Spoof NACKs only on packets whose direct-link fading gain is below ``threshold``.

    Alice sends every packet at the fixed rate ``r0``.  Per packet the
    Alice->Bob and Alice->SID power gains are drawn independently; the SID
    combines retransmissions of the same packet (same block).  Throughput is
    decoded bits per channel use over the session, exposure the fraction of
    Bob's acknowledgements that were rewritten.
    """
    if n_packets < 1 or threshold < 0:
        raise InvalidInput("need n_packets >= 1 and threshold >= 0")
    h_ab = fading.draw(n_packets)
    h_as = fading.draw(n_packets)

    decoded_bits = 0.0
    slots = spoofed = spoofed_packets = decoded = 0
    for gab, gas in zip(h_ab, h_as):
        g_as = gamma_as_mean * float(gas)
        if capacity(g_as) >= r0:
            decoded_bits += r0
            decoded += 1
            slots += 1
            continue
        plan = harq_spoof_plan(g_as, r0, max_rounds)
        # weak direct link makes extra retransmissions look natural
        if plan.feasible and float(gab) < threshold:
            decoded_bits += r0
            decoded += 1
            slots += plan.k_star
            spoofed += plan.spoofed_nacks
            spoofed_packets += 1
        else:
            slots += 1
    return SelectiveSpoofResult(
        throughput=decoded_bits / slots,
        exposure=spoofed / slots,
        spoofed_packets=spoofed_packets,
        decoded_packets=decoded,
    )


def pilot_spoof(m: int, spoof_ratio: float) -> tuple[float, float]:
    """Array-gain factors ``(towards Bob, towards SID)`` after reverse-pilot spoofing.

    ``spoof_ratio`` is the SID's pilot power over Bob's, as received at Alice.
    With asymptotically orthogonal channels the beamformer's energy splits in
    proportion to the two received pilot powers, so the factors always sum to
    ``m``.
    """
    if m < 1 or not spoof_ratio >= 0:
        raise InvalidInput("need m >= 1 and spoof_ratio >= 0")
    if math.isinf(spoof_ratio):
        return 0.0, float(m)
    to_sid = m * spoof_ratio / (1.0 + spoof_ratio)
    return m - to_sid, to_sid
