"""Geometry, pathloss and link-budget primitives.

Everything here is a pure function of its arguments. Powers are carried in
linear watts internally; dBm/dB only appear at the edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class InvalidInput(ValueError):
    """Raised when a primitive receives a value outside its domain."""


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InvalidInput(f"{name} must be finite, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# Unit conversion
# ---------------------------------------------------------------------------

def db_to_linear(value_db: float) -> float:
    return 10.0 ** (_finite("value_db", value_db) / 10.0)


def linear_to_db(value: float) -> float:
    """Power ratio to dB. ``linear_to_db(0)`` is ``-inf`` by convention."""
    value = float(value)
    if value < 0 or math.isnan(value):
        raise InvalidInput(f"cannot take dB of {value!r}")
    if value == 0.0:
        return -math.inf
    return 10.0 * math.log10(value)


def dbm_to_watts(value_dbm: float) -> float:
    return db_to_linear(value_dbm) * 1e-3


def watts_to_dbm(value_w: float) -> float:
    return linear_to_db(value_w * 1e3)


# ---------------------------------------------------------------------------
# Geometry and channel
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def __post_init__(self):
        _finite("x", self.x)
        _finite("y", self.y)

    def distance_to(self, other: Position) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class ChannelModel:
    """Deterministic distance-based pathloss with a near-field clamp."""

    pathloss_exponent: float = 3.0
    reference_loss_db: float = -60.0
    reference_distance: float = 10.0
    min_distance: float = 1.0

    def __post_init__(self):
        if not _finite("pathloss_exponent", self.pathloss_exponent) > 0:
            raise InvalidInput("pathloss_exponent must be > 0")
        _finite("reference_loss_db", self.reference_loss_db)
        if not _finite("reference_distance", self.reference_distance) > 0:
            raise InvalidInput("reference_distance must be > 0")
        if not _finite("min_distance", self.min_distance) > 0:
            raise InvalidInput("min_distance must be > 0")


def pathloss_gain(model: ChannelModel, d: float) -> float:
    d = _finite("distance", d)
    if d < 0:
        raise InvalidInput(f"distance must be >= 0, got {d}")
    d = max(d, model.min_distance)
    return (10.0 ** (model.reference_loss_db / 10.0)
            * (d / model.reference_distance) ** (-model.pathloss_exponent))


class Role(str, Enum):
    SUSPICIOUS_TX = "suspicious_tx"
    SUSPICIOUS_RX = "suspicious_rx"
    SID = "sid"
    LEGITIMATE_RX = "legitimate_rx"


@dataclass(frozen=True)
class Node:
    id: str
    position: Position
    role: Role
    tx_power_dbm: float = -math.inf
    noise_power_dbm: float = -80.0

    def __post_init__(self):
        _finite("noise_power_dbm", self.noise_power_dbm)
        # -inf dBm is accepted as "silent" (0 W) so zero-budget SIDs are expressible
        if math.isnan(self.tx_power_dbm) or self.tx_power_dbm == math.inf:
            raise InvalidInput(f"tx_power_dbm must be finite or -inf, got {self.tx_power_dbm!r}")

    @property
    def tx_power_w(self) -> float:
        if self.tx_power_dbm == -math.inf:
            return 0.0
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def noise_power_w(self) -> float:
        return dbm_to_watts(self.noise_power_dbm)

    def moved(self, x: float | None = None, y: float | None = None) -> Node:
        pos = Position(self.position.x if x is None else x,
                       self.position.y if y is None else y)
        return Node(self.id, pos, self.role, self.tx_power_dbm, self.noise_power_dbm)

    def with_power(self, tx_power_dbm: float) -> Node:
        return Node(self.id, self.position, self.role, tx_power_dbm, self.noise_power_dbm)


def channel_gain(a: Node, b: Node, model: ChannelModel) -> float:
    return pathloss_gain(model, a.position.distance_to(b.position))


@dataclass(frozen=True)
class LinkBudget:
    gain: float
    rx_power_w: float
    snr: float

    @property
    def snr_db(self) -> float:
        return linear_to_db(self.snr)


def link_snr(tx: Node, rx: Node, model: ChannelModel) -> LinkBudget:
    if tx.id == rx.id:
        raise InvalidInput(f"link endpoints must differ (both {tx.id!r})")
    gain = channel_gain(tx, rx, model)
    rx_power = tx.tx_power_w * gain
    return LinkBudget(gain=gain, rx_power_w=rx_power, snr=rx_power / rx.noise_power_w)


# ---------------------------------------------------------------------------
# Rates
# ---------------------------------------------------------------------------

def capacity(snr: float) -> float:
    """Shannon rate log2(1 + snr) in bps/Hz."""
    snr = float(snr)
    if math.isnan(snr) or snr < 0:
        raise InvalidInput(f"snr must be >= 0, got {snr!r}")
    return math.log2(1.0 + snr)


def snr_for_rate(rate: float) -> float:
    """Inverse of :func:`capacity`."""
    return 2.0 ** rate - 1.0


def sinr(signal_w: float, interference_w: Iterable[float] = (), noise_w: float = 1.0) -> float:
    interference: Sequence[float] = list(interference_w)
    if noise_w <= 0:
        raise InvalidInput("noise power must be > 0")
    if signal_w < 0 or any(i < 0 for i in interference):
        raise InvalidInput("powers must be >= 0")
    return signal_w / (noise_w + math.fsum(interference))


@dataclass(frozen=True)
class AxisScenario:
    """Alice at the origin, Bob at ``(0, link_length)``, the SID at ``(0, x)``.

    Defaults are the single-link evaluation setup used by both figure presets.
    """

    model: ChannelModel = ChannelModel()
    link_length: float = 500.0
    alice_tx_dbm: float = 43.0
    sid_tx_dbm: float = 43.0
    noise_dbm: float = -80.0

    def nodes(self, x: float) -> tuple[Node, Node, Node]:
        alice = Node("alice", Position(0.0, 0.0), Role.SUSPICIOUS_TX,
                     self.alice_tx_dbm, self.noise_dbm)
        bob = Node("bob", Position(0.0, self.link_length), Role.SUSPICIOUS_RX,
                   noise_power_dbm=self.noise_dbm)
        sid = Node("sid", Position(0.0, float(x)), Role.SID, self.sid_tx_dbm, self.noise_dbm)
        return alice, bob, sid
