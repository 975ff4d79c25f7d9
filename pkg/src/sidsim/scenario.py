"""Scenario files, figure presets, sweeps and CSV result tables.

Scenario files are TOML.  The grammar (every key optional unless noted)::

    seed  = 42                      # u64, used by fading-based protocol runs
    sids  = ["sid"]                 # required: ids of nodes acting as SIDs
    bands = ["b1"]                  # default: bands referenced by links/legit

    [channel]
    pathloss_exponent  = 3.0
    reference_loss_db  = -60.0
    reference_distance = 10.0       # m
    min_distance       = 1.0        # m

    [[nodes]]                       # required: id, role, x, y
    id = "alice"
    role = "suspicious_tx"          # suspicious_tx | suspicious_rx | sid | legitimate_rx
    x = 0.0
    y = 0.0
    tx_dbm = 43.0
    noise_dbm = -80.0

    [[links]]                       # required: tx, rx, band
    tx = "alice"
    rx = "bob"
    band = "b1"

    [[legit]]                       # required: node, band, max_interference_w
    node = "user"
    band = "b1"
    max_interference_w = 1e-9       # W received, >= 0

    [sweep]                         # required: start, stop, step
    node  = "sid"                   # node to move (default: first SID)
    axis  = "y"                     # x | y
    start = 0.0
    stop  = 1500.0
    step  = 10.0
    table = "eavesdropping"         # eavesdropping | spoofing
    link  = 0                       # index into links
    sid   = "sid"                   # observing SID (default: first SID)
    label = "x_m"                   # header of the swept column

    [harq]                          # selective NACK spoofing on block fading
    n_packets  = 10000
    threshold  = 0.5
    max_rounds = 4

Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import AxisScenario, ChannelModel, InvalidInput, Node, Position, Role, linear_to_db
from .intervention import symbol_level_spoof_sinr, sweep_spoofing
from .network import LegitReceiver, Scenario, SuspiciousLink
from .protocol import FadingProcess, harq_selective_spoof
from .surveillance import (LinkState, Mode, passive_eavesdrop, proactive_auto,
                           sweep_eavesdropping)

DB_FLOOR = -300.0
DB_CEIL = 300.0
PRESETS = ("fig4", "fig6")


class ScenarioError(InvalidInput):
    """A scenario file could not be parsed or validated."""


# ---------------------------------------------------------------------------
# Result tables
# ---------------------------------------------------------------------------

def format_cell(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if math.isnan(v):
        raise ValueError("NaN cannot be written to a result table")
    if v == -math.inf:
        v = DB_FLOOR
    elif v == math.inf:
        v = DB_CEIL
    out = f"{v:.6f}"
    return "0.000000" if out == "-0.000000" else out


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row has {len(row)} cells, header has {len(self.columns)}")

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(format_cell(c) for c in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    start: float
    stop: float
    step: float
    node: str
    axis: str = "y"
    table: str = "eavesdropping"
    link: int = 0
    sid: str = ""
    label: str = "x_m"

    def values(self) -> list[float]:
        return sweep_values(self.start, self.stop, self.step)


@dataclass(frozen=True)
class HarqSpec:
    n_packets: int = 10_000
    threshold: float = 0.5
    max_rounds: int = 4


@dataclass
class ScenarioFile:
    scenario: Scenario
    sweep: SweepSpec | None = None
    harq: HarqSpec | None = None
    seed: int = 0
    source: str = ""


def sweep_values(start: float, stop: float, step: float) -> list[float]:
    """``start, start+step, ...`` up to ``stop`` inclusive, without accumulated drift."""
    if not step > 0 or stop < start:
        raise InvalidInput("sweep needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


_TOP_KEYS = {"seed", "sids", "bands", "channel", "nodes", "links", "legit", "sweep", "harq"}
_CHANNEL_KEYS = {"pathloss_exponent", "reference_loss_db", "reference_distance", "min_distance"}
_NODE_KEYS = {"id", "role", "x", "y", "tx_dbm", "noise_dbm"}
_LINK_KEYS = {"tx", "rx", "band"}
_LEGIT_KEYS = {"node", "band", "max_interference_w"}
_SWEEP_KEYS = {"node", "axis", "start", "stop", "step", "table", "link", "sid", "label"}
_HARQ_KEYS = {"n_packets", "threshold", "max_rounds"}


def _check_keys(where: str, table: Any, allowed: set[str], required: Sequence[str] = ()):
    if not isinstance(table, dict):
        raise ScenarioError(f"{where}: expected a table")
    for key in table:
        if key not in allowed:
            raise ScenarioError(f"{where}: unknown key {key!r}")
    for key in required:
        if key not in table:
            raise ScenarioError(f"{where}: missing required key {key!r}")


def _num(where: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _str(where: str, value: Any) -> str:
    if not isinstance(value, str):
        raise ScenarioError(f"{where}: expected a string, got {value!r}")
    return value


def _int(where: str, value: Any, lo: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < lo:
        raise ScenarioError(f"{where}: expected an integer >= {lo}, got {value!r}")
    return value


def parse_scenario(text: str, source: str = "<string>") -> ScenarioFile:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        msg = str(exc)
        lineno = getattr(exc, "lineno", None)
        if lineno is not None and "line" not in msg:
            msg += f" (line {lineno})"
        raise ScenarioError(f"{source}: {msg}") from None
    _check_keys(source, doc, _TOP_KEYS, required=("nodes", "sids"))

    ch = doc.get("channel", {})
    _check_keys(f"{source}: [channel]", ch, _CHANNEL_KEYS)
    try:
        model = ChannelModel(**{k: _num(f"channel.{k}", v) for k, v in ch.items()})
    except InvalidInput as exc:
        raise ScenarioError(f"{source}: channel: {exc}") from None

    nodes = []
    for i, raw in enumerate(doc["nodes"]):
        where = f"{source}: nodes[{i}]"
        _check_keys(where, raw, _NODE_KEYS, required=("id", "role", "x", "y"))
        try:
            role = Role(_str(f"{where}.role", raw["role"]))
        except ValueError:
            raise ScenarioError(f"{where}.role: unknown role {raw['role']!r}") from None
        tx = raw.get("tx_dbm")
        if tx is None and role in (Role.SUSPICIOUS_TX, Role.SID):
            raise ScenarioError(f"{where}: missing required key 'tx_dbm' for role {role.value}")
        try:
            nodes.append(Node(
                id=_str(f"{where}.id", raw["id"]),
                position=Position(_num(f"{where}.x", raw["x"]), _num(f"{where}.y", raw["y"])),
                role=role,
                tx_power_dbm=-math.inf if tx is None else _num(f"{where}.tx_dbm", tx),
                noise_power_dbm=_num(f"{where}.noise_dbm", raw.get("noise_dbm", -80.0)),
            ))
        except InvalidInput as exc:
            raise ScenarioError(f"{where}: {exc}") from None

    links = []
    for i, raw in enumerate(doc.get("links", [])):
        where = f"{source}: links[{i}]"
        _check_keys(where, raw, _LINK_KEYS, required=("tx", "rx", "band"))
        links.append(SuspiciousLink(*(_str(f"{where}.{k}", raw[k]) for k in ("tx", "rx", "band"))))

    legit = []
    for i, raw in enumerate(doc.get("legit", [])):
        where = f"{source}: legit[{i}]"
        _check_keys(where, raw, _LEGIT_KEYS, required=("node", "band", "max_interference_w"))
        cap = _num(f"{where}.max_interference_w", raw["max_interference_w"])
        if cap < 0:
            raise ScenarioError(f"{where}.max_interference_w: negative power {cap}")
        legit.append(LegitReceiver(_str(f"{where}.node", raw["node"]),
                                   _str(f"{where}.band", raw["band"]), cap))

    sids = doc["sids"]
    if not isinstance(sids, list) or not all(isinstance(s, str) for s in sids):
        raise ScenarioError(f"{source}: sids: expected a list of node ids")
    bands = doc.get("bands", [])
    if not isinstance(bands, list) or not all(isinstance(b, str) for b in bands):
        raise ScenarioError(f"{source}: bands: expected a list of band ids")

    try:
        scenario = Scenario(nodes=nodes, suspicious_links=links, sids=list(sids),
                            legit_receivers=legit, bands=list(bands), model=model)
    except InvalidInput as exc:
        raise ScenarioError(f"{source}: {exc}") from None
    for s in scenario.sids:
        if scenario.node(s).role is not Role.SID:
            raise ScenarioError(f"{source}: sids: node {s!r} does not have role 'sid'")

    sweep = None
    if "sweep" in doc:
        raw = doc["sweep"]
        where = f"{source}: [sweep]"
        _check_keys(where, raw, _SWEEP_KEYS, required=("start", "stop", "step"))
        default_sid = scenario.sids[0] if scenario.sids else ""
        sweep = SweepSpec(
            start=_num(f"{where}.start", raw["start"]),
            stop=_num(f"{where}.stop", raw["stop"]),
            step=_num(f"{where}.step", raw["step"]),
            node=_str(f"{where}.node", raw.get("node", default_sid)),
            axis=_str(f"{where}.axis", raw.get("axis", "y")),
            table=_str(f"{where}.table", raw.get("table", "eavesdropping")),
            link=_int(f"{where}.link", raw.get("link", 0)),
            sid=_str(f"{where}.sid", raw.get("sid", default_sid)),
            label=_str(f"{where}.label", raw.get("label", "x_m")),
        )
        if sweep.axis not in ("x", "y"):
            raise ScenarioError(f"{where}.axis: expected 'x' or 'y', got {sweep.axis!r}")
        if sweep.table not in ("eavesdropping", "spoofing"):
            raise ScenarioError(f"{where}.table: unknown table {sweep.table!r}")
        if sweep.link >= len(scenario.suspicious_links):
            raise ScenarioError(f"{where}.link: no link with index {sweep.link}")
        for key in ("node", "sid"):
            if getattr(sweep, key) not in {n.id for n in nodes}:
                raise ScenarioError(f"{where}.{key}: unknown node {getattr(sweep, key)!r}")
        if not sweep.step > 0 or sweep.stop < sweep.start:
            raise ScenarioError(f"{where}: need step > 0 and stop >= start")

    harq = None
    if "harq" in doc:
        raw = doc["harq"]
        where = f"{source}: [harq]"
        _check_keys(where, raw, _HARQ_KEYS)
        harq = HarqSpec(
            n_packets=_int(f"{where}.n_packets", raw.get("n_packets", 10_000), lo=1),
            threshold=_num(f"{where}.threshold", raw.get("threshold", 0.5)),
            max_rounds=_int(f"{where}.max_rounds", raw.get("max_rounds", 4), lo=1),
        )
        if harq.threshold < 0:
            raise ScenarioError(f"{where}.threshold: must be >= 0")

    seed = _int(f"{source}: seed", doc.get("seed", 0))
    if seed >= 2 ** 64:
        raise ScenarioError(f"{source}: seed: must fit in 64 bits")
    return ScenarioFile(scenario=scenario, sweep=sweep, harq=harq, seed=seed, source=source)


def load_scenario(path: str | Path) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read ({exc.strerror})") from None
    return parse_scenario(text, source=str(path))


def preset_path(name: str) -> Path:
    if name not in PRESETS:
        raise InvalidInput(f"unknown preset {name!r} (choose from {', '.join(PRESETS)})")
    return Path(str(resources.files("sidsim") / "presets" / f"{name}.toml"))


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

EAV_COLUMNS = ["passive_bpshz", "proactive_bpshz"]
SPOOF_COLUMNS = ["direct_db", "symbol_level_db"]


def run_preset(name: str, jobs: int = 1) -> ResultTable:
    """Regenerate a figure's data directly from the built-in single-link setup."""
    xs = sweep_values(0.0, 1500.0, 10.0)
    if name == "fig4":
        return ResultTable(["x_m"] + EAV_COLUMNS, sweep_eavesdropping(xs, AxisScenario(), jobs))
    if name == "fig6":
        return ResultTable(["x_m"] + SPOOF_COLUMNS, sweep_spoofing(xs, AxisScenario(), jobs))
    raise InvalidInput(f"unknown preset {name!r} (choose from {', '.join(PRESETS)})")


def _moved_scenario(sf: ScenarioFile, value: float) -> Scenario:
    sp = sf.sweep
    sc = sf.scenario
    nodes = [n.moved(**{sp.axis: value}) if n.id == sp.node else n for n in sc.nodes]
    return Scenario(nodes=nodes, suspicious_links=sc.suspicious_links, sids=sc.sids,
                    legit_receivers=sc.legit_receivers, bands=sc.bands, model=sc.model)


def _sweep_row(args: tuple[ScenarioFile, float]) -> tuple:
    sf, value = args
    sp = sf.sweep
    sc = _moved_scenario(sf, value)
    link = sc.suspicious_links[sp.link]
    alice, bob, sid = sc.node(link.tx), sc.node(link.rx), sc.node(sp.sid)
    if sp.table == "eavesdropping":
        return (value, passive_eavesdrop(alice, bob, sid, sc.model).r_eav,
                proactive_auto(alice, bob, sid, sc.model).r_eav)
    out = symbol_level_spoof_sinr(alice, bob, sid, sc.model)
    return value, linear_to_db(out.sinr_direct), linear_to_db(out.sinr_symbol_level)


def run_sweep(sf: ScenarioFile, out_path: str | Path | None = None, jobs: int = 1) -> ResultTable:
    if sf.sweep is None:
        raise ScenarioError(f"{sf.source}: no [sweep] section")
    if not sf.scenario.suspicious_links:
        raise ScenarioError(f"{sf.source}: sweep needs at least one link")
    tasks = [(sf, v) for v in sf.sweep.values()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    cols = EAV_COLUMNS if sf.sweep.table == "eavesdropping" else SPOOF_COLUMNS
    table = ResultTable([sf.sweep.label] + cols, rows)
    if out_path is not None:
        table.write(out_path)
    return table


def _auto_mode_name(st: LinkState, outcome) -> str:
    c = outcome.control
    if c.total_power_w == 0:
        return Mode.PASSIVE.value
    if c.sign.value > 0 and c.noise_power_w == 0:
        return Mode.RELAY.value
    if c.forward_power_w == 0:
        return Mode.NOISE_JAM.value
    return Mode.COMBINED_JAM.value


def simulate(sf: ScenarioFile, seed: int | None = None) -> ResultTable:
    """Every (link, SID) pair on its own: surveillance, spoofing and optional HARQ figures."""
    sc = sf.scenario
    seed = sf.seed if seed is None else seed
    cols = ["link", "tx", "rx", "sid", "r0_bpshz", "r1_bpshz", "passive_bpshz",
            "proactive_bpshz", "proactive_mode", "direct_spoof_db", "symbol_spoof_db"]
    if sf.harq is not None:
        cols += ["harq_throughput_bpshz", "harq_exposure"]
    rows = []
    for l, link in enumerate(sc.suspicious_links):
        alice, bob = sc.node(link.tx), sc.node(link.rx)
        for s in sc.sids:
            sid = sc.node(s)
            st = LinkState.from_nodes(alice, bob, sid, sc.model)
            passive = passive_eavesdrop(alice, bob, sid, sc.model)
            auto = proactive_auto(alice, bob, sid, sc.model)
            spoof = symbol_level_spoof_sinr(alice, bob, sid, sc.model)
            row = [l, link.tx, link.rx, s, passive.r0, passive.r1, passive.r_eav, auto.r_eav,
                   _auto_mode_name(st, auto), linear_to_db(spoof.sinr_direct),
                   linear_to_db(spoof.sinr_symbol_level)]
            if sf.harq is not None:
                res = harq_selective_spoof(FadingProcess(seed), sf.harq.n_packets, st.gamma_as,
                                           st.gamma_ab, passive.r0, sf.harq.threshold,
                                           sf.harq.max_rounds)
                row += [res.throughput, res.exposure]
            rows.append(tuple(row))
    return ResultTable(cols, rows)
