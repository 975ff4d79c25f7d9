"""Brute-force reference computations, written independently of ``sidsim``.

Nothing here imports the package; each oracle re-derives its quantity from
the raw single-link parameters.
"""

from __future__ import annotations

import itertools
import math
from collections import deque

import numpy as np

P_TX = 10 ** (43 / 10) * 1e-3  # 43 dBm in W
NOISE = 10 ** (-80 / 10) * 1e-3  # -80 dBm in W
LINK = 500.0


def gain(d: float, clamp: float = 1.0) -> float:
    return 1e-6 * (max(d, clamp) / 10.0) ** -3


def snr(d: float, p: float = P_TX) -> float:
    return p * gain(d) / NOISE


def amplitude_levels(budget: float, n: int) -> np.ndarray:
    """Power levels uniformly spaced in amplitude (sqrt of power)."""
    return budget * np.linspace(0.0, 1.0, n) ** 2


def eavesdrop_grid(x: float, n: int = 500, budget: float = P_TX) -> float:
    """Max eavesdropping rate over an n x n (forward, noise) power grid, both phases."""
    g_ab = snr(LINK)
    g_as = snr(abs(x))
    r1 = math.log2(1 + g_as)
    per_watt = gain(abs(LINK - x)) / NOISE
    lv = amplitude_levels(budget, n)
    pf, pn = np.meshgrid(lv, lv, indexing="ij")
    ok = pf + pn <= budget * (1 + 1e-12)
    rho = g_as / (1 + g_as)
    best = 0.0
    for s in (+1.0, -1.0):
        gf, gn = pf * per_watt, pn * per_watt
        num = (math.sqrt(g_ab) + s * np.sqrt(gf * rho)) ** 2
        r0 = np.log2(1 + num / (1 + gf * (1 - rho) + gn))
        best = max(best, float(np.where(ok & (r0 <= r1), r0, 0.0).max()))
    return best


def symbol_spoof_grid(x: float, n: int = 100_000) -> float:
    """Max over a uniform grid in cancellation *amplitude* u = sqrt(c).

    For u > 2 sqrt(g_ab) the residual exceeds the uncancelled direct path, so
    such points are dominated by u = 0 and the grid can stop there.
    """
    big_g = snr(abs(LINK - x))
    g_ab = snr(LINK)
    a = math.sqrt(g_ab)
    u = np.linspace(0.0, min(math.sqrt(big_g), 2 * a), n)
    return float(((big_g - u * u) / ((a - u) ** 2 + 1)).max())


def betweenness(edges) -> dict:
    """Unnormalised directed betweenness by enumerating every shortest path."""
    nodes = sorted({u for e in edges for u in e})
    succ = {v: [] for v in nodes}
    for u, v in edges:
        succ[u].append(v)
    score = {v: 0.0 for v in nodes}
    for s in nodes:
        # BFS distances and all shortest paths from s
        dist = {s: 0}
        paths = {s: [[s]]}
        q = deque([s])
        while q:
            u = q.popleft()
            for v in succ[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    paths[v] = []
                    q.append(v)
                if dist[v] == dist[u] + 1:
                    paths[v].extend(p + [v] for p in paths[u])
        for t, plist in paths.items():
            if t == s:
                continue
            for p in plist:
                for mid in p[1:-1]:
                    score[mid] += 1.0 / len(plist)
    return score


def enumerate_best(options_per_sid: list[list], score, maximize: bool = True):
    """Full enumeration: best ``score(choice)`` among feasible joint choices."""
    best = None
    for choice in itertools.product(*options_per_sid):
        value, feasible = score(choice)
        if not feasible:
            continue
        if best is None or (value > best[0] if maximize else value < best[0]):
            best = (value, choice)
    return best
