"""Seeded random models with planted asymmetric independence.

A family is a network over a ternary hypothesis ``h`` and a few clues.
Clues come in groups (connected pieces of the clue graph); each group's
tables are shared by some hypotheses, which plants subset independence, and
individual tables may ignore a clue parent for some hypotheses, which plants
hypothesis-specific independence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DiscreteNetwork, Variable, network_from_tables
from .multinet import HypothesisSpace
from .simnet import Cover

H = Variable("h", "hypothesis", ("h0", "h1", "h2"))


@dataclass(frozen=True, eq=False)
class Family:
    network: DiscreteNetwork
    hypothesis: HypothesisSpace
    blocks: tuple[tuple[tuple[int, ...], ...], ...]
    cover: Cover


def random_network(rng: np.random.Generator, max_vars: int = 5, max_card: int = 3) -> DiscreteNetwork:
    """Arbitrary valid network with ids v0, v1, ... (arcs only go from lower to higher index)."""
    n = int(rng.integers(1, max_vars + 1))
    variables = [
        Variable(f"v{i}", f"v{i}", tuple(f"x{k}" for k in range(int(rng.integers(2, max_card + 1)))))
        for i in range(n)
    ]
    tables = {}
    for i, v in enumerate(variables):
        parents = tuple(f"v{j}" for j in range(i) if rng.random() < 0.5)
        rows = int(np.prod([variables[int(p[1:])].card for p in parents], dtype=int))
        tables[v.id] = (parents, _rows(rng, rows, v.card))
    return network_from_tables(variables, tables)


def _rows(rng, n, card, zeros=False):
    rows = rng.dirichlet(np.ones(card), size=n)
    if zeros:
        mask = rng.random(rows.shape) < 0.2
        mask[np.arange(n), rng.integers(0, card, size=n)] = False
        rows = np.where(mask, 0.0, rows)
        rows /= rows.sum(axis=1, keepdims=True)
    return rows


def _classes(rng) -> list[int]:
    """Class label per hypothesis value; at least two classes."""
    if rng.random() < 0.25:
        return [0, 1, 2]
    a, b = sorted(rng.choice(3, size=2, replace=False).tolist())
    c = 3 - a - b
    labels = [0, 0, 0]
    labels[c] = 1
    return labels


def random_family(rng: np.random.Generator, min_clues: int = 2, max_clues: int = 5) -> Family:
    n = int(rng.integers(min_clues, max_clues + 1))
    clues = [
        Variable(f"c{i}", f"clue {i}", tuple(f"x{k}" for k in range(int(rng.integers(2, 4)))))
        for i in range(n)
    ]
    card = {v.id: v.card for v in clues}
    card["h"] = 3
    # split clues into groups of consecutive ids; each group gets a connected DAG
    ncuts = int(rng.integers(0, min(2, n - 1) + 1))
    cuts = sorted(rng.choice(np.arange(1, n), size=ncuts, replace=False).tolist()) if ncuts else []
    bounds = [0] + cuts + [n]
    tables = {"h": ((), rng.dirichlet(np.ones(3) * 2.0)[None, :])}
    for lo, hi in zip(bounds, bounds[1:]):
        members = [c.id for c in clues[lo:hi]]
        labels = _classes(rng)
        for k, x in enumerate(members):
            gp = []
            if k:
                gp = [members[int(rng.integers(0, k))]]
                extra = [m for m in members[:k] if m not in gp and rng.random() < 0.3]
                gp = sorted(gp + extra)
            parents = tuple(gp) + ("h",)
            pcards = [card[p] for p in gp]
            nrows = int(np.prod(pcards, dtype=int))
            per_class = {}
            for cl in set(labels):
                t = _rows(rng, nrows, card[x]).reshape(*pcards, card[x])
                if gp and rng.random() < 0.4:
                    # this class ignores one of its clue parents
                    ax = int(rng.integers(0, len(gp)))
                    t = np.broadcast_to(np.take(t, [0], axis=ax), t.shape).copy()
                per_class[cl] = t
            full = np.stack([per_class[labels[hv]] for hv in range(3)], axis=-2)
            tables[x] = (parents, full.reshape(-1, card[x]))
    net = network_from_tables([H] + clues, tables)
    hyp = HypothesisSpace((H,))
    single = int(rng.integers(0, 3))
    pair = tuple((i,) for i in range(3) if i != single)
    blocks = tuple(sorted([((single,),), pair]))
    perm = rng.permutation(3).tolist()
    cover = Cover(hyp, (((perm[0],), (perm[1],)), ((perm[1],), (perm[2],))))
    return Family(net, hyp, blocks, cover)


def families(seed: int, count: int):
    rng = np.random.default_rng(seed)
    return [random_family(rng) for _ in range(count)]


def random_evidence(rng: np.random.Generator, net: DiscreteNetwork, exclude=(), min_size: int = 1) -> dict[str, int]:
    ids = [v for v in net.ids if v not in exclude]
    k = int(rng.integers(min(min_size, len(ids)), len(ids) + 1))
    chosen = rng.choice(ids, size=k, replace=False).tolist() if k else []
    return {v: int(rng.integers(0, net.card(v))) for v in sorted(chosen)}


def random_joint_network(rng: np.random.Generator, hyp_card: int = 3, clue_cards=(2, 2, 2)) -> DiscreteNetwork:
    """Full joint over h and clues, stored as a complete DAG with h first."""
    variables = [H] + [
        Variable(f"c{i}", f"clue {i}", tuple(f"x{k}" for k in range(c))) for i, c in enumerate(clue_cards)
    ]
    tables = {}
    ids = [v.id for v in variables]
    for i, v in enumerate(variables):
        parents = tuple(ids[:i])
        rows = int(np.prod([variables[j].card for j in range(i)], dtype=int))
        tables[v.id] = (parents, _rows(rng, rows, v.card))
    return network_from_tables(variables, tables)


__all__ = ["Family", "families", "random_evidence", "random_family", "random_joint_network", "random_network"]
