"""Worked models of the secured-building story, used by tests, docs and the CLI.

Hypothesis values are ordered (spy, visitor, worker[, executive]); clue
variables are gender ``g`` (male, female), badge ``b`` (yes, no) and
limousine ``l`` (yes, no).
"""

from __future__ import annotations

import numpy as np

from .core import DiscreteNetwork, Variable, network_from_tables
from .multinet import HypothesisSpace, Multinet, fit_hypothesis_cpts

H3 = Variable("h", "identity", ("spy", "visitor", "worker"))
H4 = Variable("h", "identity", ("spy", "visitor", "worker", "executive"))
G = Variable("g", "gender", ("male", "female"))
B = Variable("b", "badge", ("yes", "no"))
L = Variable("l", "limousine", ("yes", "no"))

# worker badge-wearing depends on gender
WORKER_B_GIVEN_G = [[0.7, 0.3], [0.9, 0.1]]


def figure1() -> DiscreteNetwork:
    """h -> g, h -> b, g -> b; spies always wear badges, visitors never do."""
    return network_from_tables(
        [H3, G, B],
        {
            "h": ((), [[0.05, 0.25, 0.7]]),
            "g": (("h",), [[0.9, 0.1], [0.5, 0.5], [0.6, 0.4]]),
            # rows: (g, h) with h fastest
            "b": (
                ("g", "h"),
                [[1.0, 0.0], [0.0, 1.0], [0.7, 0.3], [1.0, 0.0], [0.0, 1.0], [0.9, 0.1]],
            ),
        },
    )


def figure2() -> Multinet:
    """Spy/visitor network with g and b independent given h, plus a worker network."""
    hyp = HypothesisSpace((H3,))
    sv = network_from_tables(
        [H3, G, B],
        {
            "h": ((), [[1 / 6, 5 / 6, 0.0]]),
            "g": (("h",), [[0.9, 0.1], [0.5, 0.5], [0.5, 0.5]]),
            "b": (("h",), [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]]),
        },
    )
    w = network_from_tables(
        [H3, G, B],
        {
            "h": ((), [[0.0, 0.0, 1.0]]),
            "g": ((), [[0.6, 0.4]]),
            "b": (("g",), WORKER_B_GIVEN_G),
        },
    )
    return Multinet(hyp, (((0,), (1,)), ((2,),)), (sv, w), np.array([0.3, 0.7]))


FIG3_PRIORS = (0.05, 0.2, 0.6, 0.15)


def figure3() -> Multinet:
    """Four identities; limousines only tell workers from executives."""
    hyp = HypothesisSpace((H4,))
    sv = network_from_tables(
        [H4, G, B, L],
        {
            "h": ((), [[0.2, 0.8, 0.0, 0.0]]),
            "g": (("h",), [[0.9, 0.1], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]),
            "b": (("h",), [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.5]]),
            "l": ((), [[0.01, 0.99]]),
        },
    )
    we = network_from_tables(
        [H4, G, B, L],
        {
            "h": ((), [[0.0, 0.0, 0.8, 0.2]]),
            "g": ((), [[0.6, 0.4]]),
            "b": (("g",), WORKER_B_GIVEN_G),
            "l": (("h",), [[0.5, 0.5], [0.5, 0.5], [0.01, 0.99], [0.8, 0.2]]),
        },
    )
    return Multinet(hyp, (((0,), (1,)), ((2,), (3,))), (sv, we), np.array([0.25, 0.75]))


CHAIN_COVER = (((0,), (1,)), ((1,), (2,)), ((2,), (3,)))


def figure5():
    """Similarity network over the chain spy - visitor - worker - executive."""
    from .simnet import Cover, OrdinaryLocalNetwork, SimilarityNetwork

    hyp = HypothesisSpace((H4,))
    sv = network_from_tables(
        [H4, G, B],
        {
            "h": ((), [[0.2, 0.8, 0.0, 0.0]]),
            "g": (("h",), [[0.9, 0.1], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]),
            "b": (("h",), [[1.0, 0.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.5]]),
        },
    )
    vw = network_from_tables(
        [H4, G, B],
        {
            "h": ((), [[0.0, 0.25, 0.75, 0.0]]),
            "g": (("h",), [[0.5, 0.5], [0.5, 0.5], [0.6, 0.4], [0.5, 0.5]]),
            "b": (
                ("g", "h"),
                [
                    [0.5, 0.5], [0.0, 1.0], [0.7, 0.3], [0.5, 0.5],
                    [0.5, 0.5], [0.0, 1.0], [0.9, 0.1], [0.5, 0.5],
                ],
            ),
        },
    )
    we = network_from_tables(
        [H4, L],
        {
            "h": ((), [[0.0, 0.0, 0.8, 0.2]]),
            "l": (("h",), [[0.5, 0.5], [0.5, 0.5], [0.01, 0.99], [0.8, 0.2]]),
        },
    )
    locals_ = tuple(
        OrdinaryLocalNetwork(i, frozenset(net.ids), net) for i, net in enumerate((sv, vw, we))
    )
    return SimilarityNetwork(Cover(hyp, CHAIN_COVER), locals_, ("b", "g", "h", "l"))


# -- two persons approaching together ---------------------------------------

P1 = Variable("h1", "first identity", ("s", "v", "w"))
P2 = Variable("h2", "second identity", ("s", "v", "w"))
C = Variable("c", "converse", ("yes", "no"))
B1 = Variable("b1", "first badge", ("yes", "no"))
B2 = Variable("b2", "second badge", ("yes", "no"))

FIG7_COVER = (
    ((0, 0), (1, 0), (0, 1), (1, 1)),
    ((1, 1), (2, 1), (1, 2), (2, 2)),
    ((0, 0), (0, 2), (2, 0)),
)


def figure7_network(seed: int = 42) -> DiscreteNetwork:
    """Generating network: identities independent except that workers car-pool.

    Only two workers converse.  Badge tables are drawn from ``seed``.
    """
    rng = np.random.default_rng(seed)
    a = rng.dirichlet(np.ones(3) * 2.0)
    q = np.outer(a, a)
    q[2, 2] *= 3.0
    q /= q.sum()
    badge = rng.dirichlet(np.ones(2) * 2.0, size=3)
    cpts = fit_hypothesis_cpts((P1, P2), q)
    tables = {k: (c.parents, c.rows) for k, c in cpts.items()}
    conv = np.tile([0.0, 1.0], (9, 1))
    conv[8] = rng.dirichlet(np.ones(2) * 2.0)
    tables["c"] = (("h1", "h2"), conv)
    tables["b1"] = (("h1",), badge)
    tables["b2"] = (("h2",), badge)
    return network_from_tables([P1, P2, C, B1, B2], tables)


def figure7(seed: int = 42):
    """The generalized similarity network of :func:`figure7_network` on the three-edge cover."""
    from .simnet import Cover, simnet_from_network

    net = figure7_network(seed)
    hyp = HypothesisSpace.of(net, ("h1", "h2"))
    return simnet_from_network(net, hyp, Cover(hyp, FIG7_COVER))


# -- a priori factors feeding the hypothesis ---------------------------------

R1 = Variable("r1", "economics report", ("spying", "quiet"))
R2 = Variable("r2", "military report", ("spying", "quiet"))
F1 = Variable("f1", "gender", ("male", "female"))
F2 = Variable("f2", "badge", ("yes", "no"))
F3 = Variable("f3", "nervous", ("yes", "no"))


def staged_fixture():
    """(monolithic network, a-priori network, clue multinet).

    r1 -> h <- r2, then h -> f1, h -> f2, h -> f3 and f1 -> f2; every path
    from an r to an f passes through h.
    """
    # rows over (r1, r2), r2 fastest; spying reports raise P(spy)
    h_rows = [
        [0.40, 0.30, 0.30],
        [0.15, 0.30, 0.55],
        [0.15, 0.30, 0.55],
        [0.02, 0.28, 0.70],
    ]
    prior_tables = {
        "r1": ((), [[0.1, 0.9]]),
        "r2": ((), [[0.2, 0.8]]),
        "h": (("r1", "r2"), h_rows),
    }
    clue_tables = {
        "f1": (("h",), [[0.8, 0.2], [0.5, 0.5], [0.6, 0.4]]),
        # rows over (f1, h), h fastest; only workers' badges depend on gender
        "f2": (
            ("f1", "h"),
            [[0.95, 0.05], [0.1, 0.9], [0.7, 0.3], [0.95, 0.05], [0.1, 0.9], [0.9, 0.1]],
        ),
        "f3": (("h",), [[0.7, 0.3], [0.4, 0.6], [0.1, 0.9]]),
    }
    prior_net = network_from_tables([R1, R2, H3], prior_tables)
    full = network_from_tables([R1, R2, H3, F1, F2, F3], {**prior_tables, **clue_tables})

    from .inference import marginal
    from .multinet import split_network

    q = marginal(prior_net, "h").values
    clue_net = network_from_tables([H3, F1, F2, F3], {"h": ((), [q]), **clue_tables})
    hyp = HypothesisSpace((H3,))
    m = split_network(clue_net, hyp, [[(0,), (1,)], [(2,)]])
    return full, prior_net, m
