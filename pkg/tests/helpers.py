"""Shared test utilities: seeded RNG and random decorated forests.

Random forests follow the standing geometric hypotheses: orbits in the
submanifold have normal parity 1 (positive elliptic), and by default every
vertex satisfies the representability lower bound (s >= -#(outgoing edges in
the submanifold) when all its ends lie there, s >= 0 otherwise).
"""

import os
import random

from sftkit.trees import DecoratedForest, Edge, OrbitLabel, Vertex


def seeded_rng(salt: int = 0) -> random.Random:
    seed = int(os.environ.get("SFTKIT_SEED", "20240809"))
    return random.Random(seed + salt)


ORBIT_POOL = [
    OrbitLabel("in1", in_v=True, p_n=1, period=1.0),
    OrbitLabel("in2", in_v=True, p_n=1, period=2.0),
    OrbitLabel("out1", in_v=False, p_n=0, period=1.5),
    OrbitLabel("out2", in_v=False, p_n=1, period=2.5),
    OrbitLabel("out3", in_v=False, p_n=0, period=0.5),
]


def random_forest(rng: random.Random, max_vertices: int = 8, positive: bool = True,
                  in_v_bias: float = 0.45) -> DecoratedForest:
    n_vertices = rng.randint(1, max_vertices)
    n_components = rng.randint(1, min(2, n_vertices))

    vertices = []
    edges = []
    counter = {"v": 0, "e": 0}

    def fresh(kind: str) -> str:
        counter[kind] += 1
        return f"{kind}{counter[kind]}"

    def random_orbit() -> OrbitLabel:
        if rng.random() < in_v_bias:
            return rng.choice(ORBIT_POOL[:2])
        return rng.choice(ORBIT_POOL[2:])

    budget = [n_vertices]

    def grow(parent_edge_orbit: OrbitLabel) -> str:
        vid = fresh("v")
        budget[0] -= 1
        n_children = rng.randint(0, 3)
        child_edges = []
        for _ in range(n_children):
            orbit = random_orbit()
            if budget[0] > 0 and rng.random() < 0.5:
                child = grow(orbit)
                child_edges.append(Edge(fresh("e"), vid, child, orbit))
            else:
                child_edges.append(Edge(fresh("e"), vid, None, orbit))
        adjacent = [parent_edge_orbit] + [e.orbit for e in child_edges]
        ends_in_v = all(o.in_v for o in adjacent)
        if positive:
            if ends_in_v:
                bound = -sum(1 for e in child_edges if e.orbit.in_v)
                s = rng.randint(bound, bound + 3)
            else:
                s = rng.randint(0, 3)
        else:
            s = rng.randint(-2, 3)
        vertices.append(Vertex(vid, (0, 0), s, representable=True, ends_in_v=ends_in_v))
        edges.extend(child_edges)
        return vid

    for _ in range(n_components):
        if budget[0] <= 0:
            break
        root_orbit = random_orbit()
        root = grow(root_orbit)
        edges.append(Edge(fresh("e"), None, root, root_orbit))
    return DecoratedForest(vertices, edges)
