#!/usr/bin/env python3
"""Generate a synthetic single-source looped network of SP-archive scale.

A random spanning tree of a jittered rows x cols grid plus extra grid edges
until the requested link count is reached. Deterministic for a given seed.

    python3 tools/gen_sp_network.py --rows 10 --cols 15 --links 200 --seed 42 \
        > data/sp_synthetic.json
"""

import argparse
import json
import random


def build(rows, cols, links, seed, name):
    rng = random.Random(seed)
    n = rows * cols
    pos = {}
    for r in range(rows):
        for c in range(cols):
            pos[r * cols + c] = (c * 400.0 + rng.uniform(-60, 60), r * 400.0 + rng.uniform(-60, 60))

    grid = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                grid.append((v, v + 1))
            if r + 1 < rows:
                grid.append((v, v + cols))
    if not n - 1 <= links <= len(grid):
        raise SystemExit(f"links must lie in [{n - 1}, {len(grid)}]")

    # Random spanning tree (randomized Kruskal), then random extra edges.
    rng.shuffle(grid)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen, rest = [], []
    for a, b in grid:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            chosen.append((a, b))
        else:
            rest.append((a, b))
    chosen += rest[: links - len(chosen)]
    chosen.sort()

    source = 0
    nodes = []
    for v in range(n):
        if v == source:
            nodes.append({"id": f"n{v:03d}", "elevation": 120.0, "demand": 0.0,
                          "min_pressure": 0.0, "source": True})
        else:
            nodes.append({"id": f"n{v:03d}", "elevation": round(rng.uniform(0.0, 25.0), 2),
                          "demand": round(rng.uniform(0.005, 0.03), 4),
                          "min_pressure": 25.0, "source": False})
    total = sum(x["demand"] for x in nodes)

    out_links = []
    for k, (a, b) in enumerate(chosen):
        (xa, ya), (xb, yb) = pos[a], pos[b]
        length = round(((xa - xb) ** 2 + (ya - yb) ** 2) ** 0.5, 1)
        out_links.append({"id": f"p{k:03d}", "from": f"n{a:03d}", "to": f"n{b:03d}",
                          "length": length})

    catalog = [
        {"diameter": 0.1016, "roughness": 130.0, "unit_cost": 11.6},
        {"diameter": 0.1524, "roughness": 130.0, "unit_cost": 19.8},
        {"diameter": 0.2032, "roughness": 130.0, "unit_cost": 29.2},
        {"diameter": 0.254, "roughness": 130.0, "unit_cost": 38.9},
        {"diameter": 0.3048, "roughness": 130.0, "unit_cost": 45.73},
        {"diameter": 0.4064, "roughness": 130.0, "unit_cost": 70.4},
        {"diameter": 0.508, "roughness": 130.0, "unit_cost": 98.38},
        {"diameter": 0.6096, "roughness": 130.0, "unit_cost": 129.33},
    ]
    return {
        "name": name,
        "units": "SI",
        "nodes": nodes,
        "links": out_links,
        "catalog": catalog,
        "bounds": {"flow_min": 0.0, "flow_max": round(total + 0.05, 3)},
        "constants": {"hw_constant": 10.68},
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rows", type=int, default=10)
    p.add_argument("--cols", type=int, default=15)
    p.add_argument("--links", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--name", default="sp_synthetic")
    a = p.parse_args()
    print(json.dumps(build(a.rows, a.cols, a.links, a.seed, a.name), indent=2))


if __name__ == "__main__":
    main()
