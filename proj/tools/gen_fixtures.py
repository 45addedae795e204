"""Writes the network fixtures under data/.

    python3 tools/gen_fixtures.py data
"""

import json
import sys

def grid(n, entry_len=150.0, inner_len=150.0, exit_len=100.0, speed=13.9, row_w=3.0, col_w=1.0, turn_w=0.5):
    """One-way grid: rows flow east, columns flow south."""
    lanes, inter, routes = [], [], []
    def node(r, c): return f"J{r}{c}"
    def lane(i, a, b, L):
        lanes.append({"id": i, "length": L, "free_speed": speed, "from_node": a, "to_node": b})
    incoming = {node(r, c): [None, None] for r in range(n) for c in range(n)}
    row_lanes, col_lanes = {}, {}
    for r in range(n):
        seq = []
        prev = f"W{r}"
        for c in range(n):
            lid = f"{prev}_{node(r,c)}"
            lane(lid, prev, node(r, c), entry_len if c == 0 else inner_len)
            incoming[node(r, c)][0] = lid
            seq.append(lid); prev = node(r, c)
        lid = f"{prev}_E{r}"; lane(lid, prev, f"E{r}", exit_len); seq.append(lid)
        row_lanes[r] = seq
    for c in range(n):
        seq = []
        prev = f"N{c}"
        for r in range(n):
            lid = f"{prev}_{node(r,c)}"
            lane(lid, prev, node(r, c), entry_len if r == 0 else inner_len)
            incoming[node(r, c)][1] = lid
            seq.append(lid); prev = node(r, c)
        lid = f"{prev}_S{c}"; lane(lid, prev, f"S{c}", exit_len); seq.append(lid)
        col_lanes[c] = seq
    for r in range(n):
        for c in range(n):
            ew, ns = incoming[node(r, c)]
            inter.append({"id": node(r, c), "incoming_lanes": [ew, ns],
                          "phases": [{"id": "EW", "green_lanes": [ew]}, {"id": "NS", "green_lanes": [ns]}],
                          "is_agent": True})
    for r in range(n):
        routes.append({"id": f"row{r}", "lanes": row_lanes[r], "weight": row_w})
    for c in range(n):
        routes.append({"id": f"col{c}", "lanes": col_lanes[c], "weight": col_w})
    # east then turn south at column c: row lanes up to node(r,c), then column lanes after node(r,c)
    for r in range(n):
        for c in range(n):
            if turn_w <= 0: continue
            rl = row_lanes[r][:c + 1]
            cl = col_lanes[c][r + 1:]
            routes.append({"id": f"row{r}_col{c}", "lanes": rl + cl, "weight": turn_w})
    return {"format": 1, "neighbor_threshold": 1, "lanes": lanes, "intersections": inter, "routes": routes}

def irregular7():
    agents = [f"G{i}" for i in range(1, 8)]
    edges = [(1, 2), (2, 3), (3, 4), (2, 5), (5, 6), (6, 7), (4, 7)]
    boundary = {1: "X1", 3: "X3", 5: "X5", 7: "X7"}
    lanes, inc = [], {a: [] for a in agents}
    def lane(a, b, L):
        lid = f"{a}_{b}"
        lanes.append({"id": lid, "length": L, "free_speed": 13.9, "from_node": a, "to_node": b})
        if b in inc: inc[b].append(lid)
        return lid
    for i, j in edges:
        lane(f"G{i}", f"G{j}", 180.0); lane(f"G{j}", f"G{i}", 180.0)
    for i, x in boundary.items():
        lane(x, f"G{i}", 150.0); lane(f"G{i}", x, 100.0)
    inter = []
    for a in agents:
        l = inc[a]
        g1, g2 = l[0::2], l[1::2]
        inter.append({"id": a, "incoming_lanes": l,
                      "phases": [{"id": "P0", "green_lanes": g1}, {"id": "P1", "green_lanes": g2}]})
    # routes between boundaries via BFS on the agent graph
    adj = {i: [] for i in range(1, 8)}
    for i, j in edges: adj[i].append(j); adj[j].append(i)
    def path(s, t):
        from collections import deque
        prev = {s: None}; q = deque([s])
        while q:
            u = q.popleft()
            for v in sorted(adj[u]):
                if v not in prev: prev[v] = u; q.append(v)
        p = [t]
        while prev[p[-1]] is not None: p.append(prev[p[-1]])
        return p[::-1]
    routes = []
    for s in boundary:
        for t in boundary:
            if s == t: continue
            p = path(s, t)
            ls = [f"{boundary[s]}_G{s}"] + [f"G{p[k]}_G{p[k+1]}" for k in range(len(p) - 1)] + [f"G{t}_{boundary[t]}"]
            routes.append({"id": f"{boundary[s]}-{boundary[t]}", "lanes": ls})
    return {"format": 1, "neighbor_threshold": 1, "lanes": lanes, "intersections": inter, "routes": routes}

if __name__ == "__main__":
    out = sys.argv[1]
    json.dump(grid(2, entry_len=1000.0, row_w=1.0, col_w=0.1, turn_w=0.05), open(f"{out}/grid2x2.json", "w"), indent=2)
    json.dump(grid(3), open(f"{out}/grid3x3.json", "w"), indent=2)
    json.dump(irregular7(), open(f"{out}/irregular7.json", "w"), indent=2)
