"""Writes helmholtz16.json: a 16 x 16 two-mode slice thresholded from a
superposition of plane waves with a common wave number (a solution of
u'' + k^2 u = 0 on the unit square), quantized to sixteenths."""
import json
import math

N = 16
K = 2.5 * math.pi
DIRECTIONS = [(1.0, 0.0), (0.6, 0.8), (-0.28, 0.96)]
PHASES = [0.3, 1.1, 2.0]


def field(x, y):
    return sum(math.cos(K * (dx * x + dy * y) + p) for (dx, dy), p in zip(DIRECTIONS, PHASES)) / len(DIRECTIONS)


rows = []
for j in range(N):
    for i in range(N):
        u = field((i + 0.5) / N, (j + 0.5) / N)
        t = min(1.0, max(0.0, 0.5 + 2.0 * u))
        q = round(16 * t)
        a = f"{q}/16" if 0 < q < 16 else q // 16
        b = f"{16 - q}/16" if 0 < q < 16 else (16 - q) // 16
        rows.append([a, b])

doc = {
    "domain": {"dim": 2, "origin": [0, 0], "lengths": [1, 1]},
    "M": 2,
    "L": 4,
    "order": "row-major",
    "alpha": rows,
}
with open("helmholtz16.json", "w") as f:
    json.dump(doc, f, separators=(",", ":"))
    f.write("\n")
