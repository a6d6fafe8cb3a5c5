"""Explicit desk-scale instances: generation, membership, exact counting,
distances, cluster statistics and uniform solution sampling.

Bit vectors are plain Python ints (bit i = variable i). Serialized as
lowercase hex, most significant nibble first.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

RNG_NAME = "numpy-philox4x64-10"
M_CAP = 1 << 40


class SizeError(ValueError):
    """Operation infeasible at this instance size."""


def _hex(bits: int, n: int) -> str:
    return format(bits, f"0{(n + 3) // 4}x")


def _unhex(s: str) -> int:
    return int(s, 16)


@dataclass(frozen=True)
class Subcube:
    n: int
    frozen_mask: int
    frozen_values: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        full = (1 << self.n) - 1
        if self.frozen_mask & ~full or self.frozen_values & ~full:
            raise ValueError("bit vector wider than n")
        if self.frozen_values & ~self.frozen_mask:
            raise ValueError("frozen_values set outside frozen_mask")

    @property
    def free_count(self) -> int:
        return self.n - (self.frozen_mask).bit_count()


@dataclass(frozen=True)
class Configuration:
    n: int
    bits: int

    def __post_init__(self):
        if self.bits & ~((1 << self.n) - 1):
            raise ValueError("bits wider than n")


@dataclass(frozen=True)
class Instance:
    n: int
    alpha: float
    p: float
    seed: int
    clusters: tuple[Subcube, ...]
    # numpy views of the cluster list, built lazily for vectorized queries
    _arrays: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def m(self) -> int:
        return len(self.clusters)

    def mask_value_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(masks, values) as uint64 arrays; only valid for n <= 63."""
        if "mv" not in self._arrays:
            if self.n > 63:
                raise SizeError("uint64 cluster arrays need n <= 63")
            masks = np.fromiter((c.frozen_mask for c in self.clusters),
                                dtype=np.uint64, count=self.m)
            values = np.fromiter((c.frozen_values for c in self.clusters),
                                 dtype=np.uint64, count=self.m)
            self._arrays["mv"] = (masks, values)
        return self._arrays["mv"]


def cluster_budget(n: int, alpha: float) -> int:
    """M = floor(2^((1-alpha) n)); exact power of two when the exponent is
    integral, capped at 2^40."""
    t = (1.0 - alpha) * n
    if t < 0.0:
        return 0
    ti = math.floor(t)
    frac = t - ti
    if ti > 40:
        raise SizeError(f"cluster count 2^{t:.2f} exceeds the 2^40 cap")
    if frac == 0.0:
        m = 1 << ti
    else:
        m = math.floor(math.ldexp(2.0**frac, ti))
    if m > M_CAP:
        raise SizeError(f"cluster count {m} exceeds the 2^40 cap")
    return m


def generate(n: int, alpha: float, p: float, seed: int) -> Instance:
    """Draw M i.i.d. clusters; per coordinate frozen-to-0 w.p. p/2,
    frozen-to-1 w.p. p/2, free w.p. 1-p. Deterministic per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0,1]")
    m = cluster_budget(n, alpha)
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.random((m, n))
    frozen = u < p
    ones = frozen & (u >= p / 2.0)
    clusters = []
    for row in range(m):
        mask = int.from_bytes(
            np.packbits(frozen[row], bitorder="little").tobytes(), "little")
        values = int.from_bytes(
            np.packbits(ones[row], bitorder="little").tobytes(), "little")
        clusters.append(Subcube(n, mask, values))
    return Instance(n=n, alpha=alpha, p=p, seed=seed, clusters=tuple(clusters))


def membership(config: Configuration, cube: Subcube) -> bool:
    if config.n != cube.n:
        raise ValueError("length mismatch")
    return (config.bits ^ cube.frozen_values) & cube.frozen_mask == 0


def clusters_containing(config: Configuration, instance: Instance) -> list[int]:
    return [i for i, c in enumerate(instance.clusters) if membership(config, c)]


def is_solution(config: Configuration, instance: Instance) -> bool:
    return any(membership(config, c) for c in instance.clusters)


def solution_bitmap(instance: Instance) -> np.ndarray:
    """Boolean array over all 2^n configurations; True = solution."""
    n = instance.n
    if n > 26:
        raise SizeError(f"n={n} too large for full enumeration (max 26)")
    bitmap = np.zeros(1 << n, dtype=bool)
    for cube in instance.clusters:
        offsets = np.zeros(1, dtype=np.int64)
        for i in range(n):
            if not (cube.frozen_mask >> i) & 1:
                offsets = np.concatenate([offsets, offsets + (1 << i)])
        bitmap[cube.frozen_values + offsets] = True
    return bitmap


def count_solutions_bruteforce(instance: Instance) -> int:
    return int(solution_bitmap(instance).sum())


def _intersect(a: Subcube, b: Subcube) -> Subcube | None:
    both = a.frozen_mask & b.frozen_mask
    if (a.frozen_values ^ b.frozen_values) & both:
        return None
    return Subcube(a.n, a.frozen_mask | b.frozen_mask,
                   a.frozen_values | b.frozen_values)


def count_solutions_ie(instance: Instance) -> int:
    """Inclusion-exclusion over cluster subsets. Intersections of subcubes are
    subcubes or empty, so every term is exact. Any n; needs M <= 24."""
    if instance.m > 24:
        raise SizeError(f"M={instance.m} too large for inclusion-exclusion (max 24)")

    clusters = instance.clusters

    def recurse(start: int, current: Subcube | None, sign: int) -> int:
        total = 0
        for i in range(start, len(clusters)):
            inter = clusters[i] if current is None else _intersect(current, clusters[i])
            if inter is None:
                continue
            total += sign * (1 << inter.free_count)
            total += recurse(i + 1, inter, -sign)
        return total

    return recurse(0, None, +1)


def cluster_entropy_histogram(instance: Instance) -> np.ndarray:
    """counts[k] = number of clusters with k free variables."""
    counts = np.zeros(instance.n + 1, dtype=np.int64)
    for c in instance.clusters:
        counts[c.free_count] += 1
    return counts


def pair_distance(a: Subcube, b: Subcube) -> int:
    """Minimum Hamming distance between two subcubes: contradictory freezes."""
    if a.n != b.n:
        raise ValueError("length mismatch")
    return ((a.frozen_values ^ b.frozen_values)
            & a.frozen_mask & b.frozen_mask).bit_count()


def diameter(cube: Subcube) -> int:
    return cube.free_count


def overlap(a: Configuration, b: Configuration) -> float:
    if a.n != b.n:
        raise ValueError("length mismatch")
    return (a.n - 2 * (a.bits ^ b.bits).bit_count()) / a.n


def sample_solution(instance: Instance, rng: np.random.Generator) -> Configuration:
    """Exactly uniform over the solution set.

    Cluster chosen with probability proportional to its size, point uniform in
    the cluster, accepted with probability 1/(number of containing clusters).
    """
    if instance.m == 0:
        raise ValueError("unsat instance: no clusters")
    sizes = np.array([2.0 ** c.free_count for c in instance.clusters])
    probs = sizes / sizes.sum()
    n = instance.n
    while True:
        idx = rng.choice(instance.m, p=probs)
        cube = instance.clusters[idx]
        fill = int(rng.integers(0, 1 << 63, dtype=np.uint64)) if n <= 63 else \
            int.from_bytes(rng.bytes((n + 7) // 8), "little")
        bits = cube.frozen_values | (fill & ~cube.frozen_mask & ((1 << n) - 1))
        config = Configuration(n, bits)
        k = len(clusters_containing(config, instance))
        if k == 1 or rng.random() < 1.0 / k:
            return config


def to_json(instance: Instance) -> str:
    doc = {
        "n": instance.n,
        "alpha": instance.alpha,
        "p": instance.p,
        "seed": instance.seed,
        "rng": RNG_NAME,
        "clusters": [{"mask": _hex(c.frozen_mask, instance.n),
                      "values": _hex(c.frozen_values, instance.n)}
                     for c in instance.clusters],
    }
    return json.dumps(doc, indent=None, separators=(",", ":"))


def from_json(text: str) -> Instance:
    doc = json.loads(text)
    n = doc["n"]
    clusters = tuple(Subcube(n, _unhex(c["mask"]), _unhex(c["values"]))
                     for c in doc["clusters"])
    return Instance(n=n, alpha=doc["alpha"], p=doc["p"], seed=doc["seed"],
                    clusters=clusters)
