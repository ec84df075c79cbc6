"""Quasi-random sampling of magic-simplex families and streaming region counts.

Points come from the Roberts additive recurrence
``x_n = frac(alpha0 + (n + 1) * g)`` with ``g_j = phi**-j`` and ``phi`` the real
root of ``x**(dim+1) = x + 1``.  Cube points are mapped onto simplices by
sorted spacings, which is exactly measure preserving.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .regions import FAMILIES, StateBatch, check_family, evaluate, is_slow, parse_expr
from .simplex import horodecki_Q

CHUNK = 250_000
PROGRESS_EVERY = 1_000_000


@lru_cache(maxsize=None)
def generalized_golden_ratio(dim: int) -> float:
    """Unique real root greater than one of ``x**(dim+1) = x + 1``."""
    if dim < 1:
        raise ValueError("dim must be positive")
    return brentq(lambda x: x ** (dim + 1) - x - 1.0, 1.0, 2.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)


@lru_cache(maxsize=None)
def roberts_generator(dim: int) -> np.ndarray:
    g = generalized_golden_ratio(dim) ** -np.arange(1, dim + 1, dtype=float)
    g.setflags(write=False)
    return g


@dataclass(frozen=True)
class RobertsConfig:
    dim: int
    alpha0: float = 0.5
    start_index: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not 0.0 <= self.alpha0 < 1.0:
            raise ValueError(f"alpha0 must lie in [0, 1), got {self.alpha0}")
        if self.start_index < 0:
            raise ValueError("start_index must be nonnegative")


def roberts_points(cfg: RobertsConfig, n0: int, n1: int) -> np.ndarray:
    """Points with indices ``start_index + [n0, n1)``, shape ``(n1 - n0, dim)``."""
    if n0 < 0 or n1 < n0:
        raise ValueError(f"bad index range [{n0}, {n1})")
    n = np.arange(cfg.start_index + n0, cfg.start_index + n1, dtype=np.float64) + 1.0
    # reduce n*g first so alpha0 is added to a number in [0, 1)
    return np.mod(cfg.alpha0 + np.mod(np.outer(n, roberts_generator(cfg.dim)), 1.0), 1.0)


def roberts_point(cfg: RobertsConfig, n: int) -> np.ndarray:
    return roberts_points(cfg, n, n + 1)[0]


def cube_to_simplex(u) -> np.ndarray:
    """Spacings of the sorted coordinates: uniform cube -> uniform ``{x >= 0, sum x <= 1}``."""
    u = np.asarray(u, dtype=float)
    s = np.sort(u, axis=-1)
    return np.diff(s, axis=-1, prepend=0.0)


_HL_SCALE = {3: np.array([1.0, 1.0 / 3.0, 0.5]), 4: np.array([1.0, 0.25, 0.25, 1.0 / 3.0])}


def family_dim(family: str) -> int:
    if family == "horodecki":
        return 1
    d, kind = FAMILIES[family]
    if kind == "hl":
        return len(_HL_SCALE[d])
    return d * d - 1


def sample_hl_Q(d: int, cfg: RobertsConfig, n0: int, n1: int | None = None) -> np.ndarray:
    """Uniform Q-points of the HL density polytope for indices ``[n0, n1)``."""
    if d not in _HL_SCALE:
        raise ValueError(f"HL family needs d in (3, 4), got {d}")
    if cfg.dim != len(_HL_SCALE[d]):
        raise ValueError(f"d={d} needs a {len(_HL_SCALE[d])}-dimensional sequence")
    n1 = n0 + 1 if n1 is None else n1
    return cube_to_simplex(roberts_points(cfg, n0, n1)) * _HL_SCALE[d]


def sample_full_c(d: int, cfg: RobertsConfig, n0: int, n1: int | None = None) -> np.ndarray:
    """Uniform Bell weights on the full magic simplex, shape ``(n, d, d)``."""
    if d not in (3, 4):
        raise ValueError(f"full simplex sampling supports d in (3, 4), got {d}")
    if cfg.dim != d * d - 1:
        raise ValueError(f"d={d} needs a {d * d - 1}-dimensional sequence")
    n1 = n0 + 1 if n1 is None else n1
    x = cube_to_simplex(roberts_points(cfg, n0, n1))
    last = np.clip(1.0 - x.sum(axis=-1, keepdims=True), 0.0, None)
    return np.concatenate([x, last], axis=-1).reshape(-1, d, d)


def sample_batch(family: str, cfg: RobertsConfig, n0: int, n1: int, dense: bool = False) -> StateBatch:
    if family == "horodecki":
        lam = 5.0 * roberts_points(cfg, n0, n1)[:, 0]
        return StateBatch(family, Q=horodecki_Q(lam), lam=lam, dense=dense)
    d, kind = FAMILIES[family]
    if kind == "hl":
        return StateBatch(family, Q=sample_hl_Q(d, cfg, n0, n1), dense=dense)
    return StateBatch(family, c=sample_full_c(d, cfg, n0, n1), dense=dense)


# ---------------------------------------------------------------------------


@dataclass
class EstimateTable:
    family: str
    regions: list[str]
    hits: list[int]
    total: int
    alpha0: float
    start_index: int
    n0: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def index_range(self) -> tuple[int, int]:
        return self.start_index + self.n0, self.start_index + self.n0 + self.total

    @property
    def estimates(self) -> list[float]:
        return [h / self.total for h in self.hits]

    def __getitem__(self, region: str) -> float:
        key = str(parse_expr(region))
        return self.hits[self.regions.index(key)] / self.total

    def hit_count(self, region: str) -> int:
        return self.hits[self.regions.index(str(parse_expr(region)))]

    def merge(self, other: "EstimateTable") -> "EstimateTable":
        """Combine counts from an adjacent index range of the same sequence."""
        if (self.family, self.regions, self.alpha0, self.start_index) != (
            other.family,
            other.regions,
            other.alpha0,
            other.start_index,
        ):
            raise ValueError("tables come from different runs")
        a, b = sorted((self, other), key=lambda t: t.n0)
        if a.n0 + a.total != b.n0:
            raise ValueError("index ranges are not adjacent")
        return EstimateTable(
            self.family,
            list(self.regions),
            [x + y for x, y in zip(a.hits, b.hits)],
            a.total + b.total,
            self.alpha0,
            self.start_index,
            a.n0,
            dict(self.meta),
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["estimates"] = self.estimates
        out["index_range"] = list(self.index_range)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EstimateTable":
        keys = ("family", "regions", "hits", "total", "alpha0", "start_index", "n0", "meta")
        return cls(**{k: data[k] for k in keys if k in data})

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "EstimateTable":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["region", "hits", "total", "estimate"])
        for r, h in zip(self.regions, self.hits):
            w.writerow([r, h, self.total, repr(h / self.total)])
        return buf.getvalue()


def _count(job) -> tuple[int, list[int]]:
    family, exprs, cfg, n0, n1, dense = job
    batch = sample_batch(family, cfg, n0, n1, dense)
    return n1 - n0, [int(np.count_nonzero(m)) for m in evaluate(exprs, batch)]


def _blocks(n: int, chunk: int):
    return [(s, min(n, s + chunk)) for s in range(0, n, chunk)]


def estimate(
    regions,
    family: str,
    n: int,
    *,
    alpha0: float = 0.5,
    start_index: int = 0,
    n0: int = 0,
    slow: bool = True,
    dense: bool = False,
    workers: int = 1,
    chunk: int = CHUNK,
    progress=None,
) -> EstimateTable:
    """Count hits of each region over ``n`` quasi-random states of ``family``.

    Indices ``start_index + [n0, n0 + n)`` of the Roberts sequence are used.
    The range is split into fixed blocks of ``chunk`` points regardless of
    ``workers``, so counts are identical for any worker count.

    Parameters
    ----------
    regions : list of str or RegionExpr
    family : {'hl3', 'hl4', 'full3', 'full4', 'horodecki'}
    slow : bool
        If False, refuse regions that need spectral or realignment work.
    progress : callable, optional
        Called with the running table every ``PROGRESS_EVERY`` samples.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    exprs = [parse_expr(r) for r in regions]
    if not exprs:
        raise ValueError("no regions requested")
    for e in exprs:
        check_family(e, family)
        if not slow and is_slow(e, family):
            raise ValueError(f"region {e} needs the slow lane for family {family}")
    cfg = RobertsConfig(family_dim(family), alpha0, start_index)
    names = [str(e) for e in exprs]
    jobs = [(family, exprs, cfg, n0 + a, n0 + b, dense) for a, b in _blocks(n, chunk)]

    hits = [0] * len(exprs)
    done = 0
    next_report = PROGRESS_EVERY

    def absorb(res):
        nonlocal done, next_report
        m, h = res
        done += m
        for i, v in enumerate(h):
            hits[i] += v
        if progress is not None and done >= next_report:
            progress(EstimateTable(family, names, list(hits), done, alpha0, start_index, n0))
            while next_report <= done:
                next_report += PROGRESS_EVERY

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_count, jobs):
                absorb(res)
    else:
        for job in jobs:
            absorb(_count(job))
    return EstimateTable(family, names, hits, n, alpha0, start_index, n0)


def default_workers() -> int:
    env = os.environ.get("BOUND_ATLAS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            print(f"ignoring BOUND_ATLAS_THREADS={env!r}", file=sys.stderr)
    return 1
