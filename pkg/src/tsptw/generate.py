"""Route-based random instance generator.

Families
--------
snn
    Windows centred on the arrival times of a second-nearest-neighbour route:
    ``a = t - U[0, omega/2]``, ``b = t + U[0, omega/2]``.
random
    Same windows around a uniformly random route; the horizon gets ``omega``
    of slack after the route returns.
beta
    Around a random route, ``a = beta * t - 40`` and ``b = t + 40``.

Locations are integer points drawn uniformly from ``[0, sigma]^2``.  Travel
times are Euclidean distances rounded half-up at ``10**-scale``.  Windows are
clipped to ``[0, T]`` where ``T`` is the time the generating route returns to
the depot (plus slack for ``random``), so that route is always feasible.

Random numbers come from SplitMix64 (Steele, Lea & Flood 2014) seeded with
the 64-bit seed; integers in ``[lo, hi]`` are drawn by rejection sampling of
``next() % span`` below the largest multiple of ``span``.  Every draw happens
in a fixed order, so any implementation of this recipe reproduces the files.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .instances import assemble, format_matrix, round_sqrt
from .model import Instance

MASK64 = (1 << 64) - 1
FAMILIES = ("snn", "random", "beta")
BETA_HALF_WIDTH = 40


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        span = hi - lo + 1
        if span <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - (1 << 64) % span
        while True:
            x = self.next()
            if x < limit:
                return lo + x % span

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    sigma: int = 100
    omega: int = 40
    beta: str = "1"
    seed: int = 0
    scale: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if not 0 <= Fraction(str(self.beta)) <= 1:
            raise ValueError("beta must lie in [0, 1]")

    @property
    def name(self) -> str:
        shape = f"b{self.beta}" if self.family == "beta" else f"w{self.omega}"
        return f"{self.family}-n{self.n}-s{self.sigma}-{shape}-seed{self.seed}"


@dataclass(frozen=True)
class WindowPlan:
    """Intermediate products of ``generate``: the generating route and unclipped windows."""

    points: list
    travel: list
    route: list  # customers in visiting order
    arrivals: list  # arrival time at route[i]
    horizon: int
    raw_open: dict
    raw_close: dict


def _round_half_up(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def _second_nearest_route(travel, n: int) -> list:
    route, current = [], 0
    left = set(range(1, n + 1))
    while left:
        ranked = sorted(left, key=lambda w: (travel[current][w], w))
        current = ranked[1] if len(ranked) > 1 else ranked[0]
        route.append(current)
        left.remove(current)
    return route


def plan(spec: GeneratorSpec) -> WindowPlan:
    rng = SplitMix64(spec.seed)
    unit = 10**spec.scale
    points = [(rng.randint(0, spec.sigma), rng.randint(0, spec.sigma)) for _ in range(spec.n + 1)]
    travel = [
        [0 if v == w else round_sqrt(Fraction((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2), spec.scale) for w, q in enumerate(points)]
        for v, p in enumerate(points)
    ]
    if spec.family == "snn":
        route = _second_nearest_route(travel, spec.n)
    else:
        route = list(range(1, spec.n + 1))
        rng.shuffle(route)
    arrivals, clock, prev = [], 0, 0
    for v in route:
        clock += travel[prev][v]
        arrivals.append(clock)
        prev = v
    horizon = clock + travel[prev][0]
    raw_open, raw_close = {}, {}
    if spec.family == "beta":
        beta = Fraction(str(spec.beta))
        for v, t in zip(route, arrivals):
            raw_open[v] = _round_half_up(beta * t) - BETA_HALF_WIDTH * unit
            raw_close[v] = t + BETA_HALF_WIDTH * unit
    else:
        half = spec.omega * unit // 2
        for v, t in zip(route, arrivals):
            raw_open[v] = t - rng.randint(0, half)
            raw_close[v] = t + rng.randint(0, half)
        if spec.family == "random":
            horizon += spec.omega * unit
    return WindowPlan(points, travel, route, arrivals, horizon, raw_open, raw_close)


def generate(spec: GeneratorSpec) -> Instance:
    p = plan(spec)
    n, T = spec.n, p.horizon
    a = [0] + [max(0, p.raw_open[v]) for v in range(1, n + 1)]
    b = [T] + [min(T, p.raw_close[v]) for v in range(1, n + 1)]
    return assemble(p.travel, a, b, spec.scale, spec.name)


def header(spec: GeneratorSpec) -> dict:
    out = {"generator": "tsptw.generate", "rng": "splitmix64", "family": spec.family, "n": spec.n, "sigma": spec.sigma}
    if spec.family == "beta":
        out["beta"] = spec.beta
    else:
        out["omega"] = spec.omega
    out["seed"] = spec.seed
    return out


def generate_text(spec: GeneratorSpec) -> str:
    """Matrix-layout file contents for ``spec``."""
    return format_matrix(generate(spec), header(spec))


def generating_route(spec: GeneratorSpec) -> tuple[int, ...]:
    """The complete route used to place the windows, feasible by construction."""
    return (0, *plan(spec).route, spec.n + 1)


def random_spec(seed: int, n: int, family: Optional[str] = None, **overrides) -> GeneratorSpec:
    """A spec with family and window parameters drawn from ``seed`` (for test suites)."""
    rng = SplitMix64(seed ^ 0x5DEECE66D)
    family = family or FAMILIES[rng.randint(0, 2)]
    params = dict(
        family=family,
        n=n,
        sigma=overrides.pop("sigma", 50),
        omega=[0, 10, 20, 40, 60, 100][rng.randint(0, 5)],
        beta=["0", "0.25", "0.5", "1"][rng.randint(0, 3)],
        seed=seed,
        scale=0,
    )
    params.update(overrides)
    return GeneratorSpec(**params)
