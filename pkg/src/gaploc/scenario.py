"""Problem instances: bin catalog, sites, generators, distances.

A scenario bundles everything the optimizers consume: candidate bin
locations (sites) with available floor space, waste generator groups
with per-fraction daily generation rates, the purchasable bin types,
the admissible collection frequency patterns, and a dense
generator-to-site walking distance matrix together with the service
radius ``max_distance``.

Walking distances are supplied, not computed: real deployments derive
them from street networks upstream. ``euclidean_distances`` exists for
synthetic instances whose coordinates live on a plane.

Scenarios are validated on construction and immutable afterwards, so
they can be shared freely between concurrent solver runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaError, UnknownId, ValidationError


@dataclass(frozen=True)
class BinType:
    """A purchasable bin model: price, capacity and ground footprint."""

    id: str
    cost: float          # monetary units per installed bin
    capacity: float      # m3 of waste it holds
    footprint: float     # m2 of site space it occupies


@dataclass(frozen=True)
class Site:
    """A candidate accumulation point with limited floor space."""

    id: str
    space: float                                  # available m2
    lonlat: tuple[float, float] | None = None     # optional, for export


@dataclass(frozen=True)
class GeneratorGroup:
    """A demand aggregate (block, sector) with per-fraction daily rates."""

    id: str
    rates: tuple[tuple[str, float], ...]          # (fraction id, m3/day)
    lonlat: tuple[float, float] | None = None

    def rate(self, fraction: str) -> float:
        for frac, value in self.rates:
            if frac == fraction:
                return value
        return 0.0

    @property
    def total_rate(self) -> float:
        return sum(value for _, value in self.rates)


@dataclass(frozen=True)
class FrequencyPattern:
    """A visit cadence; ``days`` is the period between collections."""

    id: str
    days: int


@dataclass(frozen=True)
class Scenario:
    sites: tuple[Site, ...]
    generators: tuple[GeneratorGroup, ...]
    bins: tuple[BinType, ...]
    fractions: tuple[str, ...]
    frequencies: tuple[FrequencyPattern, ...]
    max_distance: float
    distances: np.ndarray                      # |P| x |I| meters
    site_distances: np.ndarray | None = field(default=None)

    def __post_init__(self):
        d = np.array(self.distances, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "distances", d)
        if self.site_distances is not None:
            sd = np.array(self.site_distances, dtype=float)
            sd.setflags(write=False)
            object.__setattr__(self, "site_distances", sd)

    # -- index helpers -------------------------------------------------

    @cached_property
    def site_index(self) -> dict[str, int]:
        return {s.id: k for k, s in enumerate(self.sites)}

    @cached_property
    def generator_index(self) -> dict[str, int]:
        return {g.id: k for k, g in enumerate(self.generators)}

    @cached_property
    def bin_index(self) -> dict[str, int]:
        return {b.id: k for k, b in enumerate(self.bins)}

    @cached_property
    def fraction_index(self) -> dict[str, int]:
        return {h: k for k, h in enumerate(self.fractions)}

    @cached_property
    def frequency_index(self) -> dict[str, int]:
        return {y.id: k for k, y in enumerate(self.frequencies)}

    @cached_property
    def rates_matrix(self) -> np.ndarray:
        """b[p, h] = daily generation of fraction h by generator p (m3)."""
        b = np.zeros((len(self.generators), len(self.fractions)))
        for p, gen in enumerate(self.generators):
            for frac, value in gen.rates:
                b[p, self.fraction_index[frac]] = value
        b.setflags(write=False)
        return b

    @cached_property
    def periods(self) -> np.ndarray:
        """a[y] = days between visits for frequency pattern y."""
        a = np.array([f.days for f in self.frequencies], dtype=float)
        a.setflags(write=False)
        return a

    # -- queries --------------------------------------------------------

    def reachable_sites(self, generator_id: str) -> tuple[str, ...]:
        """Site ids within the service radius of one generator.

        Returned in site order; compare as a set when order is
        irrelevant.
        """
        p = self.generator_index.get(generator_id)
        if p is None:
            raise UnknownId("unknown generator id %r" % generator_id)
        row = self.distances[p]
        return tuple(
            s.id for k, s in enumerate(self.sites) if row[k] <= self.max_distance
        )

    def reachable_mask(self) -> np.ndarray:
        """Boolean |P| x |I| matrix of pairs within the service radius."""
        return self.distances <= self.max_distance


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------

_DISTANCE_ORDER = "generators x sites"


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise SchemaError("missing field %r in %s" % (key, where))
    return obj[key]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError("field %s must be a number, got %r" % (where, value))
    return float(value)


def _lonlat(value, where: str):
    if value is None:
        return None
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        raise SchemaError("field %s must be [lon, lat]" % where)
    return (float(value[0]), float(value[1]))


def scenario_from_dict(doc: dict) -> Scenario:
    """Build and validate a Scenario from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise SchemaError("scenario document must be a JSON object")

    fractions = tuple(_require(doc, "fractions", "scenario"))
    if not all(isinstance(h, str) for h in fractions):
        raise SchemaError("field fractions must be a list of strings")

    sites = tuple(
        Site(
            id=str(_require(s, "id", "sites[%d]" % k)),
            space=_number(_require(s, "space_m2", "sites[%d]" % k),
                          "sites[%d].space_m2" % k),
            lonlat=_lonlat(s.get("lonlat"), "sites[%d].lonlat" % k),
        )
        for k, s in enumerate(_require(doc, "sites", "scenario"))
    )
    generators = []
    for k, g in enumerate(_require(doc, "generators", "scenario")):
        rates = _require(g, "rates", "generators[%d]" % k)
        if not isinstance(rates, dict):
            raise SchemaError("generators[%d].rates must be an object" % k)
        generators.append(
            GeneratorGroup(
                id=str(_require(g, "id", "generators[%d]" % k)),
                rates=tuple(
                    (str(frac), _number(v, "generators[%d].rates[%s]" % (k, frac)))
                    for frac, v in rates.items()
                ),
                lonlat=_lonlat(g.get("lonlat"), "generators[%d].lonlat" % k),
            )
        )
    bins = tuple(
        BinType(
            id=str(_require(b, "id", "bins[%d]" % k)),
            cost=_number(_require(b, "cost", "bins[%d]" % k), "bins[%d].cost" % k),
            capacity=_number(_require(b, "cap_m3", "bins[%d]" % k),
                             "bins[%d].cap_m3" % k),
            footprint=_number(_require(b, "space_m2", "bins[%d]" % k),
                              "bins[%d].space_m2" % k),
        )
        for k, b in enumerate(_require(doc, "bins", "scenario"))
    )
    frequencies = []
    for k, f in enumerate(_require(doc, "frequencies", "scenario")):
        days = _require(f, "days", "frequencies[%d]" % k)
        if isinstance(days, bool) or not isinstance(days, int):
            raise SchemaError("frequencies[%d].days must be an integer" % k)
        frequencies.append(
            FrequencyPattern(id=str(_require(f, "id", "frequencies[%d]" % k)),
                             days=days)
        )

    dist_doc = _require(doc, "distances", "scenario")
    order = _require(dist_doc, "order", "distances")
    if order != _DISTANCE_ORDER:
        raise SchemaError(
            "distances.order must be %r, got %r" % (_DISTANCE_ORDER, order)
        )
    matrix = _require(dist_doc, "matrix", "distances")
    try:
        distances = np.array(matrix, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SchemaError("distances.matrix is not a numeric matrix: %s" % exc)
    if distances.ndim != 2:
        raise SchemaError("distances.matrix must be two-dimensional")

    site_distances = None
    if "site_distances" in doc:
        try:
            site_distances = np.array(
                _require(doc["site_distances"], "matrix", "site_distances"),
                dtype=float,
            )
        except (TypeError, ValueError) as exc:
            raise SchemaError("site_distances.matrix is not numeric: %s" % exc)

    scenario = Scenario(
        sites=sites,
        generators=tuple(generators),
        bins=bins,
        fractions=fractions,
        frequencies=tuple(frequencies),
        max_distance=_number(_require(doc, "D_m", "scenario"), "D_m"),
        distances=distances,
        site_distances=site_distances,
    )
    problems = validate(scenario)
    if problems:
        raise ValidationError(problems)
    return scenario


def validate(s: Scenario) -> list[str]:
    """All domain-invariant violations, one message per problem."""
    problems = []

    def check_unique(kind, ids):
        seen = set()
        for i in ids:
            if i in seen:
                problems.append("duplicate %s id %r" % (kind, i))
            seen.add(i)

    check_unique("site", [x.id for x in s.sites])
    check_unique("generator", [x.id for x in s.generators])
    check_unique("bin", [x.id for x in s.bins])
    check_unique("fraction", s.fractions)
    check_unique("frequency", [x.id for x in s.frequencies])

    for name, seq in (("sites", s.sites), ("generators", s.generators),
                      ("bins", s.bins), ("fractions", s.fractions),
                      ("frequencies", s.frequencies)):
        if len(seq) == 0:
            problems.append("scenario has no %s" % name)

    for x in s.sites:
        if not x.space > 0:
            problems.append("site %r has non-positive space" % x.id)
    for b in s.bins:
        if not b.cost > 0:
            problems.append("bin %r has non-positive cost" % b.id)
        if not b.capacity > 0:
            problems.append("bin %r has non-positive capacity" % b.id)
        if not b.footprint > 0:
            problems.append("bin %r has non-positive footprint" % b.id)
    for f in s.frequencies:
        if f.days < 1:
            problems.append("frequency %r has period below one day" % f.id)

    known = set(s.fractions)
    for g in s.generators:
        for frac, value in g.rates:
            if frac not in known:
                problems.append(
                    "generator %r rates unknown fraction %r" % (g.id, frac)
                )
            if value < 0:
                problems.append(
                    "generator %r has negative rate for %r" % (g.id, frac)
                )
        if not any(value > 0 for _, value in g.rates):
            problems.append("generator %r generates nothing" % g.id)

    if not s.max_distance > 0:
        problems.append("service radius D_m must be positive")

    if s.distances.shape != (len(s.generators), len(s.sites)):
        problems.append(
            "distance matrix is %s, expected %s"
            % (s.distances.shape, (len(s.generators), len(s.sites)))
        )
    else:
        if not np.all(np.isfinite(s.distances)) or np.any(s.distances < 0):
            problems.append("distance matrix entries must be finite and >= 0")
        else:
            for p, g in enumerate(s.generators):
                if not np.any(s.distances[p] <= s.max_distance):
                    problems.append(
                        "generator %r has no site within %g m"
                        % (g.id, s.max_distance)
                    )

    if s.site_distances is not None:
        n = len(s.sites)
        if s.site_distances.shape != (n, n):
            problems.append(
                "site distance matrix is %s, expected %s"
                % (s.site_distances.shape, (n, n))
            )
        elif not np.all(np.isfinite(s.site_distances)) or np.any(
            s.site_distances < 0
        ):
            problems.append("site distance entries must be finite and >= 0")

    return problems


def _canonical_number(x: float):
    # Canonical JSON keeps integral values as ints so round-trips are
    # byte-stable regardless of how the source file spelled them.
    return int(x) if float(x).is_integer() and abs(x) < 1e15 else float(x)


def scenario_to_dict(s: Scenario) -> dict:
    """Canonical document form; field order is fixed."""
    doc: dict = {}
    doc["sites"] = [
        {"id": x.id, "space_m2": _canonical_number(x.space)}
        | ({"lonlat": [_canonical_number(v) for v in x.lonlat]} if x.lonlat else {})
        for x in s.sites
    ]
    doc["generators"] = [
        {"id": g.id, "rates": {h: _canonical_number(v) for h, v in g.rates}}
        | ({"lonlat": [_canonical_number(v) for v in g.lonlat]} if g.lonlat else {})
        for g in s.generators
    ]
    doc["bins"] = [
        {
            "id": b.id,
            "cost": _canonical_number(b.cost),
            "cap_m3": _canonical_number(b.capacity),
            "space_m2": _canonical_number(b.footprint),
        }
        for b in s.bins
    ]
    doc["fractions"] = list(s.fractions)
    doc["frequencies"] = [{"id": f.id, "days": f.days} for f in s.frequencies]
    doc["D_m"] = _canonical_number(s.max_distance)
    doc["distances"] = {
        "order": _DISTANCE_ORDER,
        "matrix": [[_canonical_number(v) for v in row] for row in s.distances],
    }
    if s.site_distances is not None:
        doc["site_distances"] = {
            "matrix": [
                [_canonical_number(v) for v in row] for row in s.site_distances
            ]
        }
    return doc


def scenario_to_json(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def load_scenario(path) -> Scenario:
    """Load, schema-check and validate a scenario file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("%s: %s" % (path, exc))
    return scenario_from_dict(doc)


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(scenario_to_json(s))


def fixture_path(name: str) -> Path:
    """Path of a bundled scenario fixture, e.g. ``fixture_path("T1")``."""
    return Path(__file__).parent / "fixtures" / (name + ".json")


def load_fixture(name: str) -> Scenario:
    return load_scenario(fixture_path(name))


# ---------------------------------------------------------------------------
# Synthetic instances
# ---------------------------------------------------------------------------

def euclidean_distances(a_points, b_points) -> np.ndarray:
    """Planar Euclidean distance matrix between two coordinate lists."""
    a = np.asarray(a_points, dtype=float)
    b = np.asarray(b_points, dtype=float)
    return np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])


def random_scenario(
    seed,
    n_sites=2,
    n_generators=3,
    n_fractions=1,
    n_bins=2,
    n_frequencies=2,
    capacity_rich=False,
    with_coordinates=True,
) -> Scenario:
    """Seeded synthetic instance on a planar 1 km box.

    Values are drawn from coarse grids (distances in whole tens of
    meters, rates in quarter m3) so objective values stay well
    separated, which keeps exhaustive test oracles readable.

    With ``capacity_rich`` every site can host bins covering any single
    generator and every pair is within the service radius; constructive
    heuristics are then guaranteed to serve everything as long as
    ``n_sites >= n_generators``.
    """
    rng = np.random.default_rng(seed)
    d_max = 300.0

    site_xy = rng.integers(0, 100, size=(n_sites, 2)) * 10.0
    gen_xy = rng.integers(0, 100, size=(n_generators, 2)) * 10.0

    sites = tuple(
        Site(
            id="i%d" % (k + 1),
            space=float(rng.choice([4, 5, 6])),
            lonlat=tuple(site_xy[k]) if with_coordinates else None,
        )
        for k in range(n_sites)
    )
    fractions = tuple("h%d" % (k + 1) for k in range(n_fractions))
    generators = []
    for p in range(n_generators):
        rates = rng.choice([0.25, 0.5, 0.75, 1.0], size=n_fractions)
        generators.append(
            GeneratorGroup(
                id="g%d" % (p + 1),
                rates=tuple(zip(fractions, (float(v) for v in rates))),
                lonlat=tuple(gen_xy[p]) if with_coordinates else None,
            )
        )

    catalog = [(1000, 1.0, 1.0), (2000, 2.0, 2.0), (3000, 3.0, 3.0),
               (1500, 1.5, 1.0), (2600, 2.5, 2.0)]
    picks = rng.choice(len(catalog), size=n_bins, replace=False)
    bins = tuple(
        BinType(id="j%d" % (k + 1), cost=float(catalog[c][0]),
                capacity=float(catalog[c][1]), footprint=float(catalog[c][2]))
        for k, c in enumerate(sorted(picks))
    )

    frequencies = tuple(
        FrequencyPattern(id="y%d" % (d), days=d)
        for d in range(1, n_frequencies + 1)
    )

    # Distances in whole tens of meters. Everything reachable by
    # construction; without capacity_rich a few pairs are pushed beyond
    # the radius while keeping one reachable site per generator.
    distances = rng.integers(2, 29, size=(n_generators, n_sites)) * 10.0
    if not capacity_rich:
        beyond = rng.random(distances.shape) < 0.15
        for p in range(n_generators):
            reachable = np.flatnonzero(~beyond[p])
            if reachable.size == 0:
                beyond[p, rng.integers(n_sites)] = False
        distances = np.where(beyond, d_max + 100.0, distances)

    if capacity_rich:
        # Grow site space until the largest single generator fits in
        # the cheapest covering configuration at every site.
        need = max(g.total_rate for g in generators)
        per_m2 = max(b.capacity / b.footprint for b in bins)
        min_space = float(np.ceil(need / per_m2 * 2))
        sites = tuple(
            Site(id=x.id, space=max(x.space, min_space), lonlat=x.lonlat)
            for x in sites
        )

    return Scenario(
        sites=sites,
        generators=tuple(generators),
        bins=bins,
        fractions=fractions,
        frequencies=frequencies,
        max_distance=d_max,
        distances=distances,
    )
