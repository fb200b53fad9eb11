"""Linear green paths, crossing schedules, maximal green sequences and the
relative Harder-Narasimhan machinery.

A linear path gamma_t = h + t*k (k strictly positive) crosses the hyperplane
of an object X at t_X = -(h.dim X)/(k.dim X); since gamma is linear the
crossing time of a direct sum is the k-weighted average of its components'.
Relative stability of a brick compares its crossing time with those of its
weakly admissible quotients, and every such decision is cross-validated
against exact membership of the crossing point in the wall interior.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction

from ghostpic.catalog import ModuleClass, ModuleSum
from ghostpic.errors import (
    CatalogError,
    GuardExceededError,
    InternalConsistencyError,
    NonGenericPathError,
)
from ghostpic.geometry import Vec, as_fracvec, dot
from ghostpic.stability import ChamberGraph, chamber_graph, locate_chamber, wall

MGS_GUARD = 10**6


@dataclass(frozen=True)
class LinearPath:
    h: Vec
    k: Vec

    def __post_init__(self):
        object.__setattr__(self, "h", as_fracvec(self.h))
        object.__setattr__(self, "k", as_fracvec(self.k))
        if len(self.h) != len(self.k):
            raise CatalogError("h and k must have equal length")
        if any(x <= 0 for x in self.k):
            raise CatalogError("all coordinates of k must be strictly positive")

    def at(self, t) -> Vec:
        t = Fraction(t)
        return tuple(a + t * b for a, b in zip(self.h, self.k))

    def crossing_time(self, dim) -> Fraction:
        return Fraction(-dot(self.h, dim), dot(self.k, dim))


@dataclass(frozen=True)
class Event:
    t: Fraction
    kind: str  # "brick" or "ghost"
    label: str
    stable: bool
    concurrent: bool = False


@dataclass(frozen=True)
class CrossingSchedule:
    path: LinearPath
    events: tuple[Event, ...]

    def stable_labels(self) -> list[str]:
        return [e.label for e in self.events if e.stable]


def _proportional(a, b) -> bool:
    n = len(a)
    return all(a[i] * b[j] == a[j] * b[i] for i in range(n) for j in range(n))


def check_generic(path: LinearPath, cls: ModuleClass, extra_dims=()) -> None:
    """Reject paths that cross two non-proportional relevant hyperplanes at
    the same time.  Relevant objects are the class bricks, every weakly
    admissible quotient sum, and any extra dims the caller supplies."""
    dims: dict[tuple, str] = {}
    for b in cls.bricks:
        dims.setdefault(cls.dim_of(b), b)
    for b in cls.bricks:
        for p in cls.weakly_admissible_quotients(b):
            dims.setdefault(cls.dim_of(p.quot), repr(p.quot))
    for d, name in extra_dims:
        dims.setdefault(tuple(d), name)
    by_time: dict[Fraction, tuple[tuple, str]] = {}
    for d, name in sorted(dims.items()):
        t = path.crossing_time(d)
        if t in by_time:
            other_d, other_name = by_time[t]
            if not _proportional(d, other_d):
                raise NonGenericPathError(other_name, name, t)
        else:
            by_time[t] = (d, name)


def is_relatively_stable(cls: ModuleClass, path: LinearPath, m: str) -> bool:
    """True iff t_m exceeds the crossing time of every proper weakly
    admissible quotient; cross-validated against membership of the crossing
    point in the wall interior."""
    dim_m = cls.dim_of(m)
    t_m = path.crossing_time(dim_m)
    by_times = True
    for p in cls.weakly_admissible_quotients(m):
        dim_q = cls.dim_of(p.quot)
        t_q = path.crossing_time(dim_q)
        if t_q == t_m and not _proportional(dim_q, dim_m):
            raise NonGenericPathError(m, repr(p.quot), t_m)
        if t_q >= t_m:
            by_times = False
            break
    by_wall = wall(cls, m).cone.interior().contains(path.at(t_m))
    if by_times != by_wall:
        raise InternalConsistencyError(
            f"stability of {m}: quotient-time criterion ({by_times}) disagrees "
            f"with wall-interior membership ({by_wall})"
        )
    return by_times


def crossing_schedule(
    cls: ModuleClass,
    path: LinearPath,
    include_ghosts: bool = False,
    ghost_kinds: tuple[str, ...] | None = None,
) -> CrossingSchedule:
    """Time-sorted crossing events of all class bricks (and, optionally,
    ghosts) with their stability flags.  By default ghost events cover
    subobject and quotient ghosts; pass ghost_kinds to change that."""
    if include_ghosts:
        from ghostpic.ghosts import ghost_events

        kwargs = {} if ghost_kinds is None else {"kinds": ghost_kinds}
        ghost_evts = ghost_events(cls, path, **kwargs)  # validates genericity itself
    else:
        check_generic(path, cls)
        ghost_evts = []
    events = [
        Event(
            t=path.crossing_time(cls.dim_of(b)),
            kind="brick",
            label=b,
            stable=is_relatively_stable(cls, path, b),
        )
        for b in cls.bricks
    ]
    events.extend(ghost_evts)
    events.sort(key=lambda e: (e.t, 0 if e.kind == "brick" else 1))
    return CrossingSchedule(path, tuple(events))


def linear_mgs(cls: ModuleClass, path: LinearPath) -> list[str]:
    """The relatively stable bricks in crossing order."""
    schedule = crossing_schedule(cls, path)
    out = [e.label for e in schedule.events if e.stable]
    for m in out:
        point = path.at(path.crossing_time(cls.dim_of(m)))
        if not wall(cls, m).cone.interior().contains(point):
            raise InternalConsistencyError(f"stable brick {m} missed int D({m})")
    return out


# ---------------------------------------------------------------------------
# Maximal green sequences via the chamber graph.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mgs:
    walls: tuple[str, ...]
    chamber_ids: tuple[int, ...]


def _mgs_guard() -> int:
    raw = os.environ.get("GHOSTPIC_GUARD")
    return int(raw) if raw else MGS_GUARD


def count_mgs(graph: ChamberGraph) -> int:
    counts = {graph.sink: 1}
    order = sorted(
        graph.chambers, key=lambda c: len(c.label.bricks), reverse=True
    )  # labels grow along edges, so this is a reverse topological order
    for c in order:
        if c.id == graph.sink:
            continue
        counts[c.id] = sum(counts[e.dst] for e in graph.out_edges(c.id))
    return counts.get(graph.source, 0)


def enumerate_mgs(cls: ModuleClass, graph: ChamberGraph | None = None) -> list[Mgs]:
    """All source-to-sink paths of the chamber graph, as ordered wall-brick
    lists, in lexicographic order of the wall name sequences."""
    if graph is None:
        graph = chamber_graph(cls)
    total = count_mgs(graph)
    if total > _mgs_guard():
        raise GuardExceededError(
            f"{total} maximal green sequences exceed the enumeration guard", count=total
        )
    out: list[Mgs] = []
    stack: list[tuple[int, tuple[str, ...], tuple[int, ...]]] = [
        (graph.source, (), (graph.source,))
    ]

    def expand(cid, walls, chain):
        if cid == graph.sink:
            out.append(Mgs(walls, chain))
            return
        for e in sorted(graph.out_edges(cid), key=lambda e: (e.wall_brick, e.dst)):
            expand(e.dst, walls + (e.wall_brick,), chain + (e.dst,))

    expand(graph.source, (), (graph.source,))
    out.sort(key=lambda m: m.walls)
    return out


def resolve_mgs(graph: ChamberGraph, walls: list[str]) -> Mgs:
    """Reconstruct the chamber path of a wall-name sequence, validating that
    it is a source-to-sink path of the graph."""
    if len(set(walls)) != len(walls):
        raise CatalogError("maximal green sequences have pairwise distinct bricks")
    cid = graph.source
    chain = [cid]
    for w in walls:
        nxt = [e for e in graph.out_edges(cid) if e.wall_brick == w]
        if len(nxt) != 1:
            raise CatalogError(
                f"{walls} is not a maximal green sequence: no unique crossing of "
                f"D({w}) from chamber {cid}"
            )
        cid = nxt[0].dst
        chain.append(cid)
    if cid != graph.sink:
        raise CatalogError(f"{walls} does not reach the all-positive chamber")
    return Mgs(tuple(walls), tuple(chain))


# ---------------------------------------------------------------------------
# Relative Hom-orthogonality and maximality.
# ---------------------------------------------------------------------------


def weakly_admissible_morphism_witness(cls: ModuleClass, x: str, y: str):
    """An image witnessing a nonzero weakly admissible morphism x -> y, or
    None.  Such a morphism exists iff some weakly admissible quotient of x is
    isomorphic to a submodule of y whose cokernel lies in the class."""
    catalog = cls.catalog
    images = set()
    for p in catalog.pairs(x):
        if p.quot and cls.in_add(p.quot) and cls.in_filt(p.sub):
            images.add(p.quot)
    for q in catalog.pairs(y):
        if q.sub and q.sub in images and cls.in_add(q.quot):
            return q.sub
    return None


def check_relative_hom_orthogonality(cls: ModuleClass, seq: list[str]):
    """(ok, witness): ok iff no nonzero weakly admissible morphism points
    forward in the sequence; on failure witness is (j, k, image)."""
    for j in range(len(seq)):
        for k in range(j + 1, len(seq)):
            image = weakly_admissible_morphism_witness(cls, seq[j], seq[k])
            if image is not None:
                return False, (j, k, image)
    return True, None


def check_mgs_maximality(cls: ModuleClass, mgs: Mgs) -> bool:
    """True iff no class brick can be inserted anywhere in the sequence
    without breaking relative Hom-orthogonality."""
    seq = list(mgs.walls)
    missing = [b for b in cls.bricks if b not in mgs.walls]
    for x in missing:
        for slot in range(len(seq) + 1):
            candidate = seq[:slot] + [x] + seq[slot:]
            ok, _ = check_relative_hom_orthogonality(cls, candidate)
            if ok:
                return False
    return True


# ---------------------------------------------------------------------------
# Harder-Narasimhan stratification.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HnFiltration:
    mgs: Mgs
    layers: tuple[tuple[int, int], ...]  # (1-based position in the MGS, multiplicity)
    witnesses: tuple[tuple[str, int, str], ...]  # (component, layer, pair tag)


def hn_stratification(cls: ModuleClass, graph: ChamberGraph, mgs: Mgs, x: ModuleSum) -> HnFiltration:
    """HN filtration of x along an MGS, following the greedy recipe: strip
    the wall brick of the least chamber whose label contains the component,
    then recurse on the kernel."""
    if cls.flags.extension_closed is not True:
        raise CatalogError("HN stratification requires an extension-closed class")
    if not cls.in_add(x):
        raise CatalogError(f"{x} is not an object of the class")
    labels = [graph.chamber(cid).label for cid in mgs.chamber_ids]
    catalog = cls.catalog
    layer_mult: dict[int, int] = {}
    witnesses: list[tuple[str, int, str]] = []

    def strip(component: str):
        k = next(
            (i for i in range(len(labels)) if component in labels[i]),
            None,
        )
        if k is None or k == 0:
            raise InternalConsistencyError(
                f"{component} semistable in no chamber of the green sequence"
            )
        target = ModuleSum([mgs.walls[k - 1]])
        pair = next(
            (
                p
                for p in catalog.pairs(component)
                if p.quot == target and cls.in_filt(p.sub)
            ),
            None,
        )
        if pair is None:
            raise InternalConsistencyError(
                f"missing epimorphism {component} ->> {mgs.walls[k - 1]}"
            )
        layer_mult[k] = layer_mult.get(k, 0) + 1
        witnesses.append((component, k, pair.tag))
        for c in pair.sub.ids:
            strip(c)

    for c in x.ids:
        strip(c)

    layers = tuple(sorted(layer_mult.items()))
    total = [0] * cls.catalog.quiver.n
    for i, mult in layers:
        d = cls.dim_of(mgs.walls[i - 1])
        total = [a + mult * b for a, b in zip(total, d)]
    if tuple(total) != cls.dim_of(x):
        raise InternalConsistencyError("HN layers do not add up to dim(x)")
    return HnFiltration(mgs=mgs, layers=layers, witnesses=tuple(witnesses))


def filtration_exists(cls: ModuleClass, x: ModuleSum, terms: tuple[str, ...], _memo=None) -> bool:
    """Exhaustive search for a filtration of x with i-th subquotient in
    add(terms[i]), independent of the HN recipe above."""
    if _memo is None:
        _memo = {}
    key = (x, terms)
    if key in _memo:
        return _memo[key]
    if not x:
        _memo[key] = True
        return True
    if not terms:
        _memo[key] = False
        return False
    top = terms[-1]
    result = False
    seen = set()
    for sub, quot in cls.sum_subquotient_pairs(x):
        if (sub, quot) in seen:
            continue
        seen.add((sub, quot))
        if all(i == top for i in quot.ids):
            if filtration_exists(cls, sub, terms[:-1], _memo):
                result = True
                break
    _memo[key] = result
    return result


def check_hn_minimality(cls: ModuleClass, mgs: Mgs) -> bool:
    """True iff deleting any term destroys the stratification property; the
    deleted brick itself is the witness searched for."""
    if cls.flags.extension_closed is not True:
        raise CatalogError("HN minimality requires an extension-closed class")
    if len(set(mgs.walls)) != len(mgs.walls):
        raise CatalogError("maximal green sequences have pairwise distinct bricks")
    for i in range(len(mgs.walls)):
        rest = mgs.walls[:i] + mgs.walls[i + 1 :]
        if filtration_exists(cls, ModuleSum([mgs.walls[i]]), rest):
            return False
    return True


# ---------------------------------------------------------------------------
# Deterministic search for linear realizations.
# ---------------------------------------------------------------------------


def _search_grid(rank: int, radius: int):
    ks = [tuple([1] * rank)]
    for h in itertools.product(range(-radius, radius + 1), repeat=rank):
        for k in ks:
            yield h, k


def find_linear_path(cls: ModuleClass, walls: tuple[str, ...], radius: int = 6) -> LinearPath | None:
    """Deterministic grid search for a linear path realizing the given MGS;
    None when no grid path matches (not every MGS is linear)."""
    for h, k in _search_grid(cls.catalog.quiver.n, radius):
        path = LinearPath(as_fracvec(h), as_fracvec(k))
        try:
            if tuple(linear_mgs(cls, path)) == tuple(walls):
                return path
        except NonGenericPathError:
            continue
    return None
