"""Decomposition certificates at a fixed scale.

A certificate splits every member of a source family into levels 0..n;
each level is a list of parts that are pairwise more than r apart, the
levels together cover the member, and every part is a member of the
target family.  Certificates are canonical: parts are sorted point-id
tuples, parts within a level are sorted, and the target family lists
parts in lexicographic (space_id, points) order, so equal decompositions
serialize to identical JSON.

This module builds certificates four ways (from covers via interior
shrinking, by pullback along maps with a distance sandwich, by
pushforward along uniform expansions, and by defender strategies),
verifies them, composes chains, and hosts the brute-force oracle used to
cross-check everything at small scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable

from coarsekit import numeric
from coarsekit.covers import Cover, lebesgue_number, multiplicity
from coarsekit.errors import (
    ConsistencyError,
    ImageEscapesSpace,
    InputError,
    NotAnExpansion,
    PreconditionFailed,
    ScaleTooSmall,
    SourceMismatch,
    StrategyFailed,
    TooLarge,
    UnmappedPoint,
)
from coarsekit.spaces import (
    FamilyMap,
    FiniteMetricSpace,
    MetricFamily,
    PointId,
    max_separated_net,
    r_components,
)

MAX_ORACLE_POINTS = 14
MAX_ORACLE_COLORINGS = 1 << 20

Part = tuple[PointId, ...]
Levels = tuple[tuple[Part, ...], ...]


@dataclass(frozen=True)
class DecompositionCertificate:
    source: MetricFamily
    r: float
    n: int
    member_levels: tuple[Levels, ...]
    target: MetricFamily
    _lookup: tuple[dict, ...] = field(default=None, compare=False, repr=False)

    @staticmethod
    def build(
        source: MetricFamily,
        r,
        n: int,
        member_levels: Iterable[Iterable[Iterable[Iterable[PointId]]]],
        target_id: str | None = None,
    ) -> "DecompositionCertificate":
        """Canonicalize raw per-member level/part lists and derive the
        target family."""
        if n < 0:
            raise InputError("n must be nonnegative")
        canon = []
        for levels in member_levels:
            levels = [tuple(sorted(tuple(sorted(set(p))) for p in lv)) for lv in levels]
            if len(levels) > n + 1:
                raise InputError("more levels than n+1")
            levels += [()] * (n + 1 - len(levels))
            canon.append(tuple(levels))
        if len(canon) != len(source.members):
            raise InputError("member_levels / source members length mismatch")
        parts = []
        for m_idx, levels in enumerate(canon):
            space = source.members[m_idx][0]
            for level in levels:
                for part in level:
                    parts.append((space, part))
        parts.sort(key=lambda sp: (sp[0].space_id, sp[1]))
        target = MetricFamily(
            target_id or f"{source.family_id}/parts",
            tuple(parts),
        )
        lookup = _build_lookup(canon, source, target)
        return DecompositionCertificate(source, r, n, tuple(canon), target, lookup)

    def assignment(self, member_index: int) -> dict[PointId, tuple[int, Part]]:
        """point -> (level, part) for one source member."""
        out: dict[PointId, tuple[int, Part]] = {}
        for level_idx, level in enumerate(self.member_levels[member_index]):
            for part in level:
                for p in part:
                    out[p] = (level_idx, part)
        return out

    def target_index(self, member_index: int, level: int, part: Part) -> int:
        return self._lookup[member_index][(level, part)]

    def part_count(self) -> int:
        return len(self.target.members)


def _build_lookup(canon, source, target) -> tuple[dict, ...]:
    # map (member, level, part) to an index into the target family,
    # consuming duplicate target members left to right
    remaining: dict[tuple[str, Part], list[int]] = {}
    for idx, (space, pts) in enumerate(target.members):
        remaining.setdefault((space.space_id, pts), []).append(idx)
    lookup = []
    for m_idx, levels in enumerate(canon):
        space = source.members[m_idx][0]
        table = {}
        for level_idx, level in enumerate(levels):
            for part in level:
                table[(level_idx, part)] = remaining[(space.space_id, part)].pop(0)
        lookup.append(table)
    return tuple(lookup)


@dataclass
class CertificateReport:
    ok: bool
    violations: list[dict]

    @property
    def first_violation(self) -> dict | None:
        return self.violations[0] if self.violations else None

    def summary(self) -> dict:
        return {"ok": self.ok, "violations": self.violations}


def verify_certificate(cert: DecompositionCertificate) -> CertificateReport:
    """Exhaustively check every certificate invariant.

    Reported violation kinds: uncovered point, point in two parts, empty
    part, part outside its member, same-level parts at distance <= r,
    and target family not matching the parts exactly.
    """
    violations: list[dict] = []
    if not numeric.gt(cert.r, 0):
        violations.append({"kind": "nonpositive_scale", "r": cert.r})
    if len(cert.member_levels) != len(cert.source.members):
        violations.append({"kind": "member_count_mismatch"})
        return CertificateReport(False, violations)

    for m_idx, (space, member_pts) in enumerate(cert.source.members):
        member_set = set(member_pts)
        seen: dict[PointId, tuple[int, int]] = {}
        levels = cert.member_levels[m_idx]
        if len(levels) != cert.n + 1:
            violations.append({"kind": "level_count_mismatch", "member": m_idx})
            continue
        for level_idx, level in enumerate(levels):
            for part_idx, part in enumerate(level):
                if not part:
                    violations.append(
                        {"kind": "empty_part", "member": m_idx, "level": level_idx}
                    )
                if not set(part) <= member_set:
                    violations.append(
                        {"kind": "part_outside_member", "member": m_idx, "part": list(part)}
                    )
                for p in part:
                    if p in seen:
                        violations.append(
                            {"kind": "overlap", "member": m_idx, "point": p}
                        )
                    seen[p] = (level_idx, part_idx)
            for a_idx, b_idx in combinations(range(len(level)), 2):
                dist = space.set_distance(level[a_idx], level[b_idx])
                if not numeric.gt(dist, cert.r):
                    violations.append(
                        {
                            "kind": "not_r_disjoint",
                            "member": m_idx,
                            "level": level_idx,
                            "parts": [a_idx, b_idx],
                            "distance": dist,
                        }
                    )
        uncovered = member_set - set(seen)
        if uncovered:
            violations.append(
                {"kind": "uncovered", "member": m_idx, "points": sorted(uncovered)}
            )

    want: dict[tuple[str, Part], int] = {}
    for m_idx, levels in enumerate(cert.member_levels):
        space = cert.source.members[m_idx][0]
        for level in levels:
            for part in level:
                key = (space.space_id, part)
                want[key] = want.get(key, 0) + 1
    have: dict[tuple[str, Part], int] = {}
    for space, pts in cert.target.members:
        key = (space.space_id, pts)
        have[key] = have.get(key, 0) + 1
    if want != have:
        violations.append({"kind": "target_mismatch"})

    return CertificateReport(not violations, violations)


def identity_certificate(family: MetricFamily, r) -> DecompositionCertificate:
    """Each member is its own single part at level 0."""
    levels = [[[list(pts)]] for _, pts in family.members]
    return DecompositionCertificate.build(family, r, 0, levels)


def compose_certificates(
    outer: DecompositionCertificate, inner: DecompositionCertificate
) -> DecompositionCertificate:
    """Chain two certificates: the inner one decomposes every part the
    outer one produced.  The composed scale is min(r_outer, r_inner) and
    the composed level count multiplies: n = (n_outer+1)(n_inner+1) - 1,
    flattening level pairs as i_outer*(n_inner+1) + i_inner.
    """
    if inner.source.member_keys() != outer.target.member_keys():
        raise SourceMismatch(
            "inner certificate does not decompose the outer certificate's target"
        )
    n_in = inner.n
    new_n = (outer.n + 1) * (n_in + 1) - 1
    new_r = min(outer.r, inner.r)
    member_levels = []
    for m_idx in range(len(outer.source.members)):
        new_levels: list[list[Part]] = [[] for _ in range(new_n + 1)]
        for level_idx, level in enumerate(outer.member_levels[m_idx]):
            for part in level:
                j = outer.target_index(m_idx, level_idx, part)
                for inner_level_idx, inner_level in enumerate(inner.member_levels[j]):
                    flat = level_idx * (n_in + 1) + inner_level_idx
                    new_levels[flat].extend(inner_level)
        member_levels.append(new_levels)
    return DecompositionCertificate.build(
        outer.source, new_r, new_n, member_levels, target_id=inner.target.family_id
    )


def _interior(space, domain, dom_set, part_set, depth):
    """Points of the domain whose open depth-ball stays inside part_set.
    Only part points can qualify (depth > 0)."""
    comp = dom_set - part_set
    if not comp:
        return frozenset(dom_set)
    comp = sorted(comp)
    return frozenset(
        x for x in part_set if numeric.ge(space.point_to_set(x, comp), depth)
    )


def certificate_from_cover(cover: Cover, r, n: int) -> DecompositionCertificate:
    """Turn a cover with multiplicity <= n+1 and Lebesgue number >= (n+1)r
    into an (r, n)-certificate whose parts are shrunken intersections of
    cover elements, so every part lies inside some cover element.

    Level i collects (i+1)-fold distinct intersections shrunk to their
    (n+1-i)r-interiors, minus the deeper-level interiors; identical
    intersections and empty pieces are dropped.  Points landing in several
    levels are assigned to the lowest one.
    """
    mult = multiplicity(cover)
    if mult > n + 1:
        raise PreconditionFailed("multiplicity", mult, n + 1)
    leb = lebesgue_number(cover)
    if not numeric.ge(leb, (n + 1) * r):
        raise PreconditionFailed("lebesgue", leb, (n + 1) * r)

    space = cover.space
    domain = cover.domain
    dom_set = set(domain)
    element_sets = [frozenset(el) for el in cover.elements]
    containing: dict[PointId, tuple[int, ...]] = {
        x: tuple(i for i, el in enumerate(element_sets) if x in el) for x in domain
    }

    # distinct (i+1)-fold intersections, generated from per-point element sets
    level_intersections: list[set[frozenset]] = []
    for i in range(n + 1):
        index_subsets = set()
        for x in domain:
            idxs = containing[x]
            if len(idxs) >= i + 1:
                index_subsets.update(frozenset(c) for c in combinations(idxs, i + 1))
        inters = set()
        for subset in index_subsets:
            acc = None
            for idx in subset:
                acc = element_sets[idx] if acc is None else acc & element_sets[idx]
            if acc:
                inters.add(acc)
        level_intersections.append(inters)

    shrunk: list[dict[frozenset, frozenset]] = []
    deep_union: list[set] = []
    for i in range(n + 1):
        depth = (n + 1 - i) * r
        level_map = {}
        union: set = set()
        for inter in level_intersections[i]:
            core = _interior(space, domain, dom_set, inter, depth)
            if core:
                level_map[inter] = core
                union |= core
        shrunk.append(level_map)
        deep_union.append(union)

    assigned: dict[PointId, tuple[int, frozenset]] = {}
    raw_levels: list[list[frozenset]] = []
    for i in range(n + 1):
        deeper = deep_union[i + 1] if i + 1 <= n else set()
        pieces = {core - deeper for core in shrunk[i].values()}
        pieces = sorted((p for p in pieces if p), key=lambda s: sorted(s))
        raw_levels.append(pieces)
        for piece in pieces:
            for x in piece:
                if x not in assigned:
                    assigned[x] = (i, piece)

    if set(assigned) != dom_set:
        raise ConsistencyError(
            f"interior shrinking left points uncovered: {sorted(dom_set - set(assigned))[:5]}"
        )

    levels_out: list[list[list[PointId]]] = [[] for _ in range(n + 1)]
    for i, pieces in enumerate(raw_levels):
        for piece in pieces:
            kept = sorted(x for x in piece if assigned[x] == (i, piece))
            if kept:
                levels_out[i].append(kept)

    # the top level's separation argument has no slack: with the Lebesgue
    # number exactly (n+1)r, two top-level parts can sit at distance
    # exactly r, and then no valid output exists at all; refuse instead
    for i, parts in enumerate(levels_out):
        for a_idx, b_idx in combinations(range(len(parts)), 2):
            gap = space.set_distance(parts[a_idx], parts[b_idx])
            if not numeric.gt(gap, r):
                raise PreconditionFailed("level-gap", gap, f"distance > {r}")

    source = MetricFamily(f"{space.space_id}/{len(domain)}pts", ((space, domain),))
    return DecompositionCertificate.build(
        source, r, n, [levels_out], target_id=f"{space.space_id}/cover-parts"
    )


def pullback_certificate(
    fmap: FamilyMap, cert: DecompositionCertificate, r
) -> DecompositionCertificate:
    """Transport a certificate on the map's target back to its source.

    Needs cert.r >= rho(r); each source point inherits the level and part
    of its image, so same-level pullback parts are more than r apart by
    the sandwich lower bound on the forward map.
    """
    required = fmap.rho(r)
    if numeric.lt(cert.r, required):
        raise ScaleTooSmall(cert.r, required)
    if cert.source.member_keys() != fmap.target.member_keys():
        raise SourceMismatch("certificate does not decompose the map's target family")

    member_levels = []
    for m_idx, (space, pts) in enumerate(fmap.source.members):
        mm = fmap.map_for(m_idx)
        image_assignment = cert.assignment(mm.target_index)
        groups: dict[tuple[int, Part], list[PointId]] = {}
        for x in pts:
            if x not in mm.mapping:
                raise UnmappedPoint(f"point {x} of member {m_idx} has no image")
            y = mm.mapping[x]
            if y not in image_assignment:
                raise UnmappedPoint(f"image point {y} not covered by the certificate")
            groups.setdefault(image_assignment[y], []).append(x)
        levels: list[list[list[PointId]]] = [[] for _ in range(cert.n + 1)]
        for (level_idx, _part), xs in sorted(groups.items()):
            levels[level_idx].append(sorted(xs))
        member_levels.append(levels)
    return DecompositionCertificate.build(
        fmap.source, r, cert.n, member_levels, target_id=f"{fmap.source.family_id}/pullback"
    )


def pushforward_expansion(
    space: FiniteMetricSpace,
    expansion: dict[PointId, PointId],
    lam,
    cert: DecompositionCertificate,
    k: int,
) -> DecompositionCertificate:
    """Push a single-member certificate through k iterates of a map that
    scales every distance by exactly lam > 1.  The result lives on the
    k-th image and verifies at scale lam**k * r; part diameters scale by
    exactly lam**k.
    """
    if not lam > 1:
        raise InputError("expansion factor must exceed 1")
    if k < 0:
        raise InputError("k must be nonnegative")
    if len(cert.source.members) != 1:
        raise InputError("pushforward operates on single-member families")
    member_space, member_pts = cert.source.members[0]
    if member_space.space_id != space.space_id:
        raise InputError("certificate member does not live in the given space")

    dom = sorted(expansion)
    for x in dom:
        if expansion[x] not in space.points:
            raise ImageEscapesSpace(f"image of {x} is outside the space")
    worst = None
    worst_err = 0
    for x, y in combinations(dom, 2):
        expected = lam * space.dist(x, y)
        actual = space.dist(expansion[x], expansion[y])
        if not numeric.eq(actual, expected):
            err = abs(actual - expected)
            if err > worst_err:
                worst, worst_err = ((x, y), expected, actual), err
    if worst is not None:
        raise NotAnExpansion(*worst)

    if k == 0:
        return cert

    def iterate(p: PointId) -> PointId:
        for _ in range(k):
            if p not in expansion:
                raise ImageEscapesSpace(f"iterate leaves the map's domain at {p}")
            p = expansion[p]
        return p

    image = {x: iterate(x) for x in member_pts}
    new_levels = [
        [sorted(image[x] for x in part) for part in level]
        for level in cert.member_levels[0]
    ]
    new_member = tuple(sorted(image.values()))
    if len(new_member) != len(member_pts):
        raise ConsistencyError("expansion iterate collapsed points")
    source = MetricFamily(
        f"{cert.source.family_id}/push{k}", ((space, new_member),)
    )
    return DecompositionCertificate.build(
        source,
        lam**k * cert.r,
        cert.n,
        [new_levels],
        target_id=f"{cert.source.family_id}/push{k}/parts",
    )


@dataclass
class NetCoverResult:
    cover: Cover
    net: tuple[PointId, ...]
    multiplicity: int
    lebesgue: float


def net_cover_strategy(family: MetricFamily, r) -> list[NetCoverResult]:
    """Per member: greedy maximal 2r-separated net, then closed 4r-balls
    around net points (identical balls merged).  The cover's Lebesgue
    number is at least r; the measured multiplicity is reported."""
    results = []
    for space, pts in family.members:
        net = max_separated_net(space, pts, 2 * r)
        balls = {
            tuple(x for x in pts if numeric.le(space.dist(x, z), 4 * r)) for z in net
        }
        cover = Cover.build(space, sorted(balls), domain=pts)
        results.append(
            NetCoverResult(cover, net, multiplicity(cover), lebesgue_number(cover))
        )
    return results


@dataclass
class OracleVerdict:
    decomposable: bool
    witness: DecompositionCertificate | None
    min_worst_diameter: float


def exhaustive_decompose(
    space: FiniteMetricSpace,
    r,
    n: int,
    diameter_bound,
    subset: Iterable[PointId] | None = None,
    max_points: int = MAX_ORACLE_POINTS,
) -> OracleVerdict:
    """Brute-force decision: enumerate all (n+1)-level colorings; within a
    level the parts are forced to be the r-closure components (any valid
    same-level part set is a union of such components, and splitting into
    the components themselves minimizes the worst part diameter).  Returns
    the minimum over colorings of the worst component diameter and the
    lexicographically first witness attaining it.
    """
    pts = sorted(set(subset)) if subset is not None else list(space.points)
    if not pts:
        raise InputError("oracle needs a nonempty point set")
    if len(pts) > max_points:
        raise TooLarge(f"{len(pts)} points exceeds the oracle cap of {max_points}")
    if (n + 1) ** len(pts) > MAX_ORACLE_COLORINGS:
        raise TooLarge("too many colorings to enumerate")

    size = len(pts)
    dmat = [[space.dist(pts[i], pts[j]) for j in range(size)] for i in range(size)]
    close = [[numeric.le(dmat[i][j], r) for j in range(size)] for i in range(size)]

    best_worst = math.inf
    best_coloring = None
    for coloring in product(range(n + 1), repeat=size):
        worst = 0
        for level in range(n + 1):
            idxs = [i for i in range(size) if coloring[i] == level]
            if not idxs:
                continue
            parent = {i: i for i in idxs}

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            for a_pos, a in enumerate(idxs):
                for b in idxs[a_pos + 1 :]:
                    if close[a][b]:
                        ra, rb = find(a), find(b)
                        if ra != rb:
                            parent[rb] = ra
            for a_pos, a in enumerate(idxs):
                for b in idxs[a_pos + 1 :]:
                    if find(a) == find(b) and dmat[a][b] > worst:
                        worst = dmat[a][b]
            if worst >= best_worst:
                break
        if worst < best_worst:
            best_worst = worst
            best_coloring = coloring
            if worst == 0 and numeric.le(0, diameter_bound):
                break

    levels: list[list[list[PointId]]] = [[] for _ in range(n + 1)]
    for level in range(n + 1):
        lv_pts = [pts[i] for i in range(size) if best_coloring[i] == level]
        if lv_pts:
            levels[level] = [list(c) for c in r_components(space, lv_pts, r)]
    source = MetricFamily(
        f"{space.space_id}/{len(pts)}pts", ((space, tuple(pts)),)
    )
    witness = DecompositionCertificate.build(
        source, r, n, [levels], target_id=f"{space.space_id}/oracle-parts"
    )
    return OracleVerdict(
        decomposable=numeric.le(best_worst, diameter_bound),
        witness=witness,
        min_worst_diameter=best_worst,
    )


STRATEGIES = ("net_then_grave", "singletons", "oracle_small")


def _split_into_components(space, levels: Levels, r) -> list[list[list[PointId]]]:
    """Refine every part into its r-closure components.  Components of one
    part are more than r apart by construction and subsets of r-disjoint
    parts stay r-disjoint, so validity is preserved while part diameters
    can only shrink."""
    out = []
    for level in levels:
        new_level: list[list[PointId]] = []
        for part in level:
            new_level.extend(list(c) for c in r_components(space, part, r))
        out.append(new_level)
    return out


def defend(
    family: MetricFamily,
    r,
    policy: str,
    n: int | None = None,
    diameter_bound=None,
    max_escalations: int = 40,
) -> DecompositionCertificate:
    """Produce a verified certificate for the family at scale r using a
    named strategy, or raise StrategyFailed.

    net_then_grave escalates the net scale geometrically until the
    interior-shrinking precondition (Lebesgue >= multiplicity * r) holds,
    then shrinks.  singletons answers only when r is below every positive
    gap.  oracle_small brute-forces members up to MAX_ORACLE_POINTS points
    (level budget ``n``, default 1; ``diameter_bound`` optional).
    """
    if policy not in STRATEGIES:
        raise InputError(f"unknown strategy {policy!r}")

    per_member: list[tuple[int, list]] = []  # (n_member, levels)

    if policy == "singletons":
        for idx, (space, pts) in enumerate(family.members):
            gap = space.min_positive_gap(pts)
            if not numeric.gt(gap, r):
                raise StrategyFailed(
                    f"member {idx}: minimum gap {gap} is not above the scale {r}"
                )
            per_member.append((0, [[[p] for p in pts]]))

    elif policy == "oracle_small":
        budget = 1 if n is None else n
        for idx, (space, pts) in enumerate(family.members):
            if len(pts) > MAX_ORACLE_POINTS:
                raise StrategyFailed(f"member {idx} too large for the oracle")
            bound = diameter_bound if diameter_bound is not None else math.inf
            verdict = exhaustive_decompose(space, r, budget, bound, subset=pts)
            if not verdict.decomposable:
                raise StrategyFailed(
                    f"member {idx}: best worst diameter {verdict.min_worst_diameter} "
                    f"exceeds bound {bound}"
                )
            per_member.append(
                (budget, [list(lv) for lv in verdict.witness.member_levels[0]])
            )

    else:  # net_then_grave
        for idx, (space, pts) in enumerate(family.members):
            member_family = MetricFamily(f"{family.family_id}/m{idx}", ((space, pts),))
            best = None  # (mesh, n, levels)
            # climb a geometric ladder of net scales, starting well below r
            # (small members need boundary-clipped ball covers, which appear
            # before one ball swallows everything); among qualifying scales
            # keep the answer with the smallest part mesh
            scale = r / 16
            seen_qualifying = 0
            for _ in range(max_escalations):
                result = net_cover_strategy(member_family, scale)[0]
                need = result.multiplicity * r
                if numeric.ge(result.lebesgue, need):
                    try:
                        cert = certificate_from_cover(
                            result.cover, r, result.multiplicity - 1
                        )
                    except PreconditionFailed:
                        pass
                    else:
                        levels = _split_into_components(
                            space, cert.member_levels[0], r
                        )
                        worst = max(
                            (space.diameter(part) for lv in levels for part in lv),
                            default=0,
                        )
                        if best is None or worst < best[0]:
                            best = (worst, cert.n, levels)
                        seen_qualifying += 1
                        if seen_qualifying >= 4 or worst == 0:
                            break
                if len(result.cover.elements) == 1:
                    break  # one ball already swallows the member
                scale = scale * 1.25
            if best is None:
                raise StrategyFailed(
                    f"member {idx}: Lebesgue precondition unreachable within "
                    f"{max_escalations} escalations"
                )
            per_member.append((best[1], best[2]))

    total_n = max(nm for nm, _ in per_member)
    member_levels = [levels for _, levels in per_member]
    return DecompositionCertificate.build(
        family, r, total_n, member_levels, target_id=f"{family.family_id}/parts"
    )
