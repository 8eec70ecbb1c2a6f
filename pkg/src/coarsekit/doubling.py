"""Large-scale doubling certification and the net-ball cover pipeline.

A doubling certificate records, for every tested center and scale r in a
finite grid, a short list of r-balls covering the trace of the open
2r-ball on a subset.  N is whatever the greedy farthest-point covers
achieve, i.e. a certified upper bound; minimal constants are a covering
problem and out of scope.  Centers range over the host space ("ambient"
mode) or over the subset itself ("intrinsic" mode).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from coarsekit import numeric
from coarsekit.decompose import (
    DecompositionCertificate,
    NetCoverResult,
    certificate_from_cover,
    net_cover_strategy,
)
from coarsekit.errors import (
    ConsistencyError,
    InputError,
    InvalidInput,
    MultiplicityBoundViolated,
)
from coarsekit.spaces import FiniteMetricSpace, MetricFamily, PointId

AMBIENT = "ambient"
INTRINSIC = "intrinsic"


@dataclass(frozen=True)
class DoublingCertificate:
    space: FiniteMetricSpace
    subset: tuple[PointId, ...]
    base_scale: float  # R: witnesses exist for every grid scale >= R
    scales: tuple[float, ...]
    witnesses: dict[tuple[PointId, float], tuple[PointId, ...]]
    mode: str = AMBIENT

    @property
    def doubling_constant(self) -> int:
        return max((len(w) for w in self.witnesses.values()), default=1) or 1

    def centers(self) -> tuple[PointId, ...]:
        if self.mode == INTRINSIC:
            return self.subset
        return tuple(self.space.points)


def _ball_trace(space, subset, center, radius) -> list[PointId]:
    return [y for y in subset if numeric.lt(space.dist(center, y), radius)]


def _greedy_cover(space, targets: list[PointId], radius) -> tuple[PointId, ...]:
    """Cover targets with open radius-balls centered at target points,
    repeatedly taking the uncovered point farthest from the chosen
    centers (lowest id on ties)."""
    centers: list[PointId] = []
    uncovered = list(targets)
    while uncovered:
        if not centers:
            pick = uncovered[0]
        else:
            pick = max(
                uncovered,
                key=lambda p: (min(space.dist(p, c) for c in centers), -p),
            )
        centers.append(pick)
        uncovered = [
            p for p in uncovered if not numeric.lt(space.dist(p, pick), radius)
        ]
    return tuple(centers)


def dyadic_grid(base, limit) -> tuple:
    """base, 2*base, 4*base, ... up to and including the first scale >= limit."""
    scales = [base]
    while scales[-1] < limit:
        scales.append(scales[-1] * 2)
    return tuple(scales)


def certify_doubling(
    space: FiniteMetricSpace,
    subset: Iterable[PointId] | None = None,
    base_scale=1,
    scale_grid: Iterable | None = None,
    mode: str = AMBIENT,
) -> DoublingCertificate:
    """Greedily certify that every open 2r-ball trace on the subset is
    covered by few r-balls, for every center and every grid scale (all
    scales must be >= base_scale; default grid is dyadic from base_scale
    to the diameter).
    """
    pts = tuple(sorted(set(subset))) if subset is not None else tuple(space.points)
    if not pts:
        raise InputError("doubling needs a nonempty subset")
    if scale_grid is None:
        scale_grid = dyadic_grid(base_scale, max(space.diameter(pts), base_scale))
    scales = tuple(sorted(set(scale_grid)))
    if any(numeric.lt(s, base_scale) for s in scales):
        raise InputError("all grid scales must be at least the base scale")
    if mode not in (AMBIENT, INTRINSIC):
        raise InputError(f"unknown mode {mode!r}")

    centers = pts if mode == INTRINSIC else tuple(space.points)
    witnesses = {}
    for x in centers:
        for r in scales:
            targets = _ball_trace(space, pts, x, 2 * r)
            witnesses[(x, r)] = _greedy_cover(space, targets, r)
    return DoublingCertificate(space, pts, base_scale, scales, witnesses, mode)


def verify_doubling_certificate(cert: DoublingCertificate) -> bool:
    """Exhaustive coverage check of every witnessed center/scale."""
    allowed = set(cert.subset) if cert.mode == INTRINSIC else set(cert.space.points)
    for x in cert.centers():
        for r in cert.scales:
            if (x, r) not in cert.witnesses:
                return False
            balls = cert.witnesses[(x, r)]
            if not set(balls) <= allowed:
                return False
            for y in _ball_trace(cert.space, cert.subset, x, 2 * r):
                if not any(numeric.lt(cert.space.dist(y, c), r) for c in balls):
                    return False
    return True


def subspace_doubling(cert: DoublingCertificate) -> DoublingCertificate:
    """Recenter an ambient certificate into the subset, doubling the base
    scale and at worst squaring the constant.

    For an output scale r (with r and r/2 both in the input grid and
    r >= 2 * base_scale), the input witnesses covering the 2r-ball trace
    with r-balls are refined by the witnesses covering each r-ball trace
    with r/2-balls; each small ball meeting the subset is recentered at
    its lowest-id subset point and inflated back to radius r.
    """
    if cert.mode != AMBIENT:
        raise InvalidInput("subspace transfer expects an ambient certificate")
    if not verify_doubling_certificate(cert):
        raise InvalidInput("input doubling certificate fails verification")

    space, subset = cert.space, cert.subset
    in_scales = set(cert.scales)
    out_scales = tuple(
        sorted(
            r
            for r in in_scales
            if numeric.ge(r, 2 * cert.base_scale)
            and any(numeric.eq(r / 2, s) or r / 2 == s for s in in_scales)
        )
    )
    if not out_scales:
        raise InvalidInput("scale grid has no usable scales above twice the base scale")

    def grid_scale(value):
        for s in cert.scales:
            if s == value or numeric.eq(s, value):
                return s
        raise InvalidInput(f"scale {value} missing from the grid")

    witnesses = {}
    n_bound = cert.doubling_constant**2
    for x in subset:
        for r in out_scales:
            half = grid_scale(r / 2)
            stage_one = cert.witnesses[(x, r)]
            candidates: list[PointId] = []
            for w in stage_one:
                candidates.extend(cert.witnesses[(w, half)])
            recentered = []
            for z in candidates:
                meet = _ball_trace(space, subset, z, half)
                if meet:
                    recentered.append(meet[0])
            final = tuple(sorted(set(recentered)))
            if len(final) > n_bound:
                raise InvalidInput(
                    f"witness count {len(final)} exceeds the squared bound {n_bound}"
                )
            witnesses[(x, r)] = final

    out = DoublingCertificate(
        space, subset, 2 * cert.base_scale, out_scales, witnesses, INTRINSIC
    )
    if not verify_doubling_certificate(out):
        raise InvalidInput("recentered certificate fails coverage verification")
    return out


@dataclass
class DoublingCoverResult:
    covers: list[NetCoverResult]
    multiplicities: list[int]
    bound: int
    certificate: DecompositionCertificate


def doubling_to_asdim_cover(
    family: MetricFamily,
    certs: list[DoublingCertificate],
    lam,
) -> DoublingCoverResult:
    """Build net-ball covers at scale max(lam, R) for every member, check
    the measured multiplicity against N**4 (N the shared certified
    constant), then shrink the covers into a certificate at scale
    lam / multiplicity."""
    if len(certs) != len(family.members):
        raise InputError("one doubling certificate per member required")
    n_const = max(c.doubling_constant for c in certs)
    base = max(c.base_scale for c in certs)
    bound = n_const**4
    r = max(lam, base)

    results = net_cover_strategy(family, r)
    mults = [res.multiplicity for res in results]
    for res in results:
        if res.multiplicity > bound:
            raise MultiplicityBoundViolated(res.multiplicity, bound)
        if not numeric.ge(res.lebesgue, lam):
            raise ConsistencyError(
                f"net cover Lebesgue number {res.lebesgue} fell below {lam}"
            )

    worst_mult = max(mults)
    cert_scale = lam / worst_mult if not numeric.is_exact(lam) else _exact_div(lam, worst_mult)
    per_member_levels = []
    total_n = worst_mult - 1
    for res in results:
        cert = certificate_from_cover(res.cover, cert_scale, worst_mult - 1)
        per_member_levels.append([list(lv) for lv in cert.member_levels[0]])
    certificate = DecompositionCertificate.build(
        family, cert_scale, total_n, per_member_levels,
        target_id=f"{family.family_id}/doubling-parts",
    )
    return DoublingCoverResult(results, mults, bound, certificate)


def _exact_div(a, b):
    from fractions import Fraction

    value = Fraction(a, b)
    return int(value) if value.denominator == 1 else value


def certify_union_doubling(
    family: MetricFamily,
    member_indices: Iterable[int],
    base_scale=1,
    scale_grid: Iterable | None = None,
) -> DoublingCertificate:
    """Certify a selected finite union of family members (all members must
    share one parent space).  Checking every union of a family is
    exponential, so the caller picks which unions matter."""
    indices = sorted(set(member_indices))
    if not indices:
        raise InputError("select at least one member")
    spaces = {family.members[i][0].space_id for i in indices}
    if len(spaces) > 1:
        raise InputError("union members must share a parent space")
    space = family.members[indices[0]][0]
    union: set[PointId] = set()
    for i in indices:
        union |= set(family.members[i][1])
    return certify_doubling(space, union, base_scale, scale_grid)


def net_trace_bound_holds(
    space: FiniteMetricSpace,
    subset: Iterable[PointId],
    net: Iterable[PointId],
    r,
    n_const: int,
) -> bool:
    """Checkable counting fact: any open 8r-ball around a net point meets
    a 2r-separated net in at most N**4 points."""
    net = sorted(net)
    for x in net:
        count = sum(1 for z in net if numeric.lt(space.dist(x, z), 8 * r))
        if count > n_const**4:
            return False
    return True
