"""Exhaustive Wick-pairing enumeration over fat graphs.

This module is the ground truth of the package: it counts perfect matchings
("gluings") of the half-edges of labeled four-valent vertices, stratified by

* genus of the glued surface (faces are cycles of rotation∘matching),
* strand count (closed loops obtained by running straight through each
  vertex according to its strand pattern),
* connectivity,

and exposes the counts as `CountTable` objects whose entries, divided by the
Wick normalization ``4^V V!`` per vertex type, are the exact coefficients of
the counting series cross-checked against the closed forms elsewhere in the
package.

Two engines produce identical numbers:

* a plain reference engine that walks every matching and classifies each
  leaf from scratch — transparent, supports mixed vertex types, used for
  validation and for small mixed-model runs;
* a fast engine that maintains the boundary structure of the partially
  glued surface incrementally.  Gluing two half-edges on the same boundary
  cycle splits it (possibly completing faces); gluing across two cycles of
  the same component adds a handle, which is exactly the move the planar
  mode prunes.  Interchangeability of the not-yet-touched labeled vertices
  is exploited by branching once with an integer multiplicity instead of
  once per label, which never changes any invariant of the completions.

Work may be split over processes on the first gluing choices; partial
tables are merged by exact integer addition, so results are independent of
scheduling.  The worker count comes from the LINKCENSUS_THREADS environment
variable (default: hardware parallelism).

One counting convention worth stating: a planar gluing already stands for
the two diagrams related by swapping every over/under choice, so the counts
here carry no additional factor of two and consumers must not divide again.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .series import Series

__all__ = [
    "CeilingError",
    "VertexType",
    "VertexModel",
    "PairingDiagram",
    "CountTable",
    "TwoPointTable",
    "CROSSING",
    "TANGENCY",
    "DEFAULT_CEILING",
    "enumerate_pairings",
    "two_point_table",
    "loop_polynomial",
    "free_energy_polynomials",
    "free_energy_series",
    "g2_series",
    "g4_series",
    "gamma_series",
    "twopi_gamma_series",
    "count_table_csv",
    "double_factorial",
    "iter_pairings",
    "classify_pairing",
]

DEFAULT_CEILING = 6


class CeilingError(ValueError):
    """The requested vertex count exceeds the configured enumeration ceiling."""


@dataclass(frozen=True)
class VertexType:
    """A four-valent vertex species: its strand wiring and coupling name."""

    name: str
    strand_pairs: tuple  # pairing of the legs 0..3 into two through-strands
    coupling: str


CROSSING = VertexType("crossing", ((0, 2), (1, 3)), "g")
TANGENCY = VertexType("tangency", ((0, 1), (2, 3)), "h")


@dataclass(frozen=True)
class VertexModel:
    """The vertex species available to the enumeration."""

    vertex_types: tuple

    def __post_init__(self) -> None:
        for vt in self.vertex_types:
            legs = sorted(leg for pair in vt.strand_pairs for leg in pair)
            if legs != [0, 1, 2, 3]:
                raise ValueError(f"vertex type {vt.name!r} does not wire 4 legs into 2 strands")

    @classmethod
    def one_matrix(cls) -> "VertexModel":
        """Single crossing-type vertex (quartic coupling)."""
        return cls((CROSSING,))

    @classmethod
    def generalized(cls) -> "VertexModel":
        """Crossing plus tangency vertices (two independent quartic couplings)."""
        return cls((CROSSING, TANGENCY))

    def by_name(self, name: str) -> VertexType:
        for vt in self.vertex_types:
            if vt.name == name:
                return vt
        raise KeyError(name)


@dataclass(frozen=True)
class PairingDiagram:
    """A single gluing: a fixed-point-free involution on the half-edges."""

    num_vertices: int
    vertex_assignment: tuple  # VertexType per vertex
    matching: tuple  # matching[s] = partner half-edge of s

    def __post_init__(self) -> None:
        m = self.matching
        if len(m) != 4 * self.num_vertices:
            raise ValueError("matching must cover exactly the 4V half-edges")
        for s, t in enumerate(m):
            if t == s or m[t] != s:
                raise ValueError("matching is not a fixed-point-free involution")


@dataclass(frozen=True)
class CountTable:
    """Exact pairing counts for closed diagrams at fixed vertex content.

    ``cells`` maps ``(genus, strands, connected)`` to the number of labeled
    pairings; for disconnected entries the genus is the sum over components.
    """

    vertex_counts: tuple  # ((type name, count), ...)
    planar_only: bool
    connected_only: bool
    cells: dict

    @property
    def num_vertices(self) -> int:
        return sum(c for _, c in self.vertex_counts)

    def total(self) -> int:
        return sum(self.cells.values())

    def wick_normalization(self) -> int:
        return int(
            _prod(4**c * factorial(c) for _, c in self.vertex_counts)
        )

    def connected_planar_by_strands(self) -> dict:
        out: dict = {}
        for (h, k, conn), c in self.cells.items():
            if conn and h == 0:
                out[k] = out.get(k, 0) + c
        return out


@dataclass(frozen=True)
class TwoPointTable:
    """Counts for diagrams with one marked boundary carrying 2 or 4 legs.

    ``cells`` maps ``(genus, internal_strands, boundary_strands, four_leg_connected,
    two_particle_irreducible)`` to counts; the last entry is None unless the
    2PI filter was requested, and ``four_leg_connected`` flags the diagrams
    where all four legs hang off a single internal component (the connected
    four-point part).
    """

    num_vertices: int
    legs: int
    planar_only: bool
    cells: dict

    def coefficient(self, n: Fraction | int = 1, *, connected_four: bool | None = None,
                    color_boundary: bool = False, twopi: bool | None = None) -> Fraction:
        """Wick-normalized coefficient with loop weight ``n``.

        ``color_boundary`` also weights the loops running through the marked
        boundary (the color-summed four-point correlator); otherwise boundary
        loops carry weight 1 (a fixed external color).
        """
        n = Fraction(n)
        acc = Fraction(0)
        for (h, kin, kext, conn4, is2pi), c in self.cells.items():
            if connected_four is not None and conn4 != connected_four:
                continue
            if twopi is not None and is2pi != twopi:
                continue
            weight = n ** (kin + kext) if color_boundary else n**kin
            acc += c * weight
        norm = 4**self.num_vertices * factorial(self.num_vertices)
        return acc / norm


def _prod(items) -> int:
    out = 1
    for x in items:
        out *= x
    return out


def double_factorial(n: int) -> int:
    """(n)!! for odd n (the number of perfect matchings of n+1 points)."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("LINKCENSUS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# plain reference engine
# ---------------------------------------------------------------------------


def classify_pairing(matching, vertex_patterns, legs: int = 0):
    """Classify one gluing: (faces, internal loops, boundary loops, internal components).

    ``matching`` covers ``legs`` boundary half-edges (ids 0..legs-1, one marked
    boundary vertex) followed by blocks of 4 per internal vertex.
    ``vertex_patterns`` lists the strand pairing of each internal vertex.
    """
    V = len(vertex_patterns)
    S = legs + 4 * V

    # rotation permutation: cyclic within the boundary and within each vertex
    sigma = list(range(S))
    if legs:
        for j in range(legs):
            sigma[j] = (j + 1) % legs
    for v in range(V):
        b = legs + 4 * v
        for j in range(4):
            sigma[b + j] = b + (j + 1) % 4

    # faces: cycles of sigma∘matching
    faces = 0
    seen = [False] * S
    for s in range(S):
        if seen[s]:
            continue
        faces += 1
        x = s
        while not seen[x]:
            seen[x] = True
            x = sigma[matching[x]]

    # strand transition involution
    strand = list(range(S))
    if legs == 2:
        strand[0], strand[1] = 1, 0
    elif legs == 4:
        strand[0], strand[1], strand[2], strand[3] = 2, 3, 0, 1
    for v, pattern in enumerate(vertex_patterns):
        b = legs + 4 * v
        for p, q in pattern:
            strand[b + p] = b + q
            strand[b + q] = b + p

    loops_internal = 0
    loops_boundary = 0
    seen = [False] * S
    for s in range(S):
        if seen[s]:
            continue
        x = s
        touches_boundary = False
        while not seen[x]:
            seen[x] = True
            if x < legs:
                touches_boundary = True
            y = strand[x]
            seen[y] = True
            if y < legs:
                touches_boundary = True
            x = matching[y]
        if touches_boundary:
            loops_boundary += 1
        else:
            loops_internal += 1

    # internal components (the marked boundary never counts as a connector)
    parent = list(range(V))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    for s in range(legs, S):
        t = matching[s]
        if t >= legs:
            a, b = find((s - legs) // 4), find((t - legs) // 4)
            if a != b:
                parent[a] = b
    comps = len({find(v) for v in range(V)})
    return faces, loops_internal, loops_boundary, comps


def iter_pairings(num_vertices: int, legs: int = 0):
    """Yield every matching of the ``legs + 4*num_vertices`` half-edges."""
    S = legs + 4 * num_vertices
    matching = [-1] * S

    def rec(free: list):
        if not free:
            yield tuple(matching)
            return
        a = free[0]
        rest = free[1:]
        for i, b in enumerate(rest):
            matching[a], matching[b] = b, a
            yield from rec(rest[:i] + rest[i + 1 :])
        matching[a] = -1

    yield from rec(list(range(S)))


def _enumerate_plain(vertex_patterns, legs, planar_only, connected_only):
    """Reference counting: classify every matching at the leaf."""
    V = len(vertex_patterns)
    cells: dict = {}
    E = (legs + 4 * V) // 2
    for matching in iter_pairings(V, legs):
        faces, kin, kext, comps = classify_pairing(matching, vertex_patterns, legs)
        if legs == 0:
            # disallow boundaryless diagrams with marked... nothing: closed diagram
            chi = V - E + faces
            genus2 = 2 * comps - chi
            genus = genus2 // 2
            connected = comps == 1
            if connected_only and not connected:
                continue
            if planar_only and genus != 0:
                continue
            key = (genus, kin, connected)
        else:
            # every internal component must touch the boundary (vacuum parts cancel)
            if V and _has_vacuum_component(matching, legs, V):
                continue
            chi = (V + 1) - E + faces
            genus = (2 - chi) // 2
            if planar_only and genus != 0:
                continue
            conn4 = legs == 4 and _four_leg_connected(matching, legs, V)
            key = (genus, kin, kext, conn4, None)
        cells[key] = cells.get(key, 0) + 1
    return cells


def _has_vacuum_component(matching, legs, V) -> bool:
    parent = list(range(V))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    touches = [False] * V
    for s in range(legs, legs + 4 * V):
        t = matching[s]
        if t < legs:
            touches[(s - legs) // 4] = True
        elif s < t:
            a, b = find((s - legs) // 4), find((t - legs) // 4)
            if a != b:
                parent[a] = b
    reached = [False] * V
    for v in range(V):
        if touches[v]:
            reached[find(v)] = True
    return any(not reached[find(v)] for v in range(V))


def _four_leg_connected(matching, legs, V) -> bool:
    if any(matching[e] < legs for e in range(legs)):
        return False
    parent = list(range(V))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    for s in range(legs, legs + 4 * V):
        t = matching[s]
        if t >= legs and s < t:
            a, b = find((s - legs) // 4), find((t - legs) // 4)
            if a != b:
                parent[a] = b
    roots = {find((matching[e] - legs) // 4) for e in range(legs)}
    return len(roots) == 1


# ---------------------------------------------------------------------------
# fast engine
# ---------------------------------------------------------------------------


def _fast_search(V, legs, strand_offsets, planar_only, allow_seed,
                 twopi, gamma_only=False, prefix=(), depth_cap=None):
    """Incremental enumeration for a single vertex species.

    ``strand_offsets`` encodes the internal strand wiring as a map of the
    legs 0..3 (e.g. crossings map j -> j+2 mod 4).  Fresh vertices are
    interchangeable, so touching one branches once with multiplicity equal to
    the number still untouched; disallowing seeds (``allow_seed=False``)
    restricts to gluings without vacuum components.  Returns the cells dict,
    or (with ``depth_cap``) the list of branch prefixes at that depth.

    The recursion keeps, with O(1) amortized rollback per gluing:

    * the boundary cycles of the partial surface as doubly linked rings over
      the unmatched half-edges (``nxt``/``prv``/``cyc``/``csz``), with faces
      counted as cycles empty out;
    * a sorted free list of unmatched active half-edges (``fnx``/``fpv``);
    * rollback union-find structures for surface components (``par``),
      internal components (``ipar``, four-point typing only) and strand
      segments (``spar``; closing a segment closes one loop).

    Gluing inside one boundary cycle splits it; gluing across two cycles of
    one component would add a handle and is what ``planar_only`` prunes;
    gluing to a fresh vertex splices its other three legs into the cycle.

    ``gamma_only`` (four marked legs) keeps only gluings whose internal graph
    stays a single component carrying all four legs: leg-leg matches are
    skipped and a branch dies the moment an internal component runs out of
    free half-edges while anything else is still open.  Every surviving leaf
    is then a connected four-point diagram.
    """
    S = legs + 4 * V
    HEAD = S
    match = [-1] * S
    nxt = [0] * S
    prv = [0] * S
    cyc = [-1] * S
    csz = [0] * (S + 2 + 4 * V)
    fnx = [HEAD] * (S + 1)
    fpv = [HEAD] * (S + 1)
    # surface components over vertex slots; slot V is the marked boundary
    par = list(range(V + 1))
    psz = [1] * (V + 1)
    # internal components (four-point connectivity typing) and their counts
    # of still-unmatched internal half-edges (for the gamma_only seal prune)
    ipar = list(range(V + 1))
    ifree = [0] * (V + 1)
    track_internal = legs == 4
    # strand structure over half-edges
    spar = list(range(S))
    sext = [False] * S
    vx = [V] * S
    for i in range(V):
        for j in range(4):
            vx[legs + 4 * i + j] = i

    cells: dict = {}
    prefixes: list = []
    path: list = []
    E = S // 2
    collect = depth_cap is not None
    plen = len(prefix)
    off0, off1, off2, off3 = strand_offsets

    def freelist_append(x: int) -> None:
        last = fpv[HEAD]
        fnx[last] = x
        fpv[x] = last
        fnx[x] = HEAD
        fpv[HEAD] = x

    if legs:
        for j in range(legs):
            nxt[j] = (j + 1) % legs
            prv[j] = (j - 1) % legs
            cyc[j] = 0
        csz[0] = legs
        if legs == 2:
            spar[1] = 0
            sext[0] = True
        else:
            spar[2] = 0
            spar[3] = 1
            sext[0] = True
            sext[1] = True
        for j in range(legs):
            freelist_append(j)

    ncid_box = [1 if legs else 0]

    def seed(slot: int) -> None:
        # start a brand-new component on a fresh vertex (cold path)
        b = legs + 4 * slot
        cid = ncid_box[0]
        ncid_box[0] += 1
        for j in range(4):
            s = b + j
            nxt[s] = b + (j + 1) % 4
            prv[s] = b + (j - 1) % 4
            cyc[s] = cid
            spar[s] = s
            sext[s] = False
        csz[cid] = 4
        # strand pairs: keep the smaller leg as segment root
        for j in range(4):
            k = strand_offsets[j]
            if k > j:
                spar[b + k] = b + j
        par[slot] = slot
        psz[slot] = 1
        ipar[slot] = slot
        for j in range(4):
            freelist_append(b + j)

    def unseed(slot: int) -> None:
        b = legs + 4 * slot
        for j in (3, 2, 1, 0):
            x = b + j
            last = fpv[x]
            fnx[last] = HEAD
            fpv[HEAD] = last
        ncid_box[0] -= 1

    def ifind(x: int) -> int:
        while ipar[x] != x:
            x = ipar[x]
        return x

    def rec(depth, weight, ninst, ncomp, faces, kint, kext, nfree,
            match=match, nxt=nxt, prv=prv, cyc=cyc, csz=csz, fnx=fnx, fpv=fpv,
            par=par, psz=psz, ipar=ipar, ifree=ifree, spar=spar, sext=sext,
            vx=vx, cells=cells, V=V, legs=legs, HEAD=HEAD, E=E, plen=plen,
            prefix=prefix, collect=collect, depth_cap=depth_cap,
            planar_only=planar_only, gamma_only=gamma_only,
            track_internal=track_internal, allow_seed=allow_seed, twopi=twopi):
        s0 = fnx[HEAD]
        if s0 == HEAD:
            if ninst < V:
                # the very first component always gets its seed; further seeds
                # start vacuum components and are only allowed when wanted
                if not allow_seed and (ninst > 0 or legs > 0):
                    return
                if collect and depth == depth_cap:
                    prefixes.append(tuple(path))
                    return
                if depth < plen and prefix[depth] != -9:
                    return
                seed(ninst)
                if collect:
                    path.append(-9)
                rec(depth + 1, weight, ninst + 1, ncomp + 1, faces, kint, kext,
                    nfree + 4)
                if collect:
                    path.pop()
                unseed(ninst)
                return
            if collect:
                # a leaf above the cap becomes a complete prefix: the workers,
                # not the collector, do every tally
                prefixes.append(tuple(path))
                return
            # ---- leaf ----
            if legs == 0:
                genus = (2 * ncomp - faces + V) // 2
                if planar_only and genus != 0:
                    return
                key = (genus, kint, ncomp == 1)
            else:
                genus = (2 - (V + 1) + E - faces) // 2
                if planar_only and genus != 0:
                    return
                conn4 = legs == 4 and (gamma_only or _leaf_four_connected())
                flag = None
                if twopi and conn4:
                    flag = not _leaf_two_particle_reducible()
                key = (genus, kint, kext, conn4, flag)
            cells[key] = cells.get(key, 0) + weight
            return

        if collect and depth == depth_cap:
            prefixes.append(tuple(path))
            return
        forced = prefix[depth] if depth < plen else None

        ca = cyc[s0]
        if planar_only:
            ra = vx[s0]
            while par[ra] != ra:
                ra = par[ra]
        if gamma_only and s0 >= legs:
            ir0 = vx[s0]
            while ipar[ir0] != ir0:
                ir0 = ipar[ir0]
            ifree0 = ifree[ir0]
        else:
            ir0 = -1
            ifree0 = 0
        depth1 = depth + 1

        # -- candidates among already-active stubs --
        t = fnx[s0]
        while t != HEAD:
            if forced is not None and t != forced:
                t = fnx[t]
                continue
            cb = cyc[t]
            if ca != cb and planar_only:
                rb = vx[t]
                while par[rb] != rb:
                    rb = par[rb]
                if rb == ra:
                    t = fnx[t]
                    continue  # would add a handle
            if gamma_only:
                # keep the internal graph one open component over all 4 legs
                if ir0 < 0:
                    if t < legs:
                        t = fnx[t]
                        continue  # leg paired with leg: never connected
                    r2 = vx[t]
                    while ipar[r2] != r2:
                        r2 = ipar[r2]
                    newf = ifree[r2] - 1
                elif t < legs:
                    newf = ifree0 - 1
                else:
                    r2 = vx[t]
                    while ipar[r2] != r2:
                        r2 = ipar[r2]
                    newf = ifree0 - 2 if ir0 == r2 else ifree0 + ifree[r2] - 2
                if newf == 0 and nfree > 2:
                    t = fnx[t]
                    continue  # an internal component sealed before the end
            a = s0
            b = t
            # ---- glue (active-active) ----
            fnx[fpv[a]] = fnx[a]
            fpv[fnx[a]] = fpv[a]
            fnx[fpv[b]] = fnx[b]
            fpv[fnx[b]] = fpv[b]
            match[a] = b
            match[b] = a
            rs = a
            while spar[rs] != rs:
                rs = spar[rs]
            rt = b
            while spar[rt] != rt:
                rt = spar[rt]
            s_child = -1
            s_oldflag = False
            kint2 = kint
            kext2 = kext
            if rs == rt:
                if sext[rs]:
                    kext2 += 1
                else:
                    kint2 += 1
            else:
                s_child = rt
                s_oldflag = sext[rs]
                spar[rt] = rs
                if sext[rt]:
                    sext[rs] = True
            va = vx[a]
            vb = vx[b]
            rva = va
            while par[rva] != rva:
                rva = par[rva]
            rvb = vb
            while par[rvb] != rvb:
                rvb = par[rvb]
            c_child = -1
            ncomp2 = ncomp
            if rva != rvb:
                if psz[rva] < psz[rvb]:
                    rva, rvb = rvb, rva
                par[rvb] = rva
                psz[rva] += psz[rvb]
                c_child = rvb
                ncomp2 -= 1
            i_child = -1
            ifree_root = -1
            if track_internal:
                if va != V and vb != V:
                    ria = va
                    while ipar[ria] != ria:
                        ria = ipar[ria]
                    rib = vb
                    while ipar[rib] != rib:
                        rib = ipar[rib]
                    if ria != rib:
                        ipar[rib] = ria
                        i_child = rib
                        ifree_root = ria
                        ifree_old = ifree[ria]
                        ifree[ria] = ifree_old + ifree[rib] - 2
                    else:
                        ifree_root = ria
                        ifree_old = ifree[ria]
                        ifree[ria] = ifree_old - 2
                elif va != V:
                    r = va
                    while ipar[r] != r:
                        r = ipar[r]
                    ifree_root = r
                    ifree_old = ifree[r]
                    ifree[r] = ifree_old - 1
                elif vb != V:
                    r = vb
                    while ipar[r] != r:
                        r = ipar[r]
                    ifree_root = r
                    ifree_old = ifree[r]
                    ifree[r] = ifree_old - 1
            # boundary cycles
            pa = prv[a]
            sa = nxt[a]
            pb = prv[b]
            sb = nxt[b]
            relabeled = None
            relabel_to = -1
            old_ca = csz[ca]
            old_cb = csz[cb]
            new_cid = False
            faces2 = faces
            if ca == cb:
                n = old_ca
                if n == 2:
                    faces2 += 2
                elif sa == b:
                    faces2 += 1
                    nxt[pa] = sb
                    prv[sb] = pa
                    csz[ca] = n - 2
                elif sb == a:
                    faces2 += 1
                    nxt[pb] = sa
                    prv[sa] = pb
                    csz[ca] = n - 2
                else:
                    # walk at most half the ring to find the shorter arc
                    half = (n - 2) >> 1
                    walked = []
                    x = sa
                    while len(walked) <= half:
                        if x == b:
                            break
                        walked.append(x)
                        x = nxt[x]
                    else:
                        walked = []
                        x = sb
                        while x != a:
                            walked.append(x)
                            x = nxt[x]
                    nxt[pb] = sa
                    prv[sa] = pb
                    nxt[pa] = sb
                    prv[sb] = pa
                    cid = ncid_box[0]
                    ncid_box[0] += 1
                    new_cid = True
                    for x in walked:
                        cyc[x] = cid
                    relabeled = walked
                    relabel_to = ca
                    csz[cid] = len(walked)
                    csz[ca] = n - 2 - len(walked)
            else:
                na = old_ca
                nb = old_cb
                if na == 1 and nb == 1:
                    faces2 += 1
                elif na == 1:
                    nxt[pb] = sb
                    prv[sb] = pb
                    csz[cb] = nb - 1
                elif nb == 1:
                    nxt[pa] = sa
                    prv[sa] = pa
                    csz[ca] = na - 1
                else:
                    nxt[pa] = sb
                    prv[sb] = pa
                    nxt[pb] = sa
                    prv[sa] = pb
                    if na <= nb:
                        keep, drop, start = cb, ca, sa
                    else:
                        keep, drop, start = ca, cb, sb
                    relabeled = []
                    x = start
                    while cyc[x] != keep:
                        relabeled.append(x)
                        cyc[x] = keep
                        x = nxt[x]
                    relabel_to = drop
                    csz[keep] = na + nb - 2

            if collect:
                path.append(t)
            rec(depth1, weight, ninst, ncomp2, faces2, kint2, kext2, nfree - 2)
            if collect:
                path.pop()

            # ---- undo ----
            if new_cid:
                ncid_box[0] -= 1
            if relabeled is not None:
                for x in relabeled:
                    cyc[x] = relabel_to
            csz[ca] = old_ca
            csz[cb] = old_cb
            nxt[prv[a]] = a
            prv[nxt[a]] = a
            nxt[prv[b]] = b
            prv[nxt[b]] = b
            if ifree_root >= 0:
                ifree[ifree_root] = ifree_old
            if i_child >= 0:
                ipar[i_child] = i_child
            if c_child >= 0:
                r = c_child
                while par[r] != r:
                    r = par[r]
                psz[r] -= psz[c_child]
                par[c_child] = c_child
            if s_child >= 0:
                spar[s_child] = s_child
                sext[rs] = s_oldflag
            match[a] = -1
            match[b] = -1
            fpv[fnx[b]] = b
            fnx[fpv[b]] = b
            fpv[fnx[a]] = a
            fnx[fpv[a]] = a
            t = fnx[t]

        # -- candidates on a fresh vertex: splice its other three legs in --
        if ninst < V:
            m = V - ninst
            wfresh = weight * m
            b0 = legs + 4 * ninst
            slot = ninst
            a = s0
            va = vx[a]
            rva = va
            while par[rva] != rva:
                rva = par[rva]
            ria = -1
            if track_internal and va != V:
                ria = ifind(va)
            rs = a
            while spar[rs] != rs:
                rs = spar[rs]
            for j in range(4):
                if forced is not None and forced != -1 - j:
                    continue
                b = b0 + j
                # free list: a out, the three new legs in (ids ascend past all)
                fnx[fpv[a]] = fnx[a]
                fpv[fnx[a]] = fpv[a]
                for x in range(b0, b0 + 4):
                    if x == b:
                        continue
                    last = fpv[HEAD]
                    fnx[last] = x
                    fpv[x] = last
                    fnx[x] = HEAD
                    fpv[HEAD] = x
                match[a] = b
                match[b] = a
                # strand wiring of the fresh vertex; segment through b joins rs
                spar[b0] = b0
                spar[b0 + 1] = b0 + 1
                spar[b0 + 2] = b0 + 2
                spar[b0 + 3] = b0 + 3
                sext[b0] = sext[b0 + 1] = sext[b0 + 2] = sext[b0 + 3] = False
                if off0 > 0:
                    spar[b0 + off0] = b0
                if off1 > 1:
                    spar[b0 + off1] = b0 + 1
                if off2 > 2:
                    spar[b0 + off2] = b0 + 2
                if off3 > 3:
                    spar[b0 + off3] = b0 + 3
                rt = b
                while spar[rt] != rt:
                    rt = spar[rt]
                spar[rt] = rs
                # components: the fresh slot hangs off a's component
                par[slot] = rva
                psz[rva] += 1
                psz_rva_bump = rva
                if ria >= 0:
                    # fresh vertex: 4 new internal stubs, 2 consumed by the glue
                    ipar[slot] = ria
                    if track_internal:
                        ifree[ria] += 2
                else:
                    ipar[slot] = slot
                    if track_internal:
                        ifree[slot] = 3
                # boundary: replace a by the three new legs, in rotation order
                pa = prv[a]
                sa = nxt[a]
                f1 = b0 + ((j + 1) & 3)
                f2 = b0 + ((j + 2) & 3)
                f3 = b0 + ((j + 3) & 3)
                old_ca = csz[ca]
                if old_ca == 1:
                    nxt[f1] = f2
                    prv[f2] = f1
                    nxt[f2] = f3
                    prv[f3] = f2
                    nxt[f3] = f1
                    prv[f1] = f3
                else:
                    nxt[pa] = f1
                    prv[f1] = pa
                    nxt[f1] = f2
                    prv[f2] = f1
                    nxt[f2] = f3
                    prv[f3] = f2
                    nxt[f3] = sa
                    prv[sa] = f3
                cyc[f1] = ca
                cyc[f2] = ca
                cyc[f3] = ca
                csz[ca] = old_ca + 2

                if collect:
                    path.append(-1 - j)
                rec(depth1, wfresh, ninst + 1, ncomp, faces, kint, kext, nfree + 2)
                if collect:
                    path.pop()

                # ---- undo ----
                csz[ca] = old_ca
                if old_ca > 1:
                    nxt[pa] = a
                    prv[sa] = a
                psz[psz_rva_bump] -= 1
                par[slot] = slot
                ipar[slot] = slot
                if ria >= 0 and track_internal:
                    ifree[ria] -= 2
                spar[rt] = rt
                match[a] = -1
                match[b] = -1
                for x in range(b0 + 3, b0 - 1, -1):
                    if x == b:
                        continue
                    last = fpv[x]
                    fnx[last] = HEAD
                    fpv[HEAD] = last
                fpv[fnx[a]] = a
                fnx[fpv[a]] = a

    def _leaf_four_connected() -> bool:
        roots = set()
        for e in range(4):
            p = match[e]
            if p < 4:
                return False
            roots.add(ifind(vx[p]))
        return len(roots) == 1

    def _leaf_two_particle_reducible() -> bool:
        # internal edges only; legs attach components to the boundary strings
        edges = []
        for s in range(legs, S):
            t = match[s]
            if t >= legs and s < t:
                edges.append((vx[s], vx[t]))
        leg_at = [vx[match[e]] for e in range(legs)]
        return _has_two_two_cut(V, edges, leg_at)

    rec(0, 1, 0, 0, 0, 0, 0, legs)
    if collect:
        return prefixes
    return cells


def _has_two_two_cut(V, edges, leg_at) -> bool:
    """Is there a pair of edges whose removal splits the graph into exactly
    two components carrying two boundary strings each?"""
    if len(edges) < 2:
        return False
    # spanning forest; every non-tree edge gets a cycle bit, tree edges carry
    # the XOR of the cycles through them: equal signatures <=> 2-edge cut
    adj: dict = {v: [] for v in range(V)}
    for idx, (u, v) in enumerate(edges):
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    parent_edge = [-1] * V
    parent_vtx = [-1] * V
    depth = [0] * V
    order = []
    seen = [False] * V
    for root in range(V):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            u = stack.pop()
            order.append(u)
            for w, idx in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    parent_edge[w] = idx
                    parent_vtx[w] = u
                    depth[w] = depth[u] + 1
                    stack.append(w)
    tree_edges = set(e for e in parent_edge if e >= 0)
    sig = [0] * len(edges)
    bit = 1
    for idx, (u, v) in enumerate(edges):
        if idx in tree_edges:
            continue
        if u == v:
            sig[idx] ^= bit
            bit <<= 1
            continue
        sig[idx] ^= bit
        x, y = u, v
        while x != y:
            if depth[x] < depth[y]:
                x, y = y, x
            sig[parent_edge[x]] ^= bit
            x = parent_vtx[x]
        bit <<= 1
    groups: dict = {}
    for idx, s in enumerate(sig):
        if s:  # bridges (signature 0) can never sit in a 2|2 two-cut
            groups.setdefault(s, []).append(idx)
    for group in groups.values():
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                if _cut_splits_two_two(V, edges, leg_at, group[i], group[j]):
                    return True
    return False


def _cut_splits_two_two(V, edges, leg_at, e1, e2) -> bool:
    parent = list(range(V))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    comps = V
    for idx, (u, v) in enumerate(edges):
        if idx == e1 or idx == e2:
            continue
        a, b = find(u), find(v)
        if a != b:
            parent[a] = b
            comps -= 1
    if comps != 2:
        return False
    root0 = find(leg_at[0])
    count0 = sum(1 for v in leg_at if find(v) == root0)
    return count0 == 2


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------


def _fast_task(args):
    return _fast_search(*args)


def _run_fast(V, legs, strand_offsets, planar_only, allow_seed, twopi,
              gamma_only, threads):
    workers = _resolve_threads(threads)
    if workers <= 1 or V < 4:
        return _fast_search(V, legs, strand_offsets, planar_only, allow_seed,
                            twopi, gamma_only)
    depth_cap = 2
    prefixes = _fast_search(V, legs, strand_offsets, planar_only, allow_seed,
                            twopi, gamma_only, depth_cap=depth_cap)
    tasks = [
        (V, legs, strand_offsets, planar_only, allow_seed, twopi, gamma_only, prefix)
        for prefix in prefixes
    ]
    merged: dict = {}
    import multiprocessing as mp

    ctx = mp.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        for part in pool.map(_fast_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))):
            for key, value in part.items():
                merged[key] = merged.get(key, 0) + value
    return merged


_CLOSED_CACHE: dict = {}
_TWOPOINT_CACHE: dict = {}


def _strand_offsets(vertex_type: VertexType) -> tuple:
    off = [0] * 4
    for p, q in vertex_type.strand_pairs:
        off[p] = q
        off[q] = p
    return tuple(off)


def _check_ceiling(V: int, ceiling: int) -> None:
    if V > ceiling:
        raise CeilingError(
            f"V = {V} exceeds the enumeration ceiling {ceiling}; pass a larger "
            f"`ceiling=` explicitly if you really want this run"
        )


def enumerate_pairings(num_vertices: int, model: VertexModel | None = None, *,
                       type_counts: dict | None = None, planar_only: bool = False,
                       connected_only: bool = False, ceiling: int = DEFAULT_CEILING,
                       threads: int | None = None) -> CountTable:
    """Count every gluing of closed diagrams at the given vertex content.

    For a single vertex species ``num_vertices`` suffices; for mixed species
    pass ``type_counts`` (name -> count).  ``planar_only`` restricts to genus
    zero (with pruning during the search), ``connected_only`` to single-
    component gluings.
    """
    model = model or VertexModel.one_matrix()
    if type_counts is None:
        type_counts = {model.vertex_types[0].name: num_vertices}
    V = sum(type_counts.values())
    if V != num_vertices:
        raise ValueError("type_counts must sum to num_vertices")
    if V < 1:
        raise ValueError("enumeration needs V >= 1")
    _check_ceiling(V, ceiling)
    active = [(model.by_name(name), count) for name, count in sorted(type_counts.items())
              if count > 0]
    key = (tuple((vt.name, c) for vt, c in active), planar_only, connected_only)
    cached = _CLOSED_CACHE.get(key)
    if cached is not None:
        return cached
    if len(active) == 1:
        vt = active[0][0]
        cells = _run_fast(V, 0, _strand_offsets(vt), planar_only,
                          not connected_only, False, False, threads)
    else:
        patterns = []
        for vt, count in active:
            patterns.extend([vt.strand_pairs] * count)
        cells = _enumerate_plain(tuple(patterns), 0, planar_only, connected_only)
    counts = tuple((vt.name, count) for vt, count in active)
    table = CountTable(vertex_counts=counts, planar_only=planar_only,
                       connected_only=connected_only, cells=dict(sorted(cells.items())))
    _CLOSED_CACHE[key] = table
    return table


def two_point_table(num_vertices: int, legs: int, *, planar_only: bool = True,
                    twopi: bool = False, gamma_only: bool = False,
                    ceiling: int = DEFAULT_CEILING,
                    threads: int | None = None) -> TwoPointTable:
    """Count gluings with one marked boundary carrying ``legs`` half-edges.

    ``gamma_only`` restricts the search (with pruning) to connected four-point
    diagrams; the resulting table contains only those cells.
    """
    if legs not in (2, 4):
        raise ValueError("the marked boundary carries 2 or 4 legs")
    if num_vertices < 0:
        raise ValueError("num_vertices must be nonnegative")
    if gamma_only and legs != 4:
        raise ValueError("gamma_only applies to the four-leg boundary")
    _check_ceiling(num_vertices, ceiling)
    key = (num_vertices, legs, planar_only, twopi, gamma_only)
    cached = _TWOPOINT_CACHE.get(key)
    if cached is not None:
        return cached
    cells = _run_fast(num_vertices, legs, _strand_offsets(CROSSING), planar_only,
                      False, twopi, gamma_only, threads)
    table = TwoPointTable(num_vertices=num_vertices, legs=legs,
                          planar_only=planar_only, cells=dict(sorted(cells.items())))
    _TWOPOINT_CACHE[key] = table
    return table


# ---------------------------------------------------------------------------
# series assembly
# ---------------------------------------------------------------------------


def loop_polynomial(table: CountTable) -> dict:
    """Free-energy coefficient of one count table as a polynomial in n.

    Maps strand count k to the Wick-normalized weight of the connected
    planar cells: the coefficient of ``n^k`` at this vertex content.
    """
    norm = table.wick_normalization()
    return {k: Fraction(c, norm)
            for k, c in sorted(table.connected_planar_by_strands().items())}


def free_energy_polynomials(vmax: int, *, ceiling: int = DEFAULT_CEILING,
                            threads: int | None = None) -> dict:
    """Free-energy coefficients as polynomials in the loop weight n.

    Returns ``{V: {k: coefficient of n^k}}`` for 1 <= V <= vmax, from the
    connected planar count with k strands divided by 4^V V!.
    """
    out: dict = {}
    for V in range(1, vmax + 1):
        table = enumerate_pairings(V, planar_only=True, connected_only=True,
                                   ceiling=ceiling, threads=threads)
        out[V] = loop_polynomial(table)
    return out


def free_energy_series(vmax: int, n: Fraction | int = 1, *,
                       ceiling: int = DEFAULT_CEILING,
                       threads: int | None = None) -> Series:
    """Oracle free-energy series at loop weight ``n`` (exact)."""
    n = Fraction(n)
    polys = free_energy_polynomials(vmax, ceiling=ceiling, threads=threads)
    coeffs = [Fraction(0)] * (vmax + 1)
    for V, poly in polys.items():
        coeffs[V] = sum((c * n**k for k, c in poly.items()), Fraction(0))
    return Series.from_coeffs(coeffs, vmax)


def g2_series(vmax: int, n: Fraction | int = 1, *, ceiling: int = DEFAULT_CEILING,
              threads: int | None = None) -> Series:
    """Oracle two-point series with a fixed external color (planar)."""
    n = Fraction(n)
    coeffs = []
    for V in range(vmax + 1):
        table = two_point_table(V, 2, ceiling=ceiling, threads=threads)
        coeffs.append(table.coefficient(n))
    return Series.from_coeffs(coeffs, vmax)


def g4_series(vmax: int, n: Fraction | int = 1, *, color_boundary: bool = False,
              ceiling: int = DEFAULT_CEILING, threads: int | None = None) -> Series:
    """Oracle four-point series (planar).

    With ``color_boundary`` the boundary loops are also weighted by ``n``,
    which is the color-summed correlator whose quarter is d/dg of the free
    energy of the n-color model.
    """
    n = Fraction(n)
    coeffs = []
    for V in range(vmax + 1):
        table = two_point_table(V, 4, ceiling=ceiling, threads=threads)
        coeffs.append(table.coefficient(n, color_boundary=color_boundary))
    return Series.from_coeffs(coeffs, vmax)


def gamma_series(vmax: int, *, ceiling: int = DEFAULT_CEILING,
                 threads: int | None = None) -> Series:
    """Oracle connected four-point (tangle) series, one color, planar."""
    coeffs = []
    for V in range(vmax + 1):
        table = two_point_table(V, 4, gamma_only=True, ceiling=ceiling,
                                threads=threads)
        coeffs.append(table.coefficient(1, connected_four=True))
    return Series.from_coeffs(coeffs, vmax)


def twopi_gamma_series(vmax: int, *, ceiling: int = DEFAULT_CEILING,
                       threads: int | None = None) -> Series:
    """Oracle series of two-particle-irreducible tangles (one color, planar)."""
    coeffs = []
    for V in range(vmax + 1):
        table = two_point_table(V, 4, twopi=True, gamma_only=True,
                                ceiling=ceiling, threads=threads)
        coeffs.append(table.coefficient(1, connected_four=True, twopi=True))
    return Series.from_coeffs(coeffs, vmax)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def count_table_csv(tables) -> str:
    """Render count tables as CSV with one row per cell."""
    lines = ["V,vertex_type_counts,genus,strands,connected,count"]
    for table in tables:
        type_desc = ";".join(f"{name}={count}" for name, count in table.vertex_counts)
        for (genus, strands, connected), count in sorted(table.cells.items()):
            lines.append(
                f"{table.num_vertices},{type_desc},{genus},{strands},"
                f"{str(bool(connected)).lower()},{count}"
            )
    return "\n".join(lines) + "\n"
