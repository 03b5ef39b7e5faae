"""Finite geometries hidden in products of POVM projectors.

Blocks are k-subsets of projector indices (k = 3 or 4) whose cyclic trace
tr(P_i1 ... P_ik) hits a target value.  For rank-1 projectors that trace
is a product of k overlaps divided by norm^k, so everything is read off
the overlap table of the POVM.  A float pass over the table screens
candidates, each survivor is then confirmed exactly.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cyclo import Cyclotomic, format_cyclo, root_of_unity
from .linalg import integer_spectrum
from .pauli import WeylOperator, _product_monomial, cosets
from .povm import Povm

__all__ = [
    "Block",
    "IncidenceStructure",
    "SimpleGraph",
    "PHASE_SETS",
    "tuple_traces",
    "filter_blocks",
    "find_blocks",
    "PAPPUS_LINES",
    "is_pappus",
    "is_pasch",
    "is_mermin_grid",
    "is_hesse",
    "named_detections",
    "spectrum_report",
]

PRESCREEN_TOL = 1e-9


def _phase_set(name: str) -> frozenset | None:
    if name == "pm1":
        return frozenset({Fraction(0), Fraction(1, 2)})
    if name == "omega3":
        return frozenset({Fraction(0), Fraction(1, 3), Fraction(2, 3)})
    if name == "any":
        return None
    raise ValueError(f"unknown phase filter {name!r}")


# Allowed operator-product scalars, as turns of exp(2 pi i t); "any" accepts every scalar.
PHASE_SETS = ("pm1", "omega3", "any")


def _arrangements(idx: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Cyclic orders of a sorted tuple up to rotation and reversal."""
    if len(idx) == 3:
        return [idx]
    a, b, c, d = idx
    return [(a, b, c, d), (a, b, d, c), (a, c, b, d)]


@dataclass(frozen=True)
class Block:
    indices: tuple[int, ...]
    trace: Cyclotomic
    arrangement: tuple[int, ...]
    order: tuple[int, ...] | None = None
    op_phase: Fraction | None = None

    @property
    def k(self) -> int:
        return len(self.indices)

    def with_witness(self, order, phase) -> "Block":
        return Block(self.indices, self.trace, self.arrangement, tuple(order), phase)

    def to_json(self, labels: Sequence[str] | None = None) -> dict:
        out = {
            "indices": list(self.indices),
            "trace": format_cyclo(self.trace),
            "arrangement": list(self.arrangement),
        }
        if labels is not None:
            out["labels"] = [labels[i] for i in self.indices]
        if self.order is not None:
            out["order"] = list(self.order)
            if labels is not None:
                out["order_labels"] = [labels[i] for i in self.order]
            out["op_phase"] = format_cyclo(root_of_unity(self.op_phase.denominator, self.op_phase.numerator))
        return out


def _cyclic_trace(p: Povm, arr: Sequence[int]) -> Cyclotomic:
    S = p.overlaps
    k = len(arr)
    acc = S[arr[0]][arr[1]]
    for t in range(1, k):
        acc = acc * S[arr[t]][arr[(t + 1) % k]]
    return (acc / p.norm_sq ** k).canonical()


def _float_candidates(F: np.ndarray, k: int, first: int, targets: list[complex]) -> list[tuple[int, ...]]:
    """Tuples with smallest index ``first`` whose cyclic trace in some arrangement is near a target."""
    m = F.shape[0]
    out = []
    if k == 3:
        i = first
        # T[j, l] = F[i,j] F[j,l] F[l,i]
        T = F[i, :, None] * F * F[:, i][None, :]
        J, L = np.triu_indices(m, 1)
        sel = J > i
        J, L = J[sel], L[sel]
        vals = T[J, L]
        hit = np.zeros(len(vals), dtype=bool)
        for t in targets:
            hit |= np.abs(vals - t) < PRESCREEN_TOL
            hit |= np.abs(vals - np.conj(t)) < PRESCREEN_TOL
        for j, l in zip(J[hit], L[hit]):
            out.append((i, int(j), int(l)))
        return out
    a = first
    for b in range(a + 1, m):
        C, D = np.triu_indices(m, 1)
        sel = C > b
        C, D = C[sel], D[sel]
        vals = [
            F[a, b] * F[b, C] * F[C, D] * F[D, a],
            F[a, b] * F[b, D] * F[D, C] * F[C, a],
            F[a, C] * F[C, b] * F[b, D] * F[D, a],
        ]
        hit = np.zeros(len(C), dtype=bool)
        for v in vals:
            for t in targets:
                hit |= np.abs(v - t) < PRESCREEN_TOL
                hit |= np.abs(v - np.conj(t)) < PRESCREEN_TOL
        for c, d in zip(C[hit], D[hit]):
            out.append((a, b, int(c), int(d)))
    return out


def _matches(value: Cyclotomic, targets: Sequence[Cyclotomic]) -> bool:
    return any(value == t or value == t.conjugate() for t in targets)


def _exact_block(p: Povm, idx: tuple[int, ...], targets: Sequence[Cyclotomic] | None) -> Block | None:
    for arr in _arrangements(idx):
        t = _cyclic_trace(p, arr)
        if targets is None:
            return Block(idx, _canonical_sign(t), arr)
        if _matches(t, targets):
            return Block(idx, _canonical_sign(t), arr)
    return None


def _canonical_sign(t: Cyclotomic) -> Cyclotomic:
    # choose between t and conj(t): nonnegative imaginary part first
    c = t.conjugate()
    if complex(t).imag < -PRESCREEN_TOL:
        return c.canonical()
    return t


def tuple_traces(p: Povm, k: int, targets: Sequence | None = None, *,
                 threads: int = 1, prescreen: bool = True) -> list[Block]:
    """k-subsets of projectors with their cyclic traces.

    With ``targets`` only tuples whose trace (in some cyclic arrangement, or
    its conjugate) equals one of the targets are returned; every returned
    value is exact.  Without targets all subsets are listed, which is only
    sensible for small d.  Output order is the lexicographic order of the
    index tuples regardless of ``threads``.
    """
    if k not in (3, 4):
        raise ValueError("k must be 3 or 4")
    m = len(p)
    tgt = None if targets is None else [t if isinstance(t, Cyclotomic) else Cyclotomic.rational(t) for t in targets]
    F = p.overlaps_float if (prescreen and tgt is not None) else None
    _ = p.overlaps  # build the exact table once, before any worker starts

    def work(first: int) -> list[Block]:
        if F is not None:
            cands = _float_candidates(F, k, first, [complex(t) for t in tgt])
        else:
            cands = ((first,) + rest for rest in itertools.combinations(range(first + 1, m), k - 1))
        out = []
        for idx in cands:
            b = _exact_block(p, idx, tgt)
            if b is not None:
                out.append(b)
        return out

    firsts = range(m - k + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, firsts))
    else:
        parts = [work(f) for f in firsts]
    blocks = [b for part in parts for b in part]
    blocks.sort(key=lambda b: b.indices)
    return blocks


def _witness(ops: Sequence[WeylOperator], idx: tuple[int, ...], allowed: frozenset | None):
    """First ordering (lexicographic) whose operator product is an allowed multiple of I."""
    first = [ops[i] for i in idx]
    (targets, _), _ = _product_monomial(first)
    if any(t != j for j, t in enumerate(targets)):
        # the permutation part of a product of Weyl operators does not depend on the order
        return None
    for order in itertools.permutations(idx):
        (tg, ph), n = _product_monomial([ops[i] for i in order])
        p0 = ph[0]
        if any(x != p0 for x in ph):
            continue
        turn = Fraction(p0, n)
        if allowed is None or turn in allowed:
            return order, turn
    return None


def filter_blocks(blocks: Iterable[Block], trace_value, *, povm: Povm, phases: str | None = None,
                  signed: bool = False, ops: Sequence[WeylOperator] | None = None) -> list[Block]:
    """Blocks whose trace equals ``trace_value`` (or its negative if ``signed``), optionally phase-filtered.

    The phase filter multiplies the labeling Weyl operators (phased coset
    representatives unless ``ops`` is given) over all orderings of the block
    and keeps the block when some product is an allowed multiple of the
    identity; the first such ordering is recorded as the witness.
    """
    tv = trace_value if isinstance(trace_value, Cyclotomic) else Cyclotomic.rational(trace_value)
    targets = [tv, -tv] if signed else [tv]
    allowed = _phase_set(phases) if phases else None
    ops = ops or cosets(povm.spec, phased=True)
    out = []
    for b in blocks:
        if not _matches(b.trace, targets):
            continue
        if phases:
            w = _witness(ops, b.indices, allowed)
            if w is None:
                continue
            b = b.with_witness(*w)
        out.append(b)
    return out


def find_blocks(p: Povm, k: int, trace_value, *, phases: str | None = None, signed: bool = False,
                threads: int = 1) -> list[Block]:
    tv = trace_value if isinstance(trace_value, Cyclotomic) else Cyclotomic.rational(trace_value)
    targets = [tv, -tv] if signed else [tv]
    blocks = tuple_traces(p, k, targets, threads=threads)
    return filter_blocks(blocks, tv, povm=p, phases=phases, signed=signed)


# -- graphs ------------------------------------------------------------------------


class SimpleGraph:
    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = (), labels: Sequence | None = None):
        self.n = n
        self.labels = list(labels) if labels is not None else list(range(n))
        self.adj: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            if a == b:
                raise ValueError("loops are not allowed")
            self.adj[a].add(b)
            self.adj[b].add(a)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.n) for b in sorted(self.adj[a]) if a < b]

    def degrees(self) -> list[int]:
        return [len(s) for s in self.adj]

    def adjacency(self) -> list[list[int]]:
        return [[1 if b in self.adj[a] else 0 for b in range(self.n)] for a in range(self.n)]

    def induced(self, vertices: Sequence[int]) -> "SimpleGraph":
        pos = {v: i for i, v in enumerate(vertices)}
        edges = [(pos[a], pos[b]) for a in vertices for b in self.adj[a] if b in pos and pos[a] < pos[b]]
        return SimpleGraph(len(vertices), edges, [self.labels[v] for v in vertices])

    def component_sets(self) -> list[list[int]]:
        seen, out = set(), []
        for s in range(self.n):
            if s in seen:
                continue
            comp, stack = [], [s]
            seen.add(s)
            while stack:
                v = stack.pop()
                comp.append(v)
                for w in self.adj[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            out.append(sorted(comp))
        return out

    def components(self) -> list["SimpleGraph"]:
        return [self.induced(c) for c in self.component_sets()]

    def spectrum(self, candidates: Iterable[int]) -> dict:
        return integer_spectrum(self.adjacency(), list(candidates))

    def maximal_cliques(self) -> list[list[int]]:
        """All maximal cliques (Bron-Kerbosch with pivoting), each sorted, in sorted order."""
        out = []

        def bk(r, p, x):
            if not p and not x:
                out.append(sorted(r))
                return
            u = max(p | x, key=lambda v: len(self.adj[v] & p))
            for v in sorted(p - self.adj[u]):
                bk(r | {v}, p & self.adj[v], x & self.adj[v])
                p = p - {v}
                x = x | {v}

        bk(set(), set(range(self.n)), set())
        return sorted(out)

    def clique_profile(self) -> dict[int, int]:
        return dict(sorted(Counter(len(c) for c in self.maximal_cliques()).items()))

    def max_cliques(self, size: int) -> int:
        """Number of maximal cliques with exactly ``size`` vertices."""
        return sum(1 for c in self.maximal_cliques() if len(c) == size)

    def is_petersen(self) -> bool:
        if self.n != 10 or any(d != 3 for d in self.degrees()):
            return False
        spec = self.spectrum([3, 1, -2])
        return spec["multiplicities"] == {3: 1, 1: 5, -2: 4}

    def to_dot(self, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        for v in range(self.n):
            lines.append(f'  {v} [label="{self.labels[v]}"];')
        for a, b in self.edges:
            lines.append(f"  {a} -- {b};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_edge_list(self) -> str:
        return "".join(f"{a} {b}\n" for a, b in self.edges)


# -- incidence structures ----------------------------------------------------------


class IncidenceStructure:
    """Points are projector indices; lines are the blocks through them."""

    def __init__(self, lines: Sequence[Block] | Sequence[Sequence[int]], labels: Sequence[str] | None = None):
        self.blocks: list[Block | None] = [b if isinstance(b, Block) else None for b in lines]
        self.lines: list[tuple[int, ...]] = [tuple(sorted(b.indices if isinstance(b, Block) else b)) for b in lines]
        self.points: list[int] = sorted({x for ln in self.lines for x in ln})
        self.labels = labels

    def label(self, pt: int) -> str:
        return self.labels[pt] if self.labels is not None else str(pt)

    def point_degrees(self) -> dict[int, int]:
        c = Counter(x for ln in self.lines for x in ln)
        return {p: c[p] for p in self.points}

    def config_type(self) -> tuple[int, int, int, int] | None:
        """(p, a, l, b) when every point is on a lines and every line has b points."""
        if not self.lines:
            return None
        degs = set(self.point_degrees().values())
        sizes = {len(ln) for ln in self.lines}
        if len(degs) != 1 or len(sizes) != 1:
            return None
        return len(self.points), degs.pop(), len(self.lines), sizes.pop()

    def config_summary(self) -> dict:
        ct = self.config_type()
        if ct is not None:
            return {"uniform": True, "points": ct[0], "lines_per_point": ct[1],
                    "lines": ct[2], "points_per_line": ct[3]}
        return {
            "uniform": False,
            "points": len(self.points),
            "lines": len(self.lines),
            "point_degrees": dict(sorted(Counter(self.point_degrees().values()).items())),
            "line_sizes": dict(sorted(Counter(len(ln) for ln in self.lines).items())),
        }

    def sub(self, line_ids: Sequence[int]) -> "IncidenceStructure":
        src = [self.blocks[i] if self.blocks[i] is not None else self.lines[i] for i in line_ids]
        return IncidenceStructure(src, self.labels)

    def collinearity_graph(self) -> SimpleGraph:
        pos = {p: i for i, p in enumerate(self.points)}
        edges = set()
        for ln in self.lines:
            for a, b in itertools.combinations(ln, 2):
                edges.add((pos[a], pos[b]))
        return SimpleGraph(len(self.points), sorted(edges), [self.label(p) for p in self.points])

    def intersection_graph(self, shared: int | None = None) -> SimpleGraph:
        """Lines as vertices; edge when two lines share exactly ``shared`` points (any, if None)."""
        inc = defaultdict(list)
        for i, ln in enumerate(self.lines):
            for x in ln:
                inc[x].append(i)
        meet = Counter()
        for ls in inc.values():
            for a, b in itertools.combinations(ls, 2):
                meet[(a, b)] += 1
        edges = [e for e, c in meet.items() if shared is None or c == shared]
        return SimpleGraph(len(self.lines), sorted(edges), [str(list(ln)) for ln in self.lines])

    def line_graph(self) -> SimpleGraph:
        return self.intersection_graph(None)

    def incidence_graph(self) -> SimpleGraph:
        pos = {p: i for i, p in enumerate(self.points)}
        npts = len(self.points)
        edges = [(pos[x], npts + i) for i, ln in enumerate(self.lines) for x in ln]
        labels = [self.label(p) for p in self.points] + [str(list(ln)) for ln in self.lines]
        return SimpleGraph(npts + len(self.lines), edges, labels)

    def components(self) -> list["IncidenceStructure"]:
        g = self.intersection_graph(None)
        return [self.sub(c) for c in g.component_sets()]

    def pair_values(self, p: Povm) -> list[Cyclotomic]:
        vals = {p.pair_trace(a, b) for a, b in itertools.combinations(self.points, 2)}
        return sorted(vals, key=lambda v: -float(v))


# -- named structures ---------------------------------------------------------------

# Affine plane AG(2,3) on points 3x + y; the Pappus configuration is that plane
# with one parallel class (the "vertical" lines) removed.
_AG23 = [(x, y) for x in range(3) for y in range(3)]
HESSE_LINES = sorted(
    {tuple(sorted(3 * ((x0 + t * dx) % 3) + (y0 + t * dy) % 3 for t in range(3)))
     for x0, y0 in _AG23 for dx, dy in ((0, 1), (1, 0), (1, 1), (1, 2))}
)
PAPPUS_LINES = sorted(
    {tuple(sorted(3 * x + (m * x + b) % 3 for x in range(3))) for m in range(3) for b in range(3)}
)


def _isomorphic(lines: Sequence[Sequence[int]], canon: Sequence[Sequence[int]]) -> dict | None:
    """Exhaustive backtracking search for a point bijection carrying lines onto canon."""
    pts = sorted({x for ln in lines for x in ln})
    cpts = sorted({x for ln in canon for x in ln})
    if len(pts) != len(cpts) or len(lines) != len(canon):
        return None
    canon_set = {tuple(sorted(ln)) for ln in canon}
    canon_pairs = defaultdict(set)
    for ln in canon:
        for a, b in itertools.combinations(ln, 2):
            canon_pairs[a].add(b)
            canon_pairs[b].add(a)
    pairs = defaultdict(set)
    for ln in lines:
        for a, b in itertools.combinations(ln, 2):
            pairs[a].add(b)
            pairs[b].add(a)
    mapping: dict[int, int] = {}
    used = set()

    def extend(i):
        if i == len(pts):
            return all(tuple(sorted(mapping[x] for x in ln)) in canon_set for ln in lines)
        p = pts[i]
        for c in cpts:
            if c in used or len(canon_pairs[c]) != len(pairs[p]):
                continue
            if any((q in pairs[p]) != (mapping[q] in canon_pairs[c]) for q in mapping):
                continue
            mapping[p] = c
            used.add(c)
            if extend(i + 1):
                return True
            del mapping[p]
            used.discard(c)
        return False

    return dict(mapping) if extend(0) else None


def is_pappus(s: IncidenceStructure) -> bool:
    return s.config_type() == (9, 3, 9, 3) and _isomorphic(s.lines, PAPPUS_LINES) is not None


def is_hesse(s: IncidenceStructure) -> bool:
    return s.config_type() == (9, 4, 12, 3) and _isomorphic(s.lines, HESSE_LINES) is not None


def is_pasch(s: IncidenceStructure) -> bool:
    if s.config_type() != (6, 2, 4, 3):
        return False
    return all(len(set(a) & set(b)) == 1 for a, b in itertools.combinations(s.lines, 2))


def is_mermin_grid(s: IncidenceStructure) -> bool:
    """3x3 grid: 9 points, 6 lines of 3, each point on 2 lines, two classes of 3 disjoint lines."""
    if s.config_type() != (9, 2, 6, 3):
        return False
    g = s.intersection_graph(None)
    # the line-intersection graph of a grid is K_{3,3}
    return all(d == 3 for d in g.degrees()) and all(
        len(set(s.lines[a]) & set(s.lines[b])) == 1 for a, b in g.edges
    ) and _bipartite(g)


def _bipartite(g: SimpleGraph) -> bool:
    color = {}
    for s in range(g.n):
        if s in color:
            continue
        color[s] = 0
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g.adj[v]:
                if w not in color:
                    color[w] = 1 - color[v]
                    stack.append(w)
                elif color[w] == color[v]:
                    return False
    return True


def named_detections(s: IncidenceStructure) -> list[str]:
    out = []
    ct = s.config_type()
    if ct is not None:
        p, a, l, b = ct
        out.append(f"[{p}_{a}, {l}_{b}]" if (p, a) != (l, b) else f"[{p}_{a}]")
    if is_mermin_grid(s):
        out.append("Mermin square")
    if is_pasch(s):
        out.append("Pasch")
    if is_hesse(s):
        out.append("Hesse")
    if ct == (9, 3, 9, 3):
        out.append("Pappus" if is_pappus(s) else "[9_3] (not Pappus)")
    return out


def spectrum_report(g: SimpleGraph, claimed: dict[int, int] | None = None, extra: Iterable[int] = ()) -> dict:
    """Exact multiplicities of claimed eigenvalues (plus 0 and ``extra``), next to the claim."""
    cands = set(extra) | {0}
    if claimed:
        cands |= set(claimed)
    res = g.spectrum(sorted(cands))
    out = {
        "vertices": g.n,
        "computed": {str(k): v for k, v in sorted(res["multiplicities"].items(), reverse=True)},
        "accounted": res["accounted"],
        "residual_non_candidate": res["residual"],
    }
    if claimed:
        total = sum(claimed.values())
        out["claimed"] = {str(k): v for k, v in sorted(claimed.items(), reverse=True)}
        out["claimed_multiplicity_sum"] = total
        out["claim_consistent_with_size"] = total == g.n
        out["claim_matches"] = res["multiplicities"] == claimed
    return out
