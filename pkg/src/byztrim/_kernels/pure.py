"""Pure-Python condition-check kernels.

These are the hot inner loops of the robustness checks: exhaustive
partition enumeration and reduced-graph enumeration over bitmask graphs.
byztrim._kernels.native is the compiled twin; both must produce identical
results (same verdicts, same first witnesses, same examined counts).

Graphs are passed as per-node in-neighbour bitmasks.  Enumeration orders
are part of the contract:

* fault sets F by increasing size, then lexicographic on the sorted tuple;
* L/C/R assignments as base-3 counters over the surviving nodes in node
  order (most significant digit = smallest node id; digit 0=L, 1=C, 2=R);
* per-node in-edge removals in lexicographic combination order, with the
  last surviving node varying fastest.
"""

from __future__ import annotations

import itertools

BACKEND = "pure"

# failing_reduction status codes
PASS = 0
FAIL = 1
BUDGET_EXCEEDED = 2


def _fault_masks(n: int, f: int) -> list[int]:
    masks = []
    for k in range(min(f, n) + 1):
        for combo in itertools.combinations(range(n), k):
            m = 0
            for v in combo:
                m |= 1 << v
            masks.append(m)
    return masks


def violating_partition(
    n: int, in_masks: tuple[int, ...], f: int, r: int
) -> tuple[int, int, int, int] | None:
    """First partition (F, L, C, R) with |F| <= f, L and R non-empty, where
    no node of L has >= r in-neighbours in C|R and no node of R has >= r
    in-neighbours in L|C.  Returns bitmasks, or None if the condition holds.
    """
    for f_mask in _fault_masks(n, f):
        rest = [v for v in range(n) if not (f_mask >> v) & 1]
        if len(rest) < 2:
            continue
        for digits in itertools.product((0, 1, 2), repeat=len(rest)):
            l_mask = c_mask = r_mask = 0
            for v, d in zip(rest, digits):
                if d == 0:
                    l_mask |= 1 << v
                elif d == 1:
                    c_mask |= 1 << v
                else:
                    r_mask |= 1 << v
            if not l_mask or not r_mask:
                continue
            cr = c_mask | r_mask
            if any((in_masks[v] & cr).bit_count() >= r for v in _bits(l_mask)):
                continue
            lc = l_mask | c_mask
            if any((in_masks[v] & lc).bit_count() >= r for v in _bits(r_mask)):
                continue
            return (f_mask, l_mask, c_mask, r_mask)
    return None


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _root_count(survivors: list[int], kept_in: dict[int, int], at_least: int) -> int:
    """Count nodes whose reachable set covers all survivors, stopping once
    `at_least` roots are found."""
    out_masks = {v: 0 for v in survivors}
    for v in survivors:
        m = kept_in[v]
        while m:
            low = m & -m
            out_masks[low.bit_length() - 1] |= 1 << v
            m ^= low
    full = 0
    for v in survivors:
        full |= 1 << v
    count = 0
    for v in survivors:
        seen = 1 << v
        frontier = out_masks[v] & ~seen
        while frontier:
            seen |= frontier
            nxt = 0
            for u in _bits(frontier):
                nxt |= out_masks[u]
            frontier = nxt & ~seen
        if seen == full:
            count += 1
            if count >= at_least:
                return count
    return count


def failing_reduction(
    n: int,
    in_masks: tuple[int, ...],
    f: int,
    min_source_size: int,
    budget: int,
) -> tuple[int, int, tuple[int, dict[int, int]] | None]:
    """Search reduced graphs for one whose source components violate the
    requirement, examining only minimal reductions (exactly min(f, in-degree)
    extra in-edges removed per node).

    Source-component existence/size requirements are monotone in the edge
    set, so the minimal reductions decide the verdict for the whole family.

    Requirement: the reduction has a unique source component of size
    >= min_source_size (min_source_size=1 is the exactly-one-source check).
    Returns (status, examined, witness) where witness is
    (fault_mask, {node: kept in-mask}) for a failing reduction.
    """
    examined = 0
    for f_mask in _fault_masks(n, min(f, n - 1)):
        survivors = [v for v in range(n) if not (f_mask >> v) & 1]
        options: list[list[int]] = []
        for v in survivors:
            base = in_masks[v] & ~f_mask
            nbrs = list(_bits(base))
            w = min(f, len(nbrs))
            kept_options = []
            for removal in itertools.combinations(nbrs, w):
                drop = 0
                for u in removal:
                    drop |= 1 << u
                kept_options.append(base & ~drop)
            options.append(kept_options)
        for combo in itertools.product(*options):
            examined += 1
            if examined > budget:
                return (BUDGET_EXCEEDED, examined, None)
            kept_in = dict(zip(survivors, combo))
            if _root_count(survivors, kept_in, min_source_size) < min_source_size:
                return (FAIL, examined, (f_mask, kept_in))
    return (PASS, examined, None)
