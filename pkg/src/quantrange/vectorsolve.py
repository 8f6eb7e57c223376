"""Vector quantified range bounds via per-component prefix rewriting.

Outer box: each component's scalar outer bound is computed on the original
prefix; the product of those intervals contains the quantified set.

Inner box: the existential variables are partitioned among the output
components by an assignment pi.  For component j, every existential variable
assigned elsewhere is demoted to the universal block of its pair (after the
pair's original universals, preserving declaration order within the block),
and only the variables with pi = j stay existential.  The per-component
scalar inner bounds on these rewritten prefixes multiply to a guaranteed
inner box of the vector set.

Assignment search:
  * exhaustive — score every assignment (components^existentials), keep the
    one maximizing (number of nonempty components, total inner width), ties
    resolved toward the lexicographically smallest assignment vector in
    normalized-prefix variable order;
  * greedy — seed each component with its universal outer-row widths as a
    deficit, then hand out existential variables in decreasing best-row
    order to the component where min(row width, remaining deficit) is
    largest.  Linear cost, no optimality guarantee.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .exprs import Expr, eval_interval
from .intervals import EMPTY, Interval, MaybeInterval, frac_to_float_down, frac_to_float_up, is_empty
from .problem import Block, QuantifiedProblem, Quantifier, normalize_blocks
from .scalar import (
    ZERO_ROW,
    ContributionRow,
    affine_coefficients,
    assemble_bounds,
    contribution_rows,
    exact_affine_range,
    solve_scalar,
)

__all__ = [
    "ComponentResult",
    "VectorResult",
    "existential_order",
    "derived_blocks",
    "inner_for_assignment",
    "solve_vector",
]

SuppliedRows = Mapping[str, Mapping[str, ContributionRow]]


@dataclass(slots=True)
class ComponentResult:
    """Per-output bounds: outer from the original prefix, inner from the
    rewritten prefix of the chosen assignment."""

    name: str
    inner: MaybeInterval
    outer: MaybeInterval
    center_value: Interval
    rows: dict[str, ContributionRow]
    method: str
    derived: tuple[Block, ...]
    inner_failed_pair: int | None
    outer_failed_pair: int | None


@dataclass(slots=True)
class VectorResult:
    components: tuple[ComponentResult, ...]
    assignment: dict[str, int]  # existential variable -> component index
    strategy_used: str  # "exhaustive" or "greedy"

    @property
    def inner_empty(self) -> bool:
        return any(is_empty(c.inner) for c in self.components)


def existential_order(problem: QuantifiedProblem) -> tuple[str, ...]:
    """Existential variables in normalized-prefix order (the canonical order
    for assignment vectors)."""
    names: list[str] = []
    for block in problem.normalized():
        if block.quantifier is Quantifier.EXISTS:
            names.extend(block.names)
    return tuple(names)


def derived_blocks(
    problem: QuantifiedProblem, component: int, assignment: Mapping[str, int]
) -> tuple[Block, ...]:
    """Prefix rewrite for one component under an existential assignment."""
    out: list[Block] = []
    for fa, ex in problem.normalized_pairs():
        moved = tuple(n for n in ex.names if assignment[n] != component)
        kept = tuple(n for n in ex.names if assignment[n] == component)
        out.append(Block(Quantifier.FORALL, fa.names + moved))
        out.append(Block(Quantifier.EXISTS, kept))
    return tuple(out)


# ---------------------------------------------------------------------------
# Fast per-assignment inner evaluation (shared by search and final solve)
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class _ComponentCache:
    name: str
    expr: Expr
    fc: Interval
    rows: dict[str, ContributionRow]
    affine: tuple[Fraction, dict[str, Fraction]] | None  # None -> row assembly


def _build_caches(
    problem: QuantifiedProblem, supplied: SuppliedRows | None
) -> list[_ComponentCache]:
    center_env = problem.center_env()
    caches: list[_ComponentCache] = []
    for out in problem.outputs:
        fc = eval_interval(out.expr, center_env)
        if supplied is not None and out.name in supplied:
            rows = dict(supplied[out.name])
            affine = None  # supplied rows force row assembly
        else:
            rows = contribution_rows(out.expr, problem)
            affine = affine_coefficients(out.expr)
        caches.append(_ComponentCache(out.name, out.expr, fc, rows, affine))
    return caches


def _paired(blocks: Sequence[Block]) -> tuple[tuple[Block, Block], ...]:
    blocks = normalize_blocks(blocks)
    return tuple((blocks[2 * k], blocks[2 * k + 1]) for k in range(len(blocks) // 2))


def _component_inner(
    problem: QuantifiedProblem,
    cache: _ComponentCache,
    component: int,
    assignment: Mapping[str, int],
    names: Sequence[str],
) -> MaybeInterval:
    blocks = derived_blocks(problem, component, assignment)
    if cache.affine is not None:
        delta0, coeffs = cache.affine
        exact = exact_affine_range(delta0, coeffs, problem.with_blocks(blocks))
        if exact is None:
            return EMPTY
        lo, hi = frac_to_float_up(exact[0]), frac_to_float_down(exact[1])
        return Interval(lo, hi) if lo <= hi else EMPTY
    return assemble_bounds(cache.fc, cache.rows, _paired(blocks), names).inner


def inner_for_assignment(
    problem: QuantifiedProblem,
    assignment: Mapping[str, int],
    supplied: SuppliedRows | None = None,
) -> tuple[MaybeInterval, ...]:
    """Per-component inner intervals under a specific existential assignment."""
    caches = _build_caches(problem, supplied)
    names = [v.name for v in problem.variables]
    return tuple(
        _component_inner(problem, cache, j, assignment, names)
        for j, cache in enumerate(caches)
    )


# ---------------------------------------------------------------------------
# Assignment search
# ---------------------------------------------------------------------------


def _score(inners: Sequence[MaybeInterval]) -> tuple[int, Fraction]:
    nonempty = 0
    width = Fraction(0)
    for iv in inners:
        if not is_empty(iv):
            nonempty += 1
            width += Fraction(iv.hi) - Fraction(iv.lo)
    return nonempty, width


def _exhaustive_assignment(
    problem: QuantifiedProblem,
    caches: Sequence[_ComponentCache],
    exist_names: Sequence[str],
) -> dict[str, int]:
    names = [v.name for v in problem.variables]
    m = len(caches)
    best_vec: tuple[int, ...] | None = None
    best_score: tuple[int, Fraction] | None = None
    for vec in itertools.product(range(m), repeat=len(exist_names)):
        assignment = dict(zip(exist_names, vec))
        inners = [
            _component_inner(problem, cache, j, assignment, names)
            for j, cache in enumerate(caches)
        ]
        score = _score(inners)
        if best_score is None or score > best_score:
            best_score = score
            best_vec = vec
    assert best_vec is not None
    return dict(zip(exist_names, best_vec))


def _greedy_assignment(
    problem: QuantifiedProblem,
    caches: Sequence[_ComponentCache],
    exist_names: Sequence[str],
) -> dict[str, int]:
    universal = [
        name
        for block in problem.normalized()
        if block.quantifier is Quantifier.FORALL
        for name in block.names
    ]

    def row_width(cache: _ComponentCache, name: str, inner: bool) -> Fraction:
        row = cache.rows.get(name, ZERO_ROW)
        iv = row.inner if inner else row.outer
        return Fraction(iv.hi) - Fraction(iv.lo)

    deficit = [
        sum((row_width(cache, u, inner=False) for u in universal), Fraction(0))
        for cache in caches
    ]
    order = sorted(
        range(len(exist_names)),
        key=lambda i: max(row_width(c, exist_names[i], inner=True) for c in caches),
        reverse=True,
    )
    assignment: dict[str, int] = {}
    for i in order:
        name = exist_names[i]
        best_j = 0
        best_gain: Fraction | None = None
        for j, cache in enumerate(caches):
            gain = min(row_width(cache, name, inner=True), deficit[j])
            if best_gain is None or gain > best_gain:
                best_gain = gain
                best_j = j
        assignment[name] = best_j
        deficit[best_j] -= row_width(caches[best_j], name, inner=True)
    return assignment


# ---------------------------------------------------------------------------
# Full vector solve
# ---------------------------------------------------------------------------


def solve_vector(
    problem: QuantifiedProblem,
    supplied: SuppliedRows | None = None,
    strategy: str = "auto",
    exhaustive_limit: int = 4096,
    pinned: Mapping[str, int] | None = None,
) -> VectorResult:
    """Inner and outer boxes for all outputs.

    strategy: "auto" (exhaustive when the assignment count fits under
    exhaustive_limit, greedy otherwise), "exhaustive" (error if over the
    limit), or "greedy".  A pinned assignment (existential variable ->
    component index, covering every existential variable) bypasses the
    search entirely.
    """
    caches = _build_caches(problem, supplied)
    exist_names = existential_order(problem)
    m = len(caches)

    count = m ** len(exist_names) if m > 0 else 0
    if strategy not in ("auto", "exhaustive", "greedy"):
        raise ValueError(f"unknown assignment strategy {strategy!r}")
    if pinned is not None:
        missing = set(exist_names) - set(pinned)
        if missing:
            raise ValueError(
                f"pinned assignment misses existential variable(s): {sorted(missing)}"
            )
        bad = [n for n in exist_names if not (0 <= pinned[n] < m)]
        if bad:
            raise ValueError(f"pinned assignment targets unknown components for: {bad}")
        assignment = {name: pinned[name] for name in exist_names}
        used = "pinned"
    elif strategy == "exhaustive" and count > exhaustive_limit:
        raise ValueError(
            f"exhaustive assignment search needs {count} evaluations, "
            f"over the limit of {exhaustive_limit}; use the greedy strategy "
            f"or raise the limit"
        )
    elif m == 1:
        assignment = {name: 0 for name in exist_names}
        used = "exhaustive"
    elif strategy == "greedy" or (strategy == "auto" and count > exhaustive_limit):
        assignment = _greedy_assignment(problem, caches, exist_names)
        used = "greedy"
    else:
        assignment = _exhaustive_assignment(problem, caches, exist_names)
        used = "exhaustive"

    components: list[ComponentResult] = []
    for j, (out, cache) in enumerate(zip(problem.outputs, caches)):
        supplied_j = dict(supplied[out.name]) if supplied is not None and out.name in supplied else None
        outer_solve = solve_scalar(problem.with_outputs([out]), out.expr, supplied_j)
        derived = derived_blocks(problem, j, assignment)
        inner_solve = solve_scalar(
            problem.with_blocks(derived).with_outputs([out]), out.expr, supplied_j
        )
        components.append(
            ComponentResult(
                name=out.name,
                inner=inner_solve.inner,
                outer=outer_solve.outer,
                center_value=outer_solve.center_value,
                rows=outer_solve.rows,
                method=outer_solve.method,
                derived=derived,
                inner_failed_pair=inner_solve.inner_failed_pair,
                outer_failed_pair=outer_solve.outer_failed_pair,
            )
        )
    return VectorResult(tuple(components), assignment, used)
