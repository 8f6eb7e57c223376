"""Deterministic generators shared by the property and acceptance suites.

Everything here is seeded by the caller; the same rng state always yields the
same problems, so failures reproduce exactly.
"""

from __future__ import annotations

import random

from quantrange.exprs import (
    Add,
    Const,
    Cos,
    Expr,
    Msin,
    Mul,
    Neg,
    Pow,
    Sin,
    Sub,
    Var,
    parse,
    variables_of,
)
from quantrange.intervals import Interval
from quantrange.problem import (
    Block,
    Output,
    Quantifier,
    QuantifiedProblem,
    VariableSpec,
)


def dyadic(rng: random.Random, denom: int, lo: int, hi: int) -> float:
    """A float of the form k/denom with k in [lo*denom, hi*denom]."""
    return rng.randint(lo * denom, hi * denom) / denom


def make_affine_problem(rng: random.Random):
    """Random affine problem with dyadic data.

    Returns (constant, coeffs, problem) where the single output is
    constant + sum(coeffs[name] * name).  All numbers are dyadic rationals that
    floats represent exactly, so text round-trips and exact rational
    arithmetic agree bit for bit.
    """
    p = rng.randint(1, 8)
    names = [f"x{i}" for i in range(1, p + 1)]
    blocks = tuple(
        Block(rng.choice((Quantifier.FORALL, Quantifier.EXISTS)), (name,))
        for name in names
    )
    variables = []
    for name in names:
        a = rng.randint(-128, 128) / 64
        b = rng.randint(-128, 128) / 64
        lo, hi = min(a, b), max(a, b)
        dom = Interval(lo, hi)
        variables.append(VariableSpec(name, dom, dom.mid))
    constant = rng.randint(-1024, 1024) / 1024
    coeffs = {name: rng.randint(-1024, 1024) / 1024 for name in names}
    text = repr(constant) + "".join(
        f" + {coeffs[name]!r}*{name}" for name in names
    )
    problem = QuantifiedProblem(
        blocks=blocks,
        variables=tuple(variables),
        outputs=(Output("f", parse(text)),),
    )
    return constant, coeffs, problem


def _random_tree(rng: random.Random, names: list[str], depth: int) -> Expr:
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.7:
            return Var(rng.choice(names))
        return Const(dyadic(rng, 16, -2, 2))
    kind = rng.choice(
        ("add", "sub", "mul", "neg", "pow", "sin", "cos", "msin")
    )
    a = _random_tree(rng, names, depth - 1)
    if kind == "add":
        return Add(a, _random_tree(rng, names, depth - 1))
    if kind == "sub":
        return Sub(a, _random_tree(rng, names, depth - 1))
    if kind == "mul":
        return Mul(a, _random_tree(rng, names, depth - 1))
    if kind == "neg":
        return Neg(a)
    if kind == "pow":
        return Pow(a, rng.choice((2, 3)))
    if kind == "sin":
        return Sin(a)
    if kind == "cos":
        return Cos(a)
    return Msin(a, _random_tree(rng, names, depth - 1))


def random_expr(rng: random.Random, names: list[str]) -> Expr:
    """Random expression over names; always mentions at least one variable."""
    tree = _random_tree(rng, names, depth=3)
    if not variables_of(tree):
        tree = Add(tree, Var(rng.choice(names)))
    return tree


def make_random_problem(rng: random.Random, n_outputs: int = 1) -> QuantifiedProblem:
    """Random nonlinear problem on dyadic sub-boxes of [-2, 2]^p."""
    p = rng.randint(1, 4)
    names = [f"v{i}" for i in range(1, p + 1)]
    blocks = tuple(
        Block(rng.choice((Quantifier.FORALL, Quantifier.EXISTS)), (name,))
        for name in names
    )
    variables = []
    for name in names:
        lo = dyadic(rng, 16, -2, 1)
        width = rng.randint(0, 32) / 16
        dom = Interval(lo, min(lo + width, 2.0))
        variables.append(VariableSpec(name, dom, dom.mid))
    outputs = tuple(
        Output(f"g{j}", random_expr(rng, names)) for j in range(1, n_outputs + 1)
    )
    return QuantifiedProblem(
        blocks=blocks, variables=tuple(variables), outputs=outputs
    )
