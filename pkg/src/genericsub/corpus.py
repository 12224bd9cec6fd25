"""Fixture formulas phi(x; c, d) and sandbox parameter assignments for them."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .config import EngineConfig
from .sandbox import ModelHandle, VElem

COMMON = [
    "G(x)",
    "~G(x)",
    "x = c",
    "~(x = c)",
    "2*x = c",
    "G(x) /\\ G(x + c)",
    "G(x) /\\ ~(x = 0)",
    "G(x) /\\ ~(x = c)",
    "G(x) /\\ 2*x = c",
    "G(x) /\\ ~G(2*x)",
    "G(2*x) /\\ ~G(x)",
    "G(x) /\\ ~Gl[2](x)",
    "Gl[2](x) /\\ ~Gl[4](x)",
    "Gl[2](x - c) /\\ Gl[3](x - d)",
    "Gl[2](x - c) /\\ Gl[4](x - d)",
    "Gl[6](x - c) /\\ ~Gl[3](x - d)",
    "G(x) /\\ G(x + c) /\\ ~G(x + d)",
    "G(x - c) /\\ ~G(x - d)",
    "G(x - c) /\\ G(x - d)",
    "~G(x - c) /\\ ~G(x - d)",
    "G(x) /\\ x = c + d",
    "G(x) \\/ x = c",
    "~G(x) /\\ x = c",
    "G(3*x) /\\ ~Gl[2](x)",
    "G(x + c) /\\ ~(x = d)",
    "pp{2|-3|0}(x)",
    "pp{1|-2|0}(x) /\\ ~pp{1|-4|0}(x)",
    "pp{1,-1|-2|0}(x, c)",
    "pp{1,-1|-2|0}(x, c) /\\ pp{1,-1|-3|0}(x, d)",
    "pp{1||1}(x, c)",
    "~pp{1,-1|-2|0}(x, c) /\\ G(x)",
    "pp{2||1}(x, c)",
    "pp{1,1;1,-1||0;0}(x, c)",
    "f[1;1](x) = c",
    "f[1;1](x) = x",
    "f[1;1](x) = c /\\ ~(x = c)",
    "f[1;1](x + c) = d",
    "f[1;1](x) = 0 /\\ G(x - c)",
    "f[1;1](2*x) = c",
    "f[1;1](x) + c = d",
    "f[2;1](x) = c",
    "G(f[1;1](x - c)) /\\ ~(f[1;1](x - c) = 0)",
    "f[1;1](f[1;1](x) + c) = d",
    "~G(x) /\\ ~(x = c) /\\ ~(x = d)",
    "G(x) /\\ ~G(x + c)",
    "Gl[2](x) /\\ Gl[3](x + c)",
    "Gl[1/2](x) /\\ ~G(x)",
    "G(x) -> x = c",
    "(G(x) \\/ G(x + c)) /\\ ~(x = 0)",
    "G(x + c) /\\ G(x + d) /\\ ~G(c - d)",
    "x = x",
    "~(x = x)",
    "pp{1,-1|-2|0}(x, c) /\\ ~pp{1,-1|-4|0}(x, c)",
]

SQRT2 = [
    "Gl[1, a](x - c)",
    "~Gl[1, a](x - c)",
    "G(a*x)",
    "G(a*x) /\\ G(x)",
    "G(a*x) /\\ G(x) /\\ ~(x = 0)",
    "G(a*x + c)",
    "G(a*x + c) /\\ G(x)",
    "Gl[a](x) /\\ G(x - c)",
    "f[1, a; 1](x) = c",
    "f[1, a; 2](x) = c /\\ f[1, a; 1](x) = d",
    "f[1, a; 2](x) = c /\\ ~G(x)",
    "Gl[1, a](x) /\\ ~Gl[1](x) /\\ ~Gl[a](x)",
    "f[1, a; 1](x) = c /\\ ~(x = c)",
    "G((a + 1)*x) /\\ ~G(x)",
    "Gl[2, a](x) /\\ ~Gl[1, a](x)",
    "f[1;1](a*x + c) = d",
]

ORDERED = [
    "c < x /\\ x < d",
    "G(x) /\\ c < x /\\ x < d",
    "G(x) /\\ 0 < x",
    "~G(x) /\\ x < c",
    "G(x) /\\ G(x + c) /\\ 0 < x /\\ x < d",
    "~(x < c)",
    "x < c /\\ d < x",
    "Gl[2](x) /\\ c < x /\\ x < c + d",
    "G(x) /\\ x < c /\\ ~(x = d)",
    "f[1;1](x) = c /\\ 0 < x",
    "2*x = c /\\ 0 < x",
    "G(x - c) /\\ x < c",
    "pp{1|-2|0}(x) /\\ 0 < x /\\ x < c",
    "G(x) /\\ ~G(x - c) /\\ c < x",
    "x < c /\\ x < d",
    "c < x /\\ ~G(x) /\\ x < d",
]

ORDERED_SQRT2 = [
    "G(x) /\\ 0 < x /\\ x < (a - 1)*c",
    "G(a*x) /\\ 0 < x",
    "Gl[1, a](x) /\\ c < x /\\ x < d",
]


def corpus(cfg: EngineConfig) -> list[str]:
    """Formula bodies in x with parameters c and d for the given configuration."""
    out = list(COMMON)
    if cfg.field.degree > 1:
        out += SQRT2
    if cfg.ordered:
        out += ORDERED
        if cfg.field.degree > 1:
            out += ORDERED_SQRT2
    return out


def parameter_sets(model: ModelHandle) -> list[dict]:
    """Assignments for c and d exercising G, 2G, cosets, generic and span cases."""
    while len(model.h) < 3:
        model.fresh_G(1)
    while len(model.v) < 1:
        model.fresh_generic(1)
    spec = model.spec
    h1, h2, h3 = (model.gen(g) for g in model.h[:3])
    v1 = model.gen(model.v[0])
    zero = VElem(spec)
    half = Fraction(1, 2)
    sets = [
        {"c": zero, "d": zero},
        {"c": h1, "d": h2},
        {"c": h1.scale(2), "d": h1},
        {"c": h1.scale(half), "d": h2.scale(3)},
        {"c": v1, "d": v1 + h1},
        {"c": h1 + h2, "d": h1.scale(6)},
        {"c": h1.scale(-1), "d": v1.scale(2)},
    ]
    if spec.degree > 1:
        a = spec.gen()
        sets.append({"c": h1 + h2.scale(a), "d": h3.scale(a)})
        sets.append({"c": h1.scale(a), "d": h2 + h1.scale(a)})
    return sets


def candidates(model: ModelHandle, assignment: dict, n: int = 50, seed: int = 0) -> list[VElem]:
    """Falsification candidates: parameter-span points, G-points and generic points."""
    rng = random.Random(seed)
    spec = model.spec
    params = [assignment[k] for k in sorted(assignment)]
    hs = [model.gen(g) for g in model.h[:3]]
    vs = [model.gen(g) for g in model.v[:1]]
    scalars = [Fraction(k, q) for k in range(-3, 4) for q in (1, 2, 3)]
    if spec.degree > 1:
        extra = [spec.gen(), spec.gen() + 1, -spec.gen()]
    else:
        extra = []
    out: list[VElem] = [VElem(spec)]
    out += params + [p.scale(half) for p in params for half in (Fraction(1, 2), Fraction(-1, 2), 2, 3)]
    out += [params[0] + params[-1], params[0] - params[-1]] if params else []
    while len(out) < n - 2:
        e = VElem(spec)
        for b in hs + params + (vs if rng.random() < 0.3 else []):
            if rng.random() < 0.6:
                c = rng.choice(scalars)
                if extra and rng.random() < 0.3:
                    c = rng.choice(extra) * c
                e = e + b.scale(c)
        out.append(e)
    out += model.fresh_generic(1) + model.fresh_G(1)
    return out[:n]
