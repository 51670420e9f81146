"""Pairwise similarity and inclusion measures over sparse weighted vectors.

Vectors are plain ``{context_id: weight}`` dicts with strictly positive
weights. Directional measures read ``u`` as the narrower candidate and ``v``
as the broader one.
"""
from __future__ import annotations

import math

from .space import TopContexts


def _clip01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _dot(u: dict, v: dict) -> float:
    if len(u) > len(v):
        u, v = v, u
    return math.fsum(w * v[c] for c, w in u.items() if c in v)


def _norm(u: dict) -> float:
    return math.sqrt(math.fsum(w * w for w in u.values()))


def cosine(u: dict, v: dict) -> float:
    if not u or not v:
        return 0.0
    return _clip01(_dot(u, v) / (_norm(u) * _norm(v)))


def lin(u: dict, v: dict) -> float:
    """Weight mass on shared contexts over the total mass of both vectors."""
    denom = math.fsum(u.values()) + math.fsum(v.values())
    if denom == 0:
        return 0.0
    shared = math.fsum(w + v[c] for c, w in u.items() if c in v)
    return _clip01(shared / denom)


def weeds_prec(u: dict, v: dict) -> float:
    """Share of u's weight that falls on contexts also attested for v."""
    if not u:
        return 0.0
    return _clip01(math.fsum(w for c, w in u.items() if c in v) / math.fsum(u.values()))


def clarke_de(u: dict, v: dict) -> float:
    if not u:
        return 0.0
    num = math.fsum(min(w, v[c]) for c, w in u.items() if c in v)
    return _clip01(num / math.fsum(u.values()))


def cos_weeds(u: dict, v: dict) -> float:
    return math.sqrt(cosine(u, v) * weeds_prec(u, v))


def inv_cl(u: dict, v: dict) -> float:
    # high when u is included in v but v is not included in u
    return math.sqrt(clarke_de(u, v) * (1.0 - clarke_de(v, u)))


def apsyn(t1: TopContexts, t2: TopContexts) -> float:
    """Sum over shared top contexts of the inverse of their average rank."""
    if t1.n != t2.n:
        raise ValueError(f"top-N lists must share N, got {t1.n} and {t2.n}")
    r1, r2 = t1.ranks, t2.ranks
    return math.fsum(1.0 / ((r1[f] + r2[f]) / 2.0) for f in sorted(r1.keys() & r2.keys()))


def apant(apsyn_value: float) -> float:
    """Regularised inverse of APSyn, finite when no top contexts are shared."""
    if apsyn_value < 0:
        raise ValueError(f"apsyn_value must be >= 0, got {apsyn_value}")
    return 1.0 / (1.0 + apsyn_value)
