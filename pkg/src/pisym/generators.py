"""Seeded random terms, seeds and symmetric networks for property tests.

Every generator takes a :class:`random.Random` so a run is reproducible from
one integer.  Binder names are globally unique within a term.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from typing import Optional

from .symmetry import Permutation, SymNet, build_symmetric
from .syntax import NIL, OK, UNIT, In, Out, Par, Process, Rep, Res, Sum, Tau, free_names

__all__ = ["TermGen", "random_process", "random_seed", "random_symnet", "seed_from_env", "FREE_NAMES"]

FREE_NAMES = ("x", "y", "z", "u", "v", "w")


def seed_from_env(default: int = 0) -> int:
    """The generator seed from ``PISYM_SEED``, else ``default``."""
    raw = os.environ.get("PISYM_SEED")
    return int(raw) if raw not in (None, "") else default


@dataclass
class TermGen:
    rng: random.Random
    separate: bool = True
    replication: bool = False
    success: bool = True
    tau: bool = True
    free: tuple[str, ...] = FREE_NAMES
    restriction_rate: float = 0.15
    _count: int = 0

    def _binder(self, stem: str) -> str:
        self._count += 1
        return f"{stem}{self._count}"

    def _name(self, scope: list[str], unit_ok: bool = False) -> str:
        if unit_ok and self.rng.random() < 0.3:
            return UNIT
        pool = list(self.free) + scope * 2
        return self.rng.choice(pool)

    def process(self, budget: int, scope: Optional[list[str]] = None) -> Process:
        """A term with at most ``budget`` prefixes."""
        scope = list(scope or [])
        rng = self.rng
        if budget <= 0:
            return OK if self.success and rng.random() < 0.1 else NIL
        r = rng.random()
        if r < self.restriction_rate:
            name = self._binder("k")
            body = self.process(budget, scope + [name])
            return Res(name, body)
        if r < 0.35 and budget >= 2:
            left = rng.randint(1, budget - 1)
            return Par(self.process(left, scope), self.process(budget - left, scope))
        if self.replication and r < 0.40:
            return Rep(self.process(min(budget, 2), scope))
        return self.sum(budget, scope)

    def sum(self, budget: int, scope: list[str]) -> Sum:
        rng = self.rng
        width = 1 if budget < 2 else rng.choice((1, 1, 2, 2, 3))
        width = min(width, budget)
        kind = rng.choice(("in", "out"))
        branches = []
        share = budget - width
        for b in range(width):
            extra = rng.randint(0, share) if b < width - 1 else share
            share -= extra
            if not self.separate:
                kind = rng.choice(("in", "out"))
            if self.tau and rng.random() < 0.1:
                guard = Tau()
                cont = self.process(extra, scope)
            elif kind == "out":
                guard = Out(self._name(scope), self._name(scope, unit_ok=True))
                cont = self.process(extra, scope)
            else:
                binder = self._binder("q")
                guard = In(self._name(scope), binder)
                cont = self.process(extra, scope + [binder])
            branches.append((guard, cont))
        return Sum(tuple(branches))


def random_process(rng: random.Random, budget: int = 6, separate: bool = True, replication: bool = False) -> Process:
    return TermGen(rng, separate=separate, replication=replication).process(budget)


def random_seed(rng: random.Random, budget: int = 6, local_output: Optional[bool] = None) -> Process:
    """A replication-free separate-choice seed with at most ``budget`` prefixes.

    With ``local_output`` (default: 30% of the time) the seed sends one of its
    own restricted names, so running it extrudes a scope.
    """
    gen = TermGen(rng, separate=True, replication=False, free=("x", "y", "z", "u", "v"))
    if local_output is None:
        local_output = rng.random() < 0.3
    if not local_output or budget < 2:
        return gen.process(budget)
    name = gen._binder("k")
    chan = rng.choice(gen.free)
    rest = budget - 1
    inner = rng.randint(0, rest)
    sender = Sum(((Out(chan, name), gen.process(inner, [name])),))
    other = gen.process(rest - inner)
    if rng.random() < 0.3:
        return Res(name, sender)
    return Par(Res(name, sender), other)


def random_symnet(rng: random.Random, budget: int = 6, degrees: tuple[int, ...] = (2, 3)) -> SymNet:
    """A symmetric network over a random separate-choice seed.

    The relation is the identity or a cycle on free names whose order divides
    the degree; the restricted names are a union of orbits free in the seed.
    """
    n = rng.choice(degrees)
    seed = random_seed(rng, budget)
    options = [""]
    if n % 2 == 0:
        options.append("(x y)")
    if n % 3 == 0:
        options.append("(x y z)")
    sigma = Permutation.from_cycles(rng.choice(options), n)
    fn = free_names(seed)
    orbits = []
    for name in sorted(fn):
        orbit = {sigma.power(k)(name) for k in range(n)}
        if orbit <= fn and orbit not in orbits:
            orbits.append(orbit)
    restricted: list[str] = []
    for orbit in orbits:
        if rng.random() < 0.3:
            restricted += sorted(orbit)
    return build_symmetric(seed, n, sigma, tuple(restricted))
