"""Symmetry relations, symmetric networks and symmetric sequences of actions."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .lts import TAU, BoundOutput, FreeInput, FreeOutput, Label, TauLabel
from .network import NetState
from .parser import format_name
from .syntax import UNIT, Process, bound_names, free_names, par_chain, rename_free, restrict

__all__ = [
    "Permutation",
    "PermutationError",
    "SymmetryError",
    "NotClosedError",
    "RestrictedNotFreeError",
    "SupportMeetsBoundError",
    "DegreeError",
    "SymNet",
    "NotSymmetric",
    "apply_perm",
    "build_symmetric",
    "recognize_symmetric",
    "indexed_substitute",
    "symmetric_label_sequence",
]


class PermutationError(ValueError):
    pass


class SymmetryError(ValueError):
    """Inputs that do not describe a symmetric network."""


class NotClosedError(SymmetryError):
    pass


class RestrictedNotFreeError(SymmetryError):
    pass


class SupportMeetsBoundError(SymmetryError):
    pass


class DegreeError(SymmetryError):
    pass


@dataclass(frozen=True)
class Permutation:
    """A finite-support bijection on names together with a degree ``n`` (``sigma**n == id``).

    The degree need not be minimal.
    """

    pairs: tuple[tuple[str, str], ...]
    degree: int = 1

    def __post_init__(self):
        pairs = tuple(sorted((a, b) for a, b in dict(self.pairs).items() if a != b))
        object.__setattr__(self, "pairs", pairs)
        if self.degree < 1:
            raise PermutationError("degree must be at least 1")
        sources = {a for a, _ in pairs}
        targets = {b for _, b in pairs}
        if len(targets) != len(pairs) or sources != targets:
            raise PermutationError("mapping is not a bijection on its support")
        if UNIT in sources:
            raise PermutationError("the unit name cannot be permuted")
        if self.degree % self.order() != 0:
            raise DegreeError(f"sigma^{self.degree} is not the identity (order {self.order()})")

    # construction

    @classmethod
    def identity(cls, degree: int = 1) -> "Permutation":
        return cls((), degree)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str], degree: int | None = None) -> "Permutation":
        pairs = tuple(mapping.items())
        if degree is None:
            degree = _order(dict(pairs))
        return cls(pairs, degree)

    @classmethod
    def from_cycles(cls, text: str, degree: int | None = None) -> "Permutation":
        """Parse cycle notation such as ``(x y)(1 2)``; cycles may also be separated by ``;``."""
        mapping: dict[str, str] = {}
        body = text.strip()
        if body and not re.fullmatch(r"(\s*;?\s*\([^()]*\))*\s*;?\s*", body):
            raise PermutationError(f"malformed cycle notation: {text!r}")
        for group in re.findall(r"\(([^()]*)\)", body):
            names = [n.strip("'") for n in group.replace(",", " ").split()]
            if len(set(names)) != len(names):
                raise PermutationError(f"repeated name in cycle ({group})")
            for a, b in zip(names, names[1:] + names[:1]):
                if a in mapping:
                    raise PermutationError(f"name {a!r} occurs in two cycles")
                mapping[a] = b
        return cls.from_mapping(mapping, degree)

    # access

    @cached_property
    def _map(self) -> dict[str, str]:
        return dict(self.pairs)

    def __call__(self, name: str) -> str:
        return self._map.get(name, name)

    def as_dict(self) -> dict[str, str]:
        return dict(self.pairs)

    @property
    def support(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.pairs)

    def order(self) -> int:
        return _order(dict(self.pairs))

    def is_identity(self) -> bool:
        return not self.pairs

    def power(self, k: int) -> "Permutation":
        k %= self.order()
        mapping = {}
        for a in self.support:
            b = a
            for _ in range(k):
                b = self(b)
            mapping[a] = b
        return Permutation(tuple(mapping.items()), self.degree)

    def compose(self, other: "Permutation") -> "Permutation":
        """``self after other``."""
        names = self.support | other.support
        mapping = {a: self(other(a)) for a in names}
        return Permutation.from_mapping(mapping, math.lcm(self.degree, other.degree, _order(mapping)))

    def inverse(self) -> "Permutation":
        return Permutation(tuple((b, a) for a, b in self.pairs), self.degree)

    def with_degree(self, degree: int) -> "Permutation":
        return Permutation(self.pairs, degree)

    def extends(self, other: "Permutation") -> bool:
        """True iff ``other`` is contained in ``self`` (they agree on ``other``'s support)."""
        return all(self(a) == b for a, b in other.pairs)

    def cycles(self) -> list[tuple[str, ...]]:
        seen: set[str] = set()
        out = []
        for a in sorted(self.support):
            if a in seen:
                continue
            cycle = [a]
            seen.add(a)
            b = self(a)
            while b != a:
                cycle.append(b)
                seen.add(b)
                b = self(b)
            out.append(tuple(cycle))
        return out

    def text(self) -> str:
        if not self.pairs:
            return "id"
        return "".join("(" + " ".join(format_name(n) for n in c) + ")" for c in self.cycles())

    def __str__(self) -> str:
        return self.text()


def _order(mapping: dict[str, str]) -> int:
    seen: set[str] = set()
    order = 1
    for a in mapping:
        if a in seen:
            continue
        length, b = 0, a
        while True:
            seen.add(b)
            b = mapping.get(b, b)
            length += 1
            if b == a:
                break
            if length > len(mapping) + 1:
                raise PermutationError("mapping is not a bijection on its support")
        order = math.lcm(order, length)
    return order


def apply_perm(sigma: Permutation, p: Process) -> Process:
    """Rename the free names of ``p`` by ``sigma``; binders are left as they are."""
    clash = sigma.support & bound_names(p)
    if clash:
        raise SupportMeetsBoundError(f"permutation moves bound name(s) {sorted(clash)}")
    return rename_free(p, sigma.as_dict())


# ---------------------------------------------------------------- networks


@dataclass(frozen=True)
class SymNet:
    """``(nu restricted)(sigma^0(seed) | ... | sigma^(n-1)(seed))`` with literally shared binders."""

    seed: Process
    degree: int
    restricted: tuple[str, ...]
    sigma: Permutation
    components: tuple[Process, ...]

    @property
    def state(self) -> NetState:
        return NetState(self.restricted, self.components, provenance=self)

    def flatten(self) -> Process:
        return restrict(self.restricted, par_chain(self.components))


def build_symmetric(seed: Process, n: int, sigma: Permutation, restricted: Sequence[str] = ()) -> SymNet:
    restricted = tuple(restricted)
    if n < 1:
        raise DegreeError("degree must be at least 1")
    if not sigma.power(n).is_identity():
        raise DegreeError(f"sigma^{n} is not the identity")
    stray = [x for x in restricted if x not in free_names(seed)]
    if stray:
        raise RestrictedNotFreeError(f"restricted name(s) {stray} are not free in the seed")
    return _symnet(seed, n, sigma.with_degree(n), restricted)


def _symnet(seed: Process, n: int, sigma: Permutation, restricted: tuple[str, ...]) -> SymNet:
    if len(set(restricted)) != len(restricted):
        raise SymmetryError("restricted tuple repeats a name")
    if any(sigma(x) not in restricted for x in restricted):
        raise NotClosedError("restricted names are not closed under sigma")
    clash = sigma.support & bound_names(seed)
    if clash:
        raise SupportMeetsBoundError(f"sigma moves bound name(s) {sorted(clash)}")
    comps = tuple(apply_perm(sigma.power(i), seed) for i in range(n))
    return SymNet(seed, n, tuple(restricted), sigma, comps)


@dataclass(frozen=True)
class NotSymmetric:
    """Recognition failure; ``index`` is the first offending component (``None`` for the restricted tuple)."""

    index: int | None
    reason: str

    def __bool__(self) -> bool:
        return False


def recognize_symmetric(net: NetState, sigma: Permutation) -> Process | NotSymmetric:
    comps = net.components
    if len(comps) != sigma.degree:
        raise ValueError(f"network has {len(comps)} components, sigma has degree {sigma.degree}")
    if any(sigma(x) not in net.restricted for x in net.restricted):
        return NotSymmetric(None, "restricted tuple is not closed under sigma")
    seed = comps[0]
    if sigma.support & bound_names(seed):
        return NotSymmetric(0, "sigma moves a name bound in component 0")
    for i in range(1, len(comps)):
        if comps[i] != apply_perm(sigma.power(i), seed):
            return NotSymmetric(i, f"component {i} differs from sigma^{i} of component 0")
    return seed


def symnet_from_state(net: NetState, sigma: Permutation) -> SymNet | NotSymmetric:
    """Recognize ``net`` and package it; restricted names need only be free somewhere in the network."""
    seed = recognize_symmetric(net, sigma)
    if isinstance(seed, NotSymmetric):
        return seed
    return SymNet(seed, sigma.degree, net.restricted, sigma, net.components)


def indexed_substitute(net: SymNet | NetState, bindings) -> NetState:
    """Replace the listed components; ``bindings`` is a mapping or a sequence of ``(index, process)``."""
    state = net.state if isinstance(net, SymNet) else net
    items = list(bindings.items()) if isinstance(bindings, Mapping) else list(bindings)
    indices = [i for i, _ in items]
    if len(set(indices)) != len(indices):
        raise ValueError("indexed substitution repeats an index")
    for i in indices:
        if not 0 <= i < len(state.components):
            raise IndexError(f"component index {i} out of range")
    out = state.replace(dict(items))
    return NetState(out.restricted, out.components, provenance=net if isinstance(net, SymNet) else state.provenance)


# ---------------------------------------------------------------- labels


def symmetric_label_sequence(mu: Label, n: int, sigma: Permutation, restricted: Iterable[str] = ()) -> list[Label]:
    """The ``n`` labels performed by successive copies when the first copy performs ``mu``.

    The ``i``-th label (1-based) applies ``sigma^(i-1)``.  A bound output stays
    bound only while the permuted object is a restricted name not yet sent.
    """
    restricted = set(restricted)
    out: list[Label] = [mu]
    for i in range(2, n + 1):
        e = i - 1
        s = sigma.power(e)
        if isinstance(mu, TauLabel):
            out.append(TAU)
        elif isinstance(mu, FreeInput):
            out.append(FreeInput(s(mu.channel), mu.obj))
        elif isinstance(mu, FreeOutput):
            out.append(FreeOutput(s(mu.channel), s(mu.obj)))
        else:
            sent = {sigma.power(k)(mu.obj) for k in range(e)}
            obj = s(mu.obj)
            if obj in restricted - sent:
                out.append(BoundOutput(s(mu.channel), obj))
            else:
                out.append(FreeOutput(s(mu.channel), obj))
    return out
