"""Process terms of the pi-calculus with mixed and separate choice.

Names are plain strings.  Object-free prefixes such as ``x!`` communicate the
distinguished :data:`UNIT` name, which is never bound and never renamed by a
permutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Union

__all__ = [
    "UNIT",
    "Out",
    "In",
    "Tau",
    "Guard",
    "Sum",
    "Par",
    "Res",
    "Rep",
    "Success",
    "Process",
    "NIL",
    "OK",
    "WellformednessError",
    "free_names",
    "bound_names",
    "all_names",
    "fresh_name",
    "substitute",
    "rename_free",
    "is_separate",
    "check_wellformed",
    "freshen",
    "par_chain",
    "restrict",
    "prefix",
    "choice",
]

UNIT = "()"
PRIMES = "′″‴"


class WellformednessError(ValueError):
    """A term in which some name is both bound and free, or a binder shadows another."""

    def __init__(self, name: str, message: str | None = None):
        self.name = name
        super().__init__(message or f"name {name!r} is both bound and free")


# ---------------------------------------------------------------- guards


@dataclass(frozen=True)
class Out:
    channel: str
    obj: str = UNIT

    @property
    def names(self) -> frozenset[str]:
        return frozenset((self.channel, self.obj))


@dataclass(frozen=True)
class In:
    channel: str
    binder: str


@dataclass(frozen=True)
class Tau:
    pass


Guard = Union[Out, In, Tau]


# ---------------------------------------------------------------- processes


@dataclass(frozen=True)
class Sum:
    """Finite guarded choice; the empty sum is the inactive process."""

    branches: tuple[tuple[Guard, "Process"], ...] = ()

    @cached_property
    def fn(self) -> frozenset[str]:
        out: set[str] = set()
        for guard, cont in self.branches:
            if isinstance(guard, Out):
                out |= guard.names
                out |= cont.fn
            elif isinstance(guard, In):
                out.add(guard.channel)
                out |= cont.fn - {guard.binder}
            else:
                out |= cont.fn
        return frozenset(out)

    @cached_property
    def bn(self) -> frozenset[str]:
        out: set[str] = set()
        for guard, cont in self.branches:
            if isinstance(guard, In):
                out.add(guard.binder)
            out |= cont.bn
        return frozenset(out)


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"

    @cached_property
    def fn(self) -> frozenset[str]:
        return self.left.fn | self.right.fn

    @cached_property
    def bn(self) -> frozenset[str]:
        return self.left.bn | self.right.bn


@dataclass(frozen=True)
class Res:
    name: str
    body: "Process"

    @cached_property
    def fn(self) -> frozenset[str]:
        return self.body.fn - {self.name}

    @cached_property
    def bn(self) -> frozenset[str]:
        return self.body.bn | {self.name}


@dataclass(frozen=True)
class Rep:
    body: "Process"

    @cached_property
    def fn(self) -> frozenset[str]:
        return self.body.fn

    @cached_property
    def bn(self) -> frozenset[str]:
        return self.body.bn


@dataclass(frozen=True)
class Success:
    """The success marker, written ``ok``."""

    fn: frozenset[str] = field(default=frozenset(), init=False, repr=False, compare=False)
    bn: frozenset[str] = field(default=frozenset(), init=False, repr=False, compare=False)


Process = Union[Sum, Par, Res, Rep, Success]

NIL = Sum()
OK = Success()


# ---------------------------------------------------------------- constructors


def prefix(guard: Guard, cont: Process = NIL) -> Sum:
    return Sum(((guard, cont),))


def choice(*terms: Sum) -> Sum:
    """Join single- or multi-branch sums into one sum."""
    branches: list = []
    for t in terms:
        branches.extend(t.branches)
    return Sum(tuple(branches))


def restrict(names: Iterable[str], body: Process) -> Process:
    for name in reversed(list(names)):
        body = Res(name, body)
    return body


def par_chain(components: Iterable[Process]) -> Process:
    """Right-nested parallel composition ``P0 | (P1 | (... | Pn-1))``."""
    comps = list(components)
    if not comps:
        return NIL
    out = comps[-1]
    for comp in reversed(comps[:-1]):
        out = Par(comp, out)
    return out


# ---------------------------------------------------------------- names


def free_names(p: Process) -> frozenset[str]:
    """Free names of ``p``; the unit name is never reported."""
    return p.fn - {UNIT}


def bound_names(p: Process) -> frozenset[str]:
    return p.bn


def all_names(p: Process) -> frozenset[str]:
    return (p.fn | p.bn) - {UNIT}


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """Deterministic primed variant of ``base`` that is not in ``avoid``."""
    avoid = set(avoid)
    if base not in avoid and base != UNIT:
        return base
    stem = base.rstrip(PRIMES) or "n"
    k = 1
    while True:
        candidate = stem + "′" * k
        if candidate not in avoid:
            return candidate
        k += 1


# ---------------------------------------------------------------- substitution


def substitute(p: Process, mapping: Mapping[str, str]) -> Process:
    """Capture-avoiding simultaneous substitution; ``mapping`` sends target to replacement.

    Binders that would capture a replacement are renamed to primed variants.
    """
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping:
        return p
    return _subst(p, mapping)


def _subst(p: Process, m: dict[str, str]) -> Process:
    m = {k: v for k, v in m.items() if k in p.fn}
    if not m:
        return p
    if isinstance(p, Sum):
        branches = []
        for guard, cont in p.branches:
            if isinstance(guard, Out):
                branches.append((Out(m.get(guard.channel, guard.channel), m.get(guard.obj, guard.obj)), _subst(cont, m)))
            elif isinstance(guard, Tau):
                branches.append((guard, _subst(cont, m)))
            else:
                binder, cont = _under_binder(guard.binder, cont, m)
                branches.append((In(m.get(guard.channel, guard.channel), binder), cont))
        return Sum(tuple(branches))
    if isinstance(p, Par):
        return Par(_subst(p.left, m), _subst(p.right, m))
    if isinstance(p, Res):
        binder, body = _under_binder(p.name, p.body, m)
        return Res(binder, body)
    if isinstance(p, Rep):
        return Rep(_subst(p.body, m))
    return p


def _under_binder(binder: str, body: Process, m: dict[str, str]) -> tuple[str, Process]:
    inner = {k: v for k, v in m.items() if k != binder and k in body.fn}
    if not inner:
        return binder, body
    if binder in inner.values():
        avoid = all_names(body) | set(inner) | set(inner.values())
        new = fresh_name(binder, avoid)
        body = _subst(body, {binder: new})
        binder = new
    return binder, _subst(body, inner)


def rename_free(p: Process, mapping: Mapping[str, str]) -> Process:
    """Rename free names literally, leaving every binder untouched.

    The caller guarantees that no name involved in ``mapping`` is bound in ``p``.
    """
    mapping = {k: v for k, v in mapping.items() if k != v}
    if not mapping or not (p.fn & mapping.keys()):
        return p
    if isinstance(p, Sum):
        branches = []
        for guard, cont in p.branches:
            if isinstance(guard, Out):
                guard = Out(mapping.get(guard.channel, guard.channel), mapping.get(guard.obj, guard.obj))
            elif isinstance(guard, In):
                guard = In(mapping.get(guard.channel, guard.channel), guard.binder)
            branches.append((guard, rename_free(cont, mapping)))
        return Sum(tuple(branches))
    if isinstance(p, Par):
        return Par(rename_free(p.left, mapping), rename_free(p.right, mapping))
    if isinstance(p, Res):
        return Res(p.name, rename_free(p.body, mapping))
    if isinstance(p, Rep):
        return Rep(rename_free(p.body, mapping))
    return p


# ---------------------------------------------------------------- predicates


def is_separate(p: Process) -> bool:
    """True iff every sum has only input guards or only output guards (tau allowed in both)."""
    if isinstance(p, Sum):
        kinds = {type(g) for g, _ in p.branches} - {Tau}
        if len(kinds) > 1:
            return False
        return all(is_separate(cont) for _, cont in p.branches)
    if isinstance(p, Par):
        return is_separate(p.left) and is_separate(p.right)
    if isinstance(p, (Res, Rep)):
        return is_separate(p.body)
    return True


def check_wellformed(p: Process) -> None:
    """Raise :class:`WellformednessError` on a bound/free clash or a shadowing binder."""
    clash = sorted(free_names(p) & p.bn)
    if clash:
        raise WellformednessError(clash[0])
    if UNIT in p.bn:
        raise WellformednessError(UNIT, "the unit name cannot be bound")
    _check_shadow(p, frozenset())


def _check_shadow(p: Process, scope: frozenset[str]) -> None:
    if isinstance(p, Sum):
        for guard, cont in p.branches:
            if isinstance(guard, In):
                if guard.binder in scope:
                    raise WellformednessError(guard.binder, f"binder {guard.binder!r} shadows an enclosing binder")
                _check_shadow(cont, scope | {guard.binder})
            else:
                _check_shadow(cont, scope)
    elif isinstance(p, Par):
        _check_shadow(p.left, scope)
        _check_shadow(p.right, scope)
    elif isinstance(p, Res):
        if p.name in scope:
            raise WellformednessError(p.name, f"binder {p.name!r} shadows an enclosing binder")
        _check_shadow(p.body, scope | {p.name})
    elif isinstance(p, Rep):
        _check_shadow(p.body, scope)


def freshen(p: Process, avoid: Iterable[str] = ()) -> Process:
    """Alpha-rename every binder so that all binders are distinct and avoid ``avoid``."""
    used = set(avoid) | set(free_names(p)) | {UNIT}
    return _freshen(p, used)


def _freshen(p: Process, used: set[str]) -> Process:
    if isinstance(p, Sum):
        branches = []
        for guard, cont in p.branches:
            if isinstance(guard, In):
                new = fresh_name(guard.binder, used)
                used.add(new)
                cont = substitute(cont, {guard.binder: new}) if new != guard.binder else cont
                branches.append((In(guard.channel, new), _freshen(cont, used)))
            else:
                branches.append((guard, _freshen(cont, used)))
        return Sum(tuple(branches))
    if isinstance(p, Par):
        left = _freshen(p.left, used)
        return Par(left, _freshen(p.right, used))
    if isinstance(p, Res):
        new = fresh_name(p.name, used)
        used.add(new)
        body = substitute(p.body, {p.name: new}) if new != p.name else p.body
        return Res(new, _freshen(body, used))
    if isinstance(p, Rep):
        return Rep(_freshen(p.body, used))
    return p
