"""Structural congruence: alpha-conversion, scope extrusion and commutativity of ``|``.

Canonical forms are computed in four passes over an alpha-freshened copy:

1. restrictions on names that do not occur in their body are dropped;
2. every restriction is pushed down a parallel tree as far as scope extrusion
   permits (innermost first), which is confluent once binders are distinct;
3. the two children of each ``|`` are ordered by a binder-invariant key;
4. binders are renamed to ``_0, _1, ...`` in traversal order.

Associativity of ``|`` and commutativity of ``+`` are deliberately absent.
"""

from __future__ import annotations

from .syntax import (
    UNIT,
    In,
    Out,
    Par,
    Process,
    Rep,
    Res,
    Success,
    Sum,
    Tau,
    freshen,
)

__all__ = ["canonicalize", "congruent", "alpha_key", "garbage_collect"]


def canonicalize(p: Process) -> Process:
    q = garbage_collect(freshen(p))
    q = _push(q)
    q = _order(q, ())
    return _rename(q, {}, [0], p.fn)


def congruent(p: Process, q: Process) -> bool:
    return canonicalize(p) == canonicalize(q)


def alpha_key(p: Process) -> str:
    """A string equal for two terms iff they are alpha-equivalent."""
    return _key(p, ())


# ---------------------------------------------------------------- passes


def garbage_collect(p: Process) -> Process:
    """Drop restrictions whose name does not occur free in their body."""
    if isinstance(p, Sum):
        return Sum(tuple((g, garbage_collect(c)) for g, c in p.branches))
    if isinstance(p, Par):
        return Par(garbage_collect(p.left), garbage_collect(p.right))
    if isinstance(p, Res):
        body = garbage_collect(p.body)
        return Res(p.name, body) if p.name in body.fn else body
    if isinstance(p, Rep):
        return Rep(garbage_collect(p.body))
    return p


def _push(p: Process) -> Process:
    if isinstance(p, Sum):
        return Sum(tuple((g, _push(c)) for g, c in p.branches))
    if isinstance(p, Rep):
        return Rep(_push(p.body))
    if isinstance(p, Success):
        return p
    chain = []
    core = p
    while isinstance(core, Res):
        chain.append(core.name)
        core = core.body
    if isinstance(core, Par):
        core = Par(_push(core.left), _push(core.right))
    else:
        core = _push(core)
    stuck: list[str] = []
    for name in reversed(chain):
        if not stuck and isinstance(core, Par):
            in_left = name in core.left.fn
            in_right = name in core.right.fn
            if in_left != in_right:
                if in_left:
                    core = Par(_sink(core.left, name), core.right)
                else:
                    core = Par(core.left, _sink(core.right, name))
                continue
        stuck.append(name)
    for name in stuck:
        core = Res(name, core)
    return core


def _sink(p: Process, name: str) -> Process:
    if isinstance(p, Par):
        in_left = name in p.left.fn
        in_right = name in p.right.fn
        if in_left and not in_right:
            return Par(_sink(p.left, name), p.right)
        if in_right and not in_left:
            return Par(p.left, _sink(p.right, name))
    return Res(name, p)


def _order(p: Process, stack: tuple[str, ...]) -> Process:
    if isinstance(p, Sum):
        branches = []
        for g, c in p.branches:
            inner = stack + (g.binder,) if isinstance(g, In) else stack
            branches.append((g, _order(c, inner)))
        return Sum(tuple(branches))
    if isinstance(p, Par):
        left = _order(p.left, stack)
        right = _order(p.right, stack)
        if _key(right, stack) < _key(left, stack):
            left, right = right, left
        return Par(left, right)
    if isinstance(p, Res):
        return Res(p.name, _order(p.body, stack + (p.name,)))
    if isinstance(p, Rep):
        return Rep(_order(p.body, stack))
    return p


def _ref(name: str, stack: tuple[str, ...]) -> str:
    for depth, bound in enumerate(reversed(stack)):
        if bound == name:
            return f"#{depth}"
    return "u" if name == UNIT else "'" + name + "'"


def _key(p: Process, stack: tuple[str, ...]) -> str:
    if isinstance(p, Sum):
        if not p.branches:
            return "0"
        parts = []
        for g, c in p.branches:
            if isinstance(g, Out):
                parts.append(f"O{_ref(g.channel, stack)}{_ref(g.obj, stack)}.{_key(c, stack)}")
            elif isinstance(g, In):
                parts.append(f"I{_ref(g.channel, stack)}.{_key(c, stack + (g.binder,))}")
            else:
                parts.append(f"T.{_key(c, stack)}")
        return "S[" + ",".join(parts) + "]"
    if isinstance(p, Par):
        return f"P({_key(p.left, stack)}|{_key(p.right, stack)})"
    if isinstance(p, Res):
        return f"N({_key(p.body, stack + (p.name,))})"
    if isinstance(p, Rep):
        return f"R({_key(p.body, stack)})"
    return "K"


def _rename(p: Process, env: dict[str, str], counter: list[int], free: frozenset[str]) -> Process:
    def fresh() -> str:
        while True:
            name = f"_{counter[0]}"
            counter[0] += 1
            if name not in free:
                return name

    if isinstance(p, Sum):
        branches = []
        for g, c in p.branches:
            if isinstance(g, Out):
                branches.append((Out(env.get(g.channel, g.channel), env.get(g.obj, g.obj)), _rename(c, env, counter, free)))
            elif isinstance(g, In):
                new = fresh()
                inner = {**env, g.binder: new}
                branches.append((In(env.get(g.channel, g.channel), new), _rename(c, inner, counter, free)))
            else:
                branches.append((Tau(), _rename(c, env, counter, free)))
        return Sum(tuple(branches))
    if isinstance(p, Par):
        left = _rename(p.left, env, counter, free)
        return Par(left, _rename(p.right, env, counter, free))
    if isinstance(p, Res):
        new = fresh()
        return Res(new, _rename(p.body, {**env, p.name: new}, counter, free))
    if isinstance(p, Rep):
        return Rep(_rename(p.body, env, counter, free))
    return p
