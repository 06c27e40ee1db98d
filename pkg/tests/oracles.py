"""Independent reference implementations used to cross-check the package."""

from __future__ import annotations

from collections import deque

from pisym.congruence import alpha_key
from pisym.syntax import Par, Process, Rep, Res, Sum, all_names, fresh_name, free_names, substitute


def _rewrites(p: Process):
    """One application of a congruence rule at the root (both directions), or garbage collection."""
    if isinstance(p, Par):
        yield Par(p.right, p.left)
        if isinstance(p.left, Res):
            x, body = p.left.name, p.left.body
            if x in free_names(p.right):
                new = fresh_name(x, all_names(p))
                x, body = new, substitute(body, {p.left.name: new})
            yield Res(x, Par(body, p.right))
    if isinstance(p, Res):
        body = p.body
        if p.name not in free_names(body):
            yield body
        if isinstance(body, Par):
            if p.name not in free_names(body.right):
                yield Par(Res(p.name, body.left), body.right)
            if p.name not in free_names(body.left):
                yield Par(body.left, Res(p.name, body.right))


def _neighbours(p: Process):
    yield from _rewrites(p)
    if isinstance(p, Par):
        for q in _neighbours(p.left):
            yield Par(q, p.right)
        for q in _neighbours(p.right):
            yield Par(p.left, q)
    elif isinstance(p, Res):
        for q in _neighbours(p.body):
            yield Res(p.name, q)
    elif isinstance(p, Rep):
        for q in _neighbours(p.body):
            yield Rep(q)
    elif isinstance(p, Sum):
        for k, (g, c) in enumerate(p.branches):
            for q in _neighbours(c):
                branches = list(p.branches)
                branches[k] = (g, q)
                yield Sum(tuple(branches))


def congruence_class(p: Process, limit: int = 20000) -> set[str]:
    """Alpha-keys of every term reachable from ``p`` by the rules (garbage collection only removes)."""
    seen = {alpha_key(p)}
    todo = deque([p])
    while todo:
        q = todo.popleft()
        for r in _neighbours(q):
            k = alpha_key(r)
            if k not in seen:
                seen.add(k)
                todo.append(r)
                if len(seen) > limit:
                    raise RuntimeError("congruence class too large for the oracle")
    return seen


def congruent_by_search(p: Process, q: Process) -> bool:
    return bool(congruence_class(p) & congruence_class(q))


# ---------------------------------------------------------------- transitions


def step_key(step) -> tuple:
    """A step's label and target up to alpha; a bound output is keyed as the abstraction it opens."""
    from pisym.syntax import In

    lab = step.label
    if lab.kind == "bout":
        return ("bout", lab.channel, alpha_key(Sum(((In(lab.channel, lab.obj), step.target),))))
    return (lab, alpha_key(step.target))


def transfers(p: Process, rename: dict, step) -> bool:
    """Whether ``rename(p)`` has a step labelled ``rename(label)`` to a term congruent to ``rename(target)``."""
    from pisym.congruence import canonicalize
    from pisym.lts import TAU, BoundOutput, label_perm, transitions
    from pisym.syntax import rename_free

    def image(n):
        return rename.get(n, n)

    q = rename_free(p, rename)
    lab = step.label
    universe = free_names(q) | {image(lab.obj)} if lab.kind == "in" else None
    want_target = canonicalize(rename_free(step.target, rename))
    if lab.kind == "bout":
        want_label = BoundOutput(image(lab.channel), lab.obj)
    else:
        want_label = TAU if lab.kind == "tau" else label_perm(image, lab)
    from pisym.lts import Step

    want = step_key(Step(want_label, want_target, step.participants))
    return any(step_key(s) == want for s in transitions(q, universe))
