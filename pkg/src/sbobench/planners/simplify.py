"""Path post-processing: random shortcutting and uniform re-sampling."""

from __future__ import annotations

import numpy as np

from ..collision import CollisionChecker
from ..statespace import StateSpace
from .base import Path, Problem
from .common import path_cost, segment_costs


def _point_on(space: StateSpace, states, cum, seg_len, s):
    """(segment index, state) at arclength ``s``."""
    i = int(np.searchsorted(cum, s, side="right") - 1)
    i = min(max(i, 0), len(seg_len) - 1)
    L = seg_len[i]
    t = 0.0 if L <= 0 else min(max((s - cum[i]) / L, 0.0), 1.0)
    if t <= 1e-12:
        return i, states[i].copy()
    if t >= 1 - 1e-12:
        return i, states[i + 1].copy()
    return i, space.interpolate(states[i], states[i + 1], t)


def _drop_repeats(space: StateSpace, states: list) -> list:
    out = [states[0]]
    for s in states[1:]:
        if not np.array_equal(s, out[-1]):
            out.append(s)
    if len(out) == 1:
        out.append(states[-1])
    return out


def shortcut_simplify(path: Path, problem: Problem, attempts: int = 100, rng: np.random.Generator | None = None,
                      checker: CollisionChecker | None = None) -> Path:
    """Shorten ``path`` by replacing random sub-sections with direct connections.

    Two points are drawn uniformly by arclength; if they lie on different
    segments and the direct connection between them (plus the two partial
    segments that now end at them) is collision-free and strictly shorter, the
    section in between is replaced. Endpoints are never moved and the length
    never increases.
    """
    space = problem.space
    rng = rng if rng is not None else np.random.default_rng(0)
    checker = checker or problem.checker()
    states = [s for s in path.states]
    seg = segment_costs(space, np.asarray(states))
    total = float(seg.sum())
    for _ in range(attempts):
        if len(states) < 3 or total <= 0:
            break
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        s1, s2 = np.sort(rng.random(2) * total)
        i, p1 = _point_on(space, states, cum, seg, s1)
        j, p2 = _point_on(space, states, cum, seg, s2)
        if j <= i:
            continue
        candidate = _drop_repeats(space, states[: i + 1] + [p1, p2] + states[j + 1 :])
        new_seg = segment_costs(space, np.asarray(candidate))
        new_total = float(new_seg.sum())
        if not new_total < total:
            continue
        if not checker.is_motion_valid(p1, p2):
            continue
        if not np.array_equal(p1, states[i]) and not np.array_equal(p1, states[i + 1]):
            if not checker.is_motion_valid(states[i], p1):
                continue
        if not np.array_equal(p2, states[j + 1]) and not np.array_equal(p2, states[j]):
            if not checker.is_motion_valid(p2, states[j + 1]):
                continue
        states, seg, total = candidate, new_seg, new_total
    out = np.asarray(states)
    out[0] = path.states[0]
    out[-1] = path.states[-1]
    return Path(out, path.kind)


def interpolate_path(path: Path, count: int, space: StateSpace) -> Path:
    """Exactly ``count`` states spaced uniformly in metric arclength along ``path``."""
    if count < 2:
        raise ValueError("count must be at least 2")
    states = path.states
    seg = segment_costs(space, states)
    total = float(seg.sum())
    if total <= 0:
        return Path(np.repeat(states[:1], count, axis=0), path.kind)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, total, count)
    out = np.empty((count, states.shape[1]))
    out[0] = states[0]
    out[-1] = states[-1]
    for m in range(1, count - 1):
        _, out[m] = _point_on(space, states, cum, seg, targets[m])
    return Path(out, path.kind)


__all__ = ["interpolate_path", "path_cost", "shortcut_simplify"]
