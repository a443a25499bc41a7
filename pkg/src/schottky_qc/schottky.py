"""Reflection groups generated by disjoint closed disks.

Generators are indexed 0..k-1.  A word [i1, ..., in] denotes the composition
φ_{i1} ∘ ... ∘ φ_{in}; the rightmost reflection acts first.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .geometry import (Cap, DiskRegion, GeometryError, MoebiusMap, apply_moebius, map_disk,
                       region_contains, region_gap)

log = logging.getLogger(__name__)

NEAR_TANGENT_GAP = 1e-7


class SchottkyError(ValueError):
    pass


@dataclass(frozen=True)
class ReflectionWord:
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        ls = tuple(int(v) for v in self.letters)
        if any(a == b for a, b in zip(ls, ls[1:])):
            raise SchottkyError(f"word {list(ls)} is not reduced")
        object.__setattr__(self, "letters", ls)

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def last(self) -> int | None:
        return self.letters[-1] if self.letters else None

    def inverse(self) -> "ReflectionWord":
        # reflections are involutions, so the inverse is the reversed word
        return ReflectionWord(self.letters[::-1])

    def __repr__(self) -> str:
        return f"ReflectionWord({list(self.letters)})"


@dataclass(frozen=True, eq=False)
class SchottkyConfig:
    """Closed disks with pairwise disjoint closures; ``near_tangent`` flags gaps below 1e-7."""

    disks: tuple[DiskRegion, ...]
    near_tangent: bool = field(default=False, init=False)

    def __post_init__(self):
        disks = tuple(self.disks)
        if len(disks) < 2:
            raise SchottkyError("a Schottky configuration needs at least two disks")
        object.__setattr__(self, "disks", disks)
        flag = False
        for (i, a), (j, b) in itertools.combinations(enumerate(disks), 2):
            g = region_gap(a, b)
            if g <= 0:
                raise SchottkyError(f"disks {i} and {j} do not have disjoint closures (gap {g:.3e})")
            if g < NEAR_TANGENT_GAP:
                flag = True
        if flag:
            log.warning("nearly tangent disks: limit-set iteration may hit the depth cap")
        object.__setattr__(self, "near_tangent", flag)

    @property
    def k(self) -> int:
        return len(self.disks)

    def reflection(self, i: int) -> MoebiusMap:
        return MoebiusMap.reflection(self.disks[i].boundary)

    def mapped(self, m: MoebiusMap) -> "SchottkyConfig":
        return SchottkyConfig(tuple(map_disk(m, d) for d in self.disks))


def reduce_word(letters, k: int | None = None) -> ReflectionWord:
    """Cancel adjacent equal letters (stack based, so nested cancellations resolve)."""
    stack: list[int] = []
    for v in letters:
        if isinstance(v, bool) or int(v) != v or v < 0 or (k is not None and v >= k):
            raise SchottkyError(f"invalid generator index {v!r}")
        v = int(v)
        if stack and stack[-1] == v:
            stack.pop()
        else:
            stack.append(v)
    return ReflectionWord(tuple(stack))


def enumerate_words(k: int, n: int) -> list[ReflectionWord]:
    """All reduced words of length exactly n over k generators, in lexicographic order."""
    if k < 2 or n < 0:
        raise SchottkyError("need k >= 2 and n >= 0")
    words: list[tuple[int, ...]] = [()]
    for _ in range(n):
        words = [w + (j,) for w in words for j in range(k) if not w or w[-1] != j]
    return [ReflectionWord(w) for w in words]


def word_map(cfg: SchottkyConfig, w: ReflectionWord) -> MoebiusMap:
    m = MoebiusMap.identity()
    for i in w.letters:
        m = m.compose(cfg.reflection(i))
    return m


def apply_word(cfg: SchottkyConfig, w: ReflectionWord | list, z):
    """Apply φ_{i1} ∘ ... ∘ φ_{in} to z, rightmost reflection first."""
    if not isinstance(w, ReflectionWord):
        w = ReflectionWord(tuple(w))
    for i in w.letters:
        if not 0 <= i < cfg.k:
            raise SchottkyError(f"invalid generator index {i}")
    out = z
    for i in reversed(w.letters):
        out = apply_moebius(cfg.reflection(i), out)
    return out


@dataclass(frozen=True)
class OrbitDisk:
    word: ReflectionWord
    generator: int
    disk: DiskRegion
    depth: int
    parent: int | None  # index into the orbit list

    @property
    def cap(self) -> Cap:
        return self.disk.to_cap()


def orbit_disks(cfg: SchottkyConfig, depth: int) -> list[OrbitDisk]:
    """Breadth-first orbit: every w(K_j) with w reduced, |w| <= depth and j != last letter.

    The parent of w(K_j) with w = w'·[i] is w'(K_i), which contains it.
    """
    if depth < 0:
        raise SchottkyError("depth must be nonnegative")
    out = [OrbitDisk(ReflectionWord(), j, d, 0, None) for j, d in enumerate(cfg.disks)]
    # frontier: orbit index -> map of its word, for disks at the current depth
    maps = {j: MoebiusMap.identity() for j in range(cfg.k)}
    frontier = list(range(cfg.k))
    for level in range(1, depth + 1):
        new_frontier = []
        new_maps = {}
        for idx in frontier:
            par = out[idx]
            # extend w' by the parent's generator i: w = w'·[i] and the child disks w(K_j), j != i
            w = ReflectionWord(par.word.letters + (par.generator,))
            try:
                m = maps[idx].compose(cfg.reflection(par.generator))
                images = [(j, map_disk(m, cfg.disks[j])) for j in range(cfg.k) if j != par.generator]
            except GeometryError as exc:
                raise SchottkyError(f"orbit disks at depth {level} fall below floating-point "
                                    f"resolution ({exc})") from exc
            for j, disk in images:
                out.append(OrbitDisk(w, j, disk, level, idx))
                new_maps[len(out) - 1] = m
                new_frontier.append(len(out) - 1)
        frontier, maps = new_frontier, new_maps
    return out


def check_nesting(orbit: list[OrbitDisk], samples: int = 16, tol: float = 1e-12) -> bool:
    """Every child disk lies in its parent: 16 boundary samples of the child tested for
    membership of the parent, plus the exact cap-containment test."""
    for od in orbit:
        if od.parent is None:
            continue
        par = orbit[od.parent]
        pts = od.disk.boundary.sample(samples)
        if not np.all(par.cap.contains(pts, tol=1e-12)):
            return False
        if not region_contains(par.disk, od.disk, tol=tol):
            return False
    return True


@dataclass(frozen=True)
class LimitSetResult:
    points: tuple[complex, complex]
    diameters: tuple[float, float]
    depth: int


def limit_set_two(cfg: SchottkyConfig, tol: float = 1e-9, depth_cap: int = 20) -> LimitSetResult:
    """The two limit points of a two-disk group, as the intersections of the two alternating
    nested chains K_i ⊃ φ_i(K_j) ⊃ φ_iφ_j(K_i) ⊃ ...; iterates until the spherical diameter of
    the innermost disk is below tol."""
    if cfg.k != 2:
        raise SchottkyError("limit_set_two needs exactly two disks")
    pts, diams, used = [], [], 0
    for start in (0, 1):
        m = MoebiusMap.identity()
        letter = start
        disk = cfg.disks[start]
        depth = 0
        while Cap.from_region(disk).diameter() >= tol:
            if depth >= depth_cap:
                raise SchottkyError(
                    f"limit chain from disk {start} not converged at depth cap {depth_cap} "
                    f"(diameter {Cap.from_region(disk).diameter():.3e})")
            m = m.compose(cfg.reflection(letter))
            letter = 1 - letter
            disk = map_disk(m, cfg.disks[letter])
            depth += 1
        cap = Cap.from_region(disk)
        pts.append(cap.center_point)
        diams.append(cap.diameter())
        used = max(used, depth)
    return LimitSetResult((pts[0], pts[1]), (diams[0], diams[1]), used)


def iterate_fixed_point(cfg: SchottkyConfig, word, seed: complex = 0j, iters: int = 200) -> complex:
    """Attracting fixed point of a word map by forward iteration (test oracle)."""
    z = seed
    for _ in range(iters):
        z = apply_word(cfg, word, z)
    return complex(z)


__all__ = [
    "LimitSetResult", "OrbitDisk", "ReflectionWord", "SchottkyConfig", "SchottkyError",
    "apply_word", "check_nesting", "enumerate_words", "iterate_fixed_point", "limit_set_two",
    "orbit_disks", "reduce_word", "word_map", "GeometryError",
]
