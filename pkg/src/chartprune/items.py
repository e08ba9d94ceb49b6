"""Chart item types shared by the parsers and the allowability predicates."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PcfgItem:
    """A labeled span [i, k) with end-exclusive indices."""

    label: str
    i: int
    k: int
    is_new: bool = False

    def __post_init__(self):
        if not 0 <= self.i < self.k:
            raise ValueError(f"bad span [{self.i}, {self.k})")

    @property
    def width(self) -> int:
        return self.k - self.i


@dataclass(frozen=True)
class TagItem:
    """A labeled span [i, l) with an optional gap [j, k) for auxiliary trees.

    Both gap fields are None for gapless items; a present gap satisfies
    i <= j < k <= l.
    """

    label: str
    i: int
    l: int
    j: int | None = None
    k: int | None = None

    def __post_init__(self):
        if not 0 <= self.i < self.l:
            raise ValueError(f"bad span [{self.i}, {self.l})")
        if (self.j is None) != (self.k is None):
            raise ValueError("gap must set both j and k or neither")
        if self.j is not None and not self.i <= self.j < self.k <= self.l:
            raise ValueError(
                f"gap [{self.j}, {self.k}) outside span [{self.i}, {self.l})"
            )

    @property
    def has_gap(self) -> bool:
        return self.j is not None
