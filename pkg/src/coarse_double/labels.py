"""Point labels: what each point of a finite space stands for."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

# Letters of the free group on a, b: a=1, a^-1=-1, b=2, b^-1=-2.
LETTERS = {1: "a", -1: "A", 2: "b", -2: "B"}
_FROM_CHAR = {v: k for k, v in LETTERS.items()}


@dataclass(frozen=True)
class FreeWord:
    word: tuple[int, ...] = ()

    def __post_init__(self):
        for x, y in zip(self.word, self.word[1:]):
            if x == -y:
                raise ValueError(f"word {self} is not reduced")
        if any(x not in LETTERS for x in self.word):
            raise ValueError(f"bad letters in {self.word}")

    def __str__(self) -> str:
        return "".join(LETTERS[x] for x in self.word) or "e"

    @classmethod
    def parse(cls, text: str) -> "FreeWord":
        if text in ("", "e"):
            return cls(())
        return cls(tuple(_FROM_CHAR[c] for c in text))


@dataclass(frozen=True)
class Lattice:
    coords: tuple[int, ...]


@dataclass(frozen=True)
class RayParam:
    """A point on ray ``ray`` at parameter ``t``; ``ray=None`` is the shared origin."""

    ray: int | None
    t: float

    def __post_init__(self):
        if self.ray is None:
            if self.t != 0:
                raise ValueError("origin must have t = 0")
        elif self.ray < 1 or not self.t > 0:
            raise ValueError(f"ray point needs ray >= 1 and t > 0, got {self}")

    @property
    def is_origin(self) -> bool:
        return self.ray is None


ORIGIN = RayParam(None, 0.0)


@dataclass(frozen=True)
class SeqIndex:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sequence indices start at 1")


@dataclass(frozen=True)
class Planar:
    x: float
    y: float


@dataclass(frozen=True)
class Anon:
    id: int


PointLabel = Union[FreeWord, Lattice, RayParam, SeqIndex, Planar, Anon]


def label_to_json(p: PointLabel) -> dict:
    if isinstance(p, FreeWord):
        return {"kind": "FreeWord", "word": str(p)}
    if isinstance(p, Lattice):
        return {"kind": "Lattice", "coords": list(p.coords)}
    if isinstance(p, RayParam):
        if p.is_origin:
            return {"kind": "RayParam", "ray": None, "t": 0.0}
        return {"kind": "RayParam", "ray": p.ray, "t": p.t}
    if isinstance(p, SeqIndex):
        return {"kind": "SeqIndex", "n": p.n}
    if isinstance(p, Planar):
        return {"kind": "Planar", "x": p.x, "y": p.y}
    if isinstance(p, Anon):
        return {"kind": "Anon", "id": p.id}
    raise TypeError(f"not a point label: {p!r}")


def label_from_json(obj: dict) -> PointLabel:
    kind = obj["kind"]
    if kind == "FreeWord":
        return FreeWord.parse(obj["word"])
    if kind == "Lattice":
        return Lattice(tuple(int(c) for c in obj["coords"]))
    if kind == "RayParam":
        return RayParam(obj["ray"], float(obj["t"]))
    if kind == "SeqIndex":
        return SeqIndex(int(obj["n"]))
    if kind == "Planar":
        return Planar(float(obj["x"]), float(obj["y"]))
    if kind == "Anon":
        return Anon(int(obj["id"]))
    raise ValueError(f"unknown label kind {kind!r}")
