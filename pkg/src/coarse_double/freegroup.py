"""Reduced words in the free group on a, b. Letters: a=1, a^-1=-1, b=2, b^-1=-2."""

from __future__ import annotations

from itertools import product

import numpy as np

Word = tuple[int, ...]

ALPHABET = (1, -1, 2, -2)


def reduce(word) -> Word:
    """Free reduction by cancelling adjacent inverse letters."""
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(word: Word) -> Word:
    return tuple(-x for x in reversed(word))


def multiply(u: Word, v: Word) -> Word:
    return reduce(u + v)


def word_distance(u: Word, v: Word) -> int:
    """Left-invariant word metric ``|u^-1 v|`` by explicit cancellation."""
    return len(reduce(inverse(u) + v))


def ball(radius: int) -> list[Word]:
    """All reduced words of length <= radius, shortlex in the order a, A, b, B."""
    words: list[Word] = [()]
    layer: list[Word] = [()]
    for _ in range(radius):
        nxt = []
        for w in layer:
            for x in ALPHABET:
                if not w or w[-1] != -x:
                    nxt.append(w + (x,))
        words.extend(nxt)
        layer = nxt
    return words


def _padded(words, width: int) -> np.ndarray:
    arr = np.zeros((len(words), width), dtype=np.int8)
    for i, w in enumerate(words):
        arr[i, : len(w)] = w
    return arr


def distance_matrix(rows, cols=None, chunk: int = 256) -> np.ndarray:
    """``|u^-1 v|`` for reduced words, via ``|u| + |v| - 2 * common prefix``.

    Valid for reduced inputs only; :func:`word_distance` is the independent route.
    """
    cols = rows if cols is None else cols
    width = max([len(w) for w in rows] + [len(w) for w in cols] + [1])
    R, K = _padded(rows, width), _padded(cols, width)
    lr = np.array([len(w) for w in rows])
    lk = np.array([len(w) for w in cols])
    out = np.empty((len(rows), len(cols)))
    for s in range(0, len(rows), chunk):
        eq = (R[s : s + chunk, None, :] == K[None, :, :]) & (K[None, :, :] != 0)
        lcp = np.cumprod(eq, axis=2).sum(axis=2)
        out[s : s + chunk] = lr[s : s + chunk, None] + lk[None, :] - 2 * lcp
    return out


def sphere_sizes(radius: int) -> list[int]:
    return [1] + [4 * 3 ** (k - 1) for k in range(1, radius + 1)]


def parse(text: str) -> Word:
    m = {"a": 1, "A": -1, "b": 2, "B": -2}
    return reduce(m[c] for c in text if c != "e")


def all_words(length: int):
    """Every (not necessarily reduced) word of the given length."""
    return product(ALPHABET, repeat=length)
