"""Exception hierarchy. Every violation carries enough data to locate it."""

from __future__ import annotations


class CoarseDoubleError(Exception):
    """Base class for all library errors."""


class ValidationFailed(CoarseDoubleError):
    pass


class NotSquare(ValidationFailed):
    pass


class NonFinite(ValidationFailed):
    pass


class NotSymmetric(ValidationFailed):
    def __init__(self, i: int, j: int, gap: float):
        self.i, self.j, self.gap = i, j, gap
        super().__init__(f"dist({i},{j}) != dist({j},{i}) (difference {gap:.6g})")


class ZeroOffDiagonal(ValidationFailed):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"dist({i},{j}) <= 0 for distinct points")


class NonZeroDiagonal(ValidationFailed):
    def __init__(self, i: int):
        self.i = i
        super().__init__(f"dist({i},{i}) != 0")


class TriangleViolation(ValidationFailed):
    def __init__(self, i: int, j: int, k: int, slack: float):
        self.i, self.j, self.k, self.slack = i, j, k, slack
        super().__init__(
            f"dist({i},{k}) > dist({i},{j}) + dist({j},{k}) by {slack:.6g}"
        )


class NonPositiveCross(ValidationFailed):
    def __init__(self, i: int, j: int, value: float):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"cross({i},{j}) = {value!r} is not positive")


_MIXED_FORMS = {
    1: "cross(i,j) <= base(i,k) + cross(k,j)",
    2: "cross(i,j) <= cross(i,k) + base(k,j)",
    3: "base(i,k) <= cross(i,j) + cross(k,j)",
    4: "base(j,k) <= cross(i,j) + cross(i,k)",
}


class MixedTriangleViolation(ValidationFailed):
    def __init__(self, kind: int, indices: tuple[int, int, int], slack: float):
        self.kind, self.indices, self.slack = kind, indices, slack
        i, j, k = indices
        super().__init__(
            f"mixed triangle {kind} ({_MIXED_FORMS[kind]}) fails at "
            f"i={i}, j={j}, k={k} by {slack:.6g}"
        )


class ShapeMismatch(ValidationFailed):
    pass


class EmptySubset(CoarseDoubleError):
    pass


class BaseMismatch(CoarseDoubleError):
    pass


class DistortionExceedsC(CoarseDoubleError):
    def __init__(self, u: int, v: int, distortion: float, C: float):
        self.u, self.v, self.distortion, self.C = u, v, distortion, C
        super().__init__(
            f"distortion {distortion:.6g} at points ({u},{v}) is not below C={C:.6g}"
        )


class GridEmpty(CoarseDoubleError):
    pass


class LevelsTooFew(CoarseDoubleError):
    pass


class NotSelfadjoint(CoarseDoubleError):
    def __init__(self, verdict=None):
        self.verdict = verdict
        super().__init__("metric is not coarsely selfadjoint")


class NearConditionViolated(CoarseDoubleError):
    def __init__(self, n: int, m: int, slack: float):
        self.n, self.m, self.slack = n, m, slack
        super().__init__(
            f"|d(x_n,x_m) - d(y_n,y_m)| >= C at n={n}, m={m} (excess {slack:.6g})"
        )


class RadiusTooLarge(CoarseDoubleError):
    pass


class TooManyPoints(CoarseDoubleError):
    pass


class IndexTooLarge(CoarseDoubleError):
    pass


class WitnessInvalid(CoarseDoubleError):
    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        super().__init__(f"witness fails {condition}" + (f": {detail}" if detail else ""))


class UnknownExperiment(CoarseDoubleError):
    pass


class ParamOutOfRange(CoarseDoubleError):
    pass


class UnsupportedFormat(CoarseDoubleError):
    pass
