"""Anticanonical invariant bookkeeping for smooth projective 4-folds.

Tracks the tuple (chi(-K), (-K)^4, (-K)^2.c2, rho, chi(O)) through point
blow-ups, curve blow-ups, plane blow-ups and small modifications, using
the exact deltas of the 4-fold Riemann-Roch formula.  The integer
identity

    12 * (chi(-K) - chi(O)) = 2 * (-K)^4 + (-K)^2 . c2

is enforced after every construction and every move.

The module is usable standalone (non-toric scenarios are pure ledger
arithmetic, driven by the move-script format below) and as a
cross-check against fan-level recomputation.

Move-script format, one move per line::

    start P4
    start custom chi=<n> degK4=<n> c2K2=<n> rho=<n>
    blowup point
    blowup curve degKC=<n> genus=<n>
    blowup plane
    flip dir=<f2s|s2f> s=<n>

Blank lines and '#' comments are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional

FANO_TO_SQM = "fano_to_sqm"
SQM_TO_FANO = "sqm_to_fano"
_DIRECTIONS = {
    "f2s": FANO_TO_SQM,
    "s2f": SQM_TO_FANO,
    FANO_TO_SQM: FANO_TO_SQM,
    SQM_TO_FANO: SQM_TO_FANO,
}


class LedgerError(ValueError):
    pass


def chi_general(
    D4: int, KD3: int, D2_K2_plus_c2: int, D_K_c2: int, chi_O: int = 1
) -> Fraction:
    """chi(X, D) for a divisor on a smooth projective 4-fold.

    Takes the four intersection quantities D^4, K.D^3, D^2.(K^2+c2),
    D.K.c2 and returns the exact rational value; genuine divisors give
    integers.
    """
    return (
        Fraction(D4 - 2 * KD3 + D2_K2_plus_c2 - D_K_c2, 24) + chi_O
    )


@dataclass(frozen=True)
class LedgerState:
    chi_minusK: int
    degK4: int
    c2K2: int
    rho: int
    chi_O: int = 1
    fano_flag: bool = False

    def __post_init__(self):
        if self.rho < 1:
            raise LedgerError(f"rho must be >= 1, got {self.rho}")
        if 12 * (self.chi_minusK - self.chi_O) != 2 * self.degK4 + self.c2K2:
            raise LedgerError(
                "Riemann-Roch identity violated: "
                f"12*({self.chi_minusK}-{self.chi_O}) != 2*{self.degK4} + {self.c2K2}"
            )

    @staticmethod
    def from_geometry(
        degK4: int, c2K2: int, rho: int, fano_flag: bool = False, chi_O: int = 1
    ) -> "LedgerState":
        num = 2 * degK4 + c2K2
        if num % 12 != 0:
            raise LedgerError(
                f"2*(-K)^4 + (-K)^2.c2 = {num} is not divisible by 12"
            )
        return LedgerState(num // 12 + chi_O, degK4, c2K2, rho, chi_O, fano_flag)

    @property
    def h0_minusK(self) -> int:
        """h^0(-K); available only while the Fano flag is asserted."""
        if not self.fano_flag:
            raise LedgerError("h0(-K) = chi(-K) requires the Fano flag")
        return self.chi_minusK

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.chi_minusK, self.degK4, self.c2K2, self.rho)

    def assert_fano(self) -> "LedgerState":
        return replace(self, fano_flag=True)


P4_STATE = LedgerState(126, 625, 250, 1, 1, True)


@dataclass(frozen=True)
class CurveBlowupData:
    """Degree and genus of the blown-up curve; d(C) = -K.C + 2 - 2g."""

    degKC: int
    genus: int

    def __post_init__(self):
        if self.genus < 0:
            raise LedgerError("genus must be nonnegative")

    @property
    def dC(self) -> int:
        return self.degKC + 2 - 2 * self.genus


def apply_point_blowup(s: LedgerState) -> LedgerState:
    """Blow-up of a smooth point: deltas (-15, -81, -18), rho + 1."""
    return LedgerState(
        s.chi_minusK - 15, s.degK4 - 81, s.c2K2 - 18, s.rho + 1, s.chi_O, False
    )


def apply_curve_blowup(s: LedgerState, c: CurveBlowupData) -> LedgerState:
    """Blow-up of a smooth curve: deltas (-3d, -16d, -4d) with d = d(C)."""
    d = c.dC
    return LedgerState(
        s.chi_minusK - 3 * d,
        s.degK4 - 16 * d,
        s.c2K2 - 4 * d,
        s.rho + 1,
        s.chi_O,
        False,
    )


def apply_plane_blowup(s: LedgerState) -> LedgerState:
    """Blow-up of a plane with normal bundle O(-1)+O(-1): (-3, -17, -2)."""
    return LedgerState(
        s.chi_minusK - 3, s.degK4 - 17, s.c2K2 - 2, s.rho + 1, s.chi_O, False
    )


def apply_flip(s: LedgerState, direction: str, s_count: int) -> LedgerState:
    """Small modification across s_count disjoint flipped components.

    chi(-K) and rho are unchanged; (-K)^4 drops by s_count from the
    side containing the planes to the side containing the lines and
    rises the other way; the c2 term moves by the compensating 2*s so
    the Riemann-Roch identity is preserved.
    """
    if s_count < 0:
        raise LedgerError("component count s must be nonnegative")
    if direction not in _DIRECTIONS:
        raise LedgerError(f"unknown flip direction {direction!r}")
    sign = -1 if _DIRECTIONS[direction] == FANO_TO_SQM else 1
    return LedgerState(
        s.chi_minusK,
        s.degK4 + sign * s_count,
        s.c2K2 - 2 * sign * s_count,
        s.rho,
        s.chi_O,
        False,
    )


_H0_RANGES = {"index3": (1, 5), "index2": (1, 22)}


def h0_bound_rho1(kind: str, H4: Optional[int] = None) -> int:
    """Upper bound for h^0(-K) of a smooth Fano 4-fold with rho = 1.

    Flat values for P4 (126), the quadric (105), the general index-1
    case (97) and the index-1 case carrying a covering family of
    degree-3 rational curves (121); index 3 and 2 evaluate 15*H^4 + 10
    and 3*H^4 + 9 on the classification range of H^4.
    """
    flat = {"P4": 126, "quadric": 105, "index1_general": 97, "index1_deg3_family": 121}
    if kind in flat:
        return flat[kind]
    if kind in _H0_RANGES:
        lo, hi = _H0_RANGES[kind]
        if H4 is None:
            raise LedgerError(f"kind {kind!r} requires H4")
        if not lo <= H4 <= hi:
            raise LedgerError(
                f"H^4 = {H4} outside the classification range [{lo}, {hi}] for {kind}"
            )
        return 15 * H4 + 10 if kind == "index3" else 3 * H4 + 9
    raise LedgerError(f"unknown kind {kind!r}")


def max_point_blowups(h0_Y: int, threshold: int = 1) -> int:
    """Largest r with h0_Y - 15 r >= threshold.

    The default positivity threshold is h^0 >= 1; pass threshold=2 for
    the stronger known positivity.
    """
    if h0_Y < threshold:
        raise LedgerError(f"h0 = {h0_Y} already below threshold {threshold}")
    return (h0_Y - threshold) // 15


# -- move scripts -----------------------------------------------------


@dataclass(frozen=True)
class ScriptStep:
    lineno: int
    text: str
    state: LedgerState


def _parse_kv(parts: Iterable[str], line: int) -> dict[str, int]:
    out = {}
    for p in parts:
        if "=" not in p:
            raise LedgerError(f"line {line}: expected key=value, got {p!r}")
        k, v = p.split("=", 1)
        try:
            out[k] = int(v)
        except ValueError:
            raise LedgerError(f"line {line}: value of {k!r} is not an integer") from None
    return out


def run_script(text: str) -> list[ScriptStep]:
    """Interpret a move script; returns the full trajectory including the
    start state."""
    steps: list[ScriptStep] = []
    state: Optional[LedgerState] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "start":
            if state is not None:
                raise LedgerError(f"line {lineno}: duplicate start")
            if len(parts) == 2 and parts[1] == "P4":
                state = P4_STATE
            elif len(parts) >= 2 and parts[1] == "custom":
                kv = _parse_kv(parts[2:], lineno)
                missing = {"chi", "degK4", "c2K2", "rho"} - kv.keys()
                if missing:
                    raise LedgerError(f"line {lineno}: missing {sorted(missing)}")
                state = LedgerState(kv["chi"], kv["degK4"], kv["c2K2"], kv["rho"])
            else:
                raise LedgerError(f"line {lineno}: unknown start form")
            steps.append(ScriptStep(lineno, line, state))
            continue
        if state is None:
            raise LedgerError(f"line {lineno}: move before start")
        if head == "blowup":
            if len(parts) >= 2 and parts[1] == "point":
                state = apply_point_blowup(state)
            elif len(parts) >= 2 and parts[1] == "plane":
                state = apply_plane_blowup(state)
            elif len(parts) >= 2 and parts[1] == "curve":
                kv = _parse_kv(parts[2:], lineno)
                if "degKC" not in kv or "genus" not in kv:
                    raise LedgerError(f"line {lineno}: blowup curve needs degKC and genus")
                state = apply_curve_blowup(
                    state, CurveBlowupData(kv["degKC"], kv["genus"])
                )
            else:
                raise LedgerError(f"line {lineno}: unknown blowup center")
        elif head == "flip":
            kv_raw = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
            if "dir" not in kv_raw or "s" not in kv_raw:
                raise LedgerError(f"line {lineno}: flip needs dir= and s=")
            if kv_raw["dir"] not in _DIRECTIONS:
                raise LedgerError(f"line {lineno}: unknown direction {kv_raw['dir']!r}")
            try:
                s_count = int(kv_raw["s"])
            except ValueError:
                raise LedgerError(f"line {lineno}: s must be an integer") from None
            state = apply_flip(state, kv_raw["dir"], s_count)
        else:
            raise LedgerError(f"line {lineno}: unknown move {head!r}")
        steps.append(ScriptStep(lineno, line, state))
    if state is None:
        raise LedgerError("empty script")
    return steps
