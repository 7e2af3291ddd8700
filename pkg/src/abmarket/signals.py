"""Momentum technical analysis: index momentum, trend rows and action probabilities."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    HistoryTooShortError,
    InvalidDistributionError,
    InvalidParameterError,
    TableMissError,
)

HISTORY_NEEDED = 11


class Action(enum.IntEnum):
    SELL = -1
    HOLD = 0
    BUY = 1


# sampling and tie-break order
ACTION_ORDER = (Action.BUY, Action.HOLD, Action.SELL)


@dataclass(frozen=True)
class MomentumTriple:
    m1: float
    m5: float
    m10: float


def compute_momentum(series: Sequence[float], t: int | None = None) -> MomentumTriple:
    """Momentum over the 1-, 5- and 10-step windows ending at ``t - 1``.

    ``series[j]`` is the index at step ``j``; ``t`` defaults to ``len(series)``,
    i.e. the step about to be decided.
    """
    if t is None:
        t = len(series)
    if t - HISTORY_NEEDED < 0 or t - 1 >= len(series):
        raise HistoryTooShortError(
            f"momentum at t={t} needs index values t-11..t-1, have {len(series)}"
        )
    i1, i2, i6, i11 = series[t - 1], series[t - 2], series[t - 6], series[t - 11]
    return MomentumTriple(float(i1 - i2), float(i2 - i6), float(i6 - i11))


@dataclass(frozen=True)
class TrendRow:
    label: str
    pattern: tuple[bool, bool, bool, bool, bool]

    @property
    def code(self) -> int:
        return pattern_code(self.pattern)


def pattern_code(pattern: Sequence[bool]) -> int:
    code = 0
    for bit in pattern:
        code = (code << 1) | int(bool(bit))
    return code


def _row(label: str, bits: str) -> TrendRow:
    return TrendRow(label, tuple(b == "1" for b in bits))  # type: ignore[arg-type]


# predicate order: m1>m5, m5>m10, m1>0, m5>0, m10>0
TREND_ROWS: tuple[TrendRow, ...] = (
    _row("A", "00111"),
    _row("B", "11111"),
    _row("C", "01111"),
    _row("D", "10111"),
    _row("E", "01110"),
    _row("F", "10101"),
    _row("G", "11110"),
    _row("H", "11000"),
    _row("I", "11100"),
    _row("J", "01010"),
    _row("K", "10100"),
    _row("L", "00001"),
    _row("M", "01011"),
    _row("N", "10000"),
    _row("O", "10001"),
    _row("P", "00000"),
    _row("Q", "00011"),
    _row("R", "01000"),
)
ROW_LABELS = tuple(r.label for r in TREND_ROWS)
ROW_BY_LABEL = {r.label: r for r in TREND_ROWS}
_ROW_BY_CODE = {r.code: r for r in TREND_ROWS}
FALLBACK_ROW = ROW_BY_LABEL["P"]


def predicates(mom: MomentumTriple) -> tuple[bool, bool, bool, bool, bool]:
    # strict comparisons: equality counts as false
    return (
        mom.m1 > mom.m5,
        mom.m5 > mom.m10,
        mom.m1 > 0,
        mom.m5 > 0,
        mom.m10 > 0,
    )


@dataclass
class TrendDiagnostics:
    """Counts momentum patterns that are not one of the 18 listed rows."""

    unlisted: int = 0
    by_code: dict[int, int] = field(default_factory=dict)

    def record(self, code: int) -> None:
        self.unlisted += 1
        self.by_code[code] = self.by_code.get(code, 0) + 1


def classify_trend(mom: MomentumTriple, diagnostics: TrendDiagnostics | None = None) -> TrendRow:
    """Trend row for a momentum triple; unlisted patterns fall back to row P."""
    code = pattern_code(predicates(mom))
    row = _ROW_BY_CODE.get(code)
    if row is None:
        if diagnostics is not None:
            diagnostics.record(code)
        return FALLBACK_ROW
    return row


def row_lookup() -> tuple[np.ndarray, np.ndarray]:
    """Pattern code (0..31) -> row index, plus a mask of unlisted codes."""
    lut = np.full(32, ROW_LABELS.index(FALLBACK_ROW.label), dtype=np.int64)
    listed = np.zeros(32, dtype=bool)
    for i, row in enumerate(TREND_ROWS):
        lut[row.code] = i
        listed[row.code] = True
    return lut, ~listed


Probs = tuple[float, float, float]


@dataclass(frozen=True)
class ProbabilityTable:
    """Per trend row (p_buy, p_hold, p_sell)."""

    case_id: int
    rows: Mapping[str, Probs]

    def __post_init__(self) -> None:
        missing = [lbl for lbl in ROW_LABELS if lbl not in self.rows]
        if missing:
            raise InvalidParameterError(f"probability table lacks rows {missing}")
        for label, probs in self.rows.items():
            if len(probs) != 3 or any(p < 0 or p > 1 for p in probs):
                raise InvalidParameterError(f"row {label}: probabilities must lie in [0, 1]")
            if abs(sum(probs) - 1.0) > 1e-9:
                raise InvalidParameterError(f"row {label} sums to {sum(probs)}, not 1")

    def as_array(self) -> np.ndarray:
        """(18, 3) array in row order A..R."""
        return np.array([self.rows[lbl] for lbl in ROW_LABELS], dtype=np.float64)

    def column_sums(self) -> Probs:
        arr = self.as_array()
        return tuple(float(x) for x in arr.sum(axis=0))  # type: ignore[return-value]


def _table(case_id: int, text: str) -> ProbabilityTable:
    rows = {}
    for line in text.strip().splitlines():
        label, *vals = line.split()
        rows[label] = tuple(float(v) for v in vals)
    return ProbabilityTable(case_id, rows)


CASE1 = _table(
    1,
    """
    A 0.8 0.1 0.1
    B 1.0 0.0 0.0
    C 0.8 0.1 0.1
    D 1.0 0.0 0.0
    E 0.6 0.2 0.2
    F 0.6 0.2 0.2
    G 0.6 0.2 0.2
    H 0.1 0.1 0.8
    I 1.0 0.0 0.0
    J 0.2 0.2 0.6
    K 1.0 0.0 0.0
    L 0.2 0.2 0.6
    M 0.0 0.0 1.0
    N 0.1 0.1 0.8
    O 0.2 0.2 0.6
    P 0.0 0.0 1.0
    Q 0.0 0.0 1.0
    R 0.0 0.0 1.0
    """,
)

CASE2 = _table(
    2,
    """
    A 0.1 0.1 0.8
    B 0.0 0.0 1.0
    C 0.1 0.1 0.8
    D 0.0 0.0 1.0
    E 0.2 0.2 0.6
    F 0.2 0.2 0.6
    G 0.2 0.2 0.6
    H 0.8 0.1 0.1
    I 0.0 0.0 1.0
    J 0.6 0.2 0.2
    K 0.0 0.0 1.0
    L 0.6 0.2 0.2
    M 1.0 0.0 0.0
    N 0.8 0.1 0.1
    O 0.6 0.2 0.2
    P 1.0 0.0 0.0
    Q 1.0 0.0 0.0
    R 1.0 0.0 0.0
    """,
)

CASE3 = _table(
    3,
    """
    A 0.6 0.3 0.1
    B 0.7 0.3 0.0
    C 0.6 0.3 0.1
    D 0.7 0.3 0.0
    E 0.4 0.4 0.2
    F 0.4 0.4 0.2
    G 0.4 0.4 0.2
    H 0.1 0.3 0.6
    I 0.7 0.3 0.0
    J 0.2 0.4 0.4
    K 0.7 0.3 0.0
    L 0.2 0.4 0.4
    M 0.0 0.3 0.7
    N 0.1 0.3 0.6
    O 0.2 0.4 0.4
    P 0.0 0.3 0.7
    Q 0.0 0.3 0.7
    R 0.0 0.3 0.7
    """,
)


def swap_buy_sell(table: ProbabilityTable, case_id: int) -> ProbabilityTable:
    return ProbabilityTable(case_id, {lbl: (s, h, b) for lbl, (b, h, s) in table.rows.items()})


def derive_case4(case3: ProbabilityTable) -> ProbabilityTable:
    """Invert the balanced table by swapping its buy and sell columns."""
    return swap_buy_sell(case3, 4)


CASE4 = derive_case4(CASE3)
BUILTIN_TABLES = {1: CASE1, 2: CASE2, 3: CASE3, 4: CASE4}


def builtin_table(case_id: int) -> ProbabilityTable:
    try:
        return BUILTIN_TABLES[case_id]
    except KeyError:
        raise InvalidParameterError(f"case_id must be 1..4, got {case_id}") from None


def lookup_probs(table: ProbabilityTable, row: TrendRow | str) -> Probs:
    label = row if isinstance(row, str) else row.label
    try:
        return tuple(table.rows[label])  # type: ignore[return-value]
    except KeyError:
        raise TableMissError(f"no probabilities for trend row {label!r}") from None


def sample_decision(probs: Sequence[float], rng) -> Action:
    """Draw buy/hold/sell with one uniform, partitioned in that order."""
    p_buy, p_hold, p_sell = probs
    if any(math.isnan(p) or p < 0 for p in probs) or abs(p_buy + p_hold + p_sell - 1.0) > 1e-9:
        raise InvalidDistributionError(f"not a probability triple: {tuple(probs)}")
    u = rng.random()
    if u < p_buy:
        return Action.BUY
    if u < p_buy + p_hold:
        return Action.HOLD
    return Action.SELL


def load_table(path: str | Path, case_id: int = 0) -> ProbabilityTable:
    """Read ``label p_buy p_hold p_sell`` lines; ``#`` starts a comment."""
    rows: dict[str, Probs] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4 or parts[0] not in ROW_BY_LABEL:
            raise InvalidParameterError(f"{path}:{lineno}: expected 'label p_buy p_hold p_sell'")
        rows[parts[0]] = tuple(float(x) for x in parts[1:])  # type: ignore[assignment]
    return ProbabilityTable(case_id, rows)


def dump_table(table: ProbabilityTable, path: str | Path) -> None:
    lines = [f"# case {table.case_id}: label p_buy p_hold p_sell"]
    lines += [f"{lbl} {b:g} {h:g} {s:g}" for lbl, (b, h, s) in table.rows.items()]
    Path(path).write_text("\n".join(lines) + "\n")
