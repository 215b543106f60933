"""Pair-operator layouts across identical copies of a two-qubit state.

A layout places two-qubit pair operators (singlet projector or identity)
on disjoint slot pairs, one perfect matching per side, over n copies.
The 11 standard layouts P1..P11 and the three measurement settings that
realize them are fixed here; rendering produces a row-per-copy diagram.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SIDES = ("a", "b")
KINDS = ("singlet", "identity")
COPY_COUNTS = (2, 4, 6)


@dataclass(frozen=True)
class QubitSlot:
    copy: int
    side: str

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ValueError(f"side must be 'a' or 'b', got {self.side!r}")
        if self.copy < 1:
            raise ValueError(f"copy index must be >= 1, got {self.copy}")


@dataclass(frozen=True)
class PairOp:
    """A singlet or identity operator on two same-side slots."""

    side: str
    copies: tuple[int, int]
    kind: str

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ValueError(f"side must be 'a' or 'b', got {self.side!r}")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        lo, hi = sorted(int(c) for c in self.copies)
        if lo == hi:
            raise ValueError(f"pair slots must be distinct, got copies {self.copies}")
        if lo < 1:
            raise ValueError(f"copy indices must be >= 1, got {self.copies}")
        object.__setattr__(self, "copies", (lo, hi))

    @property
    def slots(self) -> tuple[QubitSlot, QubitSlot]:
        return (QubitSlot(self.copies[0], self.side), QubitSlot(self.copies[1], self.side))


@dataclass(frozen=True, eq=False)
class PairingLayout:
    """A full assignment of pair operators over n copies.

    Identity is the (matching, kinds) content; `label` is advisory and the
    stored pair order is preserved as given.
    """

    n_copies: int
    pairs: tuple[PairOp, ...]
    label: str | None = field(default=None)

    def __post_init__(self) -> None:
        if self.n_copies not in COPY_COUNTS:
            raise ValueError(f"n_copies must be one of {COPY_COUNTS}, got {self.n_copies}")
        pairs = tuple(self.pairs)
        object.__setattr__(self, "pairs", pairs)
        for side in SIDES:
            side_pairs = [p for p in pairs if p.side == side]
            if len(side_pairs) != self.n_copies // 2:
                raise ValueError(
                    f"side {side!r} needs {self.n_copies // 2} pairs, got {len(side_pairs)}"
                )
            seen: set[int] = set()
            for p in side_pairs:
                for c in p.copies:
                    if c > self.n_copies:
                        raise ValueError(
                            f"copy {c} outside 1..{self.n_copies} on side {side!r}"
                        )
                    if c in seen:
                        raise ValueError(f"copy {c} used twice on side {side!r}")
                    seen.add(c)

    def matching(self) -> frozenset[tuple[str, tuple[int, int]]]:
        return frozenset((p.side, p.copies) for p in self.pairs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PairingLayout):
            return NotImplemented
        return self.n_copies == other.n_copies and frozenset(self.pairs) == frozenset(
            other.pairs
        )

    def __hash__(self) -> int:
        return hash((self.n_copies, frozenset(self.pairs)))


def _layout(label: str, n: int, entries: list[tuple[str, int, int, str]]) -> PairingLayout:
    return PairingLayout(
        n, tuple(PairOp(side, (lo, hi), kind) for side, lo, hi, kind in entries), label
    )


def standard_layouts() -> list[PairingLayout]:
    """The 11 standard layouts P1..P11 over 2, 4, and 6 copies."""
    S, I = "singlet", "identity"
    return [
        _layout("P1", 2, [("a", 1, 2, S), ("b", 1, 2, S)]),
        _layout("P2", 2, [("a", 1, 2, S), ("b", 1, 2, I)]),
        _layout("P3", 2, [("a", 1, 2, I), ("b", 1, 2, S)]),
        _layout("P4", 4, [("a", 1, 4, S), ("a", 2, 3, S), ("b", 1, 2, S), ("b", 3, 4, S)]),
        _layout("P5", 4, [("a", 1, 4, S), ("a", 2, 3, I), ("b", 1, 2, S), ("b", 3, 4, S)]),
        _layout("P6", 4, [("a", 1, 4, S), ("a", 2, 3, S), ("b", 1, 2, S), ("b", 3, 4, I)]),
        _layout("P7", 4, [("a", 1, 4, I), ("a", 2, 3, S), ("b", 1, 2, S), ("b", 3, 4, I)]),
        _layout(
            "P8",
            6,
            [
                ("a", 1, 6, S), ("a", 2, 3, S), ("a", 4, 5, S),
                ("b", 1, 2, S), ("b", 3, 4, S), ("b", 5, 6, S),
            ],
        ),
        _layout(
            "P9",
            6,
            [
                ("a", 1, 6, S), ("a", 2, 3, S), ("a", 4, 5, I),
                ("b", 1, 2, S), ("b", 3, 4, S), ("b", 5, 6, S),
            ],
        ),
        _layout(
            "P10",
            6,
            [
                ("a", 1, 6, S), ("a", 2, 3, S), ("a", 4, 5, S),
                ("b", 1, 2, S), ("b", 3, 4, S), ("b", 5, 6, I),
            ],
        ),
        _layout(
            "P11",
            6,
            [
                ("a", 1, 6, I), ("a", 2, 3, S), ("a", 4, 5, S),
                ("b", 1, 2, S), ("b", 3, 4, S), ("b", 5, 6, I),
            ],
        ),
    ]


@dataclass(frozen=True, eq=False)
class Setting:
    """A fixed pair matching measured in the {singlet, complement} basis.

    `layout` is the fully-singlet member; `covered` lists the labels of the
    standard layouts obtainable from this matching by marginalizing pairs.
    """

    layout: PairingLayout
    covered: tuple[str, ...]

    @property
    def n_copies(self) -> int:
        return self.layout.n_copies

    @property
    def pairs(self) -> tuple[PairOp, ...]:
        return self.layout.pairs


def settings() -> list[Setting]:
    """The three measurement settings covering all 11 standard layouts."""
    by_label = {lay.label: lay for lay in standard_layouts()}
    return [
        Setting(by_label["P1"], ("P1", "P2", "P3")),
        Setting(by_label["P4"], ("P4", "P5", "P6", "P7")),
        Setting(by_label["P8"], ("P8", "P9", "P10", "P11")),
    ]


def render_layout(layout: PairingLayout) -> str:
    """Deterministic text diagram: one row per copy, a-side then b-side.

    Each pair occupies one lane; endpoints are marked S (singlet) or
    I (identity), interior rows of an arc are drawn with '|'.
    """
    lanes = {
        side: sorted(
            (p for p in layout.pairs if p.side == side), key=lambda p: p.copies
        )
        for side in SIDES
    }

    def cell(p: PairOp, row: int) -> str:
        lo, hi = p.copies
        if row == lo or row == hi:
            return "S" if p.kind == "singlet" else "I"
        if lo < row < hi:
            return "|"
        return " "

    def row_text(side: str, row: int) -> str:
        return " ".join(cell(p, row) for p in lanes[side])

    a_width = max(1, 2 * len(lanes["a"]) - 1)
    title = f"{layout.label or 'layout'}  copies={layout.n_copies}"
    lines = [title, f"      {'a':<{a_width}}   b"]
    for row in range(1, layout.n_copies + 1):
        lines.append(f"  {row:2d}  {row_text('a', row):<{a_width}}   {row_text('b', row)}")
    return "\n".join(line.rstrip() for line in lines)


def layout_to_dict(layout: PairingLayout) -> dict:
    """JSON-ready form; the advisory label is not part of the schema."""
    return {
        "n_copies": layout.n_copies,
        "pairs": [
            {"side": p.side, "copies": [p.copies[0], p.copies[1]], "kind": p.kind}
            for p in layout.pairs
        ],
    }


def layout_from_dict(data: dict) -> PairingLayout:
    if not isinstance(data, dict) or set(data) != {"n_copies", "pairs"}:
        raise ValueError(
            'layout object must have exactly the fields "n_copies" and "pairs"'
        )
    pairs = []
    for entry in data["pairs"]:
        if not isinstance(entry, dict) or set(entry) != {"side", "copies", "kind"}:
            raise ValueError(
                'each pair must have exactly the fields "side", "copies", "kind"'
            )
        copies = entry["copies"]
        if len(copies) != 2:
            raise ValueError(f"pair copies must list two copy indices, got {copies}")
        pairs.append(PairOp(entry["side"], (int(copies[0]), int(copies[1])), entry["kind"]))
    return PairingLayout(int(data["n_copies"]), tuple(pairs))


def layout_to_json(layout: PairingLayout) -> str:
    return json.dumps(layout_to_dict(layout))


def layout_from_json(text: str) -> PairingLayout:
    return layout_from_dict(json.loads(text))
