"""Spatial models over the integer plane and the transformations on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import BoundednessError, ParseError
from .syntax import Joint

Cell = tuple  # (x, y)

_STEP = {
    "up": (0, 1),
    "down": (0, -1),
    "right": (1, 0),
    "left": (-1, 0),
    "skip": (0, 0),
}


def norm(cell) -> int:
    """Chebyshev norm: ``|(x, y)| <= n`` iff both ``|x| <= n`` and ``|y| <= n``."""
    return max(abs(cell[0]), abs(cell[1]))


class SpatialModel:
    """Agent positions plus a sparse valuation, with a declared bound.

    ``valuation`` maps cells to sets of atom names; absent cells are empty.
    The declared ``bound`` must cover every agent and every nonempty cell;
    it defaults to the smallest such bound.  Equality ignores the bound.
    """

    __slots__ = ("_positions", "_valuation", "_bound", "_hash")

    def __init__(
        self,
        positions: Mapping[str, Cell] | None = None,
        valuation: Mapping[Cell, Iterable[str]] | None = None,
        bound: int | None = None,
    ):
        pos = {str(a): (int(c[0]), int(c[1])) for a, c in (positions or {}).items()}
        val = {}
        for cell, atoms in (valuation or {}).items():
            atoms = frozenset(atoms)
            if atoms:
                val[(int(cell[0]), int(cell[1]))] = atoms
        needed = max([norm(c) for c in pos.values()] + [norm(c) for c in val], default=0)
        if bound is None:
            bound = needed
        elif bound < 0:
            raise BoundednessError(f"negative bound {bound}")
        elif needed > bound:
            raise BoundednessError(f"model is not {bound}-bounded (needs {needed})")
        self._positions = pos
        self._valuation = val
        self._bound = int(bound)
        self._hash = None

    @property
    def positions(self) -> dict:
        return dict(self._positions)

    @property
    def valuation(self) -> dict:
        return dict(self._valuation)

    @property
    def bound(self) -> int:
        return self._bound

    @property
    def agents(self) -> frozenset:
        return frozenset(self._positions)

    @property
    def atoms(self) -> frozenset:
        return frozenset().union(*self._valuation.values())

    def position(self, agent: str) -> Cell:
        return self._positions[agent]

    def atoms_at(self, cell) -> frozenset:
        return self._valuation.get(tuple(cell), frozenset())

    def agents_at(self, cell) -> frozenset:
        cell = tuple(cell)
        return frozenset(a for a, c in self._positions.items() if c == cell)

    def holds(self, atom: str, cell) -> bool:
        return atom in self._valuation.get(tuple(cell), ())

    def is_at(self, agent: str, cell) -> bool:
        return self._positions.get(agent) == tuple(cell)

    def replace(self, positions=None, valuation=None, bound=None) -> "SpatialModel":
        return SpatialModel(
            self._positions if positions is None else positions,
            self._valuation if valuation is None else valuation,
            bound,
        )

    def __eq__(self, other):
        if not isinstance(other, SpatialModel):
            return NotImplemented
        return self._positions == other._positions and self._valuation == other._valuation

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (frozenset(self._positions.items()), frozenset(self._valuation.items()))
            )
        return self._hash

    def __repr__(self):
        return f"SpatialModel(positions={self._positions!r}, valuation={self._valuation!r}, bound={self._bound})"

    def to_text(self) -> str:
        return render_model(self)


@dataclass(frozen=True)
class PositionModel:
    """Agent positions only; a spatial model without atoms."""

    positions: tuple  # sorted ((agent, (x, y)), ...)

    @classmethod
    def of(cls, mapping: Mapping[str, Cell]) -> "PositionModel":
        return cls(tuple(sorted((str(a), (int(c[0]), int(c[1]))) for a, c in mapping.items())))

    def as_dict(self) -> dict:
        return dict(self.positions)

    def to_spatial(self) -> SpatialModel:
        return SpatialModel(self.as_dict())

    def map(self, fn) -> "PositionModel":
        return PositionModel.of({a: fn(c) for a, c in self.positions})


@dataclass(frozen=True)
class Gap:
    """An agent-free strip ``[a,b] x Z`` (vertical) or ``Z x [a,b]`` (horizontal)."""

    orientation: str  # "vertical" or "horizontal"
    a: int
    b: int

    def __post_init__(self):
        if self.orientation not in ("vertical", "horizontal"):
            raise ValueError(f"bad orientation {self.orientation!r}")
        if self.a > self.b:
            raise ValueError("gap needs a <= b")

    def coord(self, cell) -> int:
        return cell[0] if self.orientation == "vertical" else cell[1]

    def contains(self, cell) -> bool:
        return self.a <= self.coord(cell) <= self.b

    def inner(self, m: int) -> "Gap | None":
        """The sub-gap of points at depth at least ``m``, or None when empty."""
        if self.b - self.a < 2 * m:
            return None
        return Gap(self.orientation, self.a + m, self.b - m)


# -- transformations ----------------------------------------------------------


def truncate(model: SpatialModel, n: int) -> SpatialModel:
    """Keep what lies in the ``n``-box; agents outside move to ``(n+1, 0)``."""
    positions = {
        a: (c if norm(c) <= n else (n + 1, 0)) for a, c in model.positions.items()
    }
    valuation = {c: s for c, s in model.valuation.items() if norm(c) <= n}
    return SpatialModel(positions, valuation, n + 1)


def move(cell, action: str) -> Cell:
    dx, dy = _STEP[action]
    return (cell[0] + dx, cell[1] + dy)


def apply_joint_action(model: SpatialModel, delta: Joint) -> SpatialModel:
    """Move every agent by its entry in ``delta``; the valuation is untouched."""
    positions = {a: move(c, delta.action(a)) for a, c in model.positions.items()}
    moved = any(delta.action(a) != "skip" for a in positions)
    return SpatialModel(positions, model.valuation, model.bound + (1 if moved else 0))


def find_gaps(pm: PositionModel, agents=None, orientation: str = "vertical",
              extra=()) -> list:
    """Maximal finite agent-free intervals between occupied coordinates.

    ``agents`` restricts which agents count as occupying; ``extra`` adds
    further occupied cells (e.g. the evaluation point).
    """
    axis = 0 if orientation == "vertical" else 1
    cells = [c for a, c in pm.positions if agents is None or a in agents]
    coords = sorted({c[axis] for c in list(cells) + list(extra)})
    return [
        Gap(orientation, lo + 1, hi - 1)
        for lo, hi in zip(coords, coords[1:])
        if hi - lo >= 2
    ]


def gap_depth(gap: Gap, cell) -> int:
    if not gap.contains(cell):
        raise ValueError(f"{cell} is not inside {gap}")
    z = gap.coord(cell)
    return min(z - gap.a, gap.b - z)


def removal(gap: Gap):
    """The map collapsing ``gap`` onto its lower edge and shifting what lies beyond."""
    width = gap.b - gap.a
    vertical = gap.orientation == "vertical"

    def rho(cell):
        z = cell[0] if vertical else cell[1]
        if z > gap.a:
            z = max(gap.a, z - width)
        return (z, cell[1]) if vertical else (cell[0], z)

    return rho


def remove_gap(pm: PositionModel, gap: Gap, agents=None) -> tuple:
    """Apply the removal of ``gap`` to every agent; returns ``(rho P, rho)``."""
    for a, c in pm.positions:
        if (agents is None or a in agents) and gap.contains(c):
            raise ValueError(f"agent {a} at {c} lies inside {gap}")
    rho = removal(gap)
    return pm.map(rho), rho


# -- text format --------------------------------------------------------------


def parse_model(text: str) -> SpatialModel:
    """Read the line format: ``bound n``, ``agent id x y``, ``atom name x y``."""
    bound = None
    positions, valuation = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "bound" and len(parts) == 2:
                if bound is not None:
                    raise ParseError("duplicate bound", lineno)
                bound = int(parts[1])
            elif parts[0] == "agent" and len(parts) == 4:
                if parts[1] in positions:
                    raise ParseError(f"agent {parts[1]} placed twice", lineno)
                positions[parts[1]] = (int(parts[2]), int(parts[3]))
            elif parts[0] == "atom" and len(parts) == 4:
                cell = (int(parts[2]), int(parts[3]))
                valuation.setdefault(cell, set()).add(parts[1])
            else:
                raise ParseError(f"bad declaration {line!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"bad number in {line!r}", lineno) from exc
    return SpatialModel(positions, valuation, bound)


def render_model(model: SpatialModel) -> str:
    lines = [f"bound {model.bound}"]
    for a, (x, y) in sorted(model.positions.items()):
        lines.append(f"agent {a} {x} {y}")
    for (x, y), atoms in sorted(model.valuation.items()):
        for p in sorted(atoms):
            lines.append(f"atom {p} {x} {y}")
    return "\n".join(lines) + "\n"
