"""
2-colexes: trivalent lattices with 3-colorable faces on closed surfaces.

A colex is stored as a vertex count plus faces given as cyclic boundary
vertex lists with a color per face; edges and all topological quantities
(Euler characteristic, genus, encoded qubits) are derived, never trusted
from input.  Generators build hexagonal and square-octagon tori; arbitrary
lattices (any genus) are accepted from JSON files and fully validated.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .gf2 import BitMatrix

COLORS = (0, 1, 2)


@dataclass(frozen=True)
class Colex:
    """A 2-colex: faces as cyclic vertex lists plus a color per face."""

    vertex_count: int
    faces: tuple[tuple[int, ...], ...]
    face_colors: tuple[int, ...]

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def edges(self) -> set[frozenset[int]]:
        """Unordered vertex pairs: consecutive entries along each boundary."""
        out: set[frozenset[int]] = set()
        for f in self.faces:
            for a, b in zip(f, f[1:] + f[:1]):
                out.add(frozenset((a, b)))
        return out

    def to_dict(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "faces": [list(f) for f in self.faces],
            "face_colors": list(self.face_colors),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Colex":
        try:
            return cls(
                vertex_count=int(data["vertex_count"]),
                faces=tuple(tuple(int(v) for v in f) for f in data["faces"]),
                face_colors=tuple(int(c) for c in data["face_colors"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ColexFormatError(f"malformed colex document: {exc}") from exc


@dataclass(frozen=True)
class Violation:
    """One failed lattice invariant with the indices that witness it."""

    code: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.message}"


@dataclass
class ValidationReport:
    ok: bool
    violations: list[Violation] = field(default_factory=list)

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


@dataclass(frozen=True)
class DerivedQuantities:
    """Combinatorial and topological quantities of a valid colex."""

    vertices: int
    edges: int
    faces: int
    chi: int
    genus: int
    encoded_qubits: int


class ColexFormatError(ValueError):
    """A colex document could not be parsed into the expected shape."""


class ColexValidationError(ValueError):
    """A colex failed validation; carries the itemized report."""

    def __init__(self, report: ValidationReport, source: str = "colex"):
        self.report = report
        super().__init__(f"{source} failed validation:\n{report}")


class InvalidDimensionsError(ValueError):
    """Generator dimensions produce a lattice violating a colex invariant."""


def validate(colex: Colex) -> ValidationReport:
    """Check every 2-colex invariant; violations are data, not exceptions.

    Checks vertex degrees, face sizes and distinctness, edge sharing,
    pairwise face overlaps, proper coloring, surface closure (every edge on
    exactly two faces), connectivity, orientability, and the Euler/genus
    arithmetic.  Structural problems (bad indices, wrong list lengths) make
    later checks meaningless, so reporting stops after that stage.
    """
    v: list[Violation] = []
    V = colex.vertex_count
    F = len(colex.faces)

    # structural stage
    if V <= 0:
        v.append(Violation("vertex-count", f"vertex_count must be positive, got {V}"))
    if F == 0:
        v.append(Violation("no-faces", "lattice has no faces"))
    if len(colex.face_colors) != F:
        v.append(
            Violation(
                "color-length",
                f"{len(colex.face_colors)} colors for {F} faces",
            )
        )
    else:
        for f_idx, c in enumerate(colex.face_colors):
            if c not in COLORS:
                v.append(Violation("color-range", f"face {f_idx} has color {c} not in 0..2"))
    for f_idx, f in enumerate(colex.faces):
        if any(not (0 <= a < V) for a in f):
            v.append(Violation("vertex-range", f"face {f_idx} references vertex outside 0..{V - 1}"))
        if len(set(f)) != len(f):
            v.append(Violation("repeated-vertex", f"face {f_idx} repeats a vertex: {list(f)}"))
        if len(f) < 4 or len(f) % 2 != 0:
            v.append(
                Violation(
                    "face-size",
                    f"face {f_idx} has {len(f)} vertices (must be even and >= 4)",
                )
            )
    if v:
        return ValidationReport(False, v)

    # incidence stage
    faces_at: list[list[int]] = [[] for _ in range(V)]
    for f_idx, f in enumerate(colex.faces):
        for a in f:
            faces_at[a].append(f_idx)
    for a, fs in enumerate(faces_at):
        if len(fs) != 3:
            v.append(Violation("vertex-degree", f"vertex {a} lies on {len(fs)} faces (must be 3)"))

    edge_faces: dict[frozenset[int], list[int]] = defaultdict(list)
    for f_idx, f in enumerate(colex.faces):
        for a, b in zip(f, f[1:] + f[:1]):
            edge_faces[frozenset((a, b))].append(f_idx)
    edge_degree = Counter()
    for e in edge_faces:
        for a in e:
            edge_degree[a] += 1
    for a in range(V):
        if edge_degree[a] != 3:
            v.append(Violation("edge-degree", f"vertex {a} has {edge_degree[a]} edges (must be 3)"))
    for e, fs in edge_faces.items():
        if len(fs) != 2:
            v.append(
                Violation(
                    "edge-faces",
                    f"edge {sorted(e)} lies on {len(fs)} faces (closed surface needs 2)",
                )
            )

    overlap = Counter()
    for fs in faces_at:
        for i in range(len(fs)):
            for j in range(i + 1, len(fs)):
                overlap[(min(fs[i], fs[j]), max(fs[i], fs[j]))] += 1
    for (f1, f2), n in overlap.items():
        if n != 2:
            v.append(
                Violation(
                    "face-overlap",
                    f"faces {f1} and {f2} share {n} vertices (must be 0 or 2)",
                )
            )

    # coloring stage
    for e, fs in edge_faces.items():
        if len(fs) == 2 and colex.face_colors[fs[0]] == colex.face_colors[fs[1]]:
            v.append(
                Violation(
                    "edge-coloring",
                    f"faces {fs[0]} and {fs[1]} share edge {sorted(e)} and color "
                    f"{colex.face_colors[fs[0]]}",
                )
            )
    for a, fs in enumerate(faces_at):
        if len(fs) == 3 and {colex.face_colors[f] for f in fs} != set(COLORS):
            v.append(
                Violation(
                    "vertex-coloring",
                    f"faces {sorted(fs)} at vertex {a} do not carry all three colors",
                )
            )

    # global counting stage
    E = len(edge_faces)
    if V % 2 != 0:
        v.append(Violation("odd-vertex-count", f"V = {V} must be even"))
    if 2 * E != 3 * V:
        v.append(Violation("edge-count", f"E = {E} but trivalence requires E = 3V/2 = {3 * V / 2}"))

    # connectivity (single closed surface)
    seen = {0}
    stack = [0]
    adj: dict[int, list[int]] = defaultdict(list)
    for e in edge_faces:
        a, b = tuple(e)
        adj[a].append(b)
        adj[b].append(a)
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    if len(seen) != V:
        v.append(Violation("disconnected", f"only {len(seen)} of {V} vertices are connected"))

    # orientability: assign a traversal direction per face so the two
    # traversals of every edge are opposite
    if all(len(fs) == 2 for fs in edge_faces.values()):
        # directed occurrence lookup: (a, b) -> faces traversing the edge as a->b
        directed: dict[tuple[int, int], set[int]] = defaultdict(set)
        for f_idx, f in enumerate(colex.faces):
            for a, b in zip(f, f[1:] + f[:1]):
                directed[(a, b)].add(f_idx)
        flip: dict[int, int] = {}
        orientable = True
        for start in range(F):
            if start in flip:
                continue
            flip[start] = 0
            queue = [start]
            while queue and orientable:
                f_idx = queue.pop()
                f = colex.faces[f_idx]
                for a, b in zip(f, f[1:] + f[:1]):
                    others = [g for g in edge_faces[frozenset((a, b))] if g != f_idx]
                    for g in others:
                        # consistent orientation wants a->b in one face, b->a in the other
                        same = g in directed[(a, b)]
                        want = flip[f_idx] ^ (1 if same else 0)
                        if g not in flip:
                            flip[g] = want
                            queue.append(g)
                        elif flip[g] != want:
                            orientable = False
                            break
                    if not orientable:
                        break
        if not orientable:
            v.append(Violation("non-orientable", "faces cannot be consistently oriented"))

    chi = V - E + F
    if chi % 2 != 0 or chi > 2:
        v.append(Violation("euler", f"Euler characteristic {chi} must be even and <= 2"))
    else:
        g = (2 - chi) // 2
        if F != (V - 4 * g) // 2 + 2 or (V - 4 * g) % 2 != 0:
            v.append(
                Violation(
                    "face-formula",
                    f"F = {F} but (V - 4g)/2 + 2 = {(V - 4 * g) / 2 + 2} at genus {g}",
                )
            )

    return ValidationReport(not v, v)


def derived_quantities(colex: Colex) -> DerivedQuantities:
    """V, E, F, Euler characteristic, genus, and encoded qubit count (= 4g)."""
    V = colex.vertex_count
    F = len(colex.faces)
    E = len(colex.edges())
    chi = V - E + F
    genus = (2 - chi) // 2
    return DerivedQuantities(
        vertices=V,
        edges=E,
        faces=F,
        chi=chi,
        genus=genus,
        encoded_qubits=4 * genus,
    )


def incidence_matrix(colex: Colex) -> BitMatrix:
    """Vertex-face incidence matrix B: B[v, f] = 1 iff vertex v lies on face f."""
    m = BitMatrix(colex.vertex_count, len(colex.faces))
    for f_idx, f in enumerate(colex.faces):
        for a in f:
            m.set(a, f_idx, 1)
    return m


def vertex_face_triples(colex: Colex) -> np.ndarray:
    """(V, 3) array: the three faces at each vertex, ascending face index."""
    triples = np.empty((colex.vertex_count, 3), dtype=np.int64)
    counts = np.zeros(colex.vertex_count, dtype=np.int64)
    for f_idx, f in enumerate(colex.faces):
        for a in f:
            triples[a, counts[a]] = f_idx
            counts[a] += 1
    if not (counts == 3).all():
        raise ValueError("colex is not trivalent; run validate() first")
    return np.sort(triples, axis=1)


def _finish_generator(colex: Colex, what: str) -> Colex:
    report = validate(colex)
    if not report.ok:
        raise InvalidDimensionsError(f"{what} is not a valid 2-colex:\n{report}")
    return colex


def generate_hexagonal(rows: int, cols: int) -> Colex:
    """Hexagonal (honeycomb) 2-colex on a torus with rows x cols unit cells.

    Each cell (i, j) holds vertices A = 2*(i*cols + j) and B = A + 1 and one
    hexagonal face; face (i, j) gets color (i - j) mod 3.  The result has
    V = 2*rows*cols, F = rows*cols, genus 1.  The constructed lattice is
    validated before being returned; dimensions whose periodic wrap breaks an
    invariant (e.g. face 3-coloring needs rows and cols divisible by 3) raise
    InvalidDimensionsError naming the violated invariant.
    """
    if rows < 1 or cols < 1:
        raise InvalidDimensionsError("rows and cols must be >= 1")

    def A(i: int, j: int) -> int:
        return 2 * ((i % rows) * cols + (j % cols))

    def B(i: int, j: int) -> int:
        return A(i, j) + 1

    faces = []
    colors = []
    for i in range(rows):
        for j in range(cols):
            faces.append(
                (A(i, j), B(i, j), A(i, j + 1), B(i - 1, j + 1), A(i - 1, j + 1), B(i - 1, j))
            )
            colors.append((i - j) % 3)
    colex = Colex(2 * rows * cols, tuple(faces), tuple(colors))
    return _finish_generator(colex, f"hexagonal {rows}x{cols} torus")


def generate_square_octagon(rows: int, cols: int) -> Colex:
    """Square-octagon (4-8) 2-colex on a torus with rows x cols unit cells.

    Each cell (i, j) holds a diamond of four vertices 4*(i*cols + j) + k with
    k = 0:top, 1:right, 2:bottom, 3:left; the diamond is one square face and
    the gap between four diamonds is an octagon.  Squares are color 0,
    octagons checkerboard between colors 1 and 2 (needs rows and cols even).
    Faces are ordered squares first (cell order), then octagons.
    """
    if rows < 1 or cols < 1:
        raise InvalidDimensionsError("rows and cols must be >= 1")

    def vx(i: int, j: int, k: int) -> int:
        return 4 * ((i % rows) * cols + (j % cols)) + k

    T, R, Bo, L = 0, 1, 2, 3
    faces = []
    colors = []
    for i in range(rows):
        for j in range(cols):
            faces.append((vx(i, j, T), vx(i, j, R), vx(i, j, Bo), vx(i, j, L)))
            colors.append(0)
    for i in range(rows):
        for j in range(cols):
            faces.append(
                (
                    vx(i, j, R),
                    vx(i, j + 1, L),
                    vx(i, j + 1, Bo),
                    vx(i + 1, j + 1, T),
                    vx(i + 1, j + 1, L),
                    vx(i + 1, j, R),
                    vx(i + 1, j, T),
                    vx(i, j, Bo),
                )
            )
            colors.append(1 + (i + j) % 2)
    colex = Colex(4 * rows * cols, tuple(faces), tuple(colors))
    return _finish_generator(colex, f"square-octagon {rows}x{cols} torus")


def loads_colex(text: str, source: str = "<string>") -> Colex:
    """Parse and validate a colex from its JSON document text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ColexFormatError(f"{source}: invalid JSON: {exc}") from exc
    colex = Colex.from_dict(data)
    report = validate(colex)
    if not report.ok:
        raise ColexValidationError(report, source)
    return colex


def load_colex(path: Union[str, Path]) -> Colex:
    """Load and validate a colex from a JSON file.

    Format: {"vertex_count": int, "faces": [[int, ...], ...],
    "face_colors": [int, ...]} with 0-based vertices in cyclic boundary
    order.  Raises ColexValidationError (with the itemized report) on
    invalid lattices and ColexFormatError on malformed documents.
    """
    path = Path(path)
    return loads_colex(path.read_text(), str(path))


def save_colex(colex: Colex, path: Union[str, Path]) -> None:
    """Write the colex JSON document; load_colex round-trips it exactly."""
    Path(path).write_text(json.dumps(colex.to_dict()) + "\n")
