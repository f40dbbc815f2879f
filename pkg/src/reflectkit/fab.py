"""Printable geometry for the inkwell reflector platform.

Three solids are produced per design: the inkwell base plate (a dielectric
plate with one square ink reservoir per candidate well), the metallization
pads that fill the ON wells, and a stencil plate with through openings at the
ON wells only.  All solids are closed 2-manifolds; STL files are binary and
expressed in millimeters.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from .core import ReflectionCoefficients, element_positions
from .errors import ValidationError

MM = 1e-3

# Common CAD dimensions of the inkwell platform (meters).
DEFAULT_ROWS = 35
DEFAULT_COLS = 35
DEFAULT_PITCH = 2.5 * MM
DEFAULT_WELL_OPENING = 2.2 * MM
DEFAULT_WELL_DEPTH = 0.4 * MM
DEFAULT_BASE_THICKNESS = 0.8 * MM
DEFAULT_APERTURE_SIDE = 90.0 * MM
DEFAULT_STENCIL_THICKNESS = 0.8 * MM
DEFAULT_STENCIL_OPENING = 2.1 * MM

STL_HEADER_TEXT = b"reflectkit inkwell geometry; units: millimeters"


@dataclass(frozen=True)
class InkwellLayout:
    """Inkwell base description: well grid, states and physical dimensions."""

    well_states: np.ndarray
    rows: int = DEFAULT_ROWS
    cols: int = DEFAULT_COLS
    pitch: float = DEFAULT_PITCH
    well_opening: float = DEFAULT_WELL_OPENING
    well_depth: float = DEFAULT_WELL_DEPTH
    base_thickness: float = DEFAULT_BASE_THICKNESS
    aperture_side: float = DEFAULT_APERTURE_SIDE

    def __post_init__(self):
        states = np.asarray(self.well_states, dtype=bool)
        if states.shape != (self.rows, self.cols):
            raise ValidationError(
                f"well_states shape {states.shape} does not match "
                f"{self.rows}x{self.cols} grid"
            )
        object.__setattr__(self, "well_states", states)
        if self.well_opening >= self.pitch:
            raise ValidationError("well opening must be smaller than the pitch")
        for count in (self.rows, self.cols):
            extent = (count - 1) * self.pitch + self.well_opening
            if extent > self.aperture_side + 1e-12:
                raise ValidationError(
                    f"{count} wells at {self.pitch * 1e3:.3g} mm pitch span "
                    f"{extent * 1e3:.3g} mm, exceeding the "
                    f"{self.aperture_side * 1e3:.3g} mm plate"
                )
        if self.well_depth >= self.base_thickness:
            raise ValidationError("well depth must be smaller than the base thickness")

    @property
    def on_count(self) -> int:
        return int(np.sum(self.well_states))

    @property
    def fill_fraction(self) -> float:
        return self.on_count / self.well_states.size

    def column_centers(self) -> np.ndarray:
        """Well-center x coordinates, decreasing with column index (meters)."""
        return element_positions(self.cols, self.pitch)

    def row_centers(self) -> np.ndarray:
        return element_positions(self.rows, self.pitch)


@dataclass(frozen=True)
class StencilLayout:
    """Stencil plate: through openings at exactly the ON wells."""

    openings_at: tuple[tuple[int, int], ...]
    thickness: float = DEFAULT_STENCIL_THICKNESS
    opening: float = DEFAULT_STENCIL_OPENING


def stripe_mask_2d(mask: ReflectionCoefficients, rows: int) -> np.ndarray:
    """Replicate a 1-D binary mask across rows; column m carries bit m."""
    if mask.kind != "binary":
        raise ValidationError("striping requires a binary mask")
    if rows < 1:
        raise ValidationError("rows must be >= 1")
    bits = np.array([v.real >= 0.5 for v in mask.values], dtype=bool)
    return np.tile(bits, (rows, 1))


def build_layout(grid_2d: np.ndarray, **overrides) -> InkwellLayout:
    """Layout with Table-default dimensions unless overridden."""
    grid = np.asarray(grid_2d, dtype=bool)
    if grid.ndim != 2:
        raise ValidationError("well grid must be 2-D")
    rows, cols = grid.shape
    return InkwellLayout(grid, rows=rows, cols=cols, **overrides)


def stencil_from_layout(layout: InkwellLayout, **overrides) -> StencilLayout:
    openings = tuple(
        (int(r), int(c)) for r, c in np.argwhere(layout.well_states)
    )
    stencil = StencilLayout(openings, **overrides)
    if stencil.opening >= layout.well_opening:
        raise ValidationError("stencil opening must be smaller than the well opening")
    return stencil


# ---------------------------------------------------------------------------
# Mesh construction
# ---------------------------------------------------------------------------


@dataclass
class Mesh:
    """Triangle soup in millimeters; triangles are (n, 3 vertices, xyz)."""

    name: str
    triangles: np.ndarray = field(
        default_factory=lambda: np.zeros((0, 3, 3), dtype=float)
    )

    def add_quad(self, p0, p1, p2, p3) -> None:
        """Two triangles covering the quad p0-p1-p2-p3 (given CCW from outside)."""
        tris = np.array([[p0, p1, p2], [p0, p2, p3]], dtype=float)
        self.triangles = np.concatenate([self.triangles, tris])

    def __len__(self) -> int:
        return self.triangles.shape[0]


def _dedup(values: Iterable[float]) -> np.ndarray:
    vals = np.sort(np.asarray(list(values), dtype=float))
    keep = [vals[0]]
    for v in vals[1:]:
        if v - keep[-1] > 1e-9:
            keep.append(v)
    return np.asarray(keep)


def _perforated_plate(
    mesh: Mesh,
    x_min: float,
    x_max: float,
    y_min: float,
    y_max: float,
    z0: float,
    z1: float,
    holes: list[tuple[float, float, float]],
    pocket_depth: float | None,
) -> None:
    """Add a rectangular plate with square holes to ``mesh`` (units mm).

    Each hole is (cx, cy, half_side).  pocket_depth=None makes through holes;
    otherwise each hole is a pocket of that depth, open at the top (z1).
    Holes must not overlap or touch the plate boundary.
    """
    xs = _dedup([x_min, x_max] + [c for cx, _, hs in holes for c in (cx - hs, cx + hs)])
    ys = _dedup([y_min, y_max] + [c for _, cy, hs in holes for c in (cy - hs, cy + hs)])

    hole_cell: dict[tuple[int, int], tuple[float, float, float]] = {}
    for cx, cy, hs in holes:
        # non-overlapping holes occupy exactly one grid cell each
        i = int(np.searchsorted(xs, cx) - 1)
        j = int(np.searchsorted(ys, cy) - 1)
        hole_cell[(i, j)] = (cx, cy, hs)

    nx, ny = xs.size - 1, ys.size - 1
    zf = z1 - pocket_depth if pocket_depth is not None else None

    for i in range(nx):
        for j in range(ny):
            xa, xb = xs[i], xs[i + 1]
            ya, yb = ys[j], ys[j + 1]
            if (i, j) in hole_cell:
                # top face is open; walls descend to the pocket floor or
                # straight through the plate.
                z_lo = zf if zf is not None else z0
                # wall normals point into the hole (outward from the solid)
                mesh.add_quad((xa, ya, z_lo), (xa, yb, z_lo), (xa, yb, z1), (xa, ya, z1))
                mesh.add_quad((xb, yb, z1), (xb, yb, z_lo), (xb, ya, z_lo), (xb, ya, z1))
                mesh.add_quad((xb, ya, z1), (xb, ya, z_lo), (xa, ya, z_lo), (xa, ya, z1))
                mesh.add_quad((xa, yb, z_lo), (xb, yb, z_lo), (xb, yb, z1), (xa, yb, z1))
                if zf is not None:
                    # pocket floor (faces up) and plate bottom underneath
                    mesh.add_quad((xa, ya, zf), (xb, ya, zf), (xb, yb, zf), (xa, yb, zf))
                    mesh.add_quad((xa, ya, z0), (xa, yb, z0), (xb, yb, z0), (xb, ya, z0))
            else:
                mesh.add_quad((xa, ya, z1), (xb, ya, z1), (xb, yb, z1), (xa, yb, z1))
                mesh.add_quad((xa, ya, z0), (xa, yb, z0), (xb, yb, z0), (xb, ya, z0))

    # outer side walls, segmented to match the boundary cells
    for i in range(nx):
        xa, xb = xs[i], xs[i + 1]
        mesh.add_quad((xa, y_min, z0), (xb, y_min, z0), (xb, y_min, z1), (xa, y_min, z1))
        mesh.add_quad((xa, y_max, z0), (xa, y_max, z1), (xb, y_max, z1), (xb, y_max, z0))
    for j in range(ny):
        ya, yb = ys[j], ys[j + 1]
        mesh.add_quad((x_min, ya, z0), (x_min, ya, z1), (x_min, yb, z1), (x_min, yb, z0))
        mesh.add_quad((x_max, ya, z0), (x_max, yb, z0), (x_max, yb, z1), (x_max, ya, z1))


def _cuboid(mesh: Mesh, x0, x1, y0, y1, z0, z1) -> None:
    mesh.add_quad((x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1))
    mesh.add_quad((x0, y0, z0), (x0, y1, z0), (x1, y1, z0), (x1, y0, z0))
    mesh.add_quad((x0, y0, z0), (x1, y0, z0), (x1, y0, z1), (x0, y0, z1))
    mesh.add_quad((x0, y1, z0), (x0, y1, z1), (x1, y1, z1), (x1, y1, z0))
    mesh.add_quad((x0, y0, z0), (x0, y0, z1), (x0, y1, z1), (x0, y1, z0))
    mesh.add_quad((x1, y0, z0), (x1, y1, z0), (x1, y1, z1), (x1, y0, z1))


def _well_holes(layout: InkwellLayout, half_side: float) -> list[tuple[float, float, float]]:
    xc = layout.column_centers() / MM
    yc = layout.row_centers() / MM
    return [(float(xc[c]), float(yc[r]), half_side) for r in range(layout.rows) for c in range(layout.cols)]


def base_mesh(layout: InkwellLayout) -> Mesh:
    """Inkwell base plate: every candidate well is a pocket, ON or not."""
    mesh = Mesh("inkwell_base")
    half = layout.aperture_side / 2 / MM
    _perforated_plate(
        mesh,
        -half, half, -half, half,
        0.0, layout.base_thickness / MM,
        _well_holes(layout, layout.well_opening / 2 / MM),
        pocket_depth=layout.well_depth / MM,
    )
    return mesh


def pads_mesh(layout: InkwellLayout) -> Mesh:
    """One metallization cuboid per ON well, filling the well reservoir."""
    mesh = Mesh("metallization_pads")
    xc = layout.column_centers() / MM
    yc = layout.row_centers() / MM
    hs = layout.well_opening / 2 / MM
    z1 = layout.base_thickness / MM
    z0 = z1 - layout.well_depth / MM
    for r, c in np.argwhere(layout.well_states):
        _cuboid(mesh, xc[c] - hs, xc[c] + hs, yc[r] - hs, yc[r] + hs, z0, z1)
    return mesh


def stencil_mesh(stencil: StencilLayout, layout: InkwellLayout) -> Mesh:
    """Stencil plate with through openings at the ON wells."""
    mesh = Mesh("stencil")
    half = layout.aperture_side / 2 / MM
    xc = layout.column_centers() / MM
    yc = layout.row_centers() / MM
    hs = stencil.opening / 2 / MM
    holes = [(float(xc[c]), float(yc[r]), hs) for r, c in stencil.openings_at]
    _perforated_plate(
        mesh, -half, half, -half, half, 0.0, stencil.thickness / MM, holes, None
    )
    return mesh


# ---------------------------------------------------------------------------
# Binary STL emission
# ---------------------------------------------------------------------------


def _facet_normal(tri: np.ndarray) -> np.ndarray:
    n = np.cross(tri[1] - tri[0], tri[2] - tri[0])
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise ValidationError("degenerate (zero-area) triangle in mesh")
    return n / norm


def emit_stl(mesh: Mesh, path_or_file: str | IO[bytes]) -> int:
    """Write a mesh as binary STL; returns the triangle count written."""
    if isinstance(path_or_file, str):
        with open(path_or_file, "wb") as fh:
            return emit_stl(mesh, fh)
    fh = path_or_file
    header = STL_HEADER_TEXT[:80].ljust(80, b"\0")
    fh.write(header)
    fh.write(struct.pack("<I", len(mesh)))
    for tri in mesh.triangles:
        n = _facet_normal(tri)
        fh.write(struct.pack("<3f", *n))
        for v in tri:
            fh.write(struct.pack("<3f", *v))
        fh.write(struct.pack("<H", 0))
    return len(mesh)


def layout_report(layout: InkwellLayout) -> str:
    """Human-readable summary: ON count, fill fraction, column strides, span."""
    on_cols = [
        c for c in range(layout.cols) if np.any(layout.well_states[:, c])
    ]
    strides = [b - a for a, b in zip(on_cols, on_cols[1:])]
    span_mm = (
        (on_cols[-1] - on_cols[0]) * layout.pitch / MM if len(on_cols) > 1 else 0.0
    )
    lines = [
        "inkwell layout report",
        f"  grid:            {layout.rows} x {layout.cols} wells",
        f"  pitch:           {layout.pitch / MM:.3g} mm",
        f"  plate:           {layout.aperture_side / MM:.3g} x "
        f"{layout.aperture_side / MM:.3g} mm",
        f"  ON wells:        {layout.on_count}",
        f"  fill fraction:   {layout.fill_fraction:.4f}",
        f"  ON columns:      {len(on_cols)}",
        f"  column strides:  {strides if strides else '-'}",
        f"  ON column span:  {span_mm:.3g} mm",
        "  note: rear copper-foil ground plane is applied after printing and",
        "        is not part of the emitted geometry.",
    ]
    return "\n".join(lines) + "\n"
