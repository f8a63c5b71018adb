"""Two-dimensional principal-component landscape over game feature vectors."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from gamescape.features import FEATURE_NAMES, GraphFeatureVector


def _real(value) -> str:
    return repr(float(value))


@dataclass(frozen=True, eq=False)
class Landscape:
    names: tuple[str, ...]
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    coords: np.ndarray
    standardize: bool = True
    metadata: dict = field(default_factory=dict)

    def project(self, features) -> np.ndarray:
        return project(self, features)

    def coordinate(self, name: str) -> np.ndarray:
        return self.coords[self.names.index(name)]

    def loadings_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["row", *FEATURE_NAMES])
        writer.writerow(["mean", *map(_real, self.feature_mean)])
        writer.writerow(["scale", *map(_real, self.feature_scale)])
        for i, comp in enumerate(self.components):
            writer.writerow([f"pc{i + 1}", *map(_real, comp)])
        writer.writerow(["explained_variance", *map(_real, self.explained_variance),
                         *([""] * (len(FEATURE_NAMES) - len(self.explained_variance)))])
        return buffer.getvalue()

    def coords_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["name", "pc1", "pc2"])
        for name, (x, y) in zip(self.names, self.coords):
            writer.writerow([name, _real(x), _real(y)])
        return buffer.getvalue()


def _as_matrix(features) -> tuple[tuple[str, ...], np.ndarray]:
    names, rows = [], []
    for i, item in enumerate(features):
        if isinstance(item, GraphFeatureVector):
            names.append(item.name)
            rows.append(item.values)
        else:
            names.append(f"game{i}")
            rows.append(np.asarray(item, dtype=float))
    return tuple(names), np.array(rows, dtype=float).reshape(len(rows), -1)


def fit_landscape(features: Sequence, standardize: bool = True,
                  num_components: int = 2) -> Landscape:
    """Standardizes features, then keeps the top principal components.

    Statistics are computed on the rows in a canonical (sorted) order so the
    fit does not depend on input order at all.
    """
    names, x = _as_matrix(features)
    if x.shape[0] < 3:
        raise ValueError(f"a landscape needs at least 3 games, got {x.shape[0]}")
    canonical = x[np.lexsort(x.T[::-1])]
    mean = canonical.mean(axis=0)
    if standardize:
        scale = canonical.std(axis=0)
        scale = np.where(scale > 1e-12 * np.maximum(1.0, np.abs(mean)), scale, 1.0)
    else:
        scale = np.ones(x.shape[1])
    z = (canonical - mean) / scale
    cov = z.T @ z / z.shape[0]
    values, vectors = np.linalg.eigh(cov)
    order = np.argsort(values)[::-1][:num_components]
    explained = np.clip(values[order], 0.0, None)
    components = vectors[:, order].T.copy()
    for comp in components:
        pivot = int(np.argmax(np.abs(comp)))
        if comp[pivot] < 0:
            comp *= -1.0
    coords = ((x - mean) / scale) @ components.T
    return Landscape(names=names, feature_mean=mean, feature_scale=scale,
                     components=components, explained_variance=explained, coords=coords,
                     standardize=standardize,
                     metadata={"standardize": standardize, "covariance": "population"})


def project(landscape: Landscape, features) -> np.ndarray:
    """Maps one feature vector (or a stack of them) into landscape coordinates."""
    if isinstance(features, GraphFeatureVector):
        features = features.values
    x = np.asarray(features, dtype=float)
    return ((x - landscape.feature_mean) / landscape.feature_scale) @ landscape.components.T


def pairwise_distances(landscape_or_coords) -> np.ndarray:
    coords = getattr(landscape_or_coords, "coords", landscape_or_coords)
    coords = np.asarray(coords, dtype=float)
    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=2))
    np.fill_diagonal(dist, 0.0)
    return dist


def read_landscape(loadings_text: str, coords_text: str | None = None) -> Landscape:
    """Rebuilds a landscape from :meth:`Landscape.loadings_csv` (and optionally
    :meth:`Landscape.coords_csv`) output."""
    rows = list(csv.reader(io.StringIO(loadings_text)))
    if not rows or rows[0][:1] != ["row"]:
        raise ValueError("loadings CSV must start with a 'row' header")
    table = {row[0]: row[1:] for row in rows[1:] if row}
    try:
        mean = np.array(table["mean"], dtype=float)
        scale = np.array(table["scale"], dtype=float)
        comps = [np.array(table[key], dtype=float)
                 for key in sorted(k for k in table if k.startswith("pc"))]
        explained = np.array([v for v in table["explained_variance"] if v != ""], dtype=float)
    except KeyError as exc:
        raise ValueError(f"loadings CSV lacks the {exc.args[0]!r} row") from None
    names: tuple[str, ...] = ()
    coords = np.zeros((0, len(comps)))
    if coords_text is not None:
        coord_rows = [row for row in csv.reader(io.StringIO(coords_text)) if row][1:]
        names = tuple(row[0] for row in coord_rows)
        coords = np.array([[float(v) for v in row[1:]] for row in coord_rows]).reshape(
            len(coord_rows), len(comps))
    return Landscape(names=names, feature_mean=mean, feature_scale=scale,
                     components=np.array(comps), explained_variance=explained,
                     coords=coords, standardize=bool(np.any(scale != 1.0)))


def scatter_svg(names: Sequence[str], coords, width: int = 640, height: int = 480,
                highlight: Sequence[int] = ()) -> str:
    """Minimal self-contained SVG scatter plot of landscape coordinates."""
    coords = np.asarray(coords, dtype=float)
    pad = 40
    lo = coords.min(axis=0)
    span = np.maximum(coords.max(axis=0) - lo, 1e-12)

    def px(point):
        x = pad + (point[0] - lo[0]) / span[0] * (width - 2 * pad)
        y = height - pad - (point[1] - lo[1]) / span[1] * (height - 2 * pad)
        return x, y

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             '<rect width="100%" height="100%" fill="white"/>',
             f'<text x="{width / 2}" y="{height - 8}" font-size="12" text-anchor="middle">PC1</text>',
             f'<text x="12" y="{height / 2}" font-size="12" transform="rotate(-90 12 {height / 2})" '
             'text-anchor="middle">PC2</text>']
    marked = set(highlight)
    for i, (name, point) in enumerate(zip(names, coords)):
        x, y = px(point)
        colour = "#d62728" if i in marked else "#1f77b4"
        label = (str(name).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="4" fill="{colour}"/>')
        parts.append(f'<text x="{x + 5:.2f}" y="{y - 5:.2f}" font-size="9">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
