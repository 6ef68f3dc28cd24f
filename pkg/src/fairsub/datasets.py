"""Dataset ingestion and synthetic instance generators.

File formats (all UTF-8, lines starting with '#' skipped, blank lines
ignored):

  edge list  one "u v" pair per whitespace-separated line, 0-based vertex
             ids, undirected, duplicate edges deduplicated; self-loops are
             kept (a self-loop makes a vertex cover itself).
  labels     lines "id color-name"; color names are mapped to dense color
             ids in order of first appearance. Every id 0..n-1 must appear
             exactly once.
  tags       lines "id tag1,tag2,...".

The generators are deterministic for a fixed seed and stand in for the
datasets used in coverage benchmarks: a skewed-color random graph (one
dominant color, rest uniform) and a tagged collection whose colors follow a
coin-flip majority rule.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DatasetError
from .model import PartitionedUniverse
from .oracles import CoverageOracle, TagCoverOracle
from .rng import make_rng


def _data_lines(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def load_edge_list(path) -> list[tuple[int, int]]:
    edges = set()
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise DatasetError(f"{path}:{lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise DatasetError(f"{path}:{lineno}: non-integer vertex id") from exc
        if u < 0 or v < 0:
            raise DatasetError(f"{path}:{lineno}: negative vertex id")
        edges.add((min(u, v), max(u, v)))
    return sorted(edges)


def load_labels(path) -> tuple[list[int], list[str]]:
    """Returns (color_of, color_names) with dense color ids in first-seen order."""
    assignments: dict[int, int] = {}
    names: list[str] = []
    index: dict[str, int] = {}
    for lineno, line in _data_lines(path):
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise DatasetError(f"{path}:{lineno}: expected 'id color-name'")
        try:
            e = int(parts[0])
        except ValueError as exc:
            raise DatasetError(f"{path}:{lineno}: non-integer element id") from exc
        name = parts[1].strip()
        if e in assignments:
            raise DatasetError(f"{path}:{lineno}: duplicate label for element {e}")
        if name not in index:
            index[name] = len(names)
            names.append(name)
        assignments[e] = index[name]
    n = len(assignments)
    color_of = [-1] * n
    for e, c in assignments.items():
        if not 0 <= e < n:
            raise DatasetError(f"label ids must cover 0..{n - 1}; saw {e}")
        color_of[e] = c
    return color_of, names


def load_tags(path) -> list[list[str]]:
    rows: dict[int, list[str]] = {}
    for lineno, line in _data_lines(path):
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise DatasetError(f"{path}:{lineno}: expected 'id tag1,tag2,...'")
        try:
            e = int(parts[0])
        except ValueError as exc:
            raise DatasetError(f"{path}:{lineno}: non-integer element id") from exc
        if e in rows:
            raise DatasetError(f"{path}:{lineno}: duplicate tags for element {e}")
        rows[e] = [t for t in (s.strip() for s in parts[1].split(",")) if t]
    n = len(rows)
    out: list[list[str]] = [None] * n  # type: ignore[list-item]
    for e, ts in rows.items():
        if not 0 <= e < n:
            raise DatasetError(f"tag ids must cover 0..{n - 1}; saw {e}")
        out[e] = ts
    return out


def load_coverage_instance(graph_path, labels_path):
    color_of, names = load_labels(labels_path)
    universe = PartitionedUniverse(color_of)
    edges = load_edge_list(graph_path)
    for u, v in edges:
        if u >= universe.n or v >= universe.n:
            raise DatasetError(f"edge ({u}, {v}) references vertex outside labels")
    return universe, CoverageOracle(universe.n, edges), names


def load_tag_instance(tags_path, labels_path):
    color_of, names = load_labels(labels_path)
    universe = PartitionedUniverse(color_of)
    tags = load_tags(tags_path)
    if len(tags) != universe.n:
        raise DatasetError("tags and labels disagree on element count")
    return universe, TagCoverOracle(tags), names


def write_edge_list(path, edges):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# u v\n")
        for u, v in edges:
            fh.write(f"{u} {v}\n")


def write_labels(path, color_of, names=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# id color-name\n")
        for e, c in enumerate(color_of):
            name = names[c] if names else f"color{c}"
            fh.write(f"{e} {name}\n")


def write_tags(path, tags):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# id tag1,tag2,...\n")
        for e, ts in enumerate(tags):
            fh.write(f"{e} {','.join(str(t) for t in ts)}\n")


def quota_colors(n: int, num_colors: int, skew: float) -> list[int]:
    """Deterministic color assignment: the majority color takes round(skew*n)
    elements as the leading id block, the rest is split as evenly as possible
    over the remaining colors."""
    if num_colors == 1:
        return [0] * n
    majority = int(round(skew * n))
    rest = n - majority
    if majority < 1 or rest < num_colors - 1:
        raise ValueError(
            f"cannot give color 0 a {skew} share of {n} elements and keep "
            f"{num_colors - 1} other colors nonempty"
        )
    base, extra = divmod(rest, num_colors - 1)
    colors = [0] * majority
    for c in range(1, num_colors):
        colors.extend([c] * (base + (1 if c - 1 < extra else 0)))
    return colors


def generate_skewed_instance(n: int, num_colors: int, skew: float, degree: float,
                             seed: int):
    """Random graph with a color-skewed vertex partition.

    Edges follow an Erdos-Renyi model with expected degree `degree`; colors
    are assigned by deterministic quota (majority share = skew). Identical
    arguments and seed reproduce the identical edge list.
    """
    if not (n >= num_colors >= 1):
        raise ValueError("need n >= num_colors >= 1")
    if not 0 < skew <= 1:
        raise ValueError("skew must be in (0, 1]")
    if degree < 0 or degree >= n:
        raise ValueError("expected degree must be in [0, n)")
    rng = make_rng(seed, 0)
    universe = PartitionedUniverse(quota_colors(n, num_colors, skew), num_colors)
    total_pairs = n * (n - 1) // 2
    p = degree / (n - 1) if n > 1 else 0.0
    m = int(rng.binomial(total_pairs, p)) if total_pairs else 0
    edges: set[tuple[int, int]] = set()
    while len(edges) < m:
        need = m - len(edges)
        us = rng.integers(0, n, size=2 * need + 8)
        vs = rng.integers(0, n, size=2 * need + 8)
        for u, v in zip(us, vs):
            if u == v:
                continue
            edges.add((min(int(u), int(v)), max(int(u), int(v))))
            if len(edges) == m:
                break
    return universe, CoverageOracle(n, sorted(edges))


def generate_tagged_instance(n: int, seed: int, num_colors: int = 6,
                             vocabulary_size: int = 374,
                             tags_per_item: float = 4.0,
                             majority_prob: float = 0.5):
    """Tagged collection with a coin-flip color rule.

    Each item gets, with probability majority_prob, the majority color;
    otherwise one of the remaining colors uniformly. Tags are sampled without
    replacement from a vocabulary of `vocabulary_size` generic tag names (the
    vocabulary size is a parameter, not a fixed constant).
    """
    if n < 1 or num_colors < 2:
        raise ValueError("need n >= 1 and num_colors >= 2")
    if vocabulary_size < 1:
        raise ValueError("vocabulary_size must be >= 1")
    rng = make_rng(seed, 1)
    majority = 1 if num_colors > 1 else 0
    others = [c for c in range(num_colors) if c != majority]
    color_of = []
    for _ in range(n):
        if rng.random() < majority_prob:
            color_of.append(majority)
        else:
            color_of.append(others[int(rng.integers(0, len(others)))])
    # every color must be populated for the partition to be meaningful
    for c in range(num_colors):
        if c not in color_of:
            color_of[int(rng.integers(0, n))] = c
    vocab = [f"t{i}" for i in range(vocabulary_size)]
    tags = []
    for _ in range(n):
        k = max(1, min(vocabulary_size, int(rng.poisson(tags_per_item))))
        chosen = rng.choice(vocabulary_size, size=k, replace=False)
        tags.append([vocab[i] for i in sorted(int(i) for i in chosen)])
    universe = PartitionedUniverse(color_of, num_colors)
    return universe, TagCoverOracle(tags, vocabulary=vocab)
