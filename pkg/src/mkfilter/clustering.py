"""Hierarchical image-context clustering.

An image is split top-down into a tree of intensity-coherent, spatially
connected clusters. Each round applies two stages:

1. similarity clustering: a two-component 1D Gaussian mixture is fitted
   (EM over the intensity histogram) and every pixel is hard-assigned to
   the more probable component;
2. proximity clustering: spatially disconnected groups of same-labelled
   pixels are separated into their own clusters.

Clusters that are already small enough, or whose intensities cannot be
split, are carried down unchanged, so every level's label map partitions
the image and level t refines level t-1. The finished tree doubles as the
per-pixel "context": a leaf's own deviation plus those of its ancestors
drive the range kernels in :mod:`mkfilter.filters`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .raster import Raster

__all__ = [
    "GaussComponent",
    "GaussPair",
    "Histogram",
    "ClusterConfig",
    "ClusterNode",
    "ClusterTree",
    "EmResult",
    "build_histogram",
    "initial_gauss_pair",
    "em_similarity_cluster",
    "proximity_cluster",
    "build_cluster_tree",
    "context_of",
    "write_tree_dump",
]

EM_MAX_ITERATIONS = 500

_OFFSETS_4 = ((0, 1), (0, -1), (1, 0), (-1, 0))
_OFFSETS_8 = _OFFSETS_4 + ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class GaussComponent:
    mu: float
    sigma: float
    weight: float


@dataclass(frozen=True)
class GaussPair:
    """Parameters of a two-component 1D Gaussian mixture."""

    theta1: GaussComponent
    theta2: GaussComponent


@dataclass(frozen=True)
class Histogram:
    """Weighted intensity bins; centers carry the mass of their members."""

    centers: np.ndarray
    counts: np.ndarray
    base: float
    bin_width: float


@dataclass(frozen=True)
class ClusterConfig:
    """Knobs for tree construction.

    max_depth        deepest clustering round (level 0 is the whole image)
    max_cluster      clusters larger than this keep splitting
    min_cluster      clusters at or below this defer statistics to an ancestor
    neighborhood     4- or 8-connectivity for the proximity stage
    bin_width        intensity histogram precision; doubles as the sigma floor
    em_tol           EM stops when no parameter moves more than this
    """

    max_depth: int = 2
    max_cluster: int = 20
    min_cluster: int = 9
    neighborhood: int = 8
    bin_width: float = 1.0
    em_tol: float = 1e-4

    def validate(self) -> None:
        if self.max_depth < 2:
            raise ConfigError(f"max_depth must be >= 2, got {self.max_depth}")
        if self.min_cluster < 1:
            raise ConfigError(f"min_cluster must be >= 1, got {self.min_cluster}")
        if self.max_cluster <= self.min_cluster:
            raise ConfigError(
                f"max_cluster ({self.max_cluster}) must exceed "
                f"min_cluster ({self.min_cluster})"
            )
        if self.neighborhood not in (4, 8):
            raise ConfigError(f"neighborhood must be 4 or 8, got {self.neighborhood}")
        if self.bin_width <= 0:
            raise ConfigError(f"bin_width must be positive, got {self.bin_width}")
        if self.em_tol <= 0:
            raise ConfigError(f"em_tol must be positive, got {self.em_tol}")


@dataclass
class ClusterNode:
    id: int
    level: int
    mu: float
    delta: float
    size: int
    parent: int | None
    children: list[int] = field(default_factory=list)
    eligible: bool = True


@dataclass
class ClusterTree:
    """Cluster hierarchy plus one label map per level.

    ``levels[t]`` assigns every pixel the id of its level-t cluster, so
    each map partitions the image. ``sigma_floor`` is the lower bound
    applied to deviations whenever they feed a kernel (a zero sample
    deviation would otherwise collapse the range kernel).
    """

    nodes: dict[int, ClusterNode]
    levels: list[np.ndarray]
    depth: int
    sigma_floor: float

    def node(self, node_id: int) -> ClusterNode:
        return self.nodes[node_id]

    def leaves(self) -> list[ClusterNode]:
        return [n for n in self.nodes.values() if not n.children]


@dataclass(frozen=True)
class EmResult:
    pair: GaussPair
    labels: np.ndarray  # per-bin hard labels, 0 -> theta1, 1 -> theta2
    degenerate: bool
    log_likelihood: np.ndarray  # one entry per EM iteration


# ---------------------------------------------------------------------------
# similarity clustering


def build_histogram(pixels, bin_width: float) -> Histogram:
    """Bin intensities into width-`bin_width` bins anchored at
    floor(min/bin_width)*bin_width; weights are member counts."""
    values = np.asarray(pixels, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("histogram needs at least one pixel")
    base = math.floor(values.min() / bin_width) * bin_width
    idx = np.floor((values - base) / bin_width).astype(np.int64)
    occupied, counts = np.unique(idx, return_counts=True)
    centers = base + (occupied + 0.5) * bin_width
    return Histogram(centers=centers, counts=counts.astype(np.float64),
                     base=base, bin_width=bin_width)


def initial_gauss_pair(i_max: float, sigma_floor: float) -> GaussPair:
    """EM starting point: means at one and two thirds of the maximal
    intensity, deviations at the maximal intensity, equal weights."""
    sigma = max(abs(i_max), sigma_floor)
    return GaussPair(
        GaussComponent(mu=i_max / 3.0, sigma=sigma, weight=0.5),
        GaussComponent(mu=2.0 * i_max / 3.0, sigma=sigma, weight=0.5),
    )


def em_similarity_cluster(
    hist: Histogram,
    init: GaussPair,
    tol: float,
    sigma_floor: float | None = None,
    max_iterations: int = EM_MAX_ITERATIONS,
) -> EmResult:
    """Fit a two-component mixture to the histogram and hard-label each bin.

    The M-step clamps each deviation at ``sigma_floor`` (default: the bin
    width); because the clamp is the constrained maximizer of the expected
    complete-data log-likelihood, the recorded log-likelihood sequence is
    non-decreasing. Ties in the posterior go to the first component. A
    single-bin histogram cannot be split and yields a degenerate result
    with all mass on the first component.
    """
    if sigma_floor is None:
        sigma_floor = hist.bin_width
    x = hist.centers
    n = hist.counts
    if x.size == 1:
        pair = GaussPair(
            GaussComponent(init.theta1.mu, max(init.theta1.sigma, sigma_floor), 1.0),
            GaussComponent(init.theta2.mu, max(init.theta2.sigma, sigma_floor), 0.0),
        )
        return EmResult(pair, np.zeros(1, dtype=np.int64), True, np.empty(0))

    total = n.sum()
    mu = np.array([init.theta1.mu, init.theta2.mu], dtype=np.float64)
    sigma = np.maximum(
        [init.theta1.sigma, init.theta2.sigma], sigma_floor).astype(np.float64)
    w = np.array([init.theta1.weight, init.theta2.weight], dtype=np.float64)

    trace = []
    resp = np.full((2, x.size), 0.5)
    for _ in range(max_iterations):
        # E step in log space; mixture weights of 0 stay at -inf cleanly
        with np.errstate(divide="ignore"):
            log_p = (
                np.log(w)[:, None]
                - np.log(sigma)[:, None]
                - 0.5 * math.log(2.0 * math.pi)
                - 0.5 * ((x[None, :] - mu[:, None]) / sigma[:, None]) ** 2
            )
        top = log_p.max(axis=0)
        log_norm = top + np.log(np.exp(log_p - top).sum(axis=0))
        resp = np.exp(log_p - log_norm)
        trace.append(float((n * log_norm).sum()))

        mass = (n * resp).sum(axis=1)
        if mass.min() <= 0.0:
            break  # a component lost all support; keep current parameters
        w_new = mass / total
        mu_new = (n * resp * x).sum(axis=1) / mass
        var = (n * resp * (x[None, :] - mu_new[:, None]) ** 2).sum(axis=1) / mass
        sigma_new = np.maximum(np.sqrt(var), sigma_floor)

        shift = max(
            np.abs(mu_new - mu).max(),
            np.abs(sigma_new - sigma).max(),
            np.abs(w_new - w).max(),
        )
        mu, sigma, w = mu_new, sigma_new, w_new
        if shift < tol:
            break

    labels = np.where(resp[0] >= resp[1], 0, 1).astype(np.int64)
    pair = GaussPair(
        GaussComponent(float(mu[0]), float(sigma[0]), float(w[0])),
        GaussComponent(float(mu[1]), float(sigma[1]), float(w[1])),
    )
    return EmResult(pair, labels, False, np.asarray(trace))


# ---------------------------------------------------------------------------
# proximity clustering


def _flood_regions(keys: np.ndarray, neighborhood: int) -> np.ndarray:
    """Label maximal connected regions of equal `keys` values.

    Fresh labels are issued in row-major scan order of each region's first
    pixel, which keeps the result deterministic. Works on flat Python
    lists internally; per-pixel numpy indexing would dominate the run time.
    """
    height, width = keys.shape
    size = height * width
    flat = keys.ravel().tolist()
    out = [-1] * size
    # neighbor steps as (column shift, flat-index shift); the column shift
    # rejects row wrap-arounds
    steps = [(0, -width), (0, width), (-1, -1), (1, 1)]
    if neighborhood == 8:
        steps += [(-1, -width - 1), (1, -width + 1),
                  (-1, width - 1), (1, width + 1)]
    next_label = 0
    for start in range(size):
        if out[start] >= 0:
            continue
        key = flat[start]
        out[start] = next_label
        stack = [start]
        while stack:
            i = stack.pop()
            x = i % width
            for dx, di in steps:
                nx = x + dx
                if nx < 0 or nx >= width:
                    continue
                j = i + di
                if 0 <= j < size and out[j] < 0 and flat[j] == key:
                    out[j] = next_label
                    stack.append(j)
        next_label += 1
    return np.asarray(out, dtype=np.int64).reshape(height, width)


def proximity_cluster(labels: np.ndarray, neighborhood: int) -> np.ndarray:
    """Give each maximal connected region of same-labelled pixels its own
    fresh label. The output refines the input partition, never merges."""
    if neighborhood not in (4, 8):
        raise ConfigError(f"neighborhood must be 4 or 8, got {neighborhood}")
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise ConfigError(f"label map must be 2D, got shape {labels.shape}")
    return _flood_regions(labels, neighborhood)


# ---------------------------------------------------------------------------
# tree construction


def build_cluster_tree(image: Raster, cfg: ClusterConfig) -> ClusterTree:
    """Grow the full context tree for one image.

    Level 0 is a single root cluster. At each subsequent level every
    cluster larger than ``cfg.max_cluster`` is split by EM + connectivity;
    everything else is carried down as a single child, so all leaves end
    at level ``cfg.max_depth`` and every level map partitions the image.
    Node statistics are the sample mean/deviation of the node's own pixels.
    """
    cfg.validate()
    values = image.data
    height, width = values.shape
    flat = values.ravel()

    nodes: dict[int, ClusterNode] = {}
    next_id = 0

    def new_node(level: int, member_idx: np.ndarray, parent: int | None) -> int:
        nonlocal next_id
        pix = flat[member_idx]
        node = ClusterNode(
            id=next_id,
            level=level,
            mu=float(pix.mean()),
            delta=float(pix.std()),
            size=int(member_idx.size),
            parent=parent,
            eligible=member_idx.size > cfg.min_cluster,
        )
        nodes[node.id] = node
        if parent is not None:
            nodes[parent].children.append(node.id)
        next_id += 1
        return node.id

    all_idx = np.arange(flat.size)
    root = new_node(0, all_idx, None)
    levels = [np.full((height, width), root, dtype=np.int64)]
    members: dict[int, np.ndarray] = {root: all_idx}

    for level in range(1, cfg.max_depth + 1):
        # side: 0/1 EM component of each pixel within its cluster (0 when
        # the cluster is carried down whole); clusters never mix, so the
        # (cluster, side) pair keys the connectivity pass
        side = np.zeros(flat.size, dtype=np.int64)
        for node_id in sorted(members):
            idx = members[node_id]
            if idx.size <= cfg.max_cluster:
                continue
            pix = flat[idx]
            base = math.floor(pix.min() / cfg.bin_width) * cfg.bin_width
            bins = np.floor((pix - base) / cfg.bin_width).astype(np.int64)
            occupied, inverse, counts = np.unique(
                bins, return_inverse=True, return_counts=True)
            hist = Histogram(
                centers=base + (occupied + 0.5) * cfg.bin_width,
                counts=counts.astype(np.float64),
                base=base, bin_width=cfg.bin_width)
            init = initial_gauss_pair(float(pix.max()), cfg.bin_width)
            result = em_similarity_cluster(hist, init, cfg.em_tol,
                                           sigma_floor=cfg.bin_width)
            if result.degenerate:
                continue
            pixel_side = result.labels[inverse]
            if pixel_side.min() == pixel_side.max():
                continue  # every pixel landed on one component: unsplittable
            side[idx] = pixel_side

        keys = levels[-1] * 2 + side.reshape(height, width)
        regions = _flood_regions(keys, cfg.neighborhood)

        order = np.argsort(regions.ravel(), kind="stable")
        bounds = np.searchsorted(regions.ravel()[order],
                                 np.arange(regions.max() + 2))
        label_map = np.empty(flat.size, dtype=np.int64)
        new_members: dict[int, np.ndarray] = {}
        prev_map = levels[-1].ravel()
        for region in range(regions.max() + 1):
            idx = order[bounds[region]:bounds[region + 1]]
            parent = int(prev_map[idx[0]])
            node_id = new_node(level, idx, parent)
            label_map[idx] = node_id
            new_members[node_id] = idx
        levels.append(label_map.reshape(height, width))
        members = new_members

    for level_map in levels:
        level_map.flags.writeable = False
    return ClusterTree(nodes=nodes, levels=levels, depth=cfg.max_depth,
                       sigma_floor=cfg.bin_width)


# ---------------------------------------------------------------------------
# context queries


def _effective(tree: ClusterTree, node: ClusterNode) -> ClusterNode:
    """Nearest eligible node on the ancestor chain (the root as last resort).

    Ancestors never shrink, so everything above the first eligible node is
    eligible too.
    """
    while not node.eligible and node.parent is not None:
        node = tree.nodes[node.parent]
    return node


def context_of(tree: ClusterTree, leaf_id: int):
    """Deviation context of a leaf: (own, parent, grandparent), floored.

    Ineligible leaves inherit statistics and context from their nearest
    eligible ancestor. Leaves whose (effective) level is 2 or whose chain
    has no grandparent get the two-element fallback (own, parent); the
    contextual gain is then computed from that pair instead.
    """
    if leaf_id not in tree.nodes:
        raise KeyError(f"unknown leaf id {leaf_id}")
    node = _effective(tree, tree.nodes[leaf_id])
    floor = tree.sigma_floor
    d_own = max(node.delta, floor)
    if node.parent is None:
        return (d_own, d_own)
    parent = tree.nodes[node.parent]
    d_parent = max(parent.delta, floor)
    if node.level <= 2 or parent.parent is None:
        return (d_own, d_parent)
    grandparent = tree.nodes[parent.parent]
    return (d_own, d_parent, max(grandparent.delta, floor))


def write_tree_dump(tree: ClusterTree, path) -> None:
    """One node per line: `id level parent size mu delta eligible`."""
    with open(path, "w", encoding="ascii") as fh:
        for node_id in sorted(tree.nodes):
            n = tree.nodes[node_id]
            parent = -1 if n.parent is None else n.parent
            fh.write(f"{n.id} {n.level} {parent} {n.size} "
                     f"{n.mu:.17g} {n.delta:.17g} {int(n.eligible)}\n")
