"""Synthetic dataset generators and bundled example matrices.

Two generator families: block-constant planted co-clusters mixed with a
seeded noise distribution, and a block-diagonal circulant family whose
coupling width trades within-block uniformity against a near-diagonal
structure. A small catalogue of hand-built fixtures ships alongside,
each with the named clusterings used to exercise the cost function.

All generators are pure given (spec, seed) and return valid normalized
distributions together with the planted ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .core import CoClustering, JointDistribution, normalize
from .errors import InvalidBoundaries, KOutOfRange

CIRCULANT_BLOCK = 30
CIRCULANT_COPIES = 3


def _default_boundaries(n: int, k: int) -> tuple[int, ...]:
    """End indices of k near-equal contiguous extents covering range(n)."""
    sizes = [len(chunk) for chunk in np.array_split(np.arange(n), k)]
    return tuple(np.cumsum(sizes).tolist())


def _check_boundaries(boundaries, n: int, k: int, what: str) -> tuple[int, ...]:
    b = tuple(int(x) for x in boundaries)
    if len(b) != k:
        raise InvalidBoundaries(f"{what}: expected {k} extents, got {len(b)}")
    if any(b[i] >= b[i + 1] for i in range(len(b) - 1)) or b[0] < 1 or b[-1] != n:
        raise InvalidBoundaries(
            f"{what}: boundaries {b} do not partition range({n}) into nonempty extents"
        )
    return b


def _labels_from_boundaries(boundaries, n: int) -> np.ndarray:
    labels = np.empty(n, dtype=np.int64)
    start = 0
    for cluster, end in enumerate(boundaries):
        labels[start:end] = cluster
        start = end
    return labels


@dataclass(frozen=True)
class PlantedSpec:
    """Block-constant ground-truth table mixed with seeded noise.

    Boundaries are end indices of the contiguous cluster extents; when
    omitted the index ranges are split near-equally. noise_eps is the
    mixture weight of the noise distribution.
    """

    n_rows: int
    n_cols: int
    row_clusters: int
    col_clusters: int
    noise_eps: float = 0.0
    seed: int = 0
    row_boundaries: tuple[int, ...] | None = None
    col_boundaries: tuple[int, ...] | None = None

    def __post_init__(self):
        if not 0.0 <= self.noise_eps <= 1.0:
            raise InvalidBoundaries(f"noise_eps = {self.noise_eps} outside [0, 1]")
        if not 1 <= self.row_clusters <= self.n_rows:
            raise InvalidBoundaries("row_clusters must lie in [1, n_rows]")
        if not 1 <= self.col_clusters <= self.n_cols:
            raise InvalidBoundaries("col_clusters must lie in [1, n_cols]")

    def resolved_boundaries(self):
        rb = (
            _check_boundaries(self.row_boundaries, self.n_rows, self.row_clusters, "rows")
            if self.row_boundaries is not None
            else _default_boundaries(self.n_rows, self.row_clusters)
        )
        cb = (
            _check_boundaries(self.col_boundaries, self.n_cols, self.col_clusters, "cols")
            if self.col_boundaries is not None
            else _default_boundaries(self.n_cols, self.col_clusters)
        )
        return rb, cb


@dataclass(frozen=True)
class CirculantSpec:
    """Three identical circulant blocks on the diagonal of a 90x90 table.

    Each block row has k contiguous (cyclically wrapped) nonzeros; k at
    the block size makes blocks uniform, k = 1 makes the table a
    permutation-like diagonal.
    """

    k: int

    def __post_init__(self):
        if not 1 <= self.k <= CIRCULANT_BLOCK:
            raise KOutOfRange(f"k = {self.k} outside [1, {CIRCULANT_BLOCK}]")


def gen_planted(spec: PlantedSpec):
    """Planted co-cluster table, its noise mixture, and the ground truth.

    The clean table is constant within every (row cluster, col cluster)
    block; block masses are drawn from the seeded generator so the
    block pattern carries identifiable structure. The result is the
    noise_eps-weighted average of the clean table with a seeded random
    distribution. Returns (distribution, row truth, col truth).
    """
    rb, cb = spec.resolved_boundaries()
    phi = _labels_from_boundaries(rb, spec.n_rows)
    psi = _labels_from_boundaries(cb, spec.n_cols)
    rng = np.random.default_rng(spec.seed)

    block_mass = rng.uniform(0.2, 1.2, size=(spec.row_clusters, spec.col_clusters))
    block_mass /= block_mass.sum()
    row_sizes = np.bincount(phi, minlength=spec.row_clusters).astype(float)
    col_sizes = np.bincount(psi, minlength=spec.col_clusters).astype(float)
    cell_value = block_mass / np.outer(row_sizes, col_sizes)
    clean = cell_value[np.ix_(phi, psi)]

    noise = rng.uniform(0.0, 1.0, size=(spec.n_rows, spec.n_cols))
    noise /= noise.sum()

    mixed = (1.0 - spec.noise_eps) * clean + spec.noise_eps * noise
    return normalize(mixed), phi, psi


def gen_circulant(spec: CirculantSpec, smooth_eps: float = 0.0):
    """Block-diagonal circulant table and its block ground truth.

    Each of the three diagonal blocks is circulant: the first row has
    CIRCULANT_BLOCK - k zeros followed by k entries of equal mass, and
    every subsequent row is the cyclic shift of the previous one. Every
    row sums to 1/90. With smooth_eps > 0 a uniform mass is blended in
    (and the table renormalized) so the bipartite graph of the result is
    connected. Returns (distribution, row truth, col truth).
    """
    n = CIRCULANT_BLOCK * CIRCULANT_COPIES
    first_row = np.zeros(CIRCULANT_BLOCK)
    first_row[CIRCULANT_BLOCK - spec.k:] = 1.0 / (spec.k * n)
    block = np.empty((CIRCULANT_BLOCK, CIRCULANT_BLOCK))
    for r in range(CIRCULANT_BLOCK):
        block[r] = np.roll(first_row, r)
    table = np.zeros((n, n))
    for c in range(CIRCULANT_COPIES):
        lo = c * CIRCULANT_BLOCK
        table[lo : lo + CIRCULANT_BLOCK, lo : lo + CIRCULANT_BLOCK] = block
    if smooth_eps > 0.0:
        table = smooth(table, smooth_eps)
    truth = np.repeat(np.arange(CIRCULANT_COPIES), CIRCULANT_BLOCK)
    return normalize(table), truth, truth.copy()


def smooth(matrix, eps: float = 1e-6) -> np.ndarray:
    """Blend in uniform mass and rescale so the total is preserved.

    Makes every cell positive, hence the bipartite graph connected,
    while perturbing the distribution by at most eps.
    """
    mat = np.asarray(matrix, dtype=float)
    total = mat.sum()
    uniform = total / mat.size
    return (1.0 - eps) * mat + eps * uniform


@dataclass(frozen=True)
class Fixture:
    """A bundled matrix plus the named clusterings used to discuss it."""

    name: str
    matrix: np.ndarray
    clusterings: dict[str, CoClustering]
    description: str

    def distribution(self) -> JointDistribution:
        return normalize(self.matrix)


def _build_fixtures() -> dict[str, Fixture]:
    out = {}

    # A 3x4 table on which the sweep at coupling 1/2 cannot leave the
    # "thin" partition although the "thick" one is strictly better.
    stuck = np.zeros((3, 4))
    for i, j in [(0, 0), (1, 1), (2, 2), (2, 3)]:
        stuck[i, j] = 0.25
    out["stuck_3x4"] = Fixture(
        name="stuck_3x4",
        matrix=stuck,
        clusterings={
            "thin": CoClustering([0, 1, 1], [0, 1, 1, 1]),
            "thick": CoClustering([0, 0, 1], [0, 0, 1, 1]),
        },
        description="local optimum of the coupled objective that the "
        "decoupled objective escapes",
    )

    # An 8x4 table clustered into 4 row and 2 column groups; two row
    # partitions tie at coupling 1/2, and their order flips between the
    # decoupled and the fully coupled ends.
    tall = np.zeros((8, 4))
    for i, j in [(0, 0), (1, 0), (2, 1), (3, 1), (4, 2), (5, 2), (6, 3), (7, 3)]:
        tall[i, j] = 0.125
    psi_tall = [0, 0, 1, 1]
    out["tall_8x4"] = Fixture(
        name="tall_8x4",
        matrix=tall,
        clusterings={
            "paired_rows": CoClustering([0, 0, 1, 1, 2, 2, 3, 3], psi_tall),
            "offset_rows": CoClustering([0, 1, 1, 1, 2, 2, 2, 3], psi_tall),
        },
        description="mismatched cluster cardinalities: row partitions that "
        "the coupled objective cannot tell apart",
    )

    # Two 3x3 tables with an exact zero-separated 2x2 block structure and
    # an alternative split that wins for large couplings by evening out
    # the cluster masses.
    trade_a = np.array([[0.12, 0.0, 0.0], [0.0, 0.39, 0.05], [0.0, 0.05, 0.39]])
    trade_b = np.array([[0.12, 0.0, 0.0], [0.0, 0.40, 0.04], [0.0, 0.04, 0.40]])
    trade_clusterings = {
        "ground_truth": CoClustering([0, 1, 1], [0, 1, 1]),
        "alternative": CoClustering([0, 0, 1], [0, 0, 1]),
    }
    out["entropy_trade_a"] = Fixture(
        name="entropy_trade_a",
        matrix=trade_a,
        clusterings=dict(trade_clusterings),
        description="well-separated blocks beaten by a mass-balancing split "
        "at large couplings",
    )
    out["entropy_trade_b"] = Fixture(
        name="entropy_trade_b",
        matrix=trade_b,
        clusterings=dict(trade_clusterings),
        description="slightly sharpened variant whose balancing split wins "
        "for almost every coupling",
    )

    # Southern Women event participation (18 women x 14 events, binary),
    # with the two-community/three-event-group reference clustering.
    women_events = _load_southern_women()
    out["southern_women"] = Fixture(
        name="southern_women",
        matrix=women_events,
        clusterings={
            "reference": CoClustering(
                [0] * 9 + [1] * 9, [0] * 6 + [1] * 3 + [2] * 5
            ),
        },
        description="Southern Women event participation dataset",
    )
    return out


def _load_southern_women() -> np.ndarray:
    from .io import load_triplets  # deferred: io imports core, not synth

    ref = resources.files("cocluster.data").joinpath("southern_women.tsv")
    with resources.as_file(ref) as path:
        return load_triplets(path)


def fixtures() -> dict[str, Fixture]:
    """The bundled example matrices, keyed by fixture name."""
    return _build_fixtures()


def fixture(name: str) -> Fixture:
    table = _build_fixtures()
    if name not in table:
        raise KeyError(f"unknown fixture {name!r}; available: {sorted(table)}")
    return table[name]
