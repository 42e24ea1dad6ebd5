import logging
from multiprocessing import Pool
from typing import List, Tuple

import numpy as np

from duopoly.models.dynamics import UNRESOLVED, Attractor
from duopoly.models.game import BestReplyMap
from duopoly.models.results import BasinGrid, GridSpec, SymmetryReport
from duopoly.services.dynamics2d_service import TAIL_SHARE, attractor_catalog, locate
from duopoly.services.model_service import eval_best_reply_array
from duopoly.utils.errors import NotSquareGrid

WINDOW_MARGIN = 1.05


def default_grid_spec(m: BestReplyMap, n: int = 200, **options) -> GridSpec:
    """Square [0, 1.05 x_m]^2 window, so the zero branch and every kink are visible."""
    hi = WINDOW_MARGIN * m.x_m
    return GridSpec(x_range=(0.0, hi), y_range=(0.0, hi), nx=n, ny=n, **options)


def _classify_rows(args: Tuple[BestReplyMap, List[Attractor], GridSpec, int, int]) -> np.ndarray:
    m, catalog, spec, j0, j1 = args
    xs, ys = spec.centers()
    gx, gy = np.meshgrid(np.array(xs), np.array(ys[j0:j1]))
    x, y = gx.ravel(), gy.ravel()

    for _ in range(spec.burn):
        x, y = eval_best_reply_array(m, y), eval_best_reply_array(m, x)

    counts = np.zeros((x.size, len(catalog)), dtype=np.int64)
    for _ in range(spec.n_tail):
        x, y = eval_best_reply_array(m, y), eval_best_reply_array(m, x)
        ids = locate(catalog, x, y, spec.tol)
        for att in catalog:
            counts[:, att.id] += ids == att.id

    best = np.argmax(counts, axis=1)
    share = counts[np.arange(x.size), best]
    return np.where(share >= TAIL_SHARE * spec.n_tail, best, UNRESOLVED)


def _row_blocks(ny: int, workers: int) -> List[Tuple[int, int]]:
    edges = np.linspace(0, ny, min(workers, ny) + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def compute_basins(m: BestReplyMap, spec: GridSpec) -> BasinGrid:
    """Label every cell center by the attractor its T-orbit settles on.

    Rows are split into blocks, one per worker; each cell is classified on
    its own, so the labels do not depend on the worker count.
    """
    catalog = attractor_catalog(m)
    tasks = [(m, catalog, spec, j0, j1) for j0, j1 in _row_blocks(spec.ny, spec.workers)]

    if spec.workers > 1 and len(tasks) > 1:
        logging.info(f"Computing {spec.nx}x{spec.ny} basins on {len(tasks)} workers")
        with Pool(processes=len(tasks)) as pool:
            blocks = pool.map(_classify_rows, tasks)
    else:
        blocks = [_classify_rows(task) for task in tasks]

    labels = np.concatenate(blocks).astype(int)
    unresolved = int(np.count_nonzero(labels == UNRESOLVED))
    if unresolved:
        logging.warning(f"{unresolved} of {labels.size} basin cells unresolved")

    values, counts = np.unique(labels, return_counts=True)
    histogram = {int(v): int(c) for v, c in zip(values, counts)}
    return BasinGrid(spec=spec, labels=labels.tolist(), catalog=catalog,
                     unresolved=unresolved, histogram=histogram)


def check_symmetry(g: BasinGrid) -> SymmetryReport:
    """Cell (i, j) must carry the mirror of the label at (j, i)."""
    spec = g.spec
    if spec.nx != spec.ny or spec.x_range != spec.y_range:
        raise NotSquareGrid(f"need a square grid, got {spec.nx}x{spec.ny} on {spec.x_range} x {spec.y_range}")

    mirror = {att.id: att.mirror_id for att in g.catalog}
    mirror[UNRESOLVED] = UNRESOLVED
    n = spec.nx

    pairs = 0
    violations = []
    for j in range(n):
        for i in range(j + 1, n):
            pairs += 1
            if g.label_at(j, i) != mirror[g.label_at(i, j)]:
                violations.append((i, j))

    consistent = pairs - len(violations)
    fraction = consistent / pairs if pairs else 1.0
    return SymmetryReport(pairs=pairs, consistent=consistent, fraction=fraction, violations=violations)


def refinement_change(m: BestReplyMap, spec: GridSpec) -> float:
    """Share of coarse cells with at least one child labeled differently at twice the resolution."""
    coarse = compute_basins(m, spec)
    fine = compute_basins(m, spec.model_copy(update={"nx": 2 * spec.nx, "ny": 2 * spec.ny}))

    c = np.array(coarse.labels).reshape(spec.ny, spec.nx)
    f = np.array(fine.labels).reshape(2 * spec.ny, 2 * spec.nx)
    changed = np.zeros_like(c, dtype=bool)
    for dj in (0, 1):
        for di in (0, 1):
            changed |= f[dj::2, di::2] != c
    return float(np.count_nonzero(changed)) / c.size
