"""
Determinants of many maximal minors of one matrix, in-process or on a
pool of worker processes. Results come back in selection order.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from poly_core import MultiPoly, bareiss_det

logger = logging.getLogger(__name__)

Selection = Tuple[int, ...]

# Rows of the matrix shared by every task in a worker process
_worker_rows: Optional[List[List[MultiPoly]]] = None


def _init_worker(rows: List[List[MultiPoly]]) -> None:
    global _worker_rows
    _worker_rows = rows


def _minor_task(selection: Selection) -> MultiPoly:
    return bareiss_det([_worker_rows[r] for r in selection])


def minor_determinants(
    rows: Sequence[Sequence[MultiPoly]],
    selections: Iterable[Selection],
    workers: int = 1,
    chunksize: int = 8,
) -> Iterator[MultiPoly]:
    """Yield det(rows[selection]) for each selection"""
    if workers <= 1:
        for selection in selections:
            yield bareiss_det([rows[r] for r in selection])
        return

    logger.info("computing minors on %d worker processes", workers)
    shared = [list(row) for row in rows]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(shared,)) as pool:
        yield from pool.map(_minor_task, selections, chunksize=chunksize)
