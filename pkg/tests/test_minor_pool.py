import random

from generators import random_matrix
from minor_pool import minor_determinants
from poly_core import bareiss_det, mu_var


def test_pool_matches_in_process_determinants():
    rng = random.Random(17)
    rows = random_matrix(rng, 4, [mu_var(1), mu_var(2)], degree=1)
    rows = rows + [list(reversed(row)) for row in rows[:2]]
    selections = [(0, 1, 2, 3), (1, 2, 3, 4), (0, 2, 4, 5), (2, 3, 4, 5)]
    expected = [bareiss_det([rows[r] for r in s]) for s in selections]
    assert list(minor_determinants(rows, selections)) == expected
    assert list(minor_determinants(rows, selections, workers=2, chunksize=1)) == expected
