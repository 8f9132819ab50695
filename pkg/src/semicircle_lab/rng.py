"""Counter-based random streams.

Every random quantity in the package is a pure function of a small integer
address.  The address selects a Philox key and the high words of the Philox
counter, so streams never overlap and can be generated in any order or from
any thread without changing a single bit of the output.

Matrix entries use the address ``(seed, MATRIX, trial, i)``; entry ``(i, j)``
with ``j >= i`` occupies draws ``2*(j - i)`` and ``2*(j - i) + 1`` of that
stream, so its value depends only on ``(seed, trial, i, j)``.
"""

import numpy as np

MATRIX = 1
ROW_SUMS = 2
SIGNS = 3

_MASK64 = (1 << 64) - 1
_INV53 = 2.0 ** -53


def check_seed(seed):
    seed = int(seed)
    if seed < 0 or seed > _MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def uniforms(seed, domain, a, b, size):
    """Uniform variates in the open interval (0, 1) for one stream.

    Parameters
    ----------
    seed : int
        64-bit user seed.
    domain : int
        Stream family tag (``MATRIX``, ``ROW_SUMS``, ...).
    a, b : int
        Stream address inside the family, e.g. ``(trial, row)``.
    size : int or tuple
        Output shape.
    """
    bitgen = np.random.Philox(
        key=np.array([check_seed(seed), domain & _MASK64], dtype=np.uint64),
        counter=np.array([0, 0, a & _MASK64, b & _MASK64], dtype=np.uint64),
    )
    count = int(np.prod(size))
    raw = bitgen.random_raw(count)
    # top 53 bits, shifted half a step so 0 and 1 are never produced
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53
    return u.reshape(size)
