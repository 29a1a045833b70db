import itertools

import numpy as np
import pytest
from hypothesis import settings

from admmlp.code_model import ParityCheckMatrix, load_code

# first calls into numba kernels pay compile time
settings.register_profile("default", deadline=None)
settings.load_profile("default")

HAMMING_ROWS = [[1, 2, 3, 5], [1, 2, 4, 6], [1, 3, 4, 7]]


def hamming_dense() -> np.ndarray:
    H = np.zeros((3, 7), dtype=np.uint8)
    for j, row in enumerate(HAMMING_ROWS):
        H[j, [i - 1 for i in row]] = 1
    return H


def brute_codewords(H_dense: np.ndarray) -> np.ndarray:
    """Every codeword, by exhaustive enumeration of {0,1}^n."""
    n = H_dense.shape[1]
    words = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
    return words[((words @ H_dense.T.astype(np.int64)) % 2 == 0).all(axis=1)].astype(np.uint8)


def ml_decode(codewords: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    return codewords[np.argmin(codewords @ gamma)]


@pytest.fixture(scope="session")
def hamming() -> ParityCheckMatrix:
    return load_code("hamming74")


@pytest.fixture(scope="session")
def hamming_codewords() -> np.ndarray:
    return brute_codewords(hamming_dense())


@pytest.fixture(scope="session")
def tanner() -> ParityCheckMatrix:
    return load_code("tanner")


# --- acceptance reporting ------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def report(criterion: int, ok: bool, detail: str) -> bool:
    line = f"CRITERION {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
    terminalreporter.write_line("CRITERION 9: EXCLUDED  deep error-floor points (FER 1e-6..1e-8) "
                                "are out of desk-scale reach; replaced by criteria 1-8")
