import numpy as np

from wvgeo.qstate import Observable, PureState

# Acceptance tests append (id, passed, detail) lines here; they are printed
# after the run so the pass/fail record survives output capture.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'} - {detail}")


def random_state(rng: np.random.Generator, n: int) -> PureState:
    vec = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState.normalized(vec)


def random_hermitian(rng: np.random.Generator, n: int) -> Observable:
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return Observable((m + m.conj().T) / 2.0)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))
