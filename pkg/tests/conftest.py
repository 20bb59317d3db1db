import pytest

from dispersionlab.kernel import derivative_table, solve_kernel

ACCEPTANCE: list[tuple[int, bool, str]] = []


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.append((n, bool(ok), detail))
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def kernel1():
    return derivative_table(solve_kernel(1), 12)


@pytest.fixture(scope="session")
def kernel2():
    return derivative_table(solve_kernel(2), 8)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
