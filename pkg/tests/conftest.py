import pytest

N_CRITERIA = 10
_results: dict[int, tuple[bool, str]] = {}
_ran = False


@pytest.fixture
def criterion():
    """Record and print one pass/fail line for an acceptance criterion."""
    global _ran
    _ran = True

    def record(num: int, ok: bool, detail: str) -> bool:
        _results[num] = (bool(ok), detail)
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ran:
        return
    terminalreporter.section("acceptance criteria")
    for num in range(1, N_CRITERIA + 1):
        if num in _results:
            ok, detail = _results[num]
            terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {num:2d}: FAIL  (not evaluated)")
