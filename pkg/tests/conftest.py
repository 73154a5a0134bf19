import pytest


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion for the terminal summary."""
    lines = request.config._acceptance_lines

    def record(number: int, name: str, subchecks: dict[str, bool], runtime_s: float, limit_s=None):
        timed = limit_s is None or runtime_s < limit_s
        ok = all(subchecks.values()) and timed
        failed = [k for k, v in subchecks.items() if not v]
        if not timed:
            failed.append(f"runtime {runtime_s:.1f}s >= {limit_s}s")
        budget = f" (limit {limit_s}s)" if limit_s else ""
        detail = f"  failed: {'; '.join(failed)}" if failed else ""
        lines.append((number, f"criterion {number} {name}: {'PASS' if ok else 'FAIL'}"
                              f"  [{len(subchecks)} checks, {runtime_s:.1f}s{budget}]{detail}"))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
