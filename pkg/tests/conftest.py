import sys


def pytest_terminal_summary(terminalreporter):
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    if mod is None:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 12):
        line = mod.VERDICTS.get(n, f"criterion {n:2d}: NOT RUN  (deselected, or errored before a verdict)")
        terminalreporter.write_line(line)
