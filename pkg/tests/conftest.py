import pytest


@pytest.fixture(autouse=True)
def _isolated_run_log(tmp_path, monkeypatch):
    # commands invoked through cli.main must not write into the working tree
    monkeypatch.setenv("SPECGAP_LOG_DIR", str(tmp_path / "runlog"))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
