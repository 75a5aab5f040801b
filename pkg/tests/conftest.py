import re


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", getattr(rep, "nodeid", ""))
            if not m or rep.when not in ("call", "setup") or (rep.when == "setup" and rep.passed):
                continue
            detail = dict(rep.user_properties).get("detail", "")
            rows.append((int(m.group(1)), "PASS" if rep.passed else "FAIL", detail))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, verdict, detail in sorted(rows):
        terminalreporter.write_line(f"criterion {num:>2}: {verdict}  {detail}")
