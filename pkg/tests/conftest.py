from . import test_acceptance


def pytest_terminal_summary(terminalreporter):
    outcomes = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when == "call" or rep.outcome != "passed":
                name = rep.nodeid.rsplit("::", 1)[-1]
                if name in test_acceptance.CRITERIA:
                    outcomes[name] = "PASS" if rep.outcome == "passed" else "FAIL"
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, title in test_acceptance.CRITERIA.items():
        if name in outcomes:
            detail = test_acceptance.DETAILS.get(name, "")
            terminalreporter.write_line(f"{outcomes[name]}  {title}  {detail}".rstrip())
