import sys


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, in criterion order
    for mod in list(sys.modules.values()):
        if getattr(mod, "__file__", "") and mod.__file__.endswith("test_acceptance.py"):
            results = getattr(mod, "RESULTS", {})
            if results:
                terminalreporter.section("acceptance criteria")
                for number in sorted(results):
                    terminalreporter.write_line(results[number])
            break
