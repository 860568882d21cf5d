from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        status, seconds, budget, title = RESULTS[n]
        terminalreporter.write_line(
            f"criterion {n:>2}: {status}  {title} ({seconds:.2f} s, budget {budget} s)")
