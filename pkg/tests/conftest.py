"""Prints one summary line per acceptance criterion after the run."""

ACCEPTANCE_FILE = "test_acceptance.py"

CRITERION_LABELS = {
    "test_c1_weights_match_gamma_form": (
        "criterion 1: weight recursion matches the gamma form; integer "
        "orders reduce to exact binomials"),
    "test_c2_operator_algebra": (
        "criterion 2: expanding-window semigroup composition and inverse "
        "round-trips"),
    "test_c3_stat_test_calibration": (
        "criterion 3: ADF/KPSS Monte-Carlo rejection rates and critical "
        "values"),
    "test_c4_memory_vs_stationarity_tradeoff": (
        "criterion 4: order scan trades correlation for stationarity and "
        "selects an interior order"),
    "test_c5_hurst_sanity": (
        "criterion 5: Hurst near 0.5 on Brownian paths, above 0.55 on "
        "persistent ones"),
    "test_c6_metric_oracles": (
        "criterion 6: confusion metrics match brute-force recomputation; "
        "AUC matches the pairwise oracle"),
    "test_c7_classifier_sanity": (
        "criterion 7: separable logistic fit, exact 1-NN memorization, "
        "byte-identical seeded forests"),
    "test_c8_differencing_order_beats_full_difference": (
        "criterion 8: order-0.3 pipeline beats order-1 on the bundled "
        "fixture (sign test, 20 seeds)"),
    "test_c9_user_supplied_price_export": (
        "criterion 9: user-supplied price export reproduces ingest count, "
        "scan row, and Hurst range"),
}

_acceptance_results = {}


def pytest_runtest_logreport(report):
    if ACCEPTANCE_FILE not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "setup" and report.skipped:
        _acceptance_results[name] = "SKIP"
    elif report.when == "call":
        _acceptance_results[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, label in CRITERION_LABELS.items():
        if name in _acceptance_results:
            terminalreporter.write_line(f"[{_acceptance_results[name]}] {label}")
