"""Acceptance suite: one test per criterion, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -v -s` to see every verdict.
Criterion 6's spread-halving clause is known to fail for fundamental
reasons; the test states the criterion verbatim and reports the measured
numbers (see notes in the repository's review ledger).
"""

import json
import time
from pathlib import Path

import numpy as np

from gqdkit import (
    estimate_gqd,
    expect_layout,
    expect_layout_dense_oracle,
    gqd_by_minimization,
    gqd_exact,
    make_family,
    qst_estimate,
    random_state,
    resource_report,
    settings,
    standard_layouts,
    verify_moment_formulas,
)
from gqdkit.contraction import build_u, build_v, pauli_exchange_sum

BUILD_DIR = Path(__file__).resolve().parent.parent / "build"


def _verdict(number: int, ok: bool, detail: str) -> bool:
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def sweep_states(base: int, count: int):
    return [(i, random_state([base, i], rank=1 + i % 4)) for i in range(count)]


def test_criterion_01_scheme_exact_equals_bloch_exact():
    t0 = time.perf_counter()
    worst = 0.0
    for _, state in sweep_states(1000, 500):
        dev = abs(estimate_gqd(state, "scheme-exact").value - gqd_exact(state).value)
        worst = max(worst, dev)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 60.0
    assert _verdict(
        1, ok, f"max |scheme - bloch| = {worst:.3e} over 500 states in {elapsed:.1f}s"
    )


def test_criterion_02_permuted_discord_via_swap_rule():
    worst = 0.0
    for _, state in sweep_states(2000, 500):
        dev = abs(
            estimate_gqd(state, "scheme-exact", which="B").value
            - gqd_exact(state, "B").value
        )
        worst = max(worst, dev)
    ok = worst <= 1e-8
    assert _verdict(2, ok, f"max side-B deviation = {worst:.3e} over 500 states")


def test_criterion_03_pair_operator_identities():
    dev_u = float(np.max(np.abs(build_u() - pauli_exchange_sum())))
    dev_v = float(np.max(np.abs(build_v() - (np.eye(4) + pauli_exchange_sum()))))
    ok = dev_u <= 1e-14 and dev_v <= 1e-14
    assert _verdict(3, ok, f"|U dev| = {dev_u:.1e}, |V dev| = {dev_v:.1e}")


def test_criterion_04_moment_formula_audit_with_archived_diff():
    report = verify_moment_formulas(trials=200, seed=4)
    BUILD_DIR.mkdir(exist_ok=True)
    artifact = BUILD_DIR / "moment_formula_audit.json"
    artifact.write_text(json.dumps(report.to_dict(), indent=2))
    if report.baseline_ok:
        ok = True
        detail = f"baseline table verified, max dev {max(report.baseline_max_dev.values()):.2e}"
    else:
        ok = all(dev <= 1e-6 for dev in report.corrected_max_dev.values())
        detail = (
            f"baseline deviates (order 3 dev {report.baseline_max_dev[3]:.2e}); "
            f"corrected table max dev {max(report.corrected_max_dev.values()):.2e}, "
            f"{len(report.diff)} coefficient(s) changed, diff archived at {artifact}"
        )
    assert _verdict(4, ok, detail)


def test_criterion_05_werner_closed_form_on_exact_routes():
    worst = 0.0
    for p in (0.0, 0.25, 0.5, 0.75, 1.0):
        state = make_family("werner", [p])
        target = p * p / 2.0
        worst = max(worst, abs(gqd_exact(state).value - target))
        worst = max(worst, abs(estimate_gqd(state, "scheme-exact").value - target))
    ok = worst <= 1e-12
    assert _verdict(5, ok, f"max |D - p^2/2| = {worst:.3e} across both exact routes")


def test_criterion_06_shot_noise_convergence():
    state = make_family("werner", [0.5])
    low = estimate_gqd(state, "scheme-sampled", shots=100_000, repeats=20, seed=601)
    high = estimate_gqd(state, "scheme-sampled", shots=400_000, repeats=20, seed=602)
    mean_ok = (
        abs(low.value - 0.125) <= 3 * low.std_err
        and abs(high.value - 0.125) <= 3 * high.std_err
    )
    ratio = high.std_err / low.std_err
    ratio_ok = (0.5 / 1.5) <= ratio <= (0.5 * 1.5)
    detail = (
        f"mean within 3*std_err: {mean_ok} "
        f"(1e5: {low.value:.4f}+-{low.std_err:.4f}, 4e5: {high.value:.4f}+-{high.std_err:.4f}); "
        f"std ratio {ratio:.3f} vs required [{0.5 / 1.5:.3f}, {0.75:.3f}]: {ratio_ok}"
        + (
            ""
            if ratio_ok
            else " [known defect: moment noise enters the spectrum through a cube "
            "root at the degenerate werner point, so the spread scales like "
            "shots^(-1/6), not shots^(-1/2); see decisions ledger]"
        )
    )
    assert _verdict(6, mean_ok and ratio_ok, detail)


def test_criterion_07_minimization_oracle():
    devs = []
    for i, state in sweep_states(7000, 50):
        devs.append(
            gqd_by_minimization(state, restarts=4, seed=i) - gqd_exact(state).value
        )
    lo, hi = min(devs), max(devs)
    ok = lo >= -1e-6 and hi <= 1e-4
    assert _verdict(7, ok, f"minimization - exact in [{lo:.2e}, {hi:.2e}] over 50 states")


def test_criterion_08_contraction_against_dense_oracle():
    layouts = [lay for lay in standard_layouts() if lay.n_copies <= 4]
    worst = 0.0
    for _, state in sweep_states(8000, 25):
        for lay in layouts:
            worst = max(
                worst,
                abs(expect_layout(lay, state) - expect_layout_dense_oracle(lay, state)),
            )
    ok = worst <= 1e-10
    assert _verdict(8, ok, f"max |fast - dense| = {worst:.3e} over 25 states x P1..P7")


def test_criterion_09_resource_report_snapshot():
    report = resource_report()
    snapshot_ok = (
        report.r_p_scheme == 3
        and report.r_p_qst == 15
        and report.r_scheme == 132
        and report.r_qst == 225
        and report.projector_count_scheme == 11
        and report.setting_count_scheme == len(settings()) == 3
    )
    tallies_ok = (
        report.copies_tally_per_projector == 46
        and report.copies_tally_per_setting == 12
    )
    ok = snapshot_ok and tallies_ok
    assert _verdict(
        9,
        ok,
        f"r: {report.r_scheme} vs {report.r_qst}, r_p: {report.r_p_scheme} vs "
        f"{report.r_p_qst}, {report.projector_count_scheme} projectors, "
        f"{report.setting_count_scheme} settings; independent tallies "
        f"{report.copies_tally_per_projector} (per projector) and "
        f"{report.copies_tally_per_setting} (per setting) reported alongside r_c=44",
    )


def test_criterion_10_tomography_exact_limit():
    worst_state = 0.0
    worst_value = 0.0
    for _, state in sweep_states(10_000, 20):
        recon, est = qst_estimate(state)
        worst_state = max(worst_state, float(np.max(np.abs(recon.matrix - state.matrix))))
        worst_value = max(worst_value, abs(est.value - gqd_exact(state).value))
    ok = worst_state <= 1e-10 and worst_value <= 1e-10
    assert _verdict(
        10,
        ok,
        f"max reconstruction dev {worst_state:.3e}, max value dev {worst_value:.3e}",
    )
