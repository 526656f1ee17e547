import io
import json
import os
from contextlib import redirect_stdout
from pathlib import Path

import pytest

from monoidtopos.cli import main

REPO_ROOT = Path(__file__).parent.parent
FIXTURE = "tests/fixtures/qubit.mtd"
GOLDEN_DIR = Path(__file__).parent / "golden"

# Every CLI surface, exercised against the shared fixture file.  Outputs
# are compared byte for byte against committed golden files and across
# two consecutive runs.
RUNS = {
    "parse": ["parse", FIXTURE],
    "verify_heyting": ["verify-heyting", FIXTURE, "M2"],
    "enumerate_ideals": ["enumerate-ideals", FIXTURE, "M2"],
    "truth_subset": ["truth", FIXTURE, "--mset", "Pts", "--kind", "subset",
                     "--point", "0", "--subset", "{1}"],
    "truth_equal": ["truth", FIXTURE, "--mset", "Pts", "--kind", "equal",
                    "--point", "0", "--point2", "1"],
    "valuate_classical": ["valuate-classical", FIXTURE, "--system", "C",
                          "--state", "s1", "--quantity", "A", "--range", "{0}",
                          "--check-arrow"],
    "valuate_quantum": ["valuate-quantum", FIXTURE, "--system", "Q",
                        "--state", "psi", "--op", "A", "--range", "{1}",
                        "--check-arrow"],
    "valuate_ray": ["valuate", FIXTURE, "--system", "Q", "--state", "psi",
                    "--op", "A", "--range", "{1}", "--alphabet", "(Pz,Pplus)",
                    "--mode", "ray", "--depth", "3"],
    "valuate_vector": ["valuate", FIXTURE, "--system", "Q", "--state", "psi",
                       "--op", "A", "--range", "{1}", "--alphabet", "(Pz,Pplus)",
                       "--mode", "vector", "--depth", "3"],
    "valuate_density": ["valuate", FIXTURE, "--system", "Q", "--density", "rho",
                        "--op", "A", "--range", "{1}", "--alphabet", "(Pz,Pplus)",
                        "--mode", "density", "--depth", "3"],
    "equal_sp": ["equal", FIXTURE, "--system", "Q", "--state1", "e1",
                 "--state2", "e2", "--mode", "sp", "--alphabet", "(Pz,Pplus)",
                 "--depth", "3"],
    "equal_context": ["equal", FIXTURE, "--system", "Q", "--state1", "e1",
                      "--state2", "e2", "--mode", "context", "--universe", "U",
                      "--rayset", "Xi"],
    "equal_sieve": ["equal", FIXTURE, "--system", "Q", "--state1", "e1",
                    "--state2", "e2", "--mode", "sieve", "--context",
                    "(Pz,Pplus)"],
    "polar_rays": ["polar", FIXTURE, "--universe", "U", "--rayset", "Xi"],
    "polar_strings": ["polar", FIXTURE, "--universe", "U", "--strings",
                      "(Pz);(Pz,Pplus)", "--candidates", "V"],
    "closure": ["closure", FIXTURE, "--universe", "U", "--rayset", "Xi",
                "--candidates", "V"],
    "sieve_valuation": ["sieve", FIXTURE, "--system", "Q", "--context",
                        "(Pz,Pplus)", "--state", "e1", "--op", "A",
                        "--range", "{1}"],
    "sieve_equal": ["sieve", FIXTURE, "--system", "Q", "--context",
                    "(Pz,Pplus)", "--state", "e1", "--state2", "e2"],
    "query": ["query", FIXTURE, "q1"],
    "selftest": ["selftest", "--seed", "5"],
}


def run_cli(argv) -> tuple[int, str]:
    buffer = io.StringIO()
    cwd = os.getcwd()
    os.chdir(REPO_ROOT)
    try:
        with redirect_stdout(buffer):
            code = main(argv)
    finally:
        os.chdir(cwd)
    return code, buffer.getvalue()


@pytest.mark.parametrize("name", sorted(RUNS))
def test_cli_reports_golden_and_deterministic(name):
    argv = RUNS[name]
    code1, out1 = run_cli(argv)
    code2, out2 = run_cli(argv)
    assert code1 == code2 == 0
    assert out1 == out2, "report must be byte-identical across runs"
    payload = json.loads(out1)
    assert payload["schema"] == 1
    assert payload["status"] == "ok"
    golden = GOLDEN_DIR / f"{name}.json"
    if os.environ.get("REGEN_GOLDENS") == "1":
        GOLDEN_DIR.mkdir(exist_ok=True)
        golden.write_text(out1, encoding="utf-8")
    assert golden.exists(), f"golden file {golden} missing; regenerate with REGEN_GOLDENS=1"
    assert out1 == golden.read_text(encoding="utf-8")


def test_cli_fixture_values():
    _, out = run_cli(RUNS["verify_heyting"])
    result = json.loads(out)["result"]
    assert result["ideal_count"] == 3
    assert result["all_laws_hold"] is True
    assert result["excluded_middle_failures"] == [["1"]]

    _, out = run_cli(RUNS["valuate_quantum"])
    result = json.loads(out)["result"]
    assert result["routes_agree"] is True
    assert result["ideal"]["members"] == ["f00", "f11"]

    _, out = run_cli(RUNS["sieve_equal"])
    result = json.loads(out)["result"]
    assert result["sieve"]["includedTailLengths"] == [1, 2]

    _, out = run_cli(RUNS["valuate_ray"])
    result = json.loads(out)["result"]
    assert result["ideal"]["certificate"]["violations"] == []


def test_cli_selftest_passes():
    code, out = run_cli(["selftest", "--seed", "5"])
    assert code == 0
    payload = json.loads(out)
    assert payload["result"]["all_passed"] is True


def test_cli_diagnostics_exit_code(tmp_path):
    bad = tmp_path / "bad.mtd"
    bad.write_text("monoid M { elements 2; table [[0,1],[1,0]], }")
    code, out = run_cli(["parse", str(bad)])
    assert code == 1
    payload = json.loads(out)
    assert payload["status"] == "error"
    assert payload["diagnostics"][0]["line"] == 1


def test_cli_missing_file():
    code, out = run_cli(["parse", "/nonexistent/file.mtd"])
    assert code == 1
    assert json.loads(out)["status"] == "error"


def test_cli_usage_errors_are_reported():
    code, out = run_cli(["verify-heyting", FIXTURE, "NOPE"])
    assert code == 1
    payload = json.loads(out)
    assert "unknown monoid" in payload["diagnostics"][0]["message"]


def test_cli_pretty_mode_runs():
    code, out = run_cli(["verify-heyting", FIXTURE, "M2", "--pretty"])
    assert code == 0
    assert "all_laws_hold" in out and not out.lstrip().startswith("{")


def test_cli_timing_flag_adds_field():
    _, out = run_cli(["parse", FIXTURE, "--timing"])
    assert "timing_ms" in json.loads(out)
