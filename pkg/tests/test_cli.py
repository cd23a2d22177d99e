from __future__ import annotations

import itertools
import json

import pytest

from conftest import CORPUS, SECURE_TOKEN
from ercaudit.cli import main


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_secure_token_table(capsys):
    code, out, _ = run(capsys, "analyze", SECURE_TOKEN, "--format", "table")
    assert code == 0
    rows = [line for line in out.splitlines() if line[:3].strip().isdigit()]
    assert len(rows) == 82
    assert "success rate 100.0%" in out


def test_vulnerable_file_exits_1(capsys):
    code, out, _ = run(capsys, "analyze", CORPUS / "c08_call_before_write.sol")
    assert code == 1
    assert "[8 SWC-107]" in out


def test_min_severity_policy(capsys):
    path = CORPUS / "c54_long_literal.sol"
    code, *_ = run(capsys, "analyze", path, "--enable", "54")
    assert code == 1
    code, *_ = run(capsys, "analyze", path, "--enable", "54", "--min-severity", "high")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["analyze", "does/not/exist.sol"],
    ["analyze"],
    ["analyze", str(SECURE_TOKEN), "--format", "xml"],
    ["analyze", str(SECURE_TOKEN), "--enable", "99"],
    ["analyze", str(SECURE_TOKEN), "--pragma-min", "zero"],
    ["analyze", str(SECURE_TOKEN), "--config", "missing.cfg"],
    ["sim", "run", "no-such-scenario"],
    ["sim", "mwa", "--n", "-1"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_parse_failure_exits_2(capsys, tmp_path):
    p = tmp_path / "broken.sol"
    p.write_text("contract T { function f( { }\n")
    code, _, err = run(capsys, "analyze", p)
    assert code == 2
    assert "broken.sol" in err


def test_flag_order_independence(capsys):
    flags = [["--format", "json"], ["--enable", "1-40"], ["--disable", "4"], ["--pragma-min", "0.5.0"]]
    outputs = set()
    for perm in itertools.permutations(flags):
        argv = ["analyze", str(CORPUS / "token_compliant.sol"), str(CORPUS / "c08_call_before_write.sol")]
        for f in perm:
            argv.extend(f)
        code, out, _ = run(capsys, *argv)
        outputs.add((code, out))
    assert len(outputs) == 1


def test_multi_file_order_determinism(capsys):
    files = [CORPUS / "c02_unchecked_add.sol", CORPUS / "c08_call_before_write.sol", SECURE_TOKEN]
    outputs = {run(capsys, "analyze", "--format", "json", *perm)[1] for perm in itertools.permutations(files)}
    assert len(outputs) == 1


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "audit.cfg"
    cfg.write_text("enable = 8\nseverity.8 = informational\n")
    path = CORPUS / "c08_call_before_write.sol"
    code, out, _ = run(capsys, "analyze", path, "--config", cfg, "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert [(f["check"], f["severity"]) for f in doc["findings"]] == [(8, "informational")]
    code, out, _ = run(capsys, "analyze", path, "--config", cfg, "--enable", "2", "--format", "json")
    assert json.loads(out)["findings"] == []


def test_checks_list(capsys):
    code, out, _ = run(capsys, "checks", "list")
    assert code == 0 and len(out.splitlines()) == 83
    code, out, _ = run(capsys, "checks", "list", "--format", "json")
    assert len(json.loads(out)) == 82


def test_sim_mwa_insecure(capsys):
    code, out, _ = run(capsys, "sim", "mwa", "--n", "100", "--m", "50", "--variant", "insecure", "--format", "json")
    assert code == 0
    assert json.loads(out)["worst_case"] == 150
    code, out, _ = run(capsys, "sim", "mwa", "--n", "100", "--m", "50")
    assert "100" in out


@pytest.mark.parametrize("variant", ["secure", "insecure"])
def test_sim_run_json(capsys, variant):
    code, out, _ = run(capsys, "sim", "run", "reentrancy-same", "--variant", variant, "--format", "json", "--trace")
    assert code == 0
    doc = json.loads(out)
    assert doc["metrics"]["attacker_wei_gained"] == (10 if variant == "secure" else 30)
    assert doc["trace"]


def test_sim_run_text(capsys):
    code, out, _ = run(capsys, "sim", "run", "pause-gate")
    assert code == 0 and "safe: yes" in out
