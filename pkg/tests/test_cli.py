import json
import random
import subprocess
import sys
from pathlib import Path

import pandas as pd
import pytest

from jacsearch.cli import main
from jacsearch.curve import curve_new, twist
from jacsearch.ff import field_new
from jacsearch.oracle import naive_jacobian_order
from jacsearch.search import parse_family, run_search

FAMILY = "x^5+2x^3+7x^2+x+t"
SMALL = ["search", "--family", FAMILY, "--p", "1009", "--B", "1100"]


def test_tune_rejects_small_groups():
    with pytest.raises(SystemExit) as exc:
        main(["tune", "--bits", "47"])
    assert exc.value.code == 1


def test_module_entry_point():
    result = subprocess.run([sys.executable, "-m", "jacsearch.cli", "tune", "--bits", "100"],
                            capture_output=True, text=True, cwd=Path(__file__).parents[1])
    assert result.returncode == 0
    assert "u = " in result.stdout
    assert "INFO" in result.stderr


def test_tune(capsys):
    assert main(["tune", "--bits", "150", "--space-saver"]) == 0
    out = capsys.readouterr().out
    assert "space-saver" in out
    assert "u = " in out
    assert "B = " in out


def test_search_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["search", "--family", "x^5+?", "--p", "1009"])
    assert exc.value.code == 1
    assert "position 3" in capsys.readouterr().err

    with pytest.raises(SystemExit) as exc:
        main(["search", "--p", "1009"])
    assert exc.value.code == 1

    with pytest.raises(SystemExit) as exc:
        main(SMALL + ["--resume"])
    assert exc.value.code == 1


def test_search_empty_range(capsys):
    assert main(SMALL + ["--t-from", "5", "--t-to", "4"]) == 0
    assert capsys.readouterr().out == ""


def test_search_prints_records_for_one_shard(capsys):
    assert main(SMALL + ["--t-from", "1", "--t-to", "2", "--shards", "2", "--shard-index", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [json.loads(line)["t"] for line in lines] == [2]


def test_search_memory_cap_flag(capsys):
    args = SMALL + ["--t-from", "1", "--t-to", "2"]
    assert main(args + ["--max-stored", "2"]) == 0
    capped = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert main(args) == 0
    plain = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    for rec in capped + plain:
        rec.pop("ms")
        rec.pop("ops")
    assert capped == plain


def test_search_interrupt_keeps_finished_records(tmp_path, monkeypatch):
    def interrupted(config, skip=None):
        records = run_search(config, skip)
        yield next(records)
        records.close()
        raise KeyboardInterrupt

    monkeypatch.setattr("jacsearch.cli.run_search", interrupted)
    out = tmp_path / "records.jsonl"
    assert main(SMALL + ["--t-from", "1", "--t-to", "3", "--out", str(out)]) == 2
    assert [json.loads(line)["t"] for line in out.read_text().splitlines()] == [1]


def test_search_verify_and_resume(tmp_path, capsys):
    # Search two curves into a record file with a summary.
    out = tmp_path / "records.jsonl"
    csv = tmp_path / "summary.csv"
    args = SMALL + ["--t-from", "1", "--t-to", "2", "--out", str(out)]
    assert main(args + ["--summary-csv", str(csv)]) == 0
    assert len(out.read_text().splitlines()) == 2
    assert "t" in pd.read_csv(csv).columns

    # Every success record verifies, including the oracle check.
    assert main(["verify", "--records", str(out)]) == 0
    assert "oracle" in capsys.readouterr().out

    # Resuming finds nothing left to do.
    assert main(args + ["--resume"]) == 0
    assert len(out.read_text().splitlines()) == 2


def test_verify_published_curve(capsys):
    flags = ["verify", "--family", "x^5+x+t", "--t", "456579", "--p", "2^61-1"]
    assert main(flags + ["--lpoly", "867588246,503655589160075568"]) == 0
    assert "near_prime J_3/1" in capsys.readouterr().out

    # A perturbed a_2 no longer annihilates the Jacobian.
    assert main(flags + ["--lpoly", "867588246,503655589160075569"]) == 2


def test_zeta_on_small_field(capsys):
    # Find a nonsingular member of the family over F_10007.
    p, fam = 10007, parse_family(FAMILY)
    for t in range(1, 50):
        try:
            C = curve_new(2, field_new(p), [c % p for c in fam.polynomial(t)])
            break
        except ValueError:
            continue
    rng = random.Random(1)
    order, twist_order = naive_jacobian_order(C, rng), naive_jacobian_order(twist(C), rng)
    flags = ["zeta", "--family", FAMILY, "--t", str(t), "--p", str(p)]

    assert main(flags + ["--order", str(order)]) == 0
    result = json.loads(capsys.readouterr().out)
    assert (result["order"], result["twist_order"]) == (str(order), str(twist_order))

    assert main(flags + ["--order", str(twist_order), "--twist"]) == 0
    assert json.loads(capsys.readouterr().out)["order"] == str(order)

    # An impossible order has no candidate.
    assert main(flags + ["--order", "1"]) == 2


@pytest.mark.slow
def test_zeta_genus3_worked_example(capsys):
    twist_order = (2**3 * 5**2 * 233 * 937 * 8053 * 18719 * 44171 * 1180799
                   * 13517389 * 307558308259)
    assert main(["zeta", "--family", "x^7+3x^5+x^4+4x^3+x^2+5x+t", "--t", "648",
                 "--p", "2^50-27", "--order", str(twist_order), "--twist"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["a"] == ["39141148", "1354965780525799", "18939879984661962930696"]
    assert result["order"] == str(2**3 * 3 * 1083611 * 54880077749424473770842486727458448993)


def test_experiment(tmp_path, capsys):
    csv = tmp_path / "stats.csv"
    assert main(["experiment", "--bits", "24", "--u", "2,3", "--sample-size", "5",
                 "--summary-csv", str(csv)]) == 0
    assert "A_lo" in capsys.readouterr().out
    assert list(pd.read_csv(csv)["u"]) == [2.0, 3.0]
