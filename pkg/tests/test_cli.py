import subprocess
import sys

import pytest

from mrqs import cli
from mrqs.factor import Proceed, ShortCircuit, factorize, preflight
from mrqs.squares import Factorization


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_preflight_short_circuits():
    assert preflight(77) == ShortCircuit(((7, 1), (11, 1)))
    assert preflight(2**64) == ShortCircuit(((2, 64),))
    assert preflight(17) == ShortCircuit(((17, 1),))
    assert preflight(10007**2 * 3) == ShortCircuit(((3, 1), (10007, 2)))


def test_preflight_proceeds_on_paper_number():
    assert preflight(1164656837) == Proceed((), 1164656837)
    assert preflight(6 * 1164656837) == Proceed(((2, 1), (3, 1)), 1164656837)


def test_preflight_composite_power():
    n = (33613 * 34649) ** 2
    assert preflight(n) == ShortCircuit(((33613, 2), (34649, 2)))


def test_factorize_mixed():
    f = factorize(12 * 1164656837)
    assert f.factors == ((2, 2), (3, 1), (33613, 1), (34649, 1)) and f.complete


def test_cli_small(capsys):
    assert run(capsys, "77")[:2] == (0, "77 = 7 * 11\n")
    assert run(capsys, "17")[:2] == (0, "17 is prime\n")
    assert run(capsys, str(2**64))[:2] == (0, f"{2**64} = 2^64\n")


@pytest.mark.parametrize("arg", ["abc", "1", "-5"])
def test_cli_bad_input(capsys, arg):
    code, out, err = run(capsys, "--", arg)
    assert code == 1 and out == "" and err


def test_cli_sieve_exhausted_exit_1(capsys):
    code, out, err = run(
        capsys, "117375210056563", "--bound", "60", "--half-width", "20", "--max-rounds", "1"
    )
    assert code == 1
    assert "no factor" in err


def test_cli_partial_exit_2(capsys, monkeypatch):
    partial = Factorization(3 * 1164656837, ((3, 1), (1164656837, 1)), "partial")
    monkeypatch.setattr(cli, "factorize", lambda n, options: partial)
    code, out, _ = run(capsys, str(3 * 1164656837))
    assert code == 2
    assert out == f"{3 * 1164656837} = 3 * 1164656837\n"


def test_cli_stats_and_overrides(capsys, tmp_path):
    code, out, _ = run(
        capsys,
        "1164656837",
        "--bound", "400",
        "--half-width", "3000",
        "--workers", "1",
        "--shard-size", "1000",
        "--record-mode", "value",
        "--workdir", str(tmp_path),
        "--stats",
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "1164656837 = 33613 * 34649"
    stats = dict(line.strip().split(" = ") for line in lines[1:])
    assert stats["smoothness_bound"] == "400"
    # each round doubles M; the low edge stops at x = 1
    m = 3000 * 2 ** (int(stats["rounds"]) - 1)
    c = 34127
    assert int(stats["sieve_size"]) == c + m - max(1, c - m) + 1
    assert (tmp_path / "stats.txt").exists()


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mrqs.cli", "117375210056563", "--workers", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "117375210056563 = 9700247 * 12100229\n"
