"""Fuzz suites at smoke scale and the CLI surface."""

import subprocess
import sys

import pytest

from adgame.cli import main
from adgame.fuzz import fuzz_implementation, fuzz_lemmas
from adgame.params import solve_params
from adgame.rat import rat

PS = solve_params(rat(3, 4), 12)


def test_lemma_suites_smoke():
    for rep in fuzz_lemmas(PS, 300, seed=7):
        assert rep.ok, rep.describe()


def test_lemma_suites_reject_toy_params():
    from adgame.params import toy_params
    with pytest.raises(ValueError):
        fuzz_lemmas(toy_params(), 10)


def test_implementation_fuzz_smoke():
    rep = fuzz_implementation(PS, 25, seed=123)
    assert rep.ok, rep.describe() + repr(rep.violations[:3])
    assert rep.big_moves >= 25


def test_cli_params(capsys):
    assert main(["params", "--xi", "3/4", "--kappa", "12"]) == 0
    out = capsys.readouterr().out
    assert "Q=97" in out and "constraints hold" in out


def test_cli_play_and_verify(tmp_path, capsys):
    trace = tmp_path / "t.trace"
    rc = main(["play", "--devil", "random", "--seed", "3",
               "--horizon", "120", "--trace-out", str(trace)])
    assert rc == 0
    assert main(["verify", str(trace)]) == 0
    out = capsys.readouterr().out
    assert "zero violations" in out


def test_cli_fuzz_small(capsys):
    rc = main(["fuzz", "--suite", "lemmas", "--trials", "100", "--seed", "5"])
    assert rc == 0


def test_cli_entrypoint_subprocess():
    r = subprocess.run([sys.executable, "-m", "adgame.cli", "params"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "Q=97" in r.stdout
