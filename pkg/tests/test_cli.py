import json

import pytest

from busybeaver import cli
from busybeaver.pipeline import data_path
from busybeaver.repwl import decide_repwl
from busybeaver.verdict import NONHALT

FAR_TM = "1RB0LD_1LC1RA_0RB0LC_---1LA"
REPWL_LEFT = "1RB1LA_1LA0RC_1LD1RC_---0LA"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_decide_two_state_winner(capsys):
    code, out, err = run(capsys, "decide", "--machine", "1RB1LB_1LA1RZ", "--pipeline", "s2")
    assert (code, out) == (0, "halt,LOOP1_params_107,steps=6\n")
    assert "sigma=4" in err


def test_decide_unknown_exits_one(capsys):
    code, out, _ = run(capsys, "decide", "--machine", "1RB1LC_1RC1RB_1RD0LE_1LA1LD_---0LA",
                       "--pipeline", "s2")
    assert code == 1 and out.startswith("unknown")


def test_verify_far(capsys):
    code, out, _ = run(capsys, "verify-far", "--machine", FAR_TM,
                       "--cert", str(data_path("far_example.json")))
    assert (code, out) == (0, "Verified\n")


def test_verify_far_wrong_machine(capsys):
    code, out, _ = run(capsys, "verify-far", "--machine", "1RB0LD_1LC1RA_0RB0LC_1RA1LA",
                       "--cert", str(data_path("far_example.json")))
    assert code == 1 and out.startswith("Failed(")


def test_verify_wfar(capsys):
    path = data_path("wfar_example.json")
    machine = json.loads(path.read_text())["machine"]
    code, out, _ = run(capsys, "verify-wfar", "--machine", machine, "--cert", str(path),
                       "--show-classes")
    assert code == 0 and out.splitlines()[0] == "Verified"
    assert "  [p2] C1 [q0]; W>=1" in out.splitlines()


def test_simulate_winner(capsys):
    code, out, _ = run(capsys, "simulate", "--machine", "1RB1LB_1LA1RZ")
    assert (code, out) == (0, "halt,steps=6,sigma=4,space=4\n")
    code, out, _ = run(capsys, "simulate", "--machine", "1RB1LC_1RC1RB_1RD0LE_1LA1LD_---0LA",
                       "--max-steps", "1000")
    assert (code, out) == (1, "running,steps=1000\n")


def test_normalize(capsys):
    code, out, _ = run(capsys, "normalize", "--machine", "1RC1LC_------_1LA1RZ")
    assert (code, out) == (0, "1RB1LB_1LA---_------\n")


def test_normalize_one_rb(capsys):
    code, out, _ = run(capsys, "normalize", "--1rb", "--machine",
                       "0RB0LD_1RC1RE_1LA1RC_1LC1LD_---0RB")
    assert code == 0 and out.startswith("1RB")


def test_render(capsys, tmp_path):
    out = tmp_path / "d.ppm"
    code, _, _ = run(capsys, "render", "--machine", "1RB1LB_1LA1RZ", "--steps", "45",
                     "--width", "30", "--colored", "--out", str(out))
    assert code == 0 and out.read_bytes().startswith(b"P6\n30 6\n")


def test_search_repwl_grid(capsys):
    code, out, _ = run(capsys, "search", "repwl-grid", "--machine", REPWL_LEFT, "--l-max", "4",
                       "--t-max", "3", "--max-nodes", "10000")
    assert code == 0
    l, T = (int(x.split("=")[1]) for x in out.split())
    assert l <= 4 and T <= 3
    assert decide_repwl(REPWL_LEFT, l, T, 320, 10_000).kind == NONHALT


def test_search_far(capsys, tmp_path):
    path = tmp_path / "c.json"
    code, _, _ = run(capsys, "search", "far", "--machine", FAR_TM, "--out", str(path))
    assert code == 0
    code, out, _ = run(capsys, "verify-far", "--machine", FAR_TM, "--cert", str(path))
    assert (code, out) == (0, "Verified\n")


@pytest.mark.parametrize("argv", [
    ["decide", "--machine", "1RB1LB_1XA1RZ"],
    ["decide"],
    ["bogus"],
    ["decide", "--machine", "1RB1LB_1LA1RZ", "--pipeline", "no-such-pipeline"],
])
def test_usage_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as e:
        code = cli.main(argv)
        raise SystemExit(code)
    assert e.value.code == 2


def test_enumerate_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path, jobs in ((a, "1"), (b, "2")):
        code, out, _ = run(capsys, "enumerate", "--pipeline", "s3", "--out", str(path),
                           "--jobs", jobs)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 5417
    assert "21" in out


def test_jobs_env(monkeypatch):
    monkeypatch.setenv(cli.JOBS_ENV, "3")
    assert cli.default_jobs() == 3
