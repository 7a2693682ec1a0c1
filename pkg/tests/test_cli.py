import pytest

from dualsig.cli import main


def run(tmp_path, name, args):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out.read_bytes()


class TestLosses:
    def test_reference_row(self, tmp_path):
        code, data = run(tmp_path, "losses.csv",
                         ["losses", "--tau0", "1", "--mu0", "0", "--tauH", "1",
                          "--tauA", "1", "--lambda", "0.5"])
        assert code == 0
        lines = data.decode().splitlines()
        assert lines[0] == "tau0,tauH,tauA,lambda,L_H,L_AI,L_HA_CN,L_HA_Bayes,v_marg,regime"
        assert lines[1] == ("1,1,1,0.5,0.5,0.5,0.444444444444,"
                            "0.428571428571,0.0714285714286,Complementarity")

    def test_impairment_point(self, tmp_path):
        code, data = run(tmp_path, "losses.csv",
                         ["losses", "--tauA", "0.3", "--lambda", "0.67"])
        assert code == 0
        assert data.decode().splitlines()[1].endswith("Impairment")

    def test_infeasible_overlap_exits_2(self, tmp_path, capsys):
        code = main(["losses", "--tauA", "4", "--lambda", "0.5"])
        assert code == 2
        err = capsys.readouterr().err
        assert "feasibility" in err

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["losses", "--tauA", "1"])  # missing --lambda
        assert exc.value.code == 2


class TestThresholds:
    def test_rows(self, tmp_path):
        code, data = run(tmp_path, "thr.csv",
                         ["thresholds", "--lambda", "0", "--lambda", "0.5",
                          "--lambda", "0.67", "--lambda", "0.75"])
        assert code == 0
        lines = data.decode().splitlines()
        assert lines[0] == "lambda,tau_aug,tau_auto,lambda_bar"
        assert lines[1] == "0,-2,,0.75"          # tau_auto blank at lam = 0
        assert lines[2] == "0.5,0,1.41421356237,0.75"
        assert lines[3] == "0.67,0.68,1.10139823,0.75"
        assert lines[4] == "0.75,1,1,0.75"

    def test_lambda_axis_fallback(self, tmp_path):
        code, data = run(tmp_path, "thr.csv",
                         ["thresholds", "--lambda-min", "0.1", "--lambda-max", "0.9",
                          "--lambda-steps", "5"])
        assert code == 0
        assert len(data.decode().splitlines()) == 6


class TestPhase:
    def test_grid_shape_and_flags(self, tmp_path):
        code, data = run(tmp_path, "phase.csv",
                         ["phase", "--tauA-min", "0.2", "--tauA-max", "2.0",
                          "--tauA-steps", "10", "--lambda-min", "0.0",
                          "--lambda-max", "1.0", "--lambda-steps", "6"])
        assert code == 0
        lines = data.decode().splitlines()
        assert lines[0] == "lambda,tauA,feasible,L_H,L_AI,L_HA_CN,L_HA_Bayes,v_marg,regime"
        assert len(lines) == 1 + 10 * 6
        for line in lines[1:]:
            parts = line.split(",")
            lam, tau_a, feasible = float(parts[0]), float(parts[1]), parts[2]
            expected = "1" if lam <= min(1.0, 1.0 / tau_a) else "0"
            assert feasible == expected
            if feasible == "0":
                assert parts[3:] == [""] * 6
            else:
                assert parts[-1] in {"Impairment", "Complementarity", "Automation"}

    def test_lambda_major_ordering(self, tmp_path):
        _, data = run(tmp_path, "phase.csv",
                      ["phase", "--tauA-steps", "3", "--lambda-steps", "2",
                       "--tauA-min", "0.5", "--tauA-max", "1.5",
                       "--lambda-min", "0.0", "--lambda-max", "0.4"])
        rows = [line.split(",")[:2] for line in data.decode().splitlines()[1:]]
        lams = [float(r[0]) for r in rows]
        assert lams == sorted(lams)


class TestSimulate:
    def test_zero_overlap_plan(self, tmp_path):
        code, data = run(tmp_path, "sim.csv",
                         ["simulate", "--n", "500", "--reps", "10", "--k", "0",
                          "--h-total", "0.3", "--seed", "0"])
        assert code == 0
        lines = data.decode().splitlines()
        assert lines[0] == "N,reps,mode,target,mean_err,max_err"
        parts = lines[1].split(",")
        assert parts[:4] == ["500", "10", "homogeneous", "0"]
        assert float(parts[5]) == 0.0

    def test_repeatable_n(self, tmp_path):
        code, data = run(tmp_path, "sim.csv",
                         ["simulate", "--n", "400", "--n", "800", "--reps", "5"])
        assert code == 0
        assert len(data.decode().splitlines()) == 3


class TestVerify:
    def test_voi_suite_passes(self, tmp_path):
        code, data = run(tmp_path, "voi.csv", ["verify", "--suite", "voi"])
        assert code == 0
        lines = data.decode().splitlines()
        assert lines[0] == "suite,check,observed,expected,delta,tol,ok"
        assert all(line.endswith(",1") for line in lines[1:])

    def test_smoke_closed_forms(self, tmp_path):
        code, _ = run(tmp_path, "cf.csv",
                      ["verify", "--suite", "closed_forms", "--n", "2000"])
        assert code == 0


class TestDeterminism:
    @pytest.mark.parametrize("args", [
        ["losses", "--tauA", "0.9", "--lambda", "0.67"],
        ["thresholds", "--lambda", "0.3", "--lambda", "0.7"],
        ["phase", "--tauA-steps", "7", "--lambda-steps", "5"],
        ["simulate", "--n", "1000", "--reps", "8", "--mode", "heterogeneous",
         "--seed", "5"],
        ["verify", "--suite", "gap", "--n", "5000", "--seed", "3"],
    ])
    def test_identical_flags_identical_bytes(self, tmp_path, args):
        _, first = run(tmp_path, "a.csv", list(args))
        _, second = run(tmp_path, "b.csv", list(args))
        assert first == second

    def test_stdout_matches_file(self, tmp_path, capsys):
        args = ["losses", "--tauA", "1.2", "--lambda", "0.4"]
        assert main(args) == 0
        stdout = capsys.readouterr().out
        _, data = run(tmp_path, "c.csv", args)
        assert stdout.encode() == data
