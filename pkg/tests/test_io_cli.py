import json
from fractions import Fraction

import numpy as np
import pytest

from hosync import io
from hosync.cli import run_cli
from hosync.metrics import SyncEstimate, Verdict
from hosync.model import STRONG_SWITCH_1, WEAK_SWITCH_1
from hosync.sweep import SweepMap


class TestConfig:
    def test_defaults(self):
        cfg = io.resolve_config({})
        net = io.network_config(cfg)
        assert net.n == 2
        assert net.oscillators[0].supply_current == pytest.approx(720e-6)
        assert net.delta_fwd == (0.5,)

    def test_presets(self):
        s = io.network_config(io.resolve_config({"preset": "strong_pair"}))
        assert s.oscillators[0].switch == STRONG_SWITCH_1
        assert s.oscillators[1].switch.u_th == 5.4
        w = io.network_config(io.resolve_config({"preset": "weak_pair"}))
        assert w.oscillators[0].switch == WEAK_SWITCH_1
        assert w.oscillators[0].switch.r_off == 13e3
        assert w.delta_fwd == (0.1,) and w.noise_amplitude == 0.02

    @pytest.mark.parametrize("raw,match", [
        ({"noise_amplitud": 0.1}, "noise_amplitud"),
        ({"analyzer": {"eta": 80}}, "analyzer.eta"),
        ({"preset": "medium_pair"}, "medium_pair"),
        ({"delta": -1.0}, "coupling"),
        ({"analyzer": {"eta_threshold": 0}}, "eta_threshold"),
        ({"switches": [{"i_th_uA": 1}] * 2}, "lacks"),
    ])
    def test_strict(self, raw, match):
        with pytest.raises(io.ConfigError, match=match):
            io.resolve_config(raw)

    def test_units(self):
        cfg = io.resolve_config({"currents_uA": [725, 800], "sweep": {"i1_range_uA": [700, 800, 50]}})
        assert io.network_config(cfg).oscillators[1].supply_current == pytest.approx(800e-6)
        sc = io.sweep_config(cfg)
        assert sc.resolved_range(0) == pytest.approx((700e-6, 800e-6, 50e-6))

    def test_chain_config(self):
        cfg = io.resolve_config({"chain": {"n": 5, "currents_uA": [700, 710, 720, 730, 740]}})
        c = io.chain_config(cfg)
        assert c.n == 5 and c.currents[4] == pytest.approx(740e-6)


class TestFiles:
    def test_spike_train_round_trip(self, tmp_path):
        t = np.array([0.1, 0.1 + 1e-17, 1 / 3, 0.7000000000000001])
        io.write_spike_train(tmp_path / "a.spk", t)
        np.testing.assert_array_equal(io.read_spike_train(tmp_path / "a.spk"), t)

    def test_record_round_trip(self, tmp_path):
        est = SyncEstimate(Verdict.SYNCHRONIZED, Fraction(3, 2), (3, 2), 96.5, epoch_count=40)
        io.write_record(tmp_path / "r.csv", est.as_record())
        back = io.record_basis(io.read_record(tmp_path / "r.csv"))
        assert back.shr == Fraction(3, 2) and back.eta == 96.5 and back.synchronized

    def test_map_round_trip(self, tmp_path):
        m = SweepMap.empty([700e-6, 710e-6], [720e-6])
        m.verdict[:, 0] = ["SYNCHRONIZED", "ERROR"]
        m.m1[0, 0], m.m2[0, 0], m.eta[0, 0] = 2, 3, 97.25
        m.ranges = ((700e-6, 710e-6, 10e-6), (720e-6, 720e-6, 10e-6))
        io.write_map(tmp_path / "m.csv", m)
        text = (tmp_path / "m.csv").read_text()
        assert text.startswith("# i1: 700 710 10\n# i2: 720 720 10\n")
        back = io.read_map(tmp_path / "m.csv")
        np.testing.assert_array_equal(back.verdict, m.verdict)
        assert back.shr(0, 0) == Fraction(2, 3) and back.eta[0, 0] == 97.25


def run(tmp_path, *args):
    return run_cli(list(args))


class TestCli:
    def test_capacity(self, capsys):
        assert run_cli(["capacity", "--m", "20"]) == 0
        assert capsys.readouterr().out.strip() == "N_S=255 W_C=256"

    def test_simulate_deterministic(self, tmp_path):
        cfg = tmp_path / "pair.json"
        cfg.write_text(json.dumps({"duration": 0.06, "transient": 0.01, "noise_amplitude": 0.02,
                                   "sample_traces": True, "trace_every": 10}))
        for d in ("a", "b"):
            assert run_cli(["simulate", "--config", str(cfg), "--seed", "7", "--out", str(tmp_path / d)]) == 0
        for name in ("osc1.spk", "osc2.spk", "traces.csv", "manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        header = (tmp_path / "a" / "traces.csv").read_text().splitlines()[0]
        assert header == "time_s,osc1_u_V,osc1_i_A,osc2_u_V,osc2_i_A"

    def test_manifest_rerun(self, tmp_path):
        assert run_cli(["simulate", "--duration", "0.05", "--transient", "0.01", "--seed", "3",
                        "--out", str(tmp_path / "a")]) == 0
        man = io.RunManifest.read(tmp_path / "a" / "manifest.json")
        assert man.subcommand == "simulate" and man.base_seed == 3
        assert run_cli(["simulate", "--config", str(tmp_path / "a" / "manifest.json"),
                        "--out", str(tmp_path / "b")]) == 0
        for name in man.outputs + ["manifest.json"]:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_analyze_three_two(self, tmp_path, capsys):
        a = np.arange(0, 61) * 2e-3
        b = np.arange(0, 41) * 3e-3
        io.write_spike_train(tmp_path / "a.spk", a)
        io.write_spike_train(tmp_path / "b.spk", b)
        assert run_cli(["analyze", "--a", str(tmp_path / "a.spk"), "--b", str(tmp_path / "b.spk"),
                        "--out", str(tmp_path)]) == 0
        rec = io.read_record(tmp_path / "sync.csv")
        assert rec["shr"] == "3/2" and rec["verdict"] == "SYNCHRONIZED"

    def test_logic(self, tmp_path, capsys):
        (tmp_path / "r.csv").write_text("num,den\n1,4\n")
        assert run_cli(["logic", "--record", str(tmp_path / "r.csv"), "--rule", "DECIMAL_RULE"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "bit,rule,num,den,eta" and out[1].startswith("1,DECIMAL_RULE,1,4")

    def test_sweep_small(self, tmp_path, capsys):
        args = ["sweep", "--duration", "0.1", "--set", "sweep.i1_range_uA=[700,720,10]",
                "--set", "sweep.i2_range_uA=[700,710,10]", "--out", str(tmp_path)]
        assert run_cli(args) == 0
        m = io.read_map(tmp_path / "map.csv")
        assert m.shape == (3, 2)
        summary = (tmp_path / "summary.csv").read_text().splitlines()
        assert summary[0] == "shr,psi_percent" and summary[-1].startswith("N_S,")

    def test_chain_small(self, tmp_path, capsys):
        args = ["chain", "--duration", "0.1", "--set", "chain.n=3", "--out", str(tmp_path)]
        assert run_cli(args) == 0
        assert "end_to_end shr=1" in capsys.readouterr().out

    def test_bad_key_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps({"nosie_amplitude": 0.02}))
        assert run_cli(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 2
        assert "nosie_amplitude" in capsys.readouterr().err
