import csv

import numpy as np
import pytest

import hsicssl.hsic
from hsicssl.cli import main
from hsicssl.errors import DivergenceError
from hsicssl.experiment import read_records
from hsicssl.runconfig import load_run_config
from hsicssl.synthgen import export_dataset, generate_from_config
from hsicssl.trainer import build_model, extract_features, linear_probe

MINIMAL = """
# minimal desk run
classes = 4
samples = 512
projector_dim = 8
batch_size = 64
epochs = 30
loss = barlow_twins
lambda = 1/d
seed = 1
"""

TINY_SWEEP = """
axis = projector_dim
values = 8,32,128
repeats = 3
both_losses = true
samples = 128
batch_size = 32
epochs = 2
encoder_hidden = 16
projector_hidden =
seed = 2
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_train_minimal_config(tmp_path):
    cfg = write(tmp_path, "run.cfg", MINIMAL)
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    rows = read_rows(tmp_path / "out" / "results.csv")
    assert len(rows) == 1
    assert rows[0]["status"] == "ok"
    assert np.isfinite(float(rows[0]["accuracy"]))
    ckpt = tmp_path / "out" / "checkpoints" / f"{rows[0]['run_id']}.npz"
    assert ckpt.exists()


def test_train_both_losses_close(tmp_path):
    cfg_bt = write(tmp_path, "bt.cfg", MINIMAL)
    cfg_h = write(tmp_path, "h.cfg", MINIMAL.replace("barlow_twins", "hsic_ssl"))
    out = str(tmp_path / "out")
    assert main(["train", "--config", str(cfg_bt), "--out", out]) == 0
    assert main(["train", "--config", str(cfg_h), "--out", out]) == 0
    rows = read_rows(tmp_path / "out" / "results.csv")
    accs = [float(r["accuracy"]) for r in rows]
    # the full-size bound lives in the acceptance suite
    assert abs(accs[0] - accs[1]) <= 0.15


def test_train_zero_lr_equals_untrained_probe(tmp_path):
    cfg_path = write(tmp_path, "run.cfg",
                     MINIMAL.replace("epochs = 30", "epochs = 1")
                     + "learning_rate = 0.0\n")
    out = tmp_path / "out"
    assert main(["train", "--config", str(cfg_path), "--out", str(out)]) == 0
    row = read_rows(out / "results.csv")[0]

    cfg = load_run_config(cfg_path)
    ds = generate_from_config(cfg.gen_config(), cfg.data_seed_)
    model = build_model(cfg.encoder_config())  # untrained weights
    feats = extract_features(model, ds.view_a)
    probe = linear_probe(feats, ds.labels, cfg.train_fraction,
                         cfg.probe_epochs, cfg.probe_seed_)
    assert float(row["accuracy"]) == probe.accuracy


def test_invalid_config_key_names_field(tmp_path, capsys):
    cfg = write(tmp_path, "bad.cfg", "bogus = 3\n")
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "bogus" in capsys.readouterr().err


def test_invalid_config_value_names_field(tmp_path, capsys):
    cfg = write(tmp_path, "bad.cfg", "epochs = abc\n")
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert "epochs" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["train", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(tmp_path)]) == 1


def test_divergence_exit_code_and_flagged_record(tmp_path, monkeypatch):
    import hsicssl.experiment as exp_mod
    monkeypatch.setattr(exp_mod, "train",
                        lambda *a, **k: (_ for _ in ()).throw(DivergenceError(1)))
    cfg = write(tmp_path, "run.cfg", MINIMAL)
    out = tmp_path / "out"
    assert main(["train", "--config", str(cfg), "--out", str(out)]) == 2
    row = read_rows(out / "results.csv")[0]
    assert row["status"] == "diverged"
    assert row["accuracy"] == "nan"


def test_sweep_cross_product_row_count(tmp_path):
    plan = write(tmp_path, "plan.cfg", TINY_SWEEP)
    out = tmp_path / "out"
    assert main(["sweep", "--plan", str(plan), "--out", str(out),
                 "--plot", "--jobs", "2"]) == 0
    rows = read_rows(out / "sweep_results.csv")
    assert len(rows) == 18  # 3 axis values x 2 losses x 3 repeats
    assert {r["loss"] for r in rows} == {"barlow_twins", "hsic_ssl"}
    assert sorted({r["projector_dim"] for r in rows}) == ["128", "32", "8"]
    assert all(r["status"] == "ok" for r in rows)
    svg = (out / "sweep_projector_dim.svg").read_text()
    assert "barlow_twins" in svg and "hsic_ssl" in svg  # one series per loss


def test_epochs_sweep_rerun_is_bit_reproducible(tmp_path):
    plan = write(tmp_path, "plan.cfg", TINY_SWEEP
                 .replace("axis = projector_dim", "axis = epochs")
                 .replace("values = 8,32,128", "values = 1,3")
                 .replace("epochs = 2", "projector_dim = 4"))
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["sweep", "--plan", str(plan), "--out", str(out1), "--plot"]) == 0
    assert main(["sweep", "--plan", str(plan), "--out", str(out2), "--plot"]) == 0
    rows1 = read_rows(out1 / "sweep_results.csv")
    rows2 = read_rows(out2 / "sweep_results.csv")
    assert [r["accuracy"] for r in rows1] == [r["accuracy"] for r in rows2]
    assert [r["loss_trajectory"] for r in rows1] == [r["loss_trajectory"] for r in rows2]
    svg1 = (out1 / "sweep_epochs.svg").read_bytes()
    svg2 = (out2 / "sweep_epochs.svg").read_bytes()
    assert svg1 == svg2


def test_batch_size_sweep_with_lambda_rule(tmp_path):
    plan = write(tmp_path, "plan.cfg", TINY_SWEEP
                 .replace("axis = projector_dim", "axis = batch_size")
                 .replace("values = 8,32,128", "values = 8,16")
                 .replace("repeats = 3", "repeats = 1")
                 .replace("batch_size = 32", "projector_dim = 4"))
    out = tmp_path / "out"
    assert main(["sweep", "--plan", str(plan), "--out", str(out), "--plot"]) == 0
    rows = read_rows(out / "sweep_results.csv")
    assert len(rows) == 4  # 2 batch sizes x 2 losses
    assert sorted({r["batch_size"] for r in rows}) == ["16", "8"]
    assert {r["lambda"] for r in rows} == {"1/d"}  # rule rides along the sweep
    svg = (out / "sweep_batch_size.svg").read_text()
    assert svg.count("<polyline") == 2  # one series per loss


def test_run_ids_hash_the_config(tmp_path):
    from hsicssl.experiment import run_id_for
    from hsicssl.runconfig import RunConfig
    a = run_id_for(RunConfig(seed=1))
    b = run_id_for(RunConfig(seed=1))
    c = run_id_for(RunConfig(seed=2))
    assert a == b
    assert a != c


def test_sweep_invalid_axis(tmp_path, capsys):
    plan = write(tmp_path, "plan.cfg", "axis = width\nvalues = 1,2\n")
    assert main(["sweep", "--plan", str(plan), "--out", str(tmp_path)]) == 1
    assert "axis" in capsys.readouterr().err


def test_verify_passes_and_writes_report(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "[FAIL]" not in out
    rows = read_rows(tmp_path / "verify_report.csv")
    assert len(rows) >= 6  # distinct check families
    assert all(r["passed"] == "True" for r in rows)


def test_verify_negative_control(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(hsicssl.hsic, "_fast_path_bias", 1e-3)
    assert main(["verify", "--out", str(tmp_path)]) == 3
    out = capsys.readouterr().out
    assert "[FAIL] linear_hsic_frobenius_identity" in out


def test_eval_reproduces_training_accuracy(tmp_path):
    cfg = write(tmp_path, "run.cfg", MINIMAL)
    out = tmp_path / "out"
    assert main(["train", "--config", str(cfg), "--out", str(out)]) == 0
    row = read_rows(out / "results.csv")[0]
    ckpt = out / "checkpoints" / f"{row['run_id']}.npz"
    # dataset + probe settings come from the config embedded in the checkpoint
    assert main(["eval", "--checkpoint", str(ckpt), "--out", str(out)]) == 0
    eval_row = read_rows(out / "eval_results.csv")[0]
    assert eval_row["accuracy"] == row["accuracy"]
    assert eval_row["run_id"] == row["run_id"]


def test_eval_is_loss_agnostic(tmp_path):
    cfg_h = write(tmp_path, "h.cfg", MINIMAL.replace("barlow_twins", "hsic_ssl"))
    cfg_bt = write(tmp_path, "bt.cfg", MINIMAL)
    out = tmp_path / "out"
    assert main(["train", "--config", str(cfg_h), "--out", str(out)]) == 0
    row = read_rows(out / "results.csv")[0]
    ckpt = out / "checkpoints" / f"{row['run_id']}.npz"
    # checkpoint trained with hsic_ssl, evaluated under the barlow_twins config
    assert main(["eval", "--checkpoint", str(ckpt), "--config", str(cfg_bt),
                 "--out", str(out)]) == 0


def test_eval_unlabeled_dataset_rejected(tmp_path, capsys):
    cfg = write(tmp_path, "run.cfg", MINIMAL)
    out = tmp_path / "out"
    assert main(["train", "--config", str(cfg), "--out", str(out)]) == 0
    row = read_rows(out / "results.csv")[0]
    ckpt = out / "checkpoints" / f"{row['run_id']}.npz"

    cfg_obj = load_run_config(cfg)
    ds = generate_from_config(cfg_obj.gen_config(), cfg_obj.data_seed_)
    from hsicssl.synthgen import TwoViewDataset
    unlabeled = TwoViewDataset(ds.view_a.copy(), ds.view_b.copy(), None)
    paths = export_dataset(unlabeled, tmp_path / "data")
    assert main(["eval", "--checkpoint", str(ckpt),
                 "--view-a", str(paths["view_a"]),
                 "--view-b", str(paths["view_b"]),
                 "--out", str(out)]) == 1
    assert "labels required" in capsys.readouterr().err


def test_eval_bad_checkpoint_version(tmp_path, capsys):
    path = tmp_path / "bad.npz"
    np.savez(path, format_version=np.array("other-format"))
    assert main(["eval", "--checkpoint", str(path), "--out", str(tmp_path)]) == 1
    assert "version" in capsys.readouterr().err


def test_out_dir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("HSICSSL_OUT_DIR", str(tmp_path / "envout"))
    assert main(["verify"]) == 0
    assert (tmp_path / "envout" / "verify_report.csv").exists()


def test_seed_flag_overrides_config(tmp_path):
    cfg = write(tmp_path, "run.cfg", MINIMAL)
    out = tmp_path / "out"
    assert main(["train", "--config", str(cfg), "--out", str(out),
                 "--seed", "77"]) == 0
    row = read_rows(out / "results.csv")[0]
    assert row["seed"] == "77"
    assert row["data_seed"] == ""  # derived, not pinned


def test_usage_error_exit_code():
    assert main(["train"]) == 1           # missing --config
    assert main(["frobnicate"]) == 1      # unknown subcommand


def test_results_round_trip_through_records(tmp_path):
    cfg = write(tmp_path, "run.cfg", MINIMAL)
    out = tmp_path / "out"
    assert main(["train", "--config", str(cfg), "--out", str(out)]) == 0
    records = read_records(out / "results.csv")
    assert len(records) == 1
    rec = records[0]
    assert rec.config.samples == 512
    assert rec.config.lam == "1/d"
    assert rec.status == "ok"
