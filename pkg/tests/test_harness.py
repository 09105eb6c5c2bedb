import json

import numpy as np
import pytest

from erm_spectra import VectorFamily
from erm_spectra.errors import ConfigurationError, DataFormatError, InequalityViolation
from erm_spectra.harness import (ExperimentConfig, analyze_dataset, emit_histogram, isotropize,
                                 read_dataset_csv, run_experiment, write_dataset_csv)
from erm_spectra.kernels import exponential
from erm_spectra.laws import LimitLaw
from erm_spectra.samplers import sample_data_matrix, trial_rng
from erm_spectra.spectral import esd


def small(**kw):
    base = dict(family="gaussian", kernel="exponential", n_list=[20, 40], y=1.0, trials=2, seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation(tmp_path):
    with pytest.raises(ConfigurationError):
        small(n_list=[40, 20])
    with pytest.raises(ConfigurationError):
        small(y=0)
    with pytest.raises(ConfigurationError):
        small(trials=0)
    with pytest.raises(ConfigurationError):
        small(kernel="bogus")
    with pytest.raises(ValueError):
        small(family="cauchy")
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_dict({"family": "gaussian", "colour": "red"})
    assert small().epsilon_for(256) == pytest.approx(0.5)
    assert small(y=0.5).dimension(41) == 20


def test_config_files(tmp_path):
    (tmp_path / "c.yaml").write_text("family: laplace\nn_list: [10, 30]\ny: 2\nkernel: {name: poly, coeffs: [1, 1]}\n")
    cfg = ExperimentConfig.from_file(tmp_path / "c.yaml")
    assert cfg.family == "laplace" and cfg.n_list == [10, 30] and cfg.dimension(10) == 20
    (tmp_path / "c.json").write_text(json.dumps(cfg.as_dict()))
    assert ExperimentConfig.from_file(tmp_path / "c.json").as_dict() == cfg.as_dict()
    (tmp_path / "bad.json").write_text("[1, 2]")
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_file(tmp_path / "bad.json")


def test_run_experiment_outputs(tmp_path):
    rep = run_experiment(small(out=str(tmp_path)))
    assert len(rep.trials) == 4 and set(rep.aggregates) == {"20", "40"}
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["schema_version"] == 1 and data["config"]["n_list"] == [20, 40]
    assert data == json.loads(rep.to_json())
    rows = (tmp_path / "eigenvalues_n40.csv").read_text().splitlines()
    assert len(rows) == 2 and len(rows[0].split(",")) == 41
    # the CSV reproduces the eigenvalues exactly
    t0 = np.array([float(v) for v in rows[0].split(",")[1:]])
    assert np.all(np.diff(t0) >= 0)
    hist = (tmp_path / "histogram_n20.tsv").read_text().splitlines()
    assert hist[0] == "bin_center\tempirical_density\tpredicted_density" and len(hist) == 61
    rec = rep.trials_for(20)[0]
    assert set(rec["chain_w2"]) == {"A-B", "B-C", "C-D", "D-E", "E-M"}
    assert rec["chain_triangle"]["holds"] and not rec["violations"]


def test_determinism_and_threads():
    a = run_experiment(small(), write=False)
    b = run_experiment(small(threads=2), write=False)
    assert a.trials == b.trials and a.aggregates == b.aggregates
    c = run_experiment(small(seed=4), write=False)
    assert c.trials[0]["A_vs_law"] != a.trials[0]["A_vs_law"]


def test_histogram_integrates_to_one():
    law = LimitLaw.for_kernel(exponential(), 0.5)
    pts = law.quantile((np.arange(300) + 0.5) / 300)
    rows = np.array(emit_histogram(esd(pts), law, 40))
    width = rows[1, 0] - rows[0, 0]
    assert np.sum(rows[:, 1]) * width == pytest.approx(1.0)
    assert np.sum(rows[:, 2]) * width == pytest.approx(1.0)
    atom_bin = np.argmin(np.abs(rows[:, 0] - law.atom_location))
    assert rows[atom_bin, 2] * width >= 0.5
    with pytest.raises(ValueError):
        emit_histogram(esd(pts), law, 0)


def test_analyze_dataset_matches_simulated_trial(tmp_path):
    cfg = small(n_list=[30], trials=1, y=0.5)
    rep = run_experiment(cfg, write=False)
    X = sample_data_matrix(VectorFamily("gaussian", cfg.dimension(30)), 30, trial_rng(cfg.seed, 30, 0))
    write_dataset_csv(tmp_path / "d.csv", X)
    assert np.array_equal(read_dataset_csv(tmp_path / "d.csv"), X)
    got = analyze_dataset(tmp_path / "d.csv", kernel="exponential", rescale=False,
                          epsilon=cfg.epsilon_for(30), out=tmp_path / "out")
    for key in ("A_vs_law", "M_vs_law", "A_vs_M", "gram_vs_mp", "chain_w2"):
        assert got.trials[0][key] == rep.trials[0][key]
    assert (tmp_path / "out" / "report.json").exists()


def test_bad_csv(tmp_path):
    cases = {"ragged.csv": "1,2\n3\n", "text.csv": "1,a\n2,3\n", "one.csv": "1,2\n",
             "inf.csv": "1,inf\n2,3\n"}
    for name, text in cases.items():
        (tmp_path / name).write_text(text)
        with pytest.raises(DataFormatError):
            read_dataset_csv(tmp_path / name)


def test_constant_column_warning(tmp_path):
    r = np.random.default_rng(0)
    X = r.standard_normal((3, 25))
    X[1] = 4.0
    X2, warnings = isotropize(X, center=True)
    assert len(warnings) == 1 and "[1]" in warnings[0]
    assert np.all(X2[1] == 0.0)
    assert np.allclose(X2[[0, 2]].var(axis=1), 1 / 3)
    write_dataset_csv(tmp_path / "c.csv", X)
    assert analyze_dataset(tmp_path / "c.csv", center=True).warnings == warnings


def test_violation_raises_after_writing(tmp_path, monkeypatch):
    import erm_spectra.harness as h

    monkeypatch.setattr(h, "INEQUALITY_SLACK", -1.0)
    with pytest.raises(InequalityViolation):
        run_experiment(small(n_list=[10], trials=1, out=str(tmp_path)))
    assert json.loads((tmp_path / "report.json").read_text())["violations"]
