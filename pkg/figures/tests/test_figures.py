import numpy as np
import pytest

from qcollide_figures.cli import main
from qcollide_figures.plots import (
    plot_convergence,
    plot_spectrum_panels,
    plot_veff,
    plot_wavefunction,
)
from qcollide_figures.schemas import SchemaError, read_states

STATES_HEADER = ("index,e_dimensionless,e_ev_above_ground,I0,psi_origin,"
                 "parity_R,is_quasi_collision\n")
SWEEP_HEADER = ("axis,value,ground_e_dimensionless,first_qc_index,"
                "first_qc_excitation_ev,proliferation_ev,seed,grid_hash,"
                "wall_time_s,error\n")
VEFF_HEADER = "R,beta,lambda,v_eff,xi_max\n"


def _states_csv(tmp_path, name="states.csv", n=40, seed=0):
    rng = np.random.default_rng(seed)
    path = tmp_path / name
    with open(path, "w") as f:
        f.write(STATES_HEADER)
        e0 = -2.2
        for j in range(n):
            e = e0 + 0.05 * j
            i0 = float(rng.uniform(0, 1) * (j % 7 == 3))
            f.write(f"{j},{e:.6e},{(e - e0) * 54.4:.6e},{i0:.6e},"
                    f"{i0 * 0.3:.6e},{1 if j % 2 == 0 else -1},"
                    f"{1 if i0 > 0.1 else 0}\n")
    return path


def _sweep_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    with open(path, "w") as f:
        f.write(SWEEP_HEADER)
        for n, e1, e2 in ((40, 150.0, 400.0), (80, 210.0, 480.0), (120, 260.0, 530.0)):
            f.write(f"basis_size,{n},-2.2,12,{e1},{e2},7,abcd1234abcd1234,1.0,\n")
    return path


def _veff_csv(tmp_path):
    path = tmp_path / "veff.csv"
    with open(path, "w") as f:
        f.write(VEFF_HEADER)
        for r in (0.1, 0.3, 1.0, 3.0, 10.0):
            for b in (0, 1):
                lam = -0.3 + 0.1 * b + 0.25 / r
                f.write(f"{r},{b},{lam:.6e},{4 * lam / r:.6e},40\n")
    return path


def _npz(tmp_path, shape=(12, 12)):
    path = tmp_path / "states.npz"
    rng = np.random.default_rng(1)
    np.savez(
        path,
        psi_ground=rng.standard_normal(shape),
        psi_first_qc=rng.standard_normal(shape),
        points_R=np.linspace(-5, 5, shape[0]),
        points_x=np.linspace(-5, 5, shape[1]),
        dump_labels=np.array(["ground", "first_qc"]),
        dump_indices=np.array([0, 9]),
    )
    return path


def test_spectrum_panels(tmp_path):
    bundles = [
        (0.00027, _states_csv(tmp_path, "a.csv", seed=1)),
        (0.01, _states_csv(tmp_path, "b.csv", seed=2)),
        (0.1, _states_csv(tmp_path, "c.csv", seed=3)),
    ]
    out = plot_spectrum_panels(bundles, tmp_path / "panels.png")
    assert (tmp_path / "panels.png").exists()
    assert out.endswith("panels.png")


def test_spectrum_deterministic(tmp_path):
    bundles = [(0.01, _states_csv(tmp_path, "a.csv"))]
    p1 = tmp_path / "one.png"
    p2 = tmp_path / "two.png"
    plot_spectrum_panels(bundles, p1)
    plot_spectrum_panels(bundles, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_spectrum_schema_mismatch_writes_nothing(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("index,energy\n0,1.0\n")
    out = tmp_path / "never.png"
    with pytest.raises(SchemaError):
        plot_spectrum_panels([(0.01, bad)], out)
    assert not out.exists()


def test_spectrum_empty_bundle_fails(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(STATES_HEADER)
    with pytest.raises(SchemaError):
        plot_spectrum_panels([(0.01, empty)], tmp_path / "never.png")
    with pytest.raises(SchemaError):
        plot_spectrum_panels([], tmp_path / "never.png")


def test_wavefunction_heatmaps(tmp_path):
    npz = _npz(tmp_path)
    for label in ("ground", "first_qc"):
        out = tmp_path / f"{label}.png"
        plot_wavefunction(npz, label, out)
        assert out.exists()


def test_wavefunction_missing_label(tmp_path):
    npz = _npz(tmp_path)
    with pytest.raises(SchemaError):
        plot_wavefunction(npz, "nonsense", tmp_path / "never.png")


def test_wavefunction_rejects_3d(tmp_path):
    path = tmp_path / "threed.npz"
    np.savez(path, psi_ground=np.zeros((4, 4, 4)),
             points_R=np.zeros(4), points_x=np.zeros(4))
    with pytest.raises(SchemaError):
        plot_wavefunction(path, "ground", tmp_path / "never.png")


def test_convergence_plot(tmp_path):
    out = tmp_path / "conv.png"
    plot_convergence(_sweep_csv(tmp_path), out)
    assert out.exists()


def test_veff_plot(tmp_path):
    out = tmp_path / "veff.png"
    plot_veff(_veff_csv(tmp_path), out)
    assert out.exists()


def test_cli_spectrum_and_exit_codes(tmp_path):
    states = _states_csv(tmp_path)
    out = tmp_path / "cli.png"
    assert main(["spectrum", "--bundle", f"0.01:{states}",
                 "--out", str(out)]) == 0
    assert out.exists()
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n1\n")
    assert main(["spectrum", "--bundle", f"0.01:{bad}",
                 "--out", str(tmp_path / "never.png")]) == 1
    assert not (tmp_path / "never.png").exists()


def test_cli_all_commands(tmp_path):
    assert main(["wavefunction", "--npz", str(_npz(tmp_path)),
                 "--label", "first_qc", "--out", str(tmp_path / "wf.png")]) == 0
    assert main(["convergence", "--sweep", str(_sweep_csv(tmp_path)),
                 "--out", str(tmp_path / "cv.png")]) == 0
    assert main(["veff", "--veff", str(_veff_csv(tmp_path)),
                 "--out", str(tmp_path / "ve.png")]) == 0


def test_reader_round_trip(tmp_path):
    cols = read_states(_states_csv(tmp_path))
    assert len(cols["index"]) == 40
    assert cols["e_ev_above_ground"][0] == 0.0


def test_figure_request_dispatch(tmp_path):
    from qcollide_figures import FigureRequest, render

    req = FigureRequest(
        kind="spectrum_panels",
        bundles=[(0.01, _states_csv(tmp_path))],
        out_path=str(tmp_path / "req.png"),
    )
    out = render(req)
    assert out.endswith("req.png")
    req_wf = FigureRequest(
        kind="wavefunction", bundles=[_npz(tmp_path)],
        out_path=str(tmp_path / "req_wf.png"),
        options={"label": "first_qc"},
    )
    assert render(req_wf).endswith("req_wf.png")
    with pytest.raises(SchemaError):
        FigureRequest(kind="nope", bundles=[1], out_path="x.png")
    with pytest.raises(SchemaError):
        FigureRequest(kind="veff", bundles=[], out_path="x.png")
