import csv
import json

import numpy as np
import pytest

from linecont import io
from linecont.cli import main
from linecont.curve import circle, parse_curve
from linecont.errors import SpecError
from linecont.slices import classify_point2


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_complex():
    assert io.parse_complex("3+0i") == 3
    assert io.parse_complex("3,0") == 3
    assert io.parse_complex("-1.5,2") == complex(-1.5, 2)
    assert io.parse_complex("2.5j") == 2.5j
    with pytest.raises(SpecError):
        io.parse_complex("three")
    with pytest.raises(SpecError):
        io.parse_point("1,2,3")


def test_fmt_roundtrips():
    for x in (0.1, 1 / 3, -2.5e-300, 1e17 + 2):
        assert float(io.fmt(x)) == x


def test_geometry_gamma(tmp_path):
    out = tmp_path / "gamma.csv"
    assert main(["geometry", "--curve", "circle:1", "--z", "3+0i", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "theta,re,im,d_re,d_im,loop"
    tags = {r["loop"] for r in rows(out)}
    assert tags == {"gamma_minus", "gamma_plus"}


def test_geometry_kc_degenerate(tmp_path):
    out = tmp_path / "kc.csv"
    assert main(["geometry", "--curve", "circle:1", "--c", "25+0i", "--out", str(out)]) == 0
    data = rows(out)
    assert {r["loop"] for r in data} == {"kc_plus", "kc_minus"}
    r = np.array([abs(complex(float(d["re"]), float(d["im"]))) for d in data])
    assert np.max(np.abs(r - 5.0)) <= 1e-10


def test_geometry_multiple_targets_and_raster(tmp_path):
    out, ras = tmp_path / "g.csv", tmp_path / "r.csv"
    code = main(["geometry", "--z", "3,0", "--w", "0,5", "--c", "0,25", "--raster", "6",
                 "--raster-out", str(ras), "--out", str(out)])
    assert code == 0
    tags = {r["loop"] for r in rows(out)}
    assert {"gamma_minus#0", "zslice_plus#1", "kc_minus#2"} <= tags
    labels = rows(ras)
    assert len(labels) == 36
    assert set(labels[0]) == {"re_z", "im_z", "re_w", "im_w", "label"}


def test_geometry_curvature_violation(tmp_path, capsys):
    out = tmp_path / "bad.csv"
    code = main(["geometry", "--curve", "fourier:1,0,0,0.9", "--z", "3", "--out", str(out)])
    assert code != 0
    assert "CurvatureViolation" in capsys.readouterr().err
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []


def test_geometry_needs_target(capsys):
    assert main(["geometry"]) == 2


def test_extend_examples(tmp_path, capsys):
    out = tmp_path / "e.csv"
    code = main(["extend", "--curve", "circle:1", "--truth", "poly:1,1,1,0",
                 "--at", "5,0,0,0", "--at", "0.4,0,0.5,0", "--out", str(out)])
    assert code == 0
    first, second = rows(out)
    assert first["method"] == "CauchyMinus" and first["status"] == "ok"
    assert abs(complex(float(first["re_F"]), float(first["im_F"]))) <= 1e-11
    assert second["status"] == "UnreachablePoint" and second["label"] == "OmegaZero"
    assert "CauchyMinus=1" in capsys.readouterr().err


def test_extend_fallback(tmp_path):
    out = tmp_path / "e.csv"
    code = main(["extend", "--truth", "poly:1,1,1,0", "--at", "0.4,0,0.5,0",
                 "--fallback-degree", "2", "--out", str(out)])
    assert code == 0
    [row] = rows(out)
    assert row["method"] == "GlobalFit"
    assert float(row["re_F"]) == pytest.approx(0.2, abs=1e-8)


def test_extend_grid_summary(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert main(["extend", "--truth", "exp:0.3,0,0.2,0", "--grid", "default", "--out", str(out)]) == 0
    summary = capsys.readouterr().err
    max_err = float(summary.split("max_err_est=")[1])
    assert max_err <= 1e-6
    assert all(r["status"] == "ok" for r in rows(out))


def test_extend_roundtrip_and_determinism(tmp_path):
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    args = ["extend", "--curve", "ellipse:2,1", "--truth", "poly:1,1,1,0", "--grid", "default",
            "--grid-size", "3", "--seed", "4"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    # re-ingesting the emitted points reproduces the labels
    assert main(["extend", "--curve", "ellipse:2,1", "--truth", "poly:1,1,1,0",
                 "--points", str(a), "--out", str(c)]) == 0
    assert [r["label"] for r in rows(a)] == [r["label"] for r in rows(c)]
    curve = parse_curve("ellipse:2,1")
    for r in rows(a):
        z = complex(float(r["re_z"]), float(r["im_z"]))
        w = complex(float(r["re_w"]), float(r["im_w"]))
        assert classify_point2(curve, z, w).label == r["label"]


def test_extend_needs_field_and_points():
    assert main(["extend", "--at", "5,0,0,0"]) == 2
    assert main(["extend", "--truth", "poly:0,0,1,0"]) == 2
    assert main(["extend", "--truth", "bogus:1", "--at", "5,0,0,0"]) == 2


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as info:
        main(["extend", "--bogus", "1"])
    assert info.value.code == 2


def test_range_test_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    assert main(["range-test", "--truth", "poly:1,1,1,0", "--out", str(good)]) == 0
    doc = json.loads(good.read_text())
    assert doc["aggregate_pass"] is True and doc["curve"] == "circle:1"
    capsys.readouterr()
    bad = tmp_path / "bad.json"
    assert main(["range-test", "--truth", "poly:1,1,1,0", "--corrupt", "1e-3", "--out", str(bad)]) == 1
    assert "FAIL z=" in capsys.readouterr().err
    assert any(not e["pass"] for e in json.loads(bad.read_text())["entries"])


def test_range_test_empty_set(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["range-test", "--truth", "poly:1,1,1,0", "--nmax", "0", "--z-set", "empty",
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["warnings"]


def test_range_test_custom_set_and_usage(tmp_path):
    out = tmp_path / "r.json"
    assert main(["range-test", "--truth", "exp:0.3,0,0.2,0", "--z-set", "3,0;0,3",
                 "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["entries"]) == 2 * 9
    assert main(["range-test", "--truth", "poly:0,0,1,0", "--nmax", "-1"]) == 2
    assert main(["range-test", "--curve", "circle:-1", "--truth", "poly:0,0,1,0"]) == 2


def test_range_test_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["range-test", "--curve", "ellipse:2,1", "--truth", "exp:0.3,0,0.2,0", "--nmax", "3"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_fit_from_truth(tmp_path):
    out = tmp_path / "fit.json"
    assert main(["fit", "--truth", "poly:2,0,1,0;1,1,1,0", "--degree", "2", "--n-samples", "60",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    coef = {(c["j"], c["k"]): complex(c["re"], c["im"]) for c in doc["coefficients"]}
    assert abs(coef[(2, 0)] - 1) <= 1e-8 and abs(coef[(1, 1)] - 1) <= 1e-8
    assert doc["holdout_residual"] <= 1e-8


def test_fit_from_samples(tmp_path):
    from linecont.linedata import from_ground_truth, polynomial, sample_lines

    curve = circle(1.0)
    truth = from_ground_truth(curve, polynomial({(1, 1): 1.0}))
    theta = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    t = 2 * np.cos(np.pi * (np.arange(7) + 0.5) / 7)
    lines = ["theta,t,re_f,im_f"]
    for th, (ts, fs) in sample_lines(truth, theta, t).items():
        lines += [",".join(io.fmt(x) for x in (th, a, v.real, v.imag)) for a, v in zip(ts, fs)]
    src = tmp_path / "samples.csv"
    src.write_text("\n".join(lines) + "\n")
    out = tmp_path / "fit.json"
    assert main(["fit", "--samples", str(src), "--line-degree", "2", "--degree", "2",
                 "--n-samples", "60", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["field_provenance"] == "fitted"
    assert max(r["residual"] for r in doc["line_residuals"]) <= 1e-10
    coef = {(c["j"], c["k"]): complex(c["re"], c["im"]) for c in doc["coefficients"]}
    assert abs(coef[(1, 1)] - 1) <= 1e-8


def test_verify(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 6 and "FAIL" not in out
