from __future__ import annotations

import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fiberlab import io
from fiberlab.bumps import Symbol1D
from fiberlab.cli import main
from fiberlab.grid import GridFunction2D, Spectrum2D, forward_transform, random_field
from fiberlab.operators import Symbol2D, twisted_paraproduct

seeds = st.integers(0, 2**31)
sizes = st.sampled_from([8, 16, 32])


# --------------------------------------------------------------------------
# MPFW1 files


@given(seeds, sizes)
def test_grid_round_trip(seed, n):
    F = random_field(seed, n)
    G = io.loads(io.dumps(F))
    assert isinstance(G, GridFunction2D) and np.array_equal(G.samples, F.samples)


@given(seeds, sizes)
def test_spectrum_round_trip(seed, n):
    S = forward_transform(random_field(seed, n))
    T = io.loads(io.dumps(S))
    assert isinstance(T, Spectrum2D) and np.array_equal(T.coeffs, S.coeffs)


@given(seeds, sizes)
def test_symbol_round_trips(seed, n):
    r = np.random.default_rng(seed)
    m = Symbol2D(r.standard_normal((n, n)) + 1j * r.standard_normal((n, n)))
    back = io.loads(io.dumps(m), as_symbol=True)
    assert isinstance(back, Symbol2D) and np.array_equal(back.values, m.values)
    s = Symbol1D(r.standard_normal(n))
    back1 = io.loads(io.dumps(s))
    assert isinstance(back1, Symbol1D) and np.array_equal(back1.values, s.values)


def test_header_layout():
    a = np.zeros((8, 8), dtype=complex)
    a[1, 2] = 3.0 - 0.5j
    data = io.dumps(GridFunction2D(a))
    assert data[:5] == b"MPFW1"
    assert struct.unpack_from("<IB", data, 5) == (8, 0)
    assert len(data) == 10 + 16 * 64
    assert struct.unpack_from("<2d", data, 10 + 16 * (1 * 8 + 2)) == (3.0, -0.5)


def test_centred_order():
    c = np.zeros((8, 8), dtype=complex)
    c[0, 0] = 1.0  # zero frequency lands at row 4, column 4
    data = io.dumps(Spectrum2D(c))
    assert struct.unpack_from("<IB", data, 5) == (8, 1)
    assert struct.unpack_from("<d", data, 10 + 16 * (4 * 8 + 4))[0] == 1.0


@pytest.mark.parametrize(
    "data, msg",
    [
        (b"XXXXX" + struct.pack("<IB", 2, 0) + bytes(64), "bad magic"),
        (b"MPFW1" + struct.pack("<IB", 2, 7) + bytes(64), "bad flag"),
        (b"MPFW1" + struct.pack("<IB", 2, 0) + bytes(48), "does not match"),
        (b"MPFW1" + struct.pack("<IB", 2, 0) + bytes(8), "odd number"),
        (b"MPFW", "too short"),
    ],
)
def test_bad_files(data, msg):
    with pytest.raises(ValueError, match=msg):
        io.loads(data)


def test_read_grid_from_spectrum(tmp_path):
    F = random_field(3, 8)
    p = tmp_path / "s.mpfw"
    io.write(str(p), forward_transform(F))
    assert np.max(np.abs(io.read_grid(str(p)).samples - F.samples)) <= 1e-13
    io.write(str(p), Symbol1D(np.ones(8)))
    with pytest.raises(ValueError, match="2-D grid function"):
        io.read_grid(str(p))


# --------------------------------------------------------------------------
# command line


@pytest.fixture
def grids(tmp_path):
    paths = []
    for s in range(3):
        p = tmp_path / f"F{s}.mpfw"
        io.write(str(p), random_field(s, 16))
        paths.append(str(p))
    return paths


def test_cli_apply_named_symbol(grids, tmp_path):
    out = str(tmp_path / "out.mpfw")
    assert main(["apply", "--op", "twisted", "--in1", grids[0], "--in2", grids[1], "--symbol", "one", "--out", out]) == 0
    got = io.read_grid(out).samples
    assert np.max(np.abs(got - random_field(0, 16).samples * random_field(1, 16).samples)) <= 1e-12


def test_cli_apply_symbol_file(grids, tmp_path):
    r = np.random.default_rng(0)
    m = Symbol2D(r.standard_normal((16, 16)))
    sym = str(tmp_path / "m.mpfw")
    io.write(sym, m)
    out = str(tmp_path / "out.mpfw")
    assert main(["apply", "--op", "twisted", "--in1", grids[0], "--in2", grids[1], "--symbol", sym, "--out", out]) == 0
    ref = twisted_paraproduct(random_field(0, 16), random_field(1, 16), m)
    assert np.array_equal(io.read_grid(out).samples, ref.samples)


def test_cli_apply_trilinear_with_window(grids, tmp_path):
    out = str(tmp_path / "u.mpfw")
    args = ["apply", "--op", "U1", "--in1", grids[0], "--in2", grids[1], "--in3", grids[2], "--window", "0:1", "--out", out]
    assert main(args) == 0
    assert io.read_grid(out).n == 16


def test_cli_apply_arity_error(grids, tmp_path):
    with pytest.raises(SystemExit, match="needs 3 inputs"):
        main(["apply", "--op", "U1", "--in1", grids[0], "--in2", grids[1], "--out", str(tmp_path / "x")])


def test_cli_sweep(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("operators = T1, twisted\nexponents = 4:4\nn = 16\nseeds = 2\n")
    out = tmp_path / "out.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--threads", "2"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("operator,case,p1,p2") and len(lines) == 5
    assert "4 records" in capsys.readouterr().out


def test_cli_cone(tmp_path):
    report, csv = tmp_path / "cone.txt", tmp_path / "cone.csv"
    assert main(["cone", "--n", "64", "--modes", "4", "--report", str(report), "--csv", str(csv)]) == 0
    text = report.read_text()
    assert text.startswith("symbol riesz n 64 modes 4 scales 0..5")
    assert "max residual" in text
    assert csv.read_text().startswith("cone,k,n1,n2,re,im\n")


def test_cli_cz(grids, capsys):
    assert main(["cz", "--in", grids[0], "--level", "400", "--p2", "2", "--p3prime", "1"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("level 400 p2 2 p3prime 1 n 16")
    assert "verification passed" in out
    assert "intervals [(" in out


def test_cli_counterexample(tmp_path):
    cfg = tmp_path / "cx.cfg"
    cfg.write_text("mtilde = one\nlambdas = 4, 16\nstep = 0.25\n")
    out = tmp_path / "cx.txt"
    assert main(["counterexample", "--config", str(cfg), "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("limit value (lambda = inf):")
    assert "lambda 16:" in text and "norm factorization errors" in text


def test_cli_telescope(capsys):
    assert main(["telescope", "--n", "64"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("window 0..3 residual")
    assert float(out.split("relative")[1]) <= 1e-12


def test_cli_range(capsys):
    assert main(["range", "--case", "3", "--p1", "4", "--p2", "4"]) == 0
    assert capsys.readouterr().out == "boundary (p3' = 2)\n"
    assert main(["range", "--case", "tripletwist", "--p1", "3.5", "--p2", "3.5", "--p3", "3.5"]) == 0
    assert capsys.readouterr().out.startswith("inside (p4' = 1.16666")
    assert main(["range", "--case", "1", "--p1", "inf", "--p2", "3"]) == 0
    assert capsys.readouterr().out.startswith("inside")


def test_cli_value_error_exit_code(capsys):
    assert main(["range", "--case", "42", "--p1", "3", "--p2", "3"]) == 2
    assert capsys.readouterr().err.startswith("error: unknown case")


def test_cli_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
