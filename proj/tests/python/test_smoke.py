import math
import os
import subprocess

import pytest

import cstar

EXP = "n=0; g=1z; h=-1w"


def test_map_roundtrip_and_eval():
    f = cstar.parse_map(EXP)
    assert str(f) == EXP
    assert f.horizon == pytest.approx(300.0)
    z = f(cstar.LogPoint(1.0, 0.0))
    assert z.L == pytest.approx(2 * math.sinh(1.0))
    with pytest.raises(cstar.ParseError):
        cstar.parse_map("n=0; g=1")
    with pytest.raises(cstar.HorizonExceeded):
        f(cstar.LogPoint(400.0, 0.0))


def test_modulus_closed_form():
    f = cstar.parse_map(EXP)
    s = cstar.sample_modulus(f, math.log(2.0))
    assert s.log_M == pytest.approx(1.5, abs=1e-9)
    assert s.log_m == pytest.approx(-1.5, abs=1e-9)
    assert cstar.log_mu(f, math.log(2.0), math.exp(-1)) == pytest.approx(0.5)
    a = cstar.arnold(0.0, 2.0)
    assert cstar.sample_modulus(a, math.log(4.0)).log_M == pytest.approx(math.log(4) + 3.75, abs=1e-9)


def test_classify_and_partition():
    f = cstar.parse_map(EXP)
    p = cstar.build_partition(f, 1.0, -1.0, 3)
    assert p.upper[1] == pytest.approx(2 * math.sinh(1.0))
    assert cstar.annulus_index(p, 0.0) == (0, False)
    r = cstar.classify_orbit(f, cstar.LogPoint(1.0, 0.0), partition=p)
    assert r.verdict == "escapes_to_infinity"
    assert r.annular_indices[:2] == [1, 2]


def test_construct_pipeline():
    f = cstar.parse_map(EXP)
    eps = cstar.choose_eps(cstar.DEFAULT_DELTA)
    setup = cstar.select_covering(f, eps, [1, 2, 3])
    opts = cstar.RealizeOptions()
    opts.margin = 0.05
    orbit, certs = cstar.construct_orbit(f, setup.annuli.annuli, [1, 2, 3], oracle_targets=2, options=opts)
    assert orbit.verified_depth == 2
    assert all(c.passed() for c in certs)
    for k, p in enumerate(orbit.orbit):
        assert setup.annuli.find(k + 1).contains(p.L)
    with pytest.raises(cstar.Unrealizable):
        cstar.construct_orbit(f, setup.annuli.annuli, [0, 1])


def test_render_is_thread_independent():
    f = cstar.parse_map(EXP)
    w = cstar.RenderWindow()
    w.width, w.height = 32, 24
    a = cstar.render_classification(f, w, threads=1)
    b = cstar.render_classification(f, w, threads=5)
    assert a.ppm() == b.ppm()
    assert a.ppm().startswith(b"P6\n32 24\n255\n")
    assert a.legend_csv().startswith("class_id,verdict,prefix,r,g,b\n")
    assert cstar.pixel_of(w, cstar.point_of(w, 3, 7)) == (3, 7)


def test_cli_from_python(tmp_path):
    assert cstar.run_cli(["cstar"]) == 1
    code = cstar.run_cli(["cstar", "modulus", "--map", EXP, "--radii", "2", "--out-dir", str(tmp_path)])
    assert code == 0
    csv = (tmp_path / "modulus.csv").read_bytes()
    manifest = (tmp_path / "modulus.manifest").read_text()
    assert f"sha256.modulus.csv = {cstar.sha256_hex(csv)}" in manifest


@pytest.mark.skipif("CSTAR_EXE" not in os.environ, reason="command-line tool not built")
def test_cli_executable(tmp_path):
    exe = os.environ["CSTAR_EXE"]
    res = subprocess.run([exe, "verify-lemmas", "--map", EXP, "--radii", "2,4,8", "--k", "2",
                          "--out-dir", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0
    assert "power_M: pass" in res.stdout
    assert subprocess.run([exe], capture_output=True).returncode == 1
