import io
import json
import math
import struct

import numpy as np
import pytest

from fracrd.cli import main
from fracrd.config import CONFIG_KEYS, load_config, parse_config, parse_real
from fracrd.errors import ConfigError, FormatError, IoError
from fracrd.io import HEADER_SIZE, emit_heatmap, emit_snapshot, heatmap_bytes, load_snapshot
from fracrd.models import initial_condition
from fracrd.spectral import GridSpec, PhysicalField
from fracrd.studies import ErrorRow, ErrorTable, convergence_order, error_vs_reference, spatial_study, temporal_study

MANUFACTURED = """
model = manufactured
n = 16
alpha = 1.3
kappa = 2
tau = 1/8
t_end = 1
reference = exact
taus = 1/8, 1/16, 1/32
ns = 8, 16, 32
k_alpha = 1
"""


def pgm_parts(data):
    magic, dims, maxval, rest = data.split(b"\n", 3)
    w, h = map(int, dims.split())
    return magic, w, h, int(maxval), rest


class TestSnapshots:
    def test_round_trip(self, tmp_path):
        g = GridSpec(8, (0.0, 1.0), (-1.0, 2.0))
        f = PhysicalField(g, np.random.default_rng(0).standard_normal((8, 8)))
        path = tmp_path / "s.snap"
        emit_snapshot(f, path, t=0.75)
        back, t = load_snapshot(path)
        assert t == 0.75 and back.grid == g and np.array_equal(back.values, f.values)
        assert path.stat().st_size == HEADER_SIZE + 8 * 64 and HEADER_SIZE == 56

    def test_layout(self, tmp_path):
        g = GridSpec(4)
        vals = np.arange(16, dtype=float).reshape(4, 4)
        emit_snapshot(PhysicalField(g, vals), tmp_path / "a.snap", 2.0)
        raw = (tmp_path / "a.snap").read_bytes()
        assert raw[:8] == b"FRDFSNAP"
        assert struct.unpack_from("<II", raw, 8) == (1, 4)
        assert struct.unpack_from("<d", raw, 48)[0] == 2.0
        # row-major over (j1, j2): the second stored value is j1 = 0, j2 = 1
        assert struct.unpack_from("<dd", raw, 56) == (0.0, 1.0)

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda b: b"XXXXXXXX" + b[8:],
            lambda b: b[:8] + struct.pack("<I", 2) + b[12:],
            lambda b: b[:-8],
            lambda b: b[:30],
        ],
    )
    def test_malformed(self, tmp_path, mutate):
        emit_snapshot(PhysicalField(GridSpec(4), np.zeros((4, 4))), tmp_path / "a.snap")
        bad = tmp_path / "b.snap"
        bad.write_bytes(mutate((tmp_path / "a.snap").read_bytes()))
        with pytest.raises(FormatError):
            load_snapshot(bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_snapshot(tmp_path / "absent.snap")

    def test_unwritable(self, tmp_path):
        with pytest.raises(IoError):
            emit_snapshot(PhysicalField(GridSpec(4), np.zeros((4, 4))), tmp_path / "no" / "dir.snap")


class TestHeatmap:
    def test_header_and_size(self):
        data = heatmap_bytes(PhysicalField(GridSpec(8), np.random.default_rng(1).random((8, 8))))
        magic, w, h, maxval, rest = pgm_parts(data)
        assert (magic, w, h, maxval, len(rest)) == (b"P5", 8, 8, 255, 64)

    def test_constant_is_mid_gray(self):
        _, _, _, _, rest = pgm_parts(heatmap_bytes(PhysicalField(GridSpec(4), np.full((4, 4), 3.0))))
        assert set(rest) == {128}

    def test_clamp_and_orientation(self):
        g = GridSpec(4)
        vals = np.zeros((4, 4))
        vals[0, 3] = 10.0  # smallest x1, largest x2: top-left pixel
        vals[3, 0] = -10.0  # largest x1, smallest x2: bottom-right pixel
        _, w, h, _, rest = pgm_parts(heatmap_bytes(PhysicalField(g, vals), value_range=(-1, 1)))
        img = np.frombuffer(rest, dtype=np.uint8).reshape(h, w)
        assert img[0, 0] == 255 and img[-1, -1] == 0
        assert img[1, 1] == 128

    def test_crop(self):
        g = GridSpec.square(16, -1.0, 2.0)
        data = heatmap_bytes(PhysicalField(g, np.zeros((16, 16))), crop=(0.0, 1.0, 0.0, 1.0))
        _, w, h, _, _ = pgm_parts(data)
        assert w == h == int(np.sum((g.axes[0] >= 0) & (g.axes[0] < 1)))

    def test_invert_shows_dark_disc(self):
        g = GridSpec.square(256, -1.0, 2.0)
        _, v = initial_condition("gs_disc", g)
        _, w, h, _, rest = pgm_parts(heatmap_bytes(v, crop=(0, 1, 0, 1), invert=True))
        img = np.frombuffer(rest, dtype=np.uint8).reshape(h, w)
        assert img.min() == 0 and img.max() == 255
        assert img[h // 2, w // 2] == 0 and img[0, 0] == 255

    def test_errors(self, tmp_path):
        f = PhysicalField(GridSpec(4), np.zeros((4, 4)))
        with pytest.raises(ConfigError):
            heatmap_bytes(f, crop=(10, 11, 10, 11))
        with pytest.raises(ConfigError):
            heatmap_bytes(PhysicalField(GridSpec(4), np.full((4, 4), np.nan)))
        with pytest.raises(IoError):
            emit_heatmap(f, tmp_path / "no" / "x.pgm")


class TestConfig:
    @pytest.mark.parametrize(
        "text,value",
        [("1.5", 1.5), ("1/10", 0.1), ("-20", -20.0), ("2pi", 2 * math.pi), ("2*pi", 2 * math.pi), ("pi/2", math.pi / 2), ("-pi", -math.pi)],
    )
    def test_parse_real(self, text, value):
        assert parse_real(text) == value

    def test_parse_real_rejects(self):
        for bad in ("abc", "1/0", ""):
            with pytest.raises(ConfigError):
                parse_real(bad)

    def test_parse(self):
        cfg = parse_config(MANUFACTURED)
        assert cfg.model == "manufactured" and cfg.n == 16 and cfg.tau == 0.125
        assert cfg.taus == (0.125, 0.0625, 0.03125) and cfg.ns == (8, 16, 32)
        assert cfg.x1_range == (0.0, 2 * math.pi)
        assert cfg.build_model().params["alpha"] == 1.3

    def test_domain_key_and_defaults(self):
        cfg = parse_config("model = gray_scott\nn = 16\nalpha = 1.5\nkappa = 2\ntau = 1/2\nt_end = 1\n")
        assert cfg.ic == "gs_disc" and cfg.x1_range == (-1.0, 2.0)
        cfg = parse_config("model = allen_cahn\nic = ac_case2\ndomain = -20, 20\nn = 16\nalpha = 1.5\nkappa = 2\ntau = 1/2\nt_end = 1\n")
        assert cfg.x2_range == (-20.0, 20.0)

    @pytest.mark.parametrize(
        "extra,match",
        [
            ("colour = red", "unknown key"),
            ("n = 8", "duplicate"),
            ("just text", "expected"),
            ("reference = exact\nmodel_x = 1", "unknown key"),
            ("tau_ref = 1", "tau_ref"),
            ("heatmap_crop = 0, 1", "four values"),
        ],
    )
    def test_errors(self, extra, match):
        base = "model = allen_cahn\nn = 16\nalpha = 1.5\nkappa = 2\ntau = 1/2\nt_end = 1\n"
        with pytest.raises(ConfigError, match=match):
            parse_config(base + extra)

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="tau"):
            parse_config("model = allen_cahn\nn = 16\nalpha = 1.5\nkappa = 2\nt_end = 1\n")

    def test_exact_reference_only_for_manufactured(self):
        with pytest.raises(ConfigError):
            parse_config("model = allen_cahn\nn = 16\nalpha = 1.5\nkappa = 2\ntau = 1/2\nt_end = 1\nreference = exact\n")

    def test_load_missing_names_path(self, tmp_path):
        with pytest.raises(ConfigError, match="absent.cfg"):
            load_config(tmp_path / "absent.cfg")

    def test_keys_documented(self):
        assert {"model", "n", "alpha", "kappa", "tau", "t_end", "taus", "ns"} <= set(CONFIG_KEYS)


class TestOrders:
    def test_exact_ratios(self):
        eps = 1e-5
        assert convergence_order([4 * eps, eps], [0.2, 0.1]) == [pytest.approx(2.0, abs=1e-12)]
        assert convergence_order([1e-2, 1.25e-3], [0.2, 0.1]) == [pytest.approx(3.0, abs=1e-12)]

    def test_near_second_order_pair(self):
        (o,) = convergence_order([1.3160e-2, 3.4301e-3], [1 / 4, 1 / 8])
        assert o == pytest.approx(1.9398, abs=5e-5)

    def test_space(self):
        assert convergence_order([1e-2, 1e-4], [8, 16], space=True) == [pytest.approx(math.log2(100), abs=1e-12)]

    def test_saturated(self):
        assert convergence_order([1e-3, 0.0], [0.2, 0.1]) == [None]

    def test_invalid(self):
        with pytest.raises(ConfigError):
            convergence_order([1.0], [0.1])
        with pytest.raises(ConfigError):
            convergence_order([1.0, 0.5], [0.1, 0.1])


class TestStudies:
    def test_error_symmetry_and_zero(self):
        g = GridSpec(16)
        a = g.sample(lambda x1, x2: np.sin(x1) * np.cos(x2))
        b = g.sample(lambda x1, x2: np.cos(3 * x1))
        assert error_vs_reference(a, b) == error_vs_reference(b, a)
        assert error_vs_reference(a, a) == 0.0

    def test_error_across_grids_uses_coarse_band(self):
        fine = GridSpec(32).sample(lambda x1, x2: np.sin(x1) + np.sin(12 * x2))
        coarse = GridSpec(16).sample(lambda x1, x2: np.sin(x1))
        # the |l| = 12 mode is above the coarse band and is not compared
        assert error_vs_reference(coarse, fine) <= 1e-13

    def test_components_in_quadrature(self):
        g = GridSpec(8)
        z = PhysicalField(g, np.zeros((8, 8)))
        one = PhysicalField(g, np.ones((8, 8)))
        assert error_vs_reference((one, one), (z, z)) == pytest.approx(math.sqrt(2) * 2 * math.pi, rel=1e-14)

    def test_error_rejects_mismatch(self):
        with pytest.raises(ConfigError):
            error_vs_reference(GridSpec(8).sample(lambda a, b: np.cos(a)), GridSpec.square(8, 0, 1).sample(lambda a, b: np.cos(a)))

    def test_temporal_exact(self):
        table = temporal_study(parse_config(MANUFACTURED))
        assert [r.status for r in table.rows] == ["ok"] * 3
        assert all(1.8 < o < 2.2 for o in table.orders)

    def test_spatial_exact_is_at_round_off(self):
        table = spatial_study(parse_config(MANUFACTURED))
        # a single Fourier mode: no spatial error beyond time discretization
        assert max(table.errors) - min(table.errors) <= 1e-12

    def test_unstable_row(self):
        cfg = parse_config(MANUFACTURED.replace("taus = 1/8, 1/16, 1/32", "taus = 1").replace("t_end = 1", "t_end = 200")
                           .replace("kappa = 2", "kappa = 0"))
        table = temporal_study(cfg)
        assert table.rows[0].status == "unstable" and math.isinf(table.rows[0].error)

    def test_csv(self):
        t = ErrorTable("tau", [ErrorRow(0.25, 1e-2), ErrorRow(0.125, 2.5e-3, 2.0), ErrorRow(0.0625, math.inf, None, "unstable")], {"model": "m"})
        lines = t.to_csv().splitlines()
        assert lines[0] == "# model=m" and lines[1] == "tau,error,order,status"
        assert lines[2] == "0.25,0.01,,ok" and lines[3] == "0.125,0.0025000000000000001,2,ok"
        assert lines[4] == "0.0625,inf,,unstable"

    def test_workers_do_not_change_results(self):
        cfg = parse_config(MANUFACTURED)
        par = parse_config(MANUFACTURED + "workers = 3\n")
        assert temporal_study(cfg).to_csv() == temporal_study(par).to_csv()

    def test_unsorted_rejected(self):
        with pytest.raises(ConfigError):
            temporal_study(parse_config(MANUFACTURED), taus=(0.1, 0.2))
        with pytest.raises(ConfigError):
            spatial_study(parse_config(MANUFACTURED), ns=(16, 8))


def cli(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


class TestCli:
    def test_stability_verdicts(self):
        assert cli("stability", "--rho", "-8", "--kappa", "2", "--tau", "0.25") == (0, "Marginal\n")
        assert cli("stability", "--rho", "-8", "--kappa", "4", "--tau", "0.25") == (0, "Stable\n")
        assert cli("stability", "--rho", "-8", "--kappa", "2", "--tau", "0.5") == (0, "Unstable\n")

    def test_stability_verbose_and_map(self):
        code, out = cli("stability", "--rho", "-8", "--kappa", "4", "--tau", "0.25", "-v")
        assert code == 0 and "kappa_threshold=2" in out
        code, out = cli("stability", "--rho", "-8", "--map", "--resolution", "3")
        assert code == 0 and out.startswith("tau,kappa") and len(out.splitlines()) == 10

    def test_usage_errors(self, capsys):
        assert cli("stability", "--rho", "-8")[0] == 1
        assert cli("nonsense")[0] == 1
        assert cli("stability", "--rho", "-8", "--kappa", "-1", "--tau", "0.5")[0] == 1

    def test_missing_config(self, tmp_path, capsys):
        code, _ = cli("run", str(tmp_path / "absent.cfg"))
        assert code == 1 and "absent.cfg" in capsys.readouterr().err

    def test_models(self):
        code, out = cli("models")
        assert code == 0 and "gray_scott" in out and "config keys" in out

    def test_converge_time(self, tmp_path):
        cfg = tmp_path / "m.cfg"
        cfg.write_text(MANUFACTURED + f"output_dir = {tmp_path / 'out'}\n")
        code, out = cli("converge-time", str(cfg), "-o", str(tmp_path / "t.csv"))
        assert code == 0 and (tmp_path / "t.csv").read_text() == out
        rows = [l for l in out.splitlines() if not l.startswith("#")]
        assert rows[0] == "tau,error,order,status" and len(rows) == 4
        assert cli("converge-time", str(cfg), "-o", str(tmp_path / "t2.csv"))[1] == out

    def test_converge_space_default_path(self, tmp_path):
        cfg = tmp_path / "m.cfg"
        cfg.write_text(MANUFACTURED + f"output_dir = {tmp_path / 'out'}\n")
        code, out = cli("converge-space", str(cfg))
        assert code == 0 and (tmp_path / "out" / "converge-space.csv").read_text() == out

    def test_run_writes_outputs(self, tmp_path):
        cfg = tmp_path / "gs.cfg"
        cfg.write_text(
            "model = gray_scott\nn = 32\nalpha = 1.5\nkappa = 2\ntau = 1/2\nt_end = 2\n"
            f"snapshot_times = 0, 2\nheatmap = yes\nheatmap_crop = 0, 1, 0, 1\noutput_dir = {tmp_path / 'o'}\n"
        )
        assert cli("run", str(cfg))[0] == 0
        out = tmp_path / "o"
        names = sorted(p.name for p in out.iterdir())
        assert names == ["summary.json", "u_000000.pgm", "u_000000.snap", "u_000004.pgm", "u_000004.snap",
                         "v_000000.pgm", "v_000000.snap", "v_000004.pgm", "v_000004.snap"]
        summary = json.loads((out / "summary.json").read_text())
        assert summary["steps"] == 4 and not summary["diverged"]
        first = (out / "u_000004.snap").read_bytes()
        assert cli("run", str(cfg))[0] == 0
        assert (out / "u_000004.snap").read_bytes() == first

    def test_run_diverges(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(
            "model = manufactured\nn = 16\nalpha = 1.3\nkappa = 0\ntau = 1\nt_end = 300\nreference = exact\n"
            f"output_dir = {tmp_path / 'o'}\n"
        )
        assert cli("run", str(cfg))[0] == 2
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["diverged"] and summary["diverged_step"] > 1

    def test_io_error(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        cfg = tmp_path / "m.cfg"
        cfg.write_text(MANUFACTURED + f"output_dir = {blocker / 'sub'}\n")
        assert cli("run", str(cfg))[0] == 3
