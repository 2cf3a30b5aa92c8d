import numpy as np
import pytest

from lapden import (
    CsvParseError,
    EmptyInputError,
    Field2D,
    PgmFormatError,
    PlotSpec,
    Signal1D,
    read_csv_1d,
    read_pgm,
    write_csv_1d,
    write_pgm,
    write_svg_plot,
)


class TestCsv:
    def test_round_trip_exact(self, tmp_path):
        path = tmp_path / "s.csv"
        s = Signal1D(np.array([1.5, -2.0, 3.25]))
        write_csv_1d(path, s)
        back = read_csv_1d(path)
        assert np.array_equal(back.values, s.values)
        assert back.h == s.h
        assert back.domain == s.domain

    def test_round_trip_full_precision(self, tmp_path):
        rng = np.random.default_rng(41)
        path = tmp_path / "r.csv"
        s = Signal1D(rng.normal(size=64) * 1e7, h=0.015625,
                     domain=(0.0, 65 * 0.015625))
        write_csv_1d(path, s)
        back = read_csv_1d(path)
        assert np.array_equal(back.values, s.values)
        assert back.h == s.h

    def test_bare_file_gets_unit_spacing(self, tmp_path):
        path = tmp_path / "bare.csv"
        path.write_text("1\n2\n3\n")
        s = read_csv_1d(path)
        assert np.array_equal(s.values, np.array([1.0, 2.0, 3.0]))
        assert s.h == 1.0

    def test_parse_error_cites_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1\nabc\n3\n")
        with pytest.raises(CsvParseError, match="line 2"):
            read_csv_1d(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(EmptyInputError):
            read_csv_1d(path)

    def test_comments_ignored(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("# a note\n0.5\n# another\n1.5\n")
        assert np.array_equal(read_csv_1d(path).values, np.array([0.5, 1.5]))


class TestPgm:
    def test_p2_decode_example(self, tmp_path):
        path = tmp_path / "tiny.pgm"
        path.write_bytes(b"P2 2 2 255 0 255 128 64")
        f = read_pgm(path)
        assert np.array_equal(f.values,
                              np.array([[0.0, 1.0], [128 / 255, 64 / 255]]))

    def test_all_zero_write(self, tmp_path):
        path = tmp_path / "zero.pgm"
        write_pgm(path, Field2D(np.zeros((3, 4))))
        data = path.read_bytes()
        assert data.startswith(b"P5\n4 3\n255\n")
        assert data[len(b"P5\n4 3\n255\n"):] == bytes(12)

    def test_round_trip_quantization_bound(self, tmp_path):
        rng = np.random.default_rng(42)
        path = tmp_path / "rt.pgm"
        f = Field2D(rng.uniform(size=(16, 9)))
        write_pgm(path, f)
        back = read_pgm(path)
        assert np.abs(back.values - f.values).max() <= 1 / 510 + 1e-15

    def test_p5_round_trip_values_exact(self, tmp_path):
        path = tmp_path / "exact.pgm"
        f = Field2D(np.arange(12, dtype=float).reshape(3, 4) / 255.0)
        write_pgm(path, f)
        assert np.array_equal(read_pgm(path).values, f.values)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_bytes(b"P7 2 2 255 0 0 0 0")
        with pytest.raises(PgmFormatError, match="magic"):
            read_pgm(path)

    def test_truncated_raster(self, tmp_path):
        path = tmp_path / "trunc.pgm"
        path.write_bytes(b"P5\n3 3\n255\n" + bytes(5))
        with pytest.raises(PgmFormatError, match="truncated"):
            read_pgm(path)

    def test_maxval_too_large(self, tmp_path):
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P2 2 2 65535 0 1 2 3")
        with pytest.raises(PgmFormatError, match="maxval"):
            read_pgm(path)

    def test_comment_in_header(self, tmp_path):
        path = tmp_path / "comment.pgm"
        path.write_bytes(b"P2\n# a comment\n2 2\n255\n0 255 128 64")
        assert read_pgm(path).values.shape == (2, 2)

    def test_clamps_out_of_range_on_write(self, tmp_path):
        path = tmp_path / "clamp.pgm"
        write_pgm(path, Field2D(np.array([[-1.0, 0.5, 2.0]] * 3)))
        back = read_pgm(path)
        assert back.values[0, 0] == 0.0
        assert back.values[0, 2] == 1.0


class TestSvg:
    def test_two_constant_series(self, tmp_path):
        path = tmp_path / "c.svg"
        write_svg_plot(path, PlotSpec(320, 200, (
            ("low", "#ff0000", np.full(5, 1.0)),
            ("high", "#0000ff", np.full(5, 2.0)),
        )))
        text = path.read_text()
        assert text.count("<polyline") == 2
        # each constant series is a horizontal line at its own height
        pts = [seg.split('points="')[1].split('"')[0]
               for seg in text.split("<polyline")[1:]]
        ys = [{p.split(",")[1] for p in block.split()} for block in pts]
        assert all(len(y) == 1 for y in ys)
        assert ys[0] != ys[1]

    def test_byte_deterministic(self, tmp_path):
        rng = np.random.default_rng(43)
        values = rng.normal(size=50)
        spec = PlotSpec(640, 420, (("a", "#d62728", values),
                                   ("b", "#1f77b4", values * 0.5)), title="t")
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        write_svg_plot(p1, spec)
        write_svg_plot(p2, spec)
        assert p1.read_bytes() == p2.read_bytes()

    def test_noisy_vs_restored_has_two_polylines(self, tmp_path):
        x = np.linspace(0, 1, 64)
        noisy = np.sin(2 * np.pi * x) + 0.1 * np.cos(40 * x)
        restored = np.sin(2 * np.pi * x)
        path = tmp_path / "plot.svg"
        write_svg_plot(path, PlotSpec(640, 420, (
            ("noisy", "#d62728", noisy), ("restored", "#1f77b4", restored),
        )))
        assert path.read_text().count("<polyline") == 2

    def test_series_length_validation(self):
        with pytest.raises(ValueError):
            PlotSpec(100, 100, (("a", "#000000", np.ones(3)),
                                ("b", "#000000", np.ones(4))))
