"""Unit tests for CSV, JSON and PGM file formats."""
import numpy as np
import pandas as pd
import pytest

from windscreen_optics.domain.exceptions import InputError, ParseError
from windscreen_optics.infrastructure.io import (
    read_coefficients,
    read_gradients_csv,
    read_image,
    read_pgm,
    read_psd_csv,
    read_system,
    read_table,
    read_wavefront_csv,
    to_counts,
    write_coefficients,
    write_gradients_csv,
    write_pgm,
    write_table,
    write_wavefront_csv,
)
from windscreen_optics.services.wavefront import disk_lenslet_layout, sh_forward
from windscreen_optics.services.zernike import synthesize


class TestCSVTables:
    """Tests for metadata-prefixed numeric tables."""

    def test_metadata_and_rows(self, tmp_path):
        # Setup
        path = tmp_path / "table.csv"
        path.write_text("#source=bench\n# free comment\na,b\n1,2\n\n3,nan\n")

        # Execute
        frame, metadata, lines = read_table(path, ["a", "b"])

        # Assert
        assert metadata == {"source": "bench"}
        assert lines == [4, 6]
        assert frame["a"].tolist() == [1.0, 3.0]
        assert np.isnan(frame["b"].iloc[1])

    @pytest.mark.parametrize(
        "text, line",
        [
            ("a,b\n1,2\n3\n", 3),
            ("a,b\n1,2\n3,x\n", 3),
            ("#k=v\na,c\n1,2\n", 2),
        ],
    )
    def test_errors_carry_line_numbers(self, tmp_path, text, line):
        # Setup
        path = tmp_path / "bad.csv"
        path.write_text(text)

        # Execute / Assert
        with pytest.raises(ParseError) as error:
            read_table(path, ["a", "b"])
        assert error.value.line == line
        assert error.value.exit_code == 2

    def test_empty_and_missing_files(self, tmp_path):
        # Setup
        path = tmp_path / "empty.csv"
        path.write_text("#only=metadata\n")

        # Execute / Assert
        with pytest.raises(ParseError):
            read_table(path, ["a"])
        with pytest.raises(InputError):
            read_table(tmp_path / "missing.csv", ["a"])

    def test_write_table_metadata(self, tmp_path):
        # Setup
        path = tmp_path / "out.csv"
        frame = pd.DataFrame({"f": [0.0, 1.5], "mtf": [1.0, 0.25]})

        # Execute
        write_table(path, frame, {"cutoff": 909.1}, float_format="%.6f")

        # Assert
        lines = path.read_text().splitlines()
        assert lines[0] == "# cutoff=909.1"
        assert lines[1] == "f,mtf"
        assert lines[2] == "0.000000,1.000000"


class TestWavefrontFiles:
    def test_wavefront_round_trip(self, tmp_path, grid, aberrated):
        # Setup
        w = synthesize(aberrated, grid)
        path = tmp_path / "w.csv"

        # Execute
        write_wavefront_csv(path, w)
        loaded = read_wavefront_csv(path)

        # Assert
        assert loaded.aperture_radius == pytest.approx(grid.aperture_radius)
        np.testing.assert_array_equal(loaded.mask, w.mask)
        np.testing.assert_allclose(loaded.values[w.mask], w.values[w.mask], rtol=1e-9)

    def test_missing_aperture_metadata(self, tmp_path):
        # Setup
        path = tmp_path / "w.csv"
        path.write_text("x,y,w_m\n-1,-1,0\n1,-1,0\n-1,1,0\n1,1,0\n")

        # Execute / Assert
        with pytest.raises(InputError) as error:
            read_wavefront_csv(path)
        assert "aperture_radius_m" in error.value.message
        assert read_wavefront_csv(path, aperture_radius=0.01).values.shape == (2, 2)

    def test_duplicate_sample(self, tmp_path):
        # Setup
        path = tmp_path / "w.csv"
        path.write_text(
            "# aperture_radius_m=0.01\nx,y,w_m\n-1,-1,0\n1,-1,0\n-1,1,0\n1,1,0\n1,-1,2\n"
        )

        # Execute / Assert
        with pytest.raises(ParseError) as error:
            read_wavefront_csv(path)
        assert error.value.details["line"] == 7

    @pytest.mark.parametrize(
        "xs, ys",
        [
            ((-1.0, 0.0, 0.5), (-1.0, 0.0, 1.0)),
            ((-1.0, 0.0, 1.0), (-0.5, 0.0, 0.5)),
        ],
        ids=["non_uniform", "anisotropic"],
    )
    def test_irregular_grid(self, tmp_path, xs, ys):
        # Setup
        rows = "".join(f"{x},{y},0\n" for y in ys for x in xs)
        path = tmp_path / "w.csv"
        path.write_text(f"# aperture_radius_m=0.01\nx,y,w_m\n{rows}")

        # Execute / Assert
        with pytest.raises(InputError) as error:
            read_wavefront_csv(path)
        assert not isinstance(error.value, ParseError)
        assert "spac" in error.value.message

    def test_gradients(self, tmp_path, aberrated):
        # Setup
        g = sh_forward(aberrated, disk_lenslet_layout(8), 5e-3, 5e-3)
        path = tmp_path / "g.csv"

        # Execute
        write_gradients_csv(path, g)
        loaded = read_gradients_csv(path)

        # Assert
        assert loaded.lenslet_focal_length == pytest.approx(5e-3)
        np.testing.assert_allclose(loaded.displacements, g.displacements, rtol=1e-9)

    def test_gradients_need_lenslet_focal_length(self, tmp_path):
        # Setup
        path = tmp_path / "g.csv"
        path.write_text("# aperture_radius_m=0.005\nx_norm,y_norm,dx_m,dy_m\n0,0,0,0\n")

        # Execute / Assert
        with pytest.raises(InputError):
            read_gradients_csv(path)

    def test_spectral_lines(self, tmp_path):
        # Setup
        path = tmp_path / "psd.csv"
        path.write_text("lambda_m,weight\n5e-7,1\n6e-7,3\n")

        # Execute
        psd = read_psd_csv(path)

        # Assert
        np.testing.assert_allclose(psd.weights, [0.25, 0.75])


class TestPGM:
    """Tests for the 16-bit grayscale codec."""

    @pytest.mark.parametrize("binary", [True, False])
    def test_write_and_read(self, tmp_path, binary):
        # Setup
        pixels = np.array([[0, 1, 65535], [256, 4095, 30000]])
        path = tmp_path / "edge.pgm"

        # Execute
        write_pgm(path, pixels, binary=binary)
        loaded, maxval = read_pgm(path)

        # Assert
        assert path.read_bytes()[:2] == (b"P5" if binary else b"P2")
        assert maxval == 65535
        np.testing.assert_array_equal(loaded, pixels)

    def test_eight_bit_with_comments(self, tmp_path):
        # Setup
        path = tmp_path / "small.pgm"
        path.write_bytes(b"P5\n# bench camera\n3 2\n255\n" + bytes([0, 128, 255, 1, 2, 3]))

        # Execute
        image = read_image(path)

        # Assert
        assert image.shape == (2, 3)
        assert image[0, 2] == 1.0
        assert image[0, 1] == pytest.approx(128 / 255)

    @pytest.mark.parametrize(
        "content",
        [
            b"P6\n2 2\n255\n" + bytes(12),
            b"P5\n2 2\n255\n" + bytes(3),
            b"P2\n2 2\n255\n1 2 3\n",
            b"P2\n2 2\n10\n1 2 3 11\n",
            b"P5\n2",
        ],
    )
    def test_malformed(self, tmp_path, content):
        # Setup
        path = tmp_path / "bad.pgm"
        path.write_bytes(content)

        # Execute / Assert
        with pytest.raises(ParseError):
            read_pgm(path)

    def test_counts_are_clipped(self):
        # Execute
        counts = to_counts(np.array([-0.1, 0.5, 1.2]))

        # Assert
        assert counts.tolist() == [0, 32768, 65535]

    def test_out_of_range_pixels(self, tmp_path):
        # Execute / Assert
        with pytest.raises(InputError):
            write_pgm(tmp_path / "x.pgm", np.array([[70000]]))


class TestJSONFiles:
    """Tests for coefficient and system model documents."""

    def test_coefficient_forms(self, write_json):
        # Setup
        dense = write_json("dense.json", [0.0, 0.0, 0.0, 0.0, 1e-7])
        records = write_json(
            "records.json", {"coefficients": [{"index": 4, "value_m": 1e-7}]}
        )

        # Execute
        first = read_coefficients(dense)
        second = read_coefficients(records)

        # Assert
        np.testing.assert_array_equal(first.values, second.values)

    def test_written_file_reads_back(self, tmp_path, aberrated):
        # Setup
        path = tmp_path / "c.json"

        # Execute
        write_coefficients(path, aberrated, {"source": "test"})

        # Assert
        np.testing.assert_allclose(read_coefficients(path).values, aberrated.values)

    def test_bad_json_reports_line(self, tmp_path):
        # Setup
        path = tmp_path / "bad.json"
        path.write_text('{\n  "coefficients": [1e-7,\n}\n')

        # Execute / Assert
        with pytest.raises(ParseError) as error:
            read_coefficients(path)
        assert error.value.line == 3

    @pytest.mark.parametrize(
        "payload",
        [
            [1e-7, {"index": 4, "value_m": 1e-7}],
            [{"index": 12, "value_m": 1e-7}],
            {"values": [1e-7]},
        ],
    )
    def test_invalid_coefficients(self, write_json, payload):
        # Execute / Assert
        with pytest.raises(ParseError):
            read_coefficients(write_json("c.json", payload))

    def test_order_too_high(self, write_json):
        # Execute / Assert
        with pytest.raises(InputError):
            read_coefficients(write_json("c.json", [0.0] * 11))

    def test_system_model(self, write_json):
        # Setup
        path = write_json(
            "system.json",
            {
                "lens": {
                    "f_m": 0.006,
                    "f_number": 2.0,
                    "field_curvature": [{"field_deg": 0.0, "dz_m": 1e-5}],
                },
                "windscreen": {
                    "patches": [{"field_deg": -10.0, "Dh_dpt": 0.1, "Dv_dpt": 0.05}]
                },
            },
        )

        # Execute
        spec = read_system(path)
        lens = spec.lens.to_domain()
        ws = spec.windscreen.to_domain()

        # Assert
        assert lens.field_offset(0.0) == pytest.approx(1e-5)
        assert ws.powers_at(-10.0) == pytest.approx((0.1, 0.05))
        assert ws.inclination_deg == pytest.approx(63.0)

    def test_system_model_rejects_bad_lens(self, write_json):
        # Execute / Assert
        with pytest.raises(ParseError):
            read_system(write_json("s.json", {"lens": {"f_m": -1.0}}))
