"""Windscreen power compensating or adding to lens field curvature."""
import numpy as np
import pytest

from windscreen_optics.cli import cli
from windscreen_optics.domain.entities.enums import Orientation
from windscreen_optics.domain.entities.system import LensModel
from windscreen_optics.infrastructure.io import read_table
from windscreen_optics.services.system import system_mtf

FIELD_CURVATURE = 50e-6
FOCAL_LENGTH = 6e-3
COMPENSATING_POWER = FIELD_CURVATURE / FOCAL_LENGTH**2
SYSTEM_COLUMNS = ["freq_cyc_per_mm", "mtf_joint", "mtf_lens", "mtf_ws", "ratio"]


def system_payload(power: float | None) -> dict:
    """Lens with +50 um field curvature, optionally behind a uniform windscreen."""
    payload = {
        "lens": {
            "f_m": FOCAL_LENGTH,
            "f_number": 2.0,
            "field_curvature": [
                {"field_deg": 0.0, "dz_m": 0.0},
                {"field_deg": 20.0, "dz_m": FIELD_CURVATURE},
            ],
        }
    }
    if power is not None:
        payload["windscreen"] = {
            "patches": [
                {"field_deg": 0.0, "Dh_dpt": power, "Dv_dpt": power},
                {"field_deg": 20.0, "Dh_dpt": power, "Dv_dpt": power},
            ]
        }
    return payload


class TestSystemMTFCommand:
    """Tests for the separability report at the edge of the field."""

    def run(self, runner, write_json, tmp_path, power: float):
        output = tmp_path / "system.csv"
        result = runner.invoke(
            cli,
            [
                "system-mtf",
                "--system",
                write_json("system.json", system_payload(power)),
                "--output",
                str(output),
                "--field-deg",
                "20",
                "--samples",
                "11",
            ],
        )
        assert result.exit_code == 0, result.output
        return read_table(output, SYSTEM_COLUMNS)

    def test_compensating_windscreen(self, runner, write_json, tmp_path):
        # Execute
        frame, metadata, _ = self.run(runner, write_json, tmp_path, COMPENSATING_POWER)

        # Assert
        assert metadata["sharpening"] == "true"
        assert metadata["non_separable"] == "true"
        assert float(metadata["max_deviation"]) > 0.05
        assert float(metadata["joint_at_reference"]) > float(metadata["lens_at_reference"])
        assert frame["mtf_joint"].iloc[2] > frame["mtf_lens"].iloc[2]

    def test_same_sign_windscreen(self, runner, write_json, tmp_path):
        # Execute
        _, metadata, _ = self.run(runner, write_json, tmp_path, -COMPENSATING_POWER)

        # Assert
        assert metadata["sharpening"] == "false"
        assert float(metadata["joint_at_reference"]) < float(metadata["lens_at_reference"])

    def test_requires_windscreen(self, runner, write_json, tmp_path):
        # Execute
        result = runner.invoke(
            cli,
            [
                "system-mtf",
                "--system",
                write_json("lens.json", system_payload(None)),
                "--output",
                str(tmp_path / "s.csv"),
            ],
        )

        # Assert
        assert result.exit_code == 2


class TestMTFSystemRoute:
    def test_windscreen_beats_lens_alone(self, runner, write_json, tmp_path):
        """Test the compensated system at 0.25 of the cutoff."""
        # Setup
        joint_csv, lens_csv = tmp_path / "joint.csv", tmp_path / "lens.csv"
        sources = {
            joint_csv: write_json("joint.json", system_payload(COMPENSATING_POWER)),
            lens_csv: write_json("lens.json", system_payload(None)),
        }

        # Execute
        for output, system in sources.items():
            result = runner.invoke(
                cli,
                [
                    "mtf",
                    "--system",
                    system,
                    "--output",
                    str(output),
                    "--field-deg",
                    "20",
                    "--orientation",
                    "vertical",
                    "--samples",
                    "5",
                ],
            )
            assert result.exit_code == 0, result.output

        # Assert
        joint, _, _ = read_table(joint_csv, ["freq_cyc_per_mm", "mtf"])
        lens, _, _ = read_table(lens_csv, ["freq_cyc_per_mm", "mtf"])
        freq = joint["freq_cyc_per_mm"]
        assert freq.iloc[1] / freq.iloc[-1] == pytest.approx(0.25, rel=1e-5)
        assert joint["mtf"].iloc[1] > lens["mtf"].iloc[1] + 0.2


class TestThroughFocus:
    def test_reference_mtf_falls_with_defocus(self):
        """Test monotonic loss at the reference frequency over 0 to 100 um."""
        # Setup
        offsets = [0.0, 25e-6, 50e-6, 75e-6, 100e-6]
        lens = LensModel(
            focal_length=FOCAL_LENGTH,
            field_curvature=[(float(i), dz) for i, dz in enumerate(offsets)],
        )

        # Execute
        values = [
            system_mtf(
                lens, None, float(field), Orientation.HORIZONTAL, 550e-9, [0.02 / 1.1e-6]
            ).values[0]
            for field in range(len(offsets))
        ]

        # Assert
        assert np.all(np.diff(values) < 0.0)
        assert values[0] == pytest.approx(0.9745, abs=1e-3)
