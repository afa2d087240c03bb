import numpy as np
import pandas as pd
import pytest

from src.core.exceptions import ChenViolationError, DataFormatError
from src.mult_func.io import read_area_csv, write_area_csv


class TestAreaFiles:
    """Area CSV files paired with their paths"""

    @pytest.mark.unit
    @pytest.mark.fast
    def test_write_and_read(self, smooth_functional, output_dir):
        """A written area loads back and passes the Chen check"""
        mf = smooth_functional
        target = write_area_csv(mf, output_dir / "area.csv")
        frame = pd.read_csv(target)
        assert list(frame.columns) == ["i", "j", "a11", "a12", "a21", "a22"]
        assert len(frame) == (mf.n_points + 1) * (mf.n_points + 2) // 2
        loaded = read_area_csv(target, mf.x, mf.y, 0.4)
        np.testing.assert_allclose(loaded.area_at(3, 90), mf.area_at(3, 90), atol=1e-14)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_corrupted_entry(self, linear_functional, output_dir):
        """An edited entry breaks the Chen relation"""
        target = write_area_csv(linear_functional, output_dir / "area.csv")
        frame = pd.read_csv(target)
        row = frame.index[(frame["i"] == 0) & (frame["j"] == 64)][0]
        frame.loc[row, "a11"] += 0.01
        frame.to_csv(target, index=False)
        with pytest.raises(ChenViolationError):
            read_area_csv(target, linear_functional.x, linear_functional.y, 0.4)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_missing_pairs(self, linear_functional, output_dir):
        """Every pair i <= j needs a row"""
        target = write_area_csv(linear_functional, output_dir / "area.csv")
        frame = pd.read_csv(target)
        frame.iloc[:-5].to_csv(target, index=False)
        with pytest.raises(DataFormatError):
            read_area_csv(target, linear_functional.x, linear_functional.y, 0.4)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_wrong_dimensions(self, linear_functional, smooth_functional, output_dir):
        """Column layout must match the path dimensions"""
        target = write_area_csv(linear_functional, output_dir / "area.csv")
        with pytest.raises(DataFormatError):
            read_area_csv(target, smooth_functional.x, smooth_functional.y, 0.4)

    @pytest.mark.unit
    @pytest.mark.fast
    def test_reversed_pair(self, linear_functional, output_dir):
        """Rows with i > j are rejected"""
        target = write_area_csv(linear_functional, output_dir / "area.csv")
        frame = pd.read_csv(target)
        frame.loc[1, ["i", "j"]] = [2, 1]
        frame.to_csv(target, index=False)
        with pytest.raises(DataFormatError):
            read_area_csv(target, linear_functional.x, linear_functional.y, 0.4)
