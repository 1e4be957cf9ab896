"""Tests for block DCTs, the quantizer and the 8×8 lattice."""

from decimal import Decimal, getcontext

import numpy as np
import pytest

from softjpeg.models.images import PixelImage
from softjpeg.transform import (
    DCT_MATRIX,
    ORTHONORMAL_SCALE,
    assemble_blocks,
    dct1d,
    dct2d,
    dequantize,
    extract_blocks,
    from_zigzag,
    idct2d,
    quantize,
    to_zigzag,
)


class TestDct1d:
    def test_constant_signal_has_only_dc(self) -> None:
        np.testing.assert_allclose(dct1d([1, 1, 1, 1]), [4, 0, 0, 0], atol=1e-12)

    def test_alternating_signal_has_zero_dc(self) -> None:
        assert abs(dct1d([1, -1, 1, -1])[0]) < 1e-12

    def test_matches_extended_precision_sum(self) -> None:
        """X_1 of x_n = n + 1/2 against a 50-digit evaluation of the cosine sum."""
        getcontext().prec = 50
        n_samples = 8
        # cos via its Taylor series, enough terms for |arg| < pi
        def cos(x: Decimal) -> Decimal:
            term, total, k = Decimal(1), Decimal(1), 0
            while abs(term) > Decimal(10) ** -45:
                k += 2
                term = -term * x * x / (k * (k - 1))
                total += term
            return total

        pi = Decimal("3.14159265358979323846264338327950288419716939937510")
        exact = sum(
            (Decimal(n) + Decimal("0.5")) * cos(pi / n_samples * (Decimal(n) + Decimal("0.5")))
            for n in range(n_samples)
        )
        x = np.arange(n_samples) + 0.5
        assert dct1d(x)[1] == pytest.approx(float(exact), abs=1e-12)

    def test_rejects_empty_input(self) -> None:
        with pytest.raises(ValueError):
            dct1d([])

    def test_orthonormal_rows_are_scaled_unnormalized_dct(self, rng) -> None:
        x = rng.normal(size=8)
        np.testing.assert_allclose(DCT_MATRIX @ x, ORTHONORMAL_SCALE * dct1d(x), atol=1e-12)


class TestDct2d:
    def test_constant_block(self) -> None:
        coeffs = dct2d(np.full((8, 8), 3.0))
        assert coeffs[0, 0] == pytest.approx(24.0)
        coeffs[0, 0] = 0.0
        assert np.max(np.abs(coeffs)) < 1e-12

    def test_round_trip(self, rng) -> None:
        block = rng.uniform(-128, 127, size=(8, 8))
        np.testing.assert_allclose(idct2d(dct2d(block)), block, atol=1e-10)

    def test_parseval(self, rng) -> None:
        block = rng.normal(size=(8, 8))
        assert np.linalg.norm(dct2d(block)) == pytest.approx(np.linalg.norm(block))

    def test_batched_blocks(self, rng) -> None:
        blocks = rng.normal(size=(3, 2, 8, 8))
        batched = dct2d(blocks)
        np.testing.assert_allclose(batched[1, 1], dct2d(blocks[1, 1]))


class TestQuantizer:
    def test_rounds_to_nearest_index(self) -> None:
        assert int(quantize(37.0, 10.0)) == 4
        assert float(dequantize(4, 10.0)) == 40.0

    def test_half_cell_boundary(self) -> None:
        assert int(quantize(-5.0, 10.0)) == 0
        assert int(quantize(5.0, 10.0)) == 1

    def test_error_within_half_step(self, rng) -> None:
        values = rng.uniform(-500, 500, size=1000)
        steps = rng.integers(1, 100, size=1000).astype(float)
        error = np.abs(dequantize(quantize(values, steps), steps) - values)
        assert np.all(error <= steps / 2 + 1e-12)

    def test_sign_symmetry_off_boundaries(self, rng) -> None:
        values = rng.uniform(-300, 300, size=500)
        values = values[np.abs(np.mod(values / 7.0, 1.0) - 0.5) > 1e-6]
        np.testing.assert_array_equal(quantize(-values, 7.0), -quantize(values, 7.0))

    def test_rejects_non_positive_step(self) -> None:
        with pytest.raises(ValueError):
            quantize(1.0, 0.0)


def test_zigzag_round_trip_and_order() -> None:
    block = np.arange(64).reshape(8, 8)
    zz = to_zigzag(block)
    assert list(zz[:6]) == [0, 1, 8, 16, 9, 2]
    np.testing.assert_array_equal(from_zigzag(zz), block)


def test_box_constraint_holds_for_hard_decoded_block(rng) -> None:
    steps = rng.integers(1, 60, size=(8, 8)).astype(float)
    gamma = rng.integers(-10, 10, size=(8, 8))
    block = idct2d(gamma * steps)
    assert np.all(np.abs(dct2d(block) - gamma * steps) <= steps / 2 + 1e-9)


class TestBlockGrid:
    def test_round_trip_on_aligned_image(self, rng) -> None:
        img = PixelImage(samples=rng.uniform(0, 255, size=(16, 24)))
        np.testing.assert_array_equal(assemble_blocks(extract_blocks(img)).samples, img.samples)

    def test_padding_replicates_edges(self) -> None:
        plane = np.arange(100, dtype=float).reshape(10, 10)
        grid = extract_blocks(plane)
        assert (grid.block_rows, grid.block_cols) == (2, 2)
        assert (grid.pad_right, grid.pad_bottom) == (6, 6)
        padded = assemble_blocks(grid, crop=False).plane(0)
        np.testing.assert_array_equal(padded[:10, 15], plane[:, 9])
        np.testing.assert_array_equal(padded[15, :10], plane[9, :])
        np.testing.assert_array_equal(assemble_blocks(grid).plane(0), plane)

    def test_single_block_image(self, rng) -> None:
        plane = rng.normal(size=(8, 8))
        grid = extract_blocks(plane)
        assert grid.blocks.shape == (1, 1, 8, 8)
        np.testing.assert_array_equal(grid.blocks[0, 0], plane)
