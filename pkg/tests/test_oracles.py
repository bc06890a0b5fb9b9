"""
Brute-force oracle suites and randomized property trials.

The oracles work on small integer (or dyadic) instances so every
comparison they make is exact.
"""

import sys
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from imaging import TilingSpec, block_weights, encode_image, inhibit_region
from pooler import ConnectionMatrix, NeighborhoodMap, compute_overlap, inhibit_mean, inhibit_percentile

TRIALS = 1000
PROPERTY_SETTINGS = settings(max_examples=200, derandomize=True, deadline=None)


def random_neighborhoods(rng: np.random.Generator, n: int):
    lists = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        keep = rng.random(len(others)) < rng.random()
        lists.append([j for j, k in zip(others, keep) if k])
    return lists


def oracle_percentile(overlaps, lists, percent_s, theta_s):
    """percent_s is s in hundredths"""
    alpha = []
    for i, o in enumerate(overlaps):
        if o < theta_s:
            alpha.append(0)
            continue
        values = sorted(overlaps[j] for j in lists[i])
        if not values:
            alpha.append(1)
            continue
        rank = -(-(100 - percent_s) * len(values) // 100)
        rank = min(max(rank, 1), len(values))
        alpha.append(1 if o >= values[rank - 1] else 0)
    return alpha


def oracle_mean(overlaps, lists):
    alpha = []
    for i, o in enumerate(overlaps):
        if not lists[i]:
            alpha.append(1 if o > 0 else 0)
        else:
            alpha.append(1 if o * len(lists[i]) >= sum(overlaps[j] for j in lists[i]) else 0)
    return alpha


class TestInhibitionOracles:
    """Inhibition rules against exhaustive recomputation"""

    def test_percentile_oracle(self):
        """Sorted-neighborhood percentile on 1,000 random instances"""
        rng = np.random.default_rng(20240601)
        mismatches = 0
        for _ in range(TRIALS):
            n = int(rng.integers(1, 17))
            lists = random_neighborhoods(rng, n)
            overlaps = [int(v) for v in rng.integers(0, 6, n)]
            percent_s = int(rng.integers(1, 101))
            theta_s = int(rng.integers(0, 4))
            got = inhibit_percentile(overlaps, NeighborhoodMap.from_lists(lists),
                                     percent_s / 100, theta_s).bits.tolist()
            mismatches += got != oracle_percentile(overlaps, lists, percent_s, theta_s)
        assert mismatches == 0

    def test_mean_oracle(self):
        """Neighborhood mean in integer arithmetic on 1,000 random instances"""
        rng = np.random.default_rng(20240602)
        mismatches = 0
        for _ in range(TRIALS):
            n = int(rng.integers(1, 17))
            lists = random_neighborhoods(rng, n)
            overlaps = [int(v) for v in rng.integers(0, 8, n)]
            got = inhibit_mean(overlaps, NeighborhoodMap.from_lists(lists)).bits.tolist()
            mismatches += got != oracle_mean(overlaps, lists)
        assert mismatches == 0


class TestOverlapOracle:
    """Sparse overlap against a dense double loop"""

    def test_overlap_oracle(self):
        """o_i = beta_i * sum_j B_ij Z_j on 1,000 random instances"""
        rng = np.random.default_rng(20240603)
        mismatches = 0
        for _ in range(TRIALS):
            n_columns = int(rng.integers(1, 17))
            n_inputs = int(rng.integers(1, 25))
            present = rng.random((n_columns, n_inputs)) < 0.6
            dense = (rng.random((n_columns, n_inputs)) < 0.5) & present
            z = rng.integers(0, 2, n_inputs)
            beta = rng.integers(1, 9, n_columns) / 4.0

            entries = {(i, j): float(dense[i, j]) for i in range(n_columns)
                       for j in range(n_inputs) if present[i, j]}
            conn = ConnectionMatrix.from_dict(entries, n_columns, n_inputs)

            expected = []
            for i in range(n_columns):
                total = 0
                for j in range(n_inputs):
                    if dense[i, j] and z[j]:
                        total += 1
                expected.append(beta[i] * total)
            mismatches += compute_overlap(conn, z, beta).tolist() != expected
        assert mismatches == 0


class TestRegionOracle:
    """Region inhibition against integer comparison with the region sum"""

    def test_region_oracle(self):
        """Strictly above the mean on 1,000 random regions"""
        rng = np.random.default_rng(20240604)
        mismatches = 0
        for _ in range(TRIALS):
            rows = int(rng.integers(1, 5))
            cols = int(rng.integers(1, 5))
            scalars = rng.integers(0, 10, (rows, cols))
            n = rows * cols
            total = int(scalars.sum())
            expected = [[1 if int(v) * n > total else 0 for v in row] for row in scalars]
            mismatches += inhibit_region(scalars / 9.0).tolist() != expected
        assert mismatches == 0


pixel_levels = arrays(np.int64, st.tuples(st.integers(1, 8), st.integers(1, 8)),
                      elements=st.integers(0, 255))


class TestImagingProperties:
    """Randomized imaging invariants"""

    @PROPERTY_SETTINGS
    @given(level=st.integers(0, 255), rows=st.integers(1, 24), cols=st.integers(1, 24),
           block=st.integers(1, 5), region=st.integers(1, 4),
           neighborhood=st.sampled_from([1, 3, 5]))
    def test_constant_image_encodes_blank(self, level, rows, cols, block, region, neighborhood):
        """A constant image has no active block"""
        tiling = TilingSpec((block, block), (region, region), neighborhood)
        encoded = encode_image(np.full((rows, cols), level / 255.0), tiling)
        assert encoded.bits.sum() == 0

    @PROPERTY_SETTINGS
    @given(block=pixel_levels, shift=st.integers(-255, 255), neighborhood=st.sampled_from([1, 3, 5]))
    def test_brightness_shift_covariance(self, block, shift, neighborhood):
        """Adding a constant to a block leaves its weights unchanged"""
        # dyadic levels keep every window sum exact
        x = block / 256.0
        assert np.array_equal(block_weights(x, neighborhood),
                              block_weights(x + shift / 256.0, neighborhood))

    @PROPERTY_SETTINGS
    @given(scalars=pixel_levels, scale=st.floats(0.01, 100.0))
    def test_contrast_scale_invariance(self, scalars, scale):
        """Scaling every block scalar of a region leaves activations unchanged"""
        v = scalars / 255.0
        assert np.array_equal(inhibit_region(v), inhibit_region(v * scale))

    @PROPERTY_SETTINGS
    @given(image=arrays(np.int64, st.tuples(st.integers(4, 20), st.integers(4, 20)),
                        elements=st.integers(0, 255)),
           block=st.integers(1, 4), region=st.integers(1, 3))
    def test_inhibition_only_removes_bits(self, image, block, region):
        """The encoding is never denser than the union of block masks"""
        encoded = encode_image(image / 255.0, TilingSpec((block, block), (region, region), 3))
        assert encoded.bits.sum() <= encoded.weights.sum()
        assert np.all(encoded.bits <= encoded.weights)
