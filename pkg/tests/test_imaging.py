"""
Tests for the imaging pipeline
"""

import pytest
import sys
from pathlib import Path

import numpy as np
from PIL import Image

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from imaging import (
    ImageFormatError, GrayImage, load_image, load_gray, to_grayscale, resize_nearest,
    pad_image, to_uint8, save_pgm, TilingError, TilingSpec, EncodedImage, block_weights,
    random_weights, apply_weights, block_scalar, inhibit_region, inhibit_region_percentile,
    encode_image, encode_many,
)
from imaging import encoder
from pooler import (
    CounterRng, SpConfig, Topology, build_potential_pool, init_permanence_random, connect_synapses,
)


def two_block_image(dark=0.1, bright=0.9):
    """One dark and one bright 2x2 block side by side"""
    pixels = np.full((2, 4), dark)
    pixels[:, 2:] = bright
    return GrayImage(pixels)


class TestGrayscale:
    """Test colour conversion"""

    def test_white_and_black(self):
        """Luma weights sum to one"""
        rgb = np.zeros((1, 2, 3))
        rgb[0, 0] = 1.0
        gray = to_grayscale(rgb)
        assert gray.pixels[0, 0] == pytest.approx(1.0)
        assert gray.pixels[0, 1] == 0.0

    def test_red(self):
        """Pure red is 0.299"""
        assert to_grayscale(np.array([[[1.0, 0.0, 0.0]]])).pixels[0, 0] == pytest.approx(0.299)

    def test_gray_passes_through(self):
        """2-D and single-channel input are unchanged"""
        pixels = np.array([[0.25, 0.5]])
        assert np.array_equal(to_grayscale(pixels).pixels, pixels)
        assert np.array_equal(to_grayscale(pixels[:, :, None]).pixels, pixels)

    def test_unsupported_channels(self):
        """Four channels are rejected"""
        with pytest.raises(ImageFormatError, match="channel"):
            to_grayscale(np.zeros((2, 2, 4)))

    def test_pixel_range(self):
        """Gray images hold values in [0, 1]"""
        with pytest.raises(ImageFormatError):
            GrayImage(np.array([[1.5]]))


class TestImageFiles:
    """Test reading and writing images"""

    def test_png_round_trip(self, tmp_path):
        """8-bit PNGs normalize by 255"""
        data = np.array([[0, 51, 255], [102, 204, 0]], dtype=np.uint8)
        path = tmp_path / "img.png"
        Image.fromarray(data).save(path)
        np.testing.assert_allclose(load_image(path), data / 255.0)

    def test_rgb_png(self, tmp_path):
        """Colour files come back with three channels"""
        data = np.zeros((2, 2, 3), dtype=np.uint8)
        data[..., 0] = 255
        path = tmp_path / "red.png"
        Image.fromarray(data).save(path)
        gray = load_gray(path)
        np.testing.assert_allclose(gray.pixels, np.full((2, 2), 0.299))

    def test_pgm_export(self, tmp_path):
        """Binary maps are written as P5 with 0/255 levels"""
        bits = np.array([[0, 1], [1, 0]], dtype=np.uint8)
        path = save_pgm(tmp_path / "out" / "bits.pgm", bits, binary=True)
        assert path.read_bytes().startswith(b"P5")
        with Image.open(path) as img:
            assert img.mode == "L"
            assert np.asarray(img).tolist() == [[0, 255], [255, 0]]

    def test_pgm_grey_levels(self, tmp_path):
        """Real-valued stages are scaled to 8 bits"""
        path = save_pgm(tmp_path / "grey.pgm", np.array([[0.0, 0.5, 1.0]]))
        assert np.allclose(load_image(path), np.array([[0, 128, 255]]) / 255.0)

    def test_to_uint8(self):
        """Rounding and clipping to 8 bits"""
        assert to_uint8(np.array([0.0, 0.5, 1.0])).tolist() == [0, 128, 255]
        assert to_uint8(np.array([0, 2, 1]), binary=True).tolist() == [0, 255, 255]

    def test_missing_file(self, tmp_path):
        """Missing files name their path"""
        path = tmp_path / "nope.png"
        with pytest.raises(ImageFormatError) as excinfo:
            load_image(path)
        assert excinfo.value.path == str(path)
        assert "nope.png" in str(excinfo.value)

    def test_corrupt_file(self, tmp_path):
        """Undecodable files name their path"""
        path = tmp_path / "broken.pgm"
        path.write_bytes(b"not an image at all")
        with pytest.raises(ImageFormatError, match="broken.pgm"):
            load_image(path)

    def test_pgm_16_bit_uses_header_maxval(self, tmp_path):
        """A 10-bit P5 file is scaled by its maxval of 1023"""
        path = tmp_path / "deep.pgm"
        samples = np.array([[0, 512, 1023]], dtype=">u2")
        path.write_bytes(b"P5\n# ten bits\n3 1\n1023\n" + samples.tobytes())
        np.testing.assert_allclose(load_image(path), [[0.0, 512 / 1023, 1.0]])

    def test_pgm_dark_16_bit_not_rescaled(self, tmp_path):
        """A full-range 16-bit PGM that peaks low stays dark"""
        path = tmp_path / "dark.pgm"
        samples = np.array([[0, 200]], dtype=">u2")
        path.write_bytes(b"P5 2 1 65535\n" + samples.tobytes())
        np.testing.assert_allclose(load_image(path), [[0.0, 200 / 65535]])

    def test_plain_pgm_small_maxval(self, tmp_path):
        """ASCII P2 with maxval 15"""
        path = tmp_path / "plain.pgm"
        path.write_text("P2\n2 2\n15\n0 15\n5 10\n")
        np.testing.assert_allclose(load_image(path), [[0.0, 1.0], [1 / 3, 2 / 3]])

    def test_truncated_pgm(self, tmp_path):
        """Short rasters name their path"""
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n4 4\n1023\n\x00\x01")
        with pytest.raises(ImageFormatError, match="short.pgm"):
            load_image(path)

    def test_16_bit_png_scaled_by_full_range(self, tmp_path):
        """16-bit PNGs divide by 65535 even when they peak below 256"""
        path = tmp_path / "deep.png"
        Image.fromarray(np.array([[0, 200]], dtype=np.uint16)).save(path)
        np.testing.assert_allclose(load_image(path), [[0.0, 200 / 65535]])


class TestResizeAndPad:
    """Test nearest-neighbour resize and edge padding"""

    def test_resize_nearest(self):
        """Each output cell samples the input cell under its centre"""
        pixels = np.arange(16, dtype=float).reshape(4, 4) / 15.0
        small = resize_nearest(pixels, 2, 2)
        np.testing.assert_array_equal(small.pixels, pixels[np.ix_([1, 3], [1, 3])])

    def test_resize_same_size(self):
        """Unchanged size is a no-op"""
        gray = GrayImage(np.zeros((3, 5)))
        assert resize_nearest(gray, 3, 5) is gray

    def test_load_gray_resizes(self, tmp_path):
        """load_gray applies the configured size"""
        path = tmp_path / "img.png"
        Image.fromarray(np.zeros((10, 6), dtype=np.uint8)).save(path)
        assert load_gray(path, (4, 3)).shape == (4, 3)

    def test_pad_replicates_edges(self):
        """Bottom and right borders are copied outward"""
        pixels = np.array([[0.1, 0.2, 0.3], [0.4, 0.5, 0.6], [0.7, 0.8, 0.9]])
        padded = pad_image(pixels, 2, 2)
        assert padded.shape == (4, 4)
        np.testing.assert_array_equal(padded[3], [0.7, 0.8, 0.9, 0.9])
        np.testing.assert_array_equal(padded[:, 3], [0.3, 0.6, 0.9, 0.9])


class TestTilingSpec:
    """Test tiling validation and geometry"""

    def test_padded_shape(self):
        """Images are padded to block x region multiples"""
        tiling = TilingSpec((2, 2), (2, 2), 3)
        assert tiling.padded_shape(10, 13) == (12, 16)
        assert tiling.block_grid(10, 13) == (6, 8)
        assert tiling.region_grid(10, 13) == (3, 4)

    def test_regions_cover_block_grid(self):
        """Region count times region size is the block grid"""
        for block, region in [((4, 4), (2, 3)), ((8, 4), (3, 1)), ((3, 5), (4, 4))]:
            tiling = TilingSpec(block, region, 1)
            grid = tiling.block_grid(37, 29)
            regions = tiling.region_grid(37, 29)
            assert (regions[0] * region[0], regions[1] * region[1]) == grid

    def test_even_neighborhood(self):
        """Neighborhood sides are odd"""
        with pytest.raises(TilingError) as excinfo:
            TilingSpec((8, 8), (4, 4), 4)
        assert excinfo.value.key == "neighborhood"

    def test_zero_block(self):
        """Block sizes are positive"""
        with pytest.raises(TilingError) as excinfo:
            TilingSpec((0, 8), (4, 4), 3)
        assert excinfo.value.key == "block_size"

    def test_dict_round_trip(self):
        """Provenance records rebuild the same spec"""
        tiling = TilingSpec((4, 6), (2, 3), 5)
        assert TilingSpec.from_dict(tiling.to_dict()) == tiling


class TestBlockOperations:
    """Test weights, scalars and region inhibition"""

    def test_constant_block_all_ones(self):
        """Every pixel equals its neighborhood mean"""
        assert block_weights(np.full((4, 4), 0.3), 3).tolist() == [[1] * 4] * 4

    def test_row_example(self):
        """[0, 1, 0] keeps only the middle pixel"""
        assert block_weights(np.array([0.0, 1.0, 0.0]), 3).tolist() == [0, 1, 0]

    def test_single_pixel_neighborhood(self):
        """x >= x everywhere"""
        block = np.random.default_rng(0).random((5, 5))
        assert block_weights(block, 1).sum() == 25

    def test_strict_switch(self):
        """strict=True drops pixels equal to their mean"""
        assert block_weights(np.full((3, 3), 0.5), 3, strict=True).sum() == 0

    def test_neighborhood_clipped_at_block_border(self):
        """Corner pixels average only the cells inside the block"""
        block = np.array([[1.0, 0.0], [0.0, 0.0]])
        # mean over the whole 2x2 block is 0.25 for every pixel
        assert block_weights(block, 3).tolist() == [[1, 0], [0, 0]]

    def test_stacked_blocks(self):
        """A stack of blocks is processed block by block"""
        a = np.array([[0.0, 1.0], [1.0, 1.0]])
        b = np.full((2, 2), 0.2)
        stacked = block_weights(np.stack([a, b]), 3)
        assert stacked[0].tolist() == block_weights(a, 3).tolist()
        assert stacked[1].tolist() == [[1, 1], [1, 1]]

    def test_apply_weights(self):
        """Elementwise product"""
        assert apply_weights([0.2, 0.8], [0, 1]).tolist() == [0.0, 0.8]
        assert apply_weights([0.2, 0.8], [0, 0]).tolist() == [0.0, 0.0]
        assert apply_weights([0.2, 0.8], [1, 1]).tolist() == [0.2, 0.8]
        with pytest.raises(TilingError):
            apply_weights([0.2, 0.8], [1, 1, 1])

    def test_block_scalar(self):
        """Mean of the weighted pixels"""
        assert block_scalar(np.zeros((2, 2))) == 0.0
        assert block_scalar(np.full((2, 2), 0.6)) == pytest.approx(0.6)
        assert block_scalar([0.0, 0.4, 0.8]) == pytest.approx(0.4)

    def test_inhibit_region(self):
        """Strictly above the region mean"""
        assert inhibit_region([1.0, 2.0, 3.0]).tolist() == [0, 0, 1]
        assert inhibit_region([0.4, 0.4, 0.4, 0.4]).tolist() == [0, 0, 0, 0]
        assert inhibit_region([0.9]).tolist() == [0]
        assert inhibit_region(np.array([[1.0, 3.0], [3.0, 1.0]])).tolist() == [[0, 1], [1, 0]]

    def test_block_scalar_stacked(self):
        """A stack of blocks gives one scalar per block"""
        stacked = np.stack([np.zeros((2, 2)), np.full((2, 2), 0.5)]).reshape(1, 2, 2, 2)
        assert block_scalar(stacked).tolist() == [[0.0, 0.5]]

    def test_inhibit_region_percentile(self):
        """Percentile variant with the other blocks as neighbors"""
        assert inhibit_region_percentile([1.0, 2.0, 3.0, 4.0], 0.25).tolist() == [0, 0, 0, 1]
        assert inhibit_region_percentile([0.5], 0.5, theta_s=0.0).tolist() == [1]
        assert inhibit_region_percentile([0.5], 0.5, theta_s=0.6).tolist() == [0]


class TestRandomWeights:
    """Test the random-weight mask"""

    def test_matches_pooler_core(self):
        """Each block is one column whose hypercube is the block itself"""
        tiling = TilingSpec((4, 4), (1, 2), 3)
        config = SpConfig(gamma=4, rho=0.5, theta_c=0.5, init_mode="random", seed=13)
        mask = random_weights((8, 8), tiling, config)

        topology = Topology((8, 8), (2, 2))
        pool = build_potential_pool(topology, config)
        dense = connect_synapses(init_permanence_random(pool, config), config.theta_c).to_dense()
        rows, cols = np.meshgrid(np.arange(8), np.arange(8), indexing="ij")
        block = (rows // 4) * 2 + cols // 4
        expected = dense[block.ravel(), (rows * 8 + cols).ravel()].reshape(8, 8)
        assert np.array_equal(mask, expected.astype(np.uint8))

    def test_seeded(self):
        """Same seed, same mask; other seed, other mask"""
        tiling = TilingSpec((4, 4), (2, 2), 3)
        a = random_weights((16, 16), tiling, SpConfig(seed=1))
        b = random_weights((16, 16), tiling, SpConfig(seed=1))
        c = random_weights((16, 16), tiling, SpConfig(seed=2))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_shape_must_tile(self):
        """Shapes are block multiples"""
        with pytest.raises(TilingError):
            random_weights((10, 8), TilingSpec((4, 4), (1, 1), 3), SpConfig())


class TestEncodeImage:
    """Test the full encoder"""

    def test_constant_image_is_blank(self):
        """Equal block scalars inhibit every region"""
        encoded = encode_image(np.full((16, 16), 0.6), TilingSpec((4, 4), (2, 2), 3))
        assert encoded.bits.sum() == 0
        assert encoded.block_active.sum() == 0

    def test_bright_block_survives(self):
        """In a two-block region only the bright block keeps its mask"""
        encoded = encode_image(two_block_image(), TilingSpec((2, 2), (1, 2), 3))
        assert encoded.block_active.tolist() == [[0, 1]]
        assert encoded.bits.tolist() == [[0, 0, 1, 1], [0, 0, 1, 1]]

    def test_output_dims_are_padded_dims(self):
        """Encodings always have the padded size"""
        pixels = np.random.default_rng(1).random((10, 13))
        encoded = encode_image(pixels, TilingSpec((2, 2), (2, 2), 3))
        assert encoded.dims == (12, 16)
        assert encoded.weights.shape == encoded.overlap.shape == (12, 16)
        assert encoded.scalars.shape == (6, 8)

    def test_deterministic(self):
        """Encoding twice gives the same bits"""
        pixels = np.random.default_rng(2).random((16, 16))
        tiling = TilingSpec((4, 4), (2, 2), 3)
        assert encode_image(pixels, tiling).same_bits(encode_image(pixels, tiling))

    def test_stages_consistent(self):
        """Bits are the weights of active blocks; activations follow the scalars"""
        pixels = np.random.default_rng(3).random((16, 16))
        tiling = TilingSpec((4, 4), (2, 2), 3)
        encoded = encode_image(pixels, tiling)
        active = np.kron(encoded.block_active, np.ones((4, 4), dtype=np.uint8))
        assert np.array_equal(encoded.bits, encoded.weights * active)
        np.testing.assert_allclose(encoded.overlap, pixels * encoded.weights)
        for a in range(2):
            for b in range(2):
                region = encoded.scalars[2 * a:2 * a + 2, 2 * b:2 * b + 2]
                expected = inhibit_region(region)
                assert encoded.block_active[2 * a:2 * a + 2, 2 * b:2 * b + 2].tolist() == expected.tolist()

    def test_random_mode(self):
        """Random-weight mode uses the seeded mask"""
        pixels = np.random.default_rng(4).random((8, 8))
        tiling = TilingSpec((4, 4), (1, 2), 3)
        config = SpConfig(init_mode="random", seed=5)
        encoded = encode_image(pixels, tiling, config)
        assert np.array_equal(encoded.weights, random_weights((8, 8), tiling, config))

    def test_percentile_mode(self):
        """Percentile region inhibition is selected from the config"""
        encoded = encode_image(two_block_image(), TilingSpec((2, 2), (1, 2), 3),
                               SpConfig(inhibit_mode="percentile", s=0.5))
        assert encoded.block_active.tolist() == [[0, 1]]

    def test_weights_shape_checked(self):
        """A precomputed mask must match the padded image"""
        with pytest.raises(TilingError):
            encode_image(np.zeros((8, 8)), TilingSpec((4, 4), (1, 1), 3),
                         weights=np.ones((4, 4), dtype=np.uint8))

    def test_pipeline_calls_region_operation(self, monkeypatch):
        """Mean inhibition runs through inhibit_region once per region"""
        calls = []
        original = encoder.inhibit_region

        def counting(scalars):
            calls.append(np.asarray(scalars).shape)
            return original(scalars)

        monkeypatch.setattr(encoder, "inhibit_region", counting)
        encode_image(np.random.default_rng(6).random((16, 16)), TilingSpec((4, 4), (2, 2), 3))
        assert calls == [(2, 2)] * 4

    def test_rule_mode_draws_nothing(self):
        """Rule-based encodings consume no random draws"""
        pixels = [np.random.default_rng(k).random((16, 16)) for k in range(3)]
        tiling = TilingSpec((4, 4), (2, 2), 3)
        before = CounterRng.total_draws
        encode_image(pixels[0], tiling)
        encode_image(pixels[0], tiling, SpConfig(seed=9))
        encode_many(pixels, tiling, SpConfig(inhibit_mode="percentile"))
        assert CounterRng.total_draws == before
        encode_many(pixels, tiling, SpConfig(init_mode="random"))
        assert CounterRng.total_draws > before

    def test_encode_many_shares_mask(self):
        """Images of one size share the random mask"""
        rng = np.random.default_rng(5)
        images = [rng.random((8, 8)) for _ in range(3)]
        config = SpConfig(init_mode="random", seed=9)
        encoded = encode_many(images, TilingSpec((4, 4), (1, 2), 3), config)
        assert all(np.array_equal(e.weights, encoded[0].weights) for e in encoded)

    def test_encoded_image_validation(self):
        """Bit maps must tile into the activation grid"""
        with pytest.raises(TilingError):
            EncodedImage(np.zeros((4, 4)), np.zeros((1, 1)), TilingSpec((2, 2), (1, 1), 1))
