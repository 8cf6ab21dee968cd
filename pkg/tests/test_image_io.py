"""PNG / PPM loading, saving, and format rejection."""
import struct
import zlib

import numpy as np
import pytest
from PIL import Image

from lumen.core import RgbImage
from lumen.errors import ImageFormatError
from lumen.harness import SyntheticSpec, synth_vignette
from lumen.image_io import load_image, quantize_bytes, save_image


def make_png(width, height, bit_depth, color_type, bytes_per_px, tmp_path,
             name="forged.png"):
    """Hand-assembled PNG so headers outside Pillow's writers can be built."""
    def chunk(tag, payload):
        crc = zlib.crc32(tag + payload) & 0xFFFFFFFF
        return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", crc)

    ihdr = struct.pack(">IIBBBBB", width, height, bit_depth, color_type, 0, 0, 0)
    row = b"\x00" + b"\x40" * (width * bytes_per_px)
    idat = zlib.compress(row * height)
    blob = (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr)
            + chunk(b"IDAT", idat) + chunk(b"IEND", b""))
    path = tmp_path / name
    path.write_bytes(blob)
    return path


def checker(side=8):
    grid = np.indices((side, side)).sum(axis=0) % 2
    px = np.stack([grid * 0.8 + 0.1, grid * 0.5, np.full((side, side), 0.25)], axis=2)
    return RgbImage(px)


class TestPngRoundTrip:
    def test_save_load_preserves_bytes(self, tmp_path):
        img = checker()
        path = tmp_path / "c.png"
        save_image(img, path)
        back = load_image(path)
        assert np.array_equal(quantize_bytes(back), quantize_bytes(img))

    def test_quantization_rounds_half_up(self, tmp_path):
        levels = np.array([0.0, 0.5 / 255.0, 1.5 / 255.0, 1.0])
        px = np.tile(levels.reshape(2, 2, 1), (1, 1, 3))
        path = tmp_path / "q.png"
        save_image(RgbImage(px), path)
        back = quantize_bytes(load_image(path))
        assert back[:, :, 0].ravel().tolist() == [0, 1, 2, 255]

    def test_alpha_dropped(self, tmp_path):
        rgba = np.zeros((4, 4, 4), dtype=np.uint8)
        rgba[:, :, 0] = 200
        rgba[:, :, 3] = 7  # nearly transparent, must not scale the color
        path = tmp_path / "a.png"
        Image.fromarray(rgba, mode="RGBA").save(path)
        img = load_image(path)
        assert img.pixels.shape == (4, 4, 3)
        assert img.pixels[0, 0, 0] == pytest.approx(200 / 255.0)

    def test_synthetic_survives_disk(self, tmp_path):
        img = synth_vignette(SyntheticSpec(seed=6, noise_amp=0.03))
        path = tmp_path / "v.png"
        save_image(img, path)
        back = load_image(path)
        assert np.abs(back.pixels - img.pixels).max() <= 0.5 / 255.0 + 1e-12


class TestPngRejection:
    def test_sixteen_bit_rejected(self, tmp_path):
        path = make_png(4, 4, bit_depth=16, color_type=2, bytes_per_px=6,
                        tmp_path=tmp_path)
        with pytest.raises(ImageFormatError, match="bit depth 16"):
            load_image(path)

    def test_grayscale_rejected(self, tmp_path):
        path = make_png(4, 4, bit_depth=8, color_type=0, bytes_per_px=1,
                        tmp_path=tmp_path)
        with pytest.raises(ImageFormatError, match="color type 0"):
            load_image(path)

    def test_palette_rejected(self, tmp_path):
        img = Image.new("P", (4, 4))
        path = tmp_path / "pal.png"
        img.save(path)
        with pytest.raises(ImageFormatError):
            load_image(path)

    def test_garbage_rejected(self, tmp_path):
        path = tmp_path / "noise.bin"
        path.write_bytes(b"\x00\x01\x02 definitely not an image")
        with pytest.raises(ImageFormatError):
            load_image(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_image(tmp_path / "absent.png")

    def test_single_pixel_rejected(self, tmp_path):
        path = tmp_path / "dot.png"
        Image.fromarray(np.zeros((1, 1, 3), dtype=np.uint8), "RGB").save(path)
        with pytest.raises(ImageFormatError, match="2x2"):
            load_image(path)


class TestPpm:
    def test_round_trip(self, tmp_path):
        img = checker()
        path = tmp_path / "c.ppm"
        save_image(img, path)
        back = load_image(path)
        assert np.array_equal(quantize_bytes(back), quantize_bytes(img))

    def test_header_layout(self, tmp_path):
        path = tmp_path / "h.ppm"
        save_image(checker(4), path)
        assert path.read_bytes().startswith(b"P6\n4 4\n255\n")

    def test_comments_and_whitespace(self, tmp_path):
        raster = bytes(range(2 * 2 * 3))
        blob = b"P6 # comment after magic\n# full line\n 2\t2\n255\n" + raster
        path = tmp_path / "c.ppm"
        path.write_bytes(blob)
        img = load_image(path)
        assert quantize_bytes(img)[1, 1, 2] == 11

    def test_wrong_maxval_rejected(self, tmp_path):
        path = tmp_path / "deep.ppm"
        path.write_bytes(b"P6\n2 2\n65535\n" + bytes(24))
        with pytest.raises(ImageFormatError, match="maxval"):
            load_image(path)

    def test_truncated_raster_rejected(self, tmp_path):
        path = tmp_path / "cut.ppm"
        path.write_bytes(b"P6\n4 4\n255\n" + bytes(10))
        with pytest.raises(ImageFormatError, match="truncated"):
            load_image(path)

    def test_ascii_variant_rejected(self, tmp_path):
        path = tmp_path / "plain.ppm"
        path.write_bytes(b"P3\n2 2\n255\n0 0 0 0 0 0 0 0 0 0 0 0\n")
        with pytest.raises(ImageFormatError):
            load_image(path)


class TestSaveValidation:
    def test_unknown_extension_rejected(self, tmp_path):
        with pytest.raises(ImageFormatError, match="extension"):
            save_image(checker(), tmp_path / "c.bmp")

    def test_formats_agree(self, tmp_path):
        img = synth_vignette(SyntheticSpec(seed=8, noise_amp=0.05))
        png, ppm = tmp_path / "x.png", tmp_path / "x.ppm"
        save_image(img, png)
        save_image(img, ppm)
        assert np.array_equal(load_image(png).pixels, load_image(ppm).pixels)
