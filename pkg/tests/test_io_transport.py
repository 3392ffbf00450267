import struct
import threading
import time

import numpy as np
import pytest

from platelink.demosaic import BayerFrame, BayerOrder
from platelink.detector import BinaryFrame, DetectorConfig, detect_plate
from platelink.errors import (
    CaptureFormatError,
    CaptureTruncatedError,
    DimensionError,
    TransportError,
)
from platelink.frame_codec import (
    NetConfig,
    SenderSession,
    chunk_payloads,
    map_binary_to_bytes,
    map_bytes_to_binary,
)
from platelink.io_transport import (
    frames_from_capture,
    load_bayer_image,
    read_bayer_raw,
    read_binary_pgm,
    read_capture,
    read_pgm,
    read_ppm,
    read_rgb_ppm,
    udp_receive,
    udp_send,
    write_bayer_raw,
    write_binary_pgm,
    write_capture,
    write_pgm,
    write_ppm,
    write_rgb_ppm,
)
from platelink.link_model import schedule_transmission
from platelink.synthetic import synthetic_scene


class TestNetpbm:
    def test_pgm_roundtrip_16bit(self, tmp_path):
        rng = np.random.default_rng(0)
        image = rng.integers(0, 4096, size=(6, 9), dtype=np.uint16)
        path = tmp_path / "image.pgm"
        write_pgm(path, image)
        back, maxval = read_pgm(path)
        assert maxval == 4095
        assert np.array_equal(back, image)

    def test_pgm_roundtrip_8bit(self, tmp_path):
        image = np.arange(12, dtype=np.uint8).reshape(3, 4)
        path = tmp_path / "image.pgm"
        write_pgm(path, image, maxval=255)
        back, maxval = read_pgm(path)
        assert maxval == 255
        assert np.array_equal(back, image)

    def test_ppm_roundtrip(self, tmp_path):
        rng = np.random.default_rng(1)
        pixels = rng.integers(0, 4096, size=(5, 7, 3), dtype=np.uint16)
        path = tmp_path / "image.ppm"
        write_ppm(path, pixels)
        back, maxval = read_ppm(path)
        assert maxval == 4095
        assert np.array_equal(back, pixels)

    def test_comments_in_header(self, tmp_path):
        path = tmp_path / "image.pgm"
        raster = np.array([[300, 400]], dtype=">u2").tobytes()
        path.write_bytes(b"P5\n# a comment\n2 1\n# another\n4095\n" + raster)
        back, _ = read_pgm(path)
        assert back.tolist() == [[300, 400]]

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "image.pgm"
        path.write_bytes(b"P6\n1 1\n255\n\x00\x00\x00")
        with pytest.raises(ValueError):
            read_pgm(path)

    def test_truncated_raster(self, tmp_path):
        path = tmp_path / "image.pgm"
        path.write_bytes(b"P5\n4 4\n4095\n\x00\x00")
        with pytest.raises(ValueError):
            read_pgm(path)

    def test_rgb_frame_helpers(self, tmp_path):
        frame, _ = synthetic_scene(16, 12, seed=3)
        path = tmp_path / "scene.ppm"
        write_rgb_ppm(path, frame)
        assert np.array_equal(read_rgb_ppm(path).pixels, frame.pixels)

    def test_binary_pgm_helpers(self, tmp_path):
        bits = np.random.default_rng(2).random((8, 10)) < 0.5
        path = tmp_path / "binary.pgm"
        write_binary_pgm(path, BinaryFrame(bits))
        assert np.array_equal(read_binary_pgm(path).bits, bits)


class TestRawBayer:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(3)
        frame = BayerFrame(rng.integers(0, 4096, size=(8, 6), dtype=np.uint16))
        path = tmp_path / "mosaic.bin"
        write_bayer_raw(path, frame)
        back = read_bayer_raw(path, 6, 8)
        assert np.array_equal(back.samples, frame.samples)

    def test_size_mismatch(self, tmp_path):
        path = tmp_path / "mosaic.bin"
        path.write_bytes(b"\x00" * 10)
        with pytest.raises(DimensionError):
            read_bayer_raw(path, 4, 4)

    def test_load_dispatches_on_extension(self, tmp_path):
        rng = np.random.default_rng(4)
        samples = rng.integers(0, 4096, size=(4, 6), dtype=np.uint16)
        pgm = tmp_path / "mosaic.pgm"
        write_pgm(pgm, samples)
        assert np.array_equal(load_bayer_image(pgm).samples, samples)
        raw = tmp_path / "mosaic.bin"
        write_bayer_raw(raw, BayerFrame(samples))
        assert np.array_equal(load_bayer_image(raw, 6, 4, BayerOrder.GRBG).samples, samples)
        with pytest.raises(DimensionError):
            load_bayer_image(raw)  # raw input needs geometry


def _some_frames(count=3):
    session = SenderSession(NetConfig())
    return [session.encode(bytes([k]) * 1024) for k in range(count)]


class TestCapture:
    def test_empty_capture_is_header_only(self):
        assert len(write_capture([])) == 24

    def test_single_frame_size(self):
        data = write_capture(_some_frames(1))
        assert len(data) == 24 + 16 + 1070

    def test_roundtrip_stored_bytes(self):
        frames = _some_frames()
        records = read_capture(write_capture(frames))
        assert [r.data for r in records] == [f.data[8:] for f in frames]
        restored = frames_from_capture(write_capture(frames))
        assert restored == [f.data for f in frames]

    def test_schedule_timestamps(self):
        frames = _some_frames(2)
        schedule = schedule_transmission([1078, 1078])
        records = read_capture(write_capture(frames, schedule))
        assert records[0].ts_sec == 0 and records[0].ts_usec == 0
        assert records[1].ts_usec == round(schedule[1][0] * 1e6)

    def test_timestamp_microsecond_rollover(self):
        frames = _some_frames(1)
        records = read_capture(write_capture(frames, [(0.9999996, 1.0)]))
        assert (records[0].ts_sec, records[0].ts_usec) == (1, 0)

    def test_swapped_byte_order_parses_identically(self):
        frames = _some_frames(2)
        little = write_capture(frames)
        # re-emit the same capture big-endian
        big = struct.pack(">IHHiIII", *struct.unpack("<IHHiIII", little[:24]))
        offset = 24
        for _ in frames:
            header = struct.pack(">IIII", *struct.unpack("<IIII", little[offset : offset + 16]))
            big += header + little[offset + 16 : offset + 16 + 1070]
            offset += 16 + 1070
        assert [r.data for r in read_capture(big)] == [r.data for r in read_capture(little)]

    def test_bad_magic(self):
        with pytest.raises(CaptureFormatError):
            read_capture(b"\xde\xad\xbe\xef" + bytes(20))

    def test_short_global_header(self):
        with pytest.raises(CaptureFormatError):
            read_capture(b"\xa1\xb2")

    def test_truncated_record_names_index(self):
        frames = _some_frames(2)
        data = write_capture(frames)
        with pytest.raises(CaptureTruncatedError) as err:
            read_capture(data[:-100])
        assert err.value.record_index == 1

    def test_truncated_record_header(self):
        data = write_capture(_some_frames(1))
        with pytest.raises(CaptureTruncatedError) as err:
            read_capture(data + b"\x00" * 7)
        assert err.value.record_index == 1


class TestUdp:
    def test_loopback_roundtrip(self):
        cfg = NetConfig(dst_ip=bytes([127, 0, 0, 1]), dst_port=45101)
        chunks = chunk_payloads(bytes(range(256)) * 12)  # 3072 -> 3 chunks
        result = {}

        def receiver():
            result["report"] = udp_receive(("127.0.0.1", 45101), expected=3, timeout=5.0)

        thread = threading.Thread(target=receiver)
        thread.start()
        time.sleep(0.05)  # let the receiver bind
        report = udp_send(chunks, cfg)
        thread.join()
        assert report.sent == 3
        assert result["report"].payloads == chunks
        assert not result["report"].timed_out

    def test_timeout_reports_partial(self):
        report = udp_receive(("127.0.0.1", 45102), expected=5, timeout=0.1)
        assert report.payloads == []
        assert report.timed_out
        assert report.count == 0

    def test_empty_send(self):
        cfg = NetConfig(dst_ip=bytes([127, 0, 0, 1]), dst_port=45103)
        assert udp_send([], cfg).sent == 0

    def test_send_failure_raises_transport_error(self):
        # broadcast without SO_BROADCAST is rejected by the stack
        cfg = NetConfig(dst_ip=bytes([255, 255, 255, 255]), dst_port=45104)
        with pytest.raises(TransportError):
            udp_send([b"\x00" * 1024], cfg)

    def test_bind_failure_raises_transport_error(self):
        with pytest.raises(TransportError):
            udp_receive(("203.0.113.7", 45105), expected=1, timeout=0.1)

    def test_receive_needs_stop_condition(self):
        with pytest.raises(ValueError):
            udp_receive(("127.0.0.1", 45106))

    def test_end_to_end_detect_send_receive_reassemble(self):
        frame, _ = synthetic_scene(64, 32, seed=9)
        detection = detect_plate(frame, DetectorConfig(min_run=8))
        binary = detection.binary
        data = map_binary_to_bytes(binary)
        chunks = chunk_payloads(data)

        cfg = NetConfig(dst_ip=bytes([127, 0, 0, 1]), dst_port=45107)
        result = {}

        def receiver():
            result["report"] = udp_receive(
                ("127.0.0.1", 45107), expected=len(chunks), timeout=5.0
            )

        thread = threading.Thread(target=receiver)
        thread.start()
        time.sleep(0.05)
        udp_send(chunks, cfg)
        thread.join()

        received = b"".join(result["report"].payloads)
        rebuilt = map_bytes_to_binary(received[: binary.width * binary.height], binary.width, binary.height)
        assert np.array_equal(rebuilt.bits, binary.bits)
