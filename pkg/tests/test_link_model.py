import itertools
import threading
from collections import deque

import numpy as np
import pytest

from platelink.errors import NibbleFramingError
from platelink.link_model import (
    Edge,
    LineRate,
    NibbleStream,
    PingPongBuffer,
    from_nibbles,
    line_rate_images_per_second,
    schedule_to_csv,
    schedule_transmission,
    to_nibbles,
)


class TestNibbles:
    def test_single_octet(self):
        stream = to_nibbles(b"\xab")
        assert stream.symbols == ((Edge.RISING, 0xA), (Edge.FALLING, 0xB))

    def test_empty_input(self):
        assert to_nibbles(b"").symbols == ()
        assert from_nibbles(to_nibbles(b"")) == b""

    def test_boundary_octets(self):
        stream = to_nibbles(b"\x00\xff")
        assert stream.symbols == (
            (Edge.RISING, 0x0),
            (Edge.FALLING, 0x0),
            (Edge.RISING, 0xF),
            (Edge.FALLING, 0xF),
        )

    def test_roundtrip_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(10_000):
            data = bytes(rng.integers(0, 256, size=int(rng.integers(0, 24)), dtype=np.uint8))
            assert from_nibbles(to_nibbles(data)) == data

    def test_stream_length_is_double(self):
        assert len(to_nibbles(b"\x01\x02\x03")) == 6

    def test_odd_length_rejected(self):
        with pytest.raises(NibbleFramingError):
            from_nibbles(NibbleStream(((Edge.RISING, 1),)))

    def test_wrong_start_edge_rejected(self):
        with pytest.raises(NibbleFramingError):
            from_nibbles(NibbleStream(((Edge.FALLING, 1), (Edge.RISING, 2))))

    def test_broken_alternation_rejected(self):
        bad = ((Edge.RISING, 1), (Edge.FALLING, 2), (Edge.FALLING, 3), (Edge.RISING, 4))
        with pytest.raises(NibbleFramingError):
            from_nibbles(NibbleStream(bad))

    def test_out_of_range_value_rejected(self):
        with pytest.raises(NibbleFramingError):
            from_nibbles(NibbleStream(((Edge.RISING, 16), (Edge.FALLING, 0))))


class TestPingPong:
    def test_single_frame_pass_through(self):
        buf = PingPongBuffer()
        assert buf.submit("A")
        assert buf.take() == "A"
        assert buf.take() is None

    def test_second_submit_backpressures(self):
        buf = PingPongBuffer()
        assert buf.submit("A")
        assert not buf.submit("B")  # write slot still holds A
        assert buf.take() == "A"
        assert buf.submit("B")

    def test_none_not_bufferable(self):
        with pytest.raises(ValueError):
            PingPongBuffer().submit(None)

    def test_interleaved_fifo_order(self):
        rng = np.random.default_rng(1)
        buf = PingPongBuffer()
        submitted = deque()
        taken = []
        next_item = 0
        while len(taken) < 100:
            if rng.random() < 0.5 and next_item < 100:
                if buf.submit(next_item):
                    submitted.append(next_item)
                    next_item += 1
            else:
                item = buf.take()
                if item is not None:
                    assert item == submitted.popleft()
                    taken.append(item)
        assert taken == list(range(100))

    def test_exhaustive_traces_match_plain_queue(self):
        # Every submit/take trace to depth 12 against a plain FIFO reference.
        # Between sequential calls the buffer holds at most one undelivered
        # frame (take drains the read slot in the same call it swaps), so
        # submit must be accepted exactly when the reference is empty.
        for depth in range(1, 13):
            for trace in itertools.product("st", repeat=depth):
                buf = PingPongBuffer()
                reference = deque()
                counter = 0
                for action in trace:
                    if action == "s":
                        accepted = buf.submit(counter)
                        assert accepted == (len(reference) == 0)
                        if accepted:
                            reference.append(counter)
                            counter += 1
                    else:
                        item = buf.take()
                        if reference:
                            assert item == reference.popleft()
                        else:
                            assert item is None
                    # roles stay distinct: one writable slot, one readable
                    assert buf._read != buf._write
                # drain: everything accepted comes out, in order
                while reference:
                    assert buf.take() == reference.popleft()
                assert buf.take() is None

    def test_roles_swap_on_take(self):
        buf = PingPongBuffer()
        first_write = buf._write
        buf.submit("A")
        assert buf._write == first_write  # submit never swaps
        assert buf.take() == "A"
        assert buf._write != first_write  # the take swapped roles

    def test_spsc_threads_preserve_order(self):
        buf = PingPongBuffer()
        out = []

        def consume():
            while len(out) < 500:
                item = buf.take()
                if item is not None:
                    out.append(item)

        consumer = threading.Thread(target=consume)
        consumer.start()
        for i in range(500):
            while not buf.submit(i):
                pass
        consumer.join()
        assert out == list(range(500))


class TestSchedule:
    def test_single_frame_duration(self):
        ((start, end),) = schedule_transmission([1078])
        assert start == 0.0
        assert abs(end - 8.624e-6) < 1e-12

    def test_image_of_300_frames(self):
        schedule = schedule_transmission([1078] * 300)
        assert len(schedule) == 300
        gap_time = 12 / 125e6
        total = schedule[-1][1] + gap_time
        assert abs(total - 2.616e-3) < 1e-6
        assert abs(schedule[-1][1] - 2.615904e-3) < 1e-9

    def test_zero_frames(self):
        assert schedule_transmission([]) == []

    def test_matches_cumulative_oracle(self):
        rng = np.random.default_rng(2)
        sizes = [int(s) for s in rng.integers(64, 1518, size=20)]
        rate = LineRate(bytes_per_second=1_000_000, interframe_gap=9)
        schedule = schedule_transmission(sizes, rate)
        cursor = 0.0
        for size, (start, end) in zip(sizes, schedule):
            assert abs(start - cursor) < 1e-12
            assert abs(end - (cursor + size / 1e6)) < 1e-12
            cursor = end + 9 / 1e6

    def test_csv_format(self):
        csv = schedule_to_csv(schedule_transmission([1078, 1078]))
        lines = csv.strip().splitlines()
        assert lines[0] == "index,start_s,end_s"
        assert lines[1].startswith("0,0.000000000000,")
        assert len(lines) == 3

    def test_line_rate_images_per_second(self):
        rate_ips = line_rate_images_per_second(300, 1078)
        assert abs(rate_ips - 125e6 / (300 * 1090)) < 1e-9
        assert rate_ips > 380

    def test_line_rate_validation(self):
        with pytest.raises(ValueError):
            LineRate(bytes_per_second=0)
        with pytest.raises(ValueError):
            LineRate(interframe_gap=-1)
