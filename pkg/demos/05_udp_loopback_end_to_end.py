"""Full loopback round trip: detect, packetize, send over UDP, rebuild.

The live path delegates headers to the host network stack (sending raw
Ethernet frames would need elevated privileges); the byte-exact custom
frames travel via the capture-file path shown in demo 03.
"""

import threading
import time
from pathlib import Path

import numpy as np

from platelink import (
    DetectorConfig,
    NetConfig,
    chunk_payloads,
    demosaic_downsample,
    detect_plate,
    map_binary_to_bytes,
    map_bytes_to_binary,
    synthetic_bayer_scene,
    udp_receive,
    udp_send,
)
from platelink.io_transport import write_binary_pgm

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

bayer, _ = synthetic_bayer_scene(1280, 960, seed=13)
binary = detect_plate(demosaic_downsample(bayer), DetectorConfig()).binary
chunks = chunk_payloads(map_binary_to_bytes(binary))
cfg = NetConfig(dst_ip=bytes([127, 0, 0, 1]), dst_port=47555)
print(f"image {binary.width}x{binary.height} -> {len(chunks)} datagrams of 1024 octets")

result = {}

def receive():
    result["report"] = udp_receive(("127.0.0.1", 47555), expected=len(chunks), timeout=10.0)

receiver = threading.Thread(target=receive)
receiver.start()
time.sleep(0.05)

report = udp_send(chunks, cfg)
receiver.join()
print(f"sent {report.sent}, received {result['report'].count}, "
      f"timed out: {result['report'].timed_out}")

data = b"".join(result["report"].payloads)
rebuilt = map_bytes_to_binary(data[: binary.width * binary.height], binary.width, binary.height)
print(f"received image equals the transmitted one: {np.array_equal(rebuilt.bits, binary.bits)}")

write_binary_pgm(out_dir / "received.pgm", rebuilt)
print(f"wrote {out_dir / 'received.pgm'}")
