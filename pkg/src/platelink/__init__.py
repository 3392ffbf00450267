"""Yellow number-plate detection pipeline with byte-exact frame output.

Stages: 12-bit Bayer mosaic -> quad-binning demosaic -> HSV yellow
segmentation and run-length plate localization -> two-color image ->
1078-byte Ethernet/IP/UDP frames with CRC-32, ping-pong buffering and a
double-data-rate nibble link model, plus capture-file and live-UDP
transports and a throughput benchmark.
"""

from .colorspace import HsvPixel, YellowWindow, classify_yellow, hsv_image, rgb_to_hsv, yellow_mask
from .demosaic import (
    BayerFrame,
    BayerOrder,
    RgbFrame,
    demosaic_downsample,
    iter_demosaic_rows,
)
from .detector import (
    BinaryFrame,
    DetectionResult,
    DetectorConfig,
    PlateRegion,
    detect_plate,
    overlay_region,
    scan_row_runs,
)
from .frame_codec import (
    EthernetFrame,
    EtherTypeMode,
    NetConfig,
    ParsedFrame,
    SenderSession,
    UdpChecksumMode,
    chunk_payloads,
    crc32_fcs,
    decode_frame,
    encode_frame,
    ip_header_checksum,
    map_binary_to_bytes,
    map_bytes_to_binary,
    parse_net_config,
    reassemble_image,
    udp_checksum,
)
from .link_model import (
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
from .io_transport import (
    CaptureRecord,
    ReceiveReport,
    SendReport,
    frames_from_capture,
    read_capture,
    udp_receive,
    udp_send,
    write_capture,
)
from .pipeline import (
    BenchReport,
    ImageResult,
    PipelineConfig,
    bench,
    load_pipeline_config,
    run_pipeline,
)
from .synthetic import mosaic_from_rgb, random_bayer_frame, synthetic_bayer_scene, synthetic_scene

__version__ = "0.1.0"
