"""Command-line front end exposing each pipeline stage.

Commands: demosaic, detect, pipeline, send, recv, bench. Stage commands
exchange images through netpbm files so a manually chained run reproduces
the one-shot pipeline byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .demosaic import BayerOrder, demosaic_downsample
from .detector import detect_plate, overlay_region
from .frame_codec import (
    EtherTypeMode,
    chunk_payloads,
    map_binary_to_bytes,
    map_bytes_to_binary,
)
from .io_transport import (
    load_bayer_image,
    read_binary_pgm,
    read_rgb_ppm,
    udp_receive,
    udp_send,
    write_binary_pgm,
    write_capture,
    write_rgb_ppm,
)
from .link_model import schedule_to_csv, schedule_transmission
from .pipeline import (
    PipelineConfig,
    bench,
    load_pipeline_config,
    run_pipeline,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="platelink",
        description="Yellow plate detection with byte-exact Ethernet frame output",
    )
    parser.add_argument("--config", metavar="FILE", help="key = value configuration file")
    parser.add_argument("--bayer-order", choices=[o.value for o in BayerOrder])
    parser.add_argument("--min-run", type=int, metavar="N", help="minimum yellow run per row")
    parser.add_argument("--seed", type=int, help="seed for synthetic frame generation")
    parser.add_argument("--serial", action="store_true", help="single-context execution")
    parser.add_argument("--ethertype", choices=["paper", "standard"])

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demosaic", help="raw mosaic to 12-bit PPM")
    p.add_argument("input", help="16-bit PGM, or raw .bin with geometry from the config")
    p.add_argument("output", help="PPM path")

    p = sub.add_parser("detect", help="locate the plate and binarize")
    p.add_argument("input", help="12-bit PPM from the demosaic stage")
    p.add_argument("output_binary", help="binary PGM path")
    p.add_argument("--overlay", metavar="PPM", help="write input with a red region border")

    p = sub.add_parser("pipeline", help="full chain: mosaic to capture file")
    p.add_argument("input")
    p.add_argument("capture_out")
    p.add_argument("--rgb-out", metavar="PPM", help="dump the demosaic stage")
    p.add_argument("--binary-out", metavar="PGM", help="dump the binarize stage")
    p.add_argument("--schedule-csv", metavar="CSV", help="dump the transmission schedule")

    p = sub.add_parser("send", help="send a binary image over live UDP")
    p.add_argument("input", help="binary PGM to transmit")

    p = sub.add_parser("recv", help="receive datagrams and rebuild the image")
    p.add_argument("output", help="binary PGM path")
    p.add_argument("--width", type=int, help="image width (falls back to config)")
    p.add_argument("--height", type=int, help="image height (falls back to config)")
    p.add_argument("--bind", default="0.0.0.0", metavar="HOST")
    p.add_argument("--timeout", type=float, default=5.0, metavar="SECONDS")

    p = sub.add_parser("bench", help="measure pipeline frames/second")
    p.add_argument("--frames", type=int, default=300)
    p.add_argument("--width", type=int, default=1280, help="synthetic mosaic width")
    p.add_argument("--height", type=int, default=960, help="synthetic mosaic height")
    p.add_argument("--schedule-csv", metavar="CSV", help="dump one image's schedule")

    return parser


def effective_config(args) -> PipelineConfig:
    cfg = load_pipeline_config(args.config) if args.config else PipelineConfig()
    if args.bayer_order:
        cfg = replace(cfg, bayer_order=BayerOrder(args.bayer_order))
    if args.min_run is not None:
        cfg = replace(cfg, detector=replace(cfg.detector, min_run=args.min_run))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.serial:
        cfg = replace(cfg, serial=True)
    if args.ethertype:
        mode = EtherTypeMode.PAPER_FAITHFUL if args.ethertype == "paper" else EtherTypeMode.STANDARD
        cfg = replace(cfg, net=replace(cfg.net, ethertype_mode=mode))
    return cfg


def _region_line(detection) -> str:
    region = detection.region
    if region is None:
        return "region none"
    return f"region {region.top} {region.bottom} {region.left} {region.right}"


def cmd_demosaic(args, cfg: PipelineConfig) -> int:
    bayer = load_bayer_image(args.input, cfg.width, cfg.height, cfg.bayer_order)
    write_rgb_ppm(args.output, demosaic_downsample(bayer))
    return 0


def cmd_detect(args, cfg: PipelineConfig) -> int:
    rgb = read_rgb_ppm(args.input)
    detection = detect_plate(rgb, cfg.detector)
    write_binary_pgm(args.output_binary, detection.binary)
    if args.overlay and detection.region is not None:
        write_rgb_ppm(args.overlay, overlay_region(rgb, detection.region))
    print(_region_line(detection))
    return 0


def cmd_pipeline(args, cfg: PipelineConfig) -> int:
    bayer = load_bayer_image(args.input, cfg.width, cfg.height, cfg.bayer_order)
    if args.rgb_out:
        write_rgb_ppm(args.rgb_out, demosaic_downsample(bayer))
    results = run_pipeline([bayer], cfg)
    result = results[0]
    if args.binary_out:
        write_binary_pgm(args.binary_out, result.detection.binary)
    schedule = schedule_transmission([len(f) for f in result.ethernet_frames], cfg.rate)
    with open(args.capture_out, "wb") as fh:
        fh.write(write_capture(result.ethernet_frames, schedule))
    if args.schedule_csv:
        with open(args.schedule_csv, "w", encoding="utf-8") as fh:
            fh.write(schedule_to_csv(schedule))
    print(_region_line(result.detection))
    print(f"frames {result.frame_matrix.shape[0]} capture {args.capture_out}")
    return 0


def cmd_send(args, cfg: PipelineConfig) -> int:
    binary = read_binary_pgm(args.input)
    chunks = chunk_payloads(map_binary_to_bytes(binary))
    report = udp_send(chunks, cfg.net)
    print(f"sent {report.sent} datagrams to {report.destination[0]}:{report.destination[1]}")
    return 0


def cmd_recv(args, cfg: PipelineConfig) -> int:
    width = args.width or cfg.width
    height = args.height or cfg.height
    if not width or not height:
        print("recv: need --width/--height or a config with geometry", file=sys.stderr)
        return 1
    expected = -(-width * height // 1024)
    report = udp_receive((args.bind, cfg.net.dst_port), expected, args.timeout)
    print(f"received {report.count} datagrams" + (" (timed out)" if report.timed_out else ""))
    if report.count < expected:
        return 1
    data = b"".join(report.payloads)
    binary = map_bytes_to_binary(data[: width * height], width, height)
    write_binary_pgm(args.output, binary)
    return 0


def cmd_bench(args, cfg: PipelineConfig) -> int:
    report = bench(
        args.frames, width=args.width, height=args.height, seed=cfg.seed, cfg=cfg
    )
    for line in report.summary_lines():
        print(line)
    if args.schedule_csv:
        schedule = schedule_transmission([1078] * report.frames_per_image, cfg.rate)
        with open(args.schedule_csv, "w", encoding="utf-8") as fh:
            fh.write(schedule_to_csv(schedule))
    return 0


_COMMANDS = {
    "demosaic": cmd_demosaic,
    "detect": cmd_detect,
    "pipeline": cmd_pipeline,
    "send": cmd_send,
    "recv": cmd_recv,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = effective_config(args)
        return _COMMANDS[args.command](args, cfg)
    except (ValueError, OSError) as exc:
        print(f"platelink {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
