"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Image geometry violates a structural requirement (e.g. odd Bayer dims)."""


class SampleRangeError(ValueError):
    """A sample or channel value exceeds the 12-bit range 0..4095."""


class RegionBoundsError(ValueError):
    """A plate region does not fit inside the frame it is applied to."""


class EmptyPayloadError(ValueError):
    """Chunking was asked to split an empty byte sequence."""


class MalformedFrameError(ValueError):
    """Wire frame has the wrong length or a bad preamble/SFD."""


class MissingPacketsError(ValueError):
    """Reassembly found gaps in the ip_id sequence."""

    def __init__(self, missing_ids):
        self.missing_ids = sorted(missing_ids)
        super().__init__(f"missing ip_id sequence numbers: {self.missing_ids}")


class PayloadCorruptionError(ValueError):
    """A reassembled payload octet was neither 0x00 nor 0xFF."""

    def __init__(self, offset, value):
        self.offset = offset
        self.value = value
        super().__init__(
            f"payload octet at offset {offset} is 0x{value:02X}, expected 0x00 or 0xFF"
        )


class NibbleFramingError(ValueError):
    """Nibble stream has odd length or broken edge alternation."""


class CaptureFormatError(ValueError):
    """Capture file has an unrecognized magic number or global header."""


class CaptureTruncatedError(ValueError):
    """Capture file ends in the middle of a packet record."""

    def __init__(self, record_index, detail=""):
        self.record_index = record_index
        msg = f"capture truncated in record {record_index}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class TransportError(OSError):
    """Socket-level send/receive failure (wraps the OS error detail)."""


class ConfigError(ValueError):
    """Config file line or value could not be parsed."""
