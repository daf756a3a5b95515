"""Packed, sorted collections of projective points and their on-disk format.

A point is stored as its canonical coordinate vector (first nonzero
coordinate equal to 1) packed into one uint64: coordinate i occupies
``bits`` bits starting at bit ``i * bits``.

File layout: one JSON header line terminated by ``\\n``, then ``count``
little-endian uint64 codes in strictly ascending order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .galois import FieldSpec, field_make

MAGIC = "TSB1"


class FormatError(ValueError):
    pass


def bits_per_coord(q: int) -> int:
    return max(1, (q - 1).bit_length())


def canonicalize(F: FieldSpec, coords: np.ndarray) -> np.ndarray:
    """Scale each row so its first nonzero coordinate is 1."""
    coords = np.asarray(coords, dtype=np.uint8)
    nz = coords != 0
    if not nz.any(axis=-1).all():
        raise ValueError("the zero vector is not a projective point")
    lead = np.take_along_axis(coords, nz.argmax(axis=-1)[..., None], axis=-1)
    return F.mul_t[F.inv_t[lead], coords]


def pack(coords: np.ndarray, bits: int) -> np.ndarray:
    coords = np.asarray(coords)
    if coords.shape[-1] * bits > 64:
        raise ValueError(f"{coords.shape[-1]} coordinates at {bits} bits do not fit in 64 bits")
    out = np.zeros(coords.shape[:-1], dtype=np.uint64)
    for i in range(coords.shape[-1]):
        out |= coords[..., i].astype(np.uint64) << np.uint64(i * bits)
    return out


def unpack(codes: np.ndarray, dim: int, bits: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.uint64)
    mask = np.uint64((1 << bits) - 1)
    out = np.empty(codes.shape + (dim,), dtype=np.uint8)
    for i in range(dim):
        out[..., i] = (codes >> np.uint64(i * bits)) & mask
    return out


def point_codes(F: FieldSpec, coords: np.ndarray) -> np.ndarray:
    """Canonicalize nonzero vectors and pack them (no sorting)."""
    return pack(canonicalize(F, coords), bits_per_coord(F.q))


@dataclass(eq=False)
class PointSet:
    p: int
    f: int
    dim: int
    basis: str
    codes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.codes = np.ascontiguousarray(self.codes, dtype=np.uint64)
        if self.dim * self.bits > 64:
            raise ValueError(f"dim {self.dim} at {self.bits} bits/coord exceeds 64 bits")
        if len(self.codes) > 1 and not (self.codes[1:] > self.codes[:-1]).all():
            raise ValueError("codes must be strictly increasing")

    @classmethod
    def from_codes(cls, F: FieldSpec, dim: int, basis: str, codes) -> PointSet:
        return cls(F.p, F.f, dim, basis, np.unique(np.asarray(codes, dtype=np.uint64)))

    @property
    def field(self) -> FieldSpec:
        return field_make(self.p, self.f)

    @property
    def q(self) -> int:
        return self.p**self.f

    @property
    def bits(self) -> int:
        return bits_per_coord(self.q)

    @property
    def count(self) -> int:
        return len(self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PointSet)
            and self.header() == other.header()
            and np.array_equal(self.codes, other.codes)
        )

    def contains(self, codes) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.uint64)
        pos = np.searchsorted(self.codes, codes)
        pos = np.minimum(pos, max(len(self.codes) - 1, 0))
        if not len(self.codes):
            return np.zeros(codes.shape, dtype=bool)
        return self.codes[pos] == codes

    def decode(self, codes=None) -> np.ndarray:
        return unpack(self.codes if codes is None else codes, self.dim, self.bits)

    def same_space(self, other: PointSet) -> bool:
        return (self.p, self.f, self.dim, self.basis) == (other.p, other.f, other.dim, other.basis)

    def with_codes(self, codes) -> PointSet:
        return PointSet(self.p, self.f, self.dim, self.basis, codes)

    # -- file format ------------------------------------------------------------

    def header(self) -> dict:
        return {
            "magic": MAGIC,
            "p": self.p,
            "f": self.f,
            "dim": self.dim,
            "count": self.count,
            "bits_per_coord": self.bits,
            "basis": self.basis,
        }

    def write(self, path) -> None:
        head = json.dumps(self.header(), sort_keys=True, separators=(",", ":")) + "\n"
        with open(path, "wb") as fh:
            fh.write(head.encode("ascii"))
            fh.write(self.codes.astype("<u8").tobytes())

    @classmethod
    def read(cls, path) -> PointSet:
        raw = Path(path).read_bytes()
        nl = raw.find(b"\n")
        if nl < 0:
            raise FormatError("missing header line")
        try:
            head = json.loads(raw[:nl].decode("ascii"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise FormatError(f"unreadable header: {exc}") from None
        if head.get("magic") != MAGIC:
            raise FormatError(f"bad magic {head.get('magic')!r}")
        body = raw[nl + 1 :]
        count = int(head["count"])
        if len(body) != 8 * count:
            raise FormatError(f"body has {len(body)} bytes, expected {8 * count}")
        if head["bits_per_coord"] != bits_per_coord(head["p"] ** head["f"]):
            raise FormatError("bits_per_coord does not match q")
        codes = np.frombuffer(body, dtype="<u8").astype(np.uint64)
        try:
            return cls(int(head["p"]), int(head["f"]), int(head["dim"]), str(head["basis"]), codes)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
