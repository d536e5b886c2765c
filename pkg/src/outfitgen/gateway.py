"""Uniform access to text, embedding, and image backends.

Real backends speak a small HTTP-JSON protocol (POST /v1/generate, /v1/embed,
/v1/image); mock backends are pure functions of their inputs so offline runs
are bit-reproducible. The HTTP client takes an injectable transport, which is
how tests count attempts and simulate failures without a network.
"""

from __future__ import annotations

import base64
import hashlib
import json
import os
import re
import struct
import threading
import time
import zlib
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import requests

from .errors import (BackendStatusError, ConfigurationError, GatewayTimeout,
                     ProtocolError, TransportError, ValidationError)

CAPABILITIES = ("text", "embed", "image")


# ---------------------------------------------------------------------------
# Wire types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TextGenRequest:
    prompt: str
    max_tokens: int = 512
    temperature: float = 0.7
    seed: Optional[int] = None

    def validate(self) -> None:
        if not self.prompt:
            raise ValidationError("prompt must be non-empty")
        if self.max_tokens < 1:
            raise ValidationError("max_tokens must be >= 1")
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")

    def to_payload(self) -> dict:
        return {"prompt": self.prompt, "max_tokens": self.max_tokens,
                "temperature": self.temperature, "seed": self.seed}

    @classmethod
    def from_payload(cls, data: dict) -> "TextGenRequest":
        return cls(prompt=data["prompt"], max_tokens=int(data["max_tokens"]),
                   temperature=float(data["temperature"]),
                   seed=None if data.get("seed") is None else int(data["seed"]))


@dataclass(frozen=True)
class EmbedRequest:
    texts: tuple[str, ...]

    def validate(self) -> None:
        if not self.texts:
            raise ValidationError("texts must be non-empty")
        if any(not isinstance(t, str) or not t for t in self.texts):
            raise ValidationError("every text must be a non-empty string")

    def to_payload(self) -> dict:
        return {"texts": list(self.texts)}

    @classmethod
    def from_payload(cls, data: dict) -> "EmbedRequest":
        return cls(texts=tuple(data["texts"]))


@dataclass(frozen=True)
class EmbedResponse:
    vectors: tuple[tuple[float, ...], ...]

    def to_payload(self) -> dict:
        return {"vectors": [list(v) for v in self.vectors]}

    @classmethod
    def from_payload(cls, data: dict) -> "EmbedResponse":
        return cls(vectors=tuple(tuple(float(x) for x in v) for v in data["vectors"]))


@dataclass(frozen=True)
class ImageGenRequest:
    prompt: str
    seed: Optional[int] = None
    width: int = 256
    height: int = 256

    def validate(self) -> None:
        if not self.prompt:
            raise ValidationError("prompt must be non-empty")
        if self.width <= 0 or self.height <= 0:
            raise ValidationError("width and height must be positive")

    def to_payload(self) -> dict:
        return {"prompt": self.prompt, "seed": self.seed,
                "width": self.width, "height": self.height}

    @classmethod
    def from_payload(cls, data: dict) -> "ImageGenRequest":
        return cls(prompt=data["prompt"],
                   seed=None if data.get("seed") is None else int(data["seed"]),
                   width=int(data["width"]), height=int(data["height"]))


@dataclass(frozen=True)
class ImageResult:
    image: bytes
    digest: str
    width: int
    height: int

    @classmethod
    def from_png(cls, png: bytes) -> "ImageResult":
        width, height = png_dimensions(png)
        return cls(image=png, digest=hashlib.sha256(png).hexdigest(),
                   width=width, height=height)


@dataclass(frozen=True)
class BackendProfile:
    """Where a capability lives and how patiently to talk to it."""

    name: str
    endpoint: str  # URL, or "mock" for the in-process backend
    capability: str
    timeout: float = 30.0
    retry: int = 2
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.capability not in CAPABILITIES:
            raise ConfigurationError(f"unknown capability {self.capability!r}")
        if self.retry < 0:
            raise ConfigurationError("retry must be >= 0")

    def resolved_endpoint(self) -> str:
        env_key = "GATEWAY_" + re.sub(r"[^A-Za-z0-9]", "_", self.name).upper() + "_URL"
        return os.environ.get(env_key, self.endpoint)


# ---------------------------------------------------------------------------
# PNG plumbing (dependency-free, deterministic bytes)
# ---------------------------------------------------------------------------

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _png_chunk(tag: bytes, data: bytes) -> bytes:
    return (struct.pack(">I", len(data)) + tag + data
            + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF))


def solid_png(width: int, height: int, rgb: tuple[int, int, int],
              note: str = "") -> bytes:
    """A solid-color RGB PNG; ``note`` rides along as a tEXt chunk so images
    that share a color still have distinct bytes."""
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    row = b"\x00" + bytes(rgb) * width
    idat = zlib.compress(row * height, level=6)
    out = PNG_SIGNATURE + _png_chunk(b"IHDR", ihdr)
    if note:
        out += _png_chunk(b"tEXt", b"comment\x00" + note.encode("ascii"))
    out += _png_chunk(b"IDAT", idat) + _png_chunk(b"IEND", b"")
    return out


def png_dimensions(png: bytes) -> tuple[int, int]:
    if len(png) < 24 or not png.startswith(PNG_SIGNATURE) or png[12:16] != b"IHDR":
        raise ValueError("not a PNG")
    width, height = struct.unpack(">II", png[16:24])
    return int(width), int(height)


# ---------------------------------------------------------------------------
# Deterministic mock backends
# ---------------------------------------------------------------------------

def stable_hash64(text: str) -> int:
    """Platform-stable 64-bit hash used to key every mock generator."""
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(),
                          "big")


def _rng_for(key: str) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stable_hash64(key)))


MOCK_COLORS = (
    "black", "crimson", "ivory", "emerald", "navy", "blush", "gold", "charcoal",
    "lavender", "teal", "burgundy", "silver", "olive", "rust", "cobalt", "cream",
)
MOCK_TEXTURES = (
    "velvet", "lace", "silk", "denim", "leather", "chiffon", "tweed", "satin",
    "linen", "wool", "suede", "organza", "corduroy", "cashmere", "mesh", "jacquard",
)
_MOCK_GARMENTS = (
    "tailored coat", "draped dress", "structured blazer", "pleated skirt",
    "relaxed jumpsuit", "layered ensemble", "fitted suit", "flowing gown",
)


class MockTextBackend:
    """Echoes a canonical outfit description stuffed with hash-selected colors
    and textures. Always ends with the labeled Colors/Textures lines so the
    two-step pipeline can parse its own step-1 output."""

    def generate(self, req: TextGenRequest) -> str:
        req.validate()
        rng = _rng_for(f"text\x1f{req.prompt}\x1f{req.seed}")
        colors = [MOCK_COLORS[i] for i in rng.choice(len(MOCK_COLORS), 2, replace=False)]
        textures = [MOCK_TEXTURES[i]
                    for i in rng.choice(len(MOCK_TEXTURES), 2, replace=False)]
        garment = _MOCK_GARMENTS[int(rng.integers(len(_MOCK_GARMENTS)))]
        return (
            f"A {garment} anchored in {colors[0]} with {colors[1]} accents, "
            f"pairing {textures[0]} panels against {textures[1]} detailing for a "
            f"balanced silhouette.\n"
            f"Colors: {colors[0]}, {colors[1]}\n"
            f"Textures: {textures[0]}, {textures[1]}"
        )


class MockEmbedBackend:
    """Unit vectors from a counter-based generator keyed by a text hash."""

    def __init__(self, dim: int = 64):
        if dim < 1:
            raise ConfigurationError("embedding dimension must be >= 1")
        self.dim = dim

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        EmbedRequest(texts=tuple(texts)).validate()
        out = []
        for text in texts:
            vec = _rng_for(f"embed\x1f{text}").standard_normal(self.dim)
            out.append(vec / np.linalg.norm(vec))
        return out


class MockImageBackend:
    """Solid-color PNG tiles keyed by a hash of (prompt, seed)."""

    def generate(self, req: ImageGenRequest) -> ImageResult:
        req.validate()
        key = hashlib.blake2b(f"image\x1f{req.prompt}\x1f{req.seed}".encode("utf-8"),
                              digest_size=16).hexdigest()
        rgb = tuple(int(key[i:i + 2], 16) for i in (0, 2, 4))
        png = solid_png(req.width, req.height, rgb, note=key)
        return ImageResult.from_png(png)


# ---------------------------------------------------------------------------
# HTTP backends
# ---------------------------------------------------------------------------

class TransportFailure(Exception):
    """Raised by transports when no HTTP response was obtained."""

    def __init__(self, message: str, timed_out: bool = False):
        super().__init__(message)
        self.timed_out = timed_out


# A transport maps (url, payload, timeout, headers) -> (status, body bytes).
Transport = Callable[[str, dict, float, dict], tuple[int, bytes]]


def requests_transport(url: str, payload: dict, timeout: float,
                       headers: dict) -> tuple[int, bytes]:
    try:
        resp = requests.post(url, json=payload, timeout=timeout, headers=headers)
    except requests.Timeout as exc:
        raise TransportFailure(str(exc), timed_out=True) from exc
    except requests.RequestException as exc:
        raise TransportFailure(str(exc)) from exc
    return resp.status_code, resp.content


_semaphores: dict[str, threading.Semaphore] = {}
_semaphore_lock = threading.Lock()


def _profile_semaphore(profile: BackendProfile) -> threading.Semaphore:
    with _semaphore_lock:
        if profile.name not in _semaphores:
            cap = int(profile.options.get("concurrency", 4))
            _semaphores[profile.name] = threading.Semaphore(cap)
        return _semaphores[profile.name]


class _HttpBackend:
    def __init__(self, profile: BackendProfile, transport: Transport | None = None):
        self.profile = profile
        self.transport = transport or requests_transport

    def _headers(self) -> dict:
        token = self.profile.options.get("bearer_token")
        return {"Authorization": f"Bearer {token}"} if token else {}

    def _post(self, path: str, payload: dict) -> dict:
        profile = self.profile
        url = profile.resolved_endpoint().rstrip("/") + path
        backoff = float(profile.options.get("backoff_base", 0.25))
        attempts = profile.retry + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            transient = True
            try:
                with _profile_semaphore(profile):
                    status, body = self.transport(url, payload, profile.timeout,
                                                  self._headers())
            except TransportFailure as failure:
                kind = GatewayTimeout if failure.timed_out else TransportError
                last_error = kind(profile.name, str(failure))
            else:
                if 200 <= status < 300:
                    try:
                        data = json.loads(body.decode("utf-8"))
                    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                        raise ProtocolError(profile.name,
                                            f"malformed response body: {exc}") from exc
                    if not isinstance(data, dict):
                        raise ProtocolError(profile.name, "response body is not an object")
                    return data
                last_error = BackendStatusError(profile.name, status)
                transient = status >= 500
            if transient and attempt < attempts - 1:
                time.sleep(backoff * (2 ** attempt))
                continue
            raise last_error
        raise last_error  # unreachable; loop always raises or returns


class HttpTextBackend(_HttpBackend):
    def generate(self, req: TextGenRequest) -> str:
        req.validate()
        data = self._post("/v1/generate", req.to_payload())
        text = data.get("text")
        if not isinstance(text, str) or not text:
            raise ProtocolError(self.profile.name, "response lacks non-empty 'text'")
        return text


class HttpEmbedBackend(_HttpBackend):
    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        req = EmbedRequest(texts=tuple(texts))
        req.validate()
        data = self._post("/v1/embed", req.to_payload())
        vectors = data.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProtocolError(self.profile.name,
                                "response vector count does not match input")
        arrays = [np.asarray(v, dtype=float) for v in vectors]
        dims = {a.shape for a in arrays}
        if len(dims) != 1 or arrays[0].ndim != 1:
            raise ProtocolError(self.profile.name, "vectors have inconsistent dimensions")
        return arrays


class HttpImageBackend(_HttpBackend):
    def generate(self, req: ImageGenRequest) -> ImageResult:
        req.validate()
        data = self._post("/v1/image", req.to_payload())
        encoded = data.get("image_b64")
        if not isinstance(encoded, str):
            raise ProtocolError(self.profile.name, "response lacks 'image_b64'")
        try:
            png = base64.b64decode(encoded, validate=True)
            width, height = png_dimensions(png)
        except ValueError as exc:  # binascii.Error subclasses ValueError
            raise ProtocolError(self.profile.name, f"undecodable image payload: {exc}") from exc
        if (width, height) != (req.width, req.height):
            raise ProtocolError(self.profile.name,
                                f"image is {width}x{height}, requested "
                                f"{req.width}x{req.height}")
        return ImageResult.from_png(png)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def backend_for(profile: BackendProfile, transport: Transport | None = None):
    """Instantiate the backend a profile describes (mock or HTTP)."""
    mock = profile.resolved_endpoint() == "mock"
    if profile.capability == "text":
        return MockTextBackend() if mock else HttpTextBackend(profile, transport)
    if profile.capability == "embed":
        if mock:
            return MockEmbedBackend(dim=int(profile.options.get("dim", 64)))
        return HttpEmbedBackend(profile, transport)
    if mock:
        return MockImageBackend()
    return HttpImageBackend(profile, transport)


def generate_text(profile: BackendProfile, req: TextGenRequest,
                  transport: Transport | None = None) -> str:
    if profile.capability != "text":
        raise ConfigurationError(f"profile {profile.name!r} is not a text backend")
    return backend_for(profile, transport).generate(req)


def embed(profile: BackendProfile, texts: Sequence[str],
          transport: Transport | None = None) -> list[np.ndarray]:
    if profile.capability != "embed":
        raise ConfigurationError(f"profile {profile.name!r} is not an embed backend")
    return backend_for(profile, transport).embed(texts)


def generate_image(profile: BackendProfile, req: ImageGenRequest,
                   transport: Transport | None = None) -> ImageResult:
    if profile.capability != "image":
        raise ConfigurationError(f"profile {profile.name!r} is not an image backend")
    return backend_for(profile, transport).generate(req)
