"""OpenAI-compatible chat-completions client with retries and a disk cache."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional

import httpx

from ..grid import ConfigError

log = logging.getLogger(__name__)

RETRY_STATUS = frozenset({408, 409, 429})


class CompletionFailed(RuntimeError):
    """Retries exhausted or a non-retryable provider error for one request."""

    def __init__(self, message: str, retries: int = 0):
        super().__init__(message)
        self.retries = retries


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str = "https://api.openai.com/v1"
    model: str = "gpt-4"
    temperature: float = 0.0
    top_p: float = 1.0
    max_tokens: Optional[int] = None
    max_retries: int = 5
    timeout: float = 120.0
    api_key_env: str = "OPENAI_API_KEY"
    backoff_base: float = 1.0
    backoff_cap: float = 60.0
    nonstandard: bool = False

    def __post_init__(self):
        if not self.nonstandard and (self.temperature != 0 or self.top_p != 1):
            raise ConfigError(
                "decoding must be greedy (temperature 0, top_p 1); set nonstandard=true to override"
            )
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")

    @classmethod
    def from_dict(cls, d: dict) -> "ProviderConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown provider keys: {sorted(unknown)}")
        return cls(**d)

    def public(self) -> dict:
        """Config fields safe to persist (the key itself is never stored here)."""
        return asdict(self)


def request_payload(cfg: ProviderConfig, messages: list[dict]) -> dict:
    payload = {
        "model": cfg.model,
        "messages": messages,
        "temperature": cfg.temperature,
        "top_p": cfg.top_p,
    }
    if cfg.max_tokens is not None:
        payload["max_tokens"] = cfg.max_tokens
    return payload


def payload_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class Completion:
    text: str
    payload_hash: str
    retries: int = 0
    latency: float = 0.0
    cache_hit: bool = False
    meta: dict = field(default_factory=dict)


class DiskCache:
    """One JSON file per payload hash; writes are atomic renames."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> Optional[dict]:
        p = self._path(key)
        if not p.exists():
            return None
        with open(p, encoding="utf-8") as fh:
            return json.load(fh)

    def put(self, key: str, value: dict) -> None:
        p = self._path(key)
        p.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(value, fh, ensure_ascii=False)
        os.replace(tmp, p)


class ChatClient:
    def __init__(
        self,
        cfg: ProviderConfig,
        transport: Optional[httpx.BaseTransport] = None,
        cache_dir=None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.cfg = cfg
        self.cache = DiskCache(cache_dir) if cache_dir is not None else None
        self._sleep = sleep
        self.network_calls = 0
        headers = {"Content-Type": "application/json"}
        key = self._api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self._http = httpx.Client(
            base_url=cfg.endpoint.rstrip("/"), headers=headers, timeout=cfg.timeout, transport=transport
        )

    def _api_key(self) -> Optional[str]:
        if not self.cfg.api_key_env:
            return None
        key = os.environ.get(self.cfg.api_key_env)
        if not key:
            raise ConfigError(f"environment variable {self.cfg.api_key_env} is not set")
        return key

    def close(self) -> None:
        self._http.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _backoff(self, attempt: int) -> float:
        return min(self.cfg.backoff_cap, self.cfg.backoff_base * 2**attempt)

    def complete(self, messages: list[dict]) -> Completion:
        payload = request_payload(self.cfg, messages)
        key = payload_hash(payload)
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                return Completion(hit["text"], key, hit.get("retries", 0), 0.0, True, hit.get("meta", {}))
        t0 = time.monotonic()
        retries = 0
        while True:
            try:
                self.network_calls += 1
                resp = self._http.post("/chat/completions", json=payload)
            except (httpx.TimeoutException, httpx.TransportError) as e:
                reason = type(e).__name__
            else:
                if resp.status_code in (401, 403):
                    raise ConfigError(f"provider rejected credentials (HTTP {resp.status_code})")
                if resp.status_code < 300:
                    text, meta = _parse_response(resp)
                    break
                if resp.status_code < 500 and resp.status_code not in RETRY_STATUS:
                    raise CompletionFailed(f"HTTP {resp.status_code}: {resp.text[:200]}", retries)
                reason = f"HTTP {resp.status_code}"
            if retries >= self.cfg.max_retries:
                raise CompletionFailed(f"retries exhausted, last error {reason}", retries)
            delay = self._backoff(retries)
            log.warning("transient failure (%s), retry %d in %.1fs", reason, retries + 1, delay)
            self._sleep(delay)
            retries += 1
        latency = time.monotonic() - t0
        if self.cache is not None:
            self.cache.put(key, {"text": text, "retries": retries, "meta": meta})
        return Completion(text, key, retries, latency, False, meta)


def _parse_response(resp: httpx.Response) -> tuple[str, dict]:
    try:
        body = resp.json()
        text = body["choices"][0]["message"]["content"] or ""
    except (ValueError, KeyError, IndexError, TypeError) as e:
        raise CompletionFailed(f"malformed provider response: {e}") from e
    meta = {k: body[k] for k in ("id", "model", "usage", "system_fingerprint") if k in body}
    meta["finish_reason"] = body["choices"][0].get("finish_reason")
    return text, meta


def complete(cfg: ProviderConfig, messages: list[dict], **client_kwargs) -> str:
    """One-shot convenience wrapper returning the transcript text."""
    with ChatClient(cfg, **client_kwargs) as client:
        return client.complete(messages).text
