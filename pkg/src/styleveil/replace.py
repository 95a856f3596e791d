"""Replacement generators: fill masked token positions with new words.

The generator contract is index based: given the token list and the
positions to replace, return exactly one non-empty replacement per mask
and never touch anything else.  Ships a deterministic POS-lexicon
fallback (no model files needed) and an HTTP client for the masked-LM
fill service.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

import requests

from .postag import TaggedText


class GeneratorError(Exception):
    pass


class Timeout(GeneratorError):
    pass


class ProtocolError(GeneratorError):
    def __init__(self, detail: str):
        self.detail = detail
        super().__init__(detail)


class ServerError(GeneratorError):
    def __init__(self, status: int):
        self.status = status
        super().__init__(f"server returned status {status}")


@dataclass(frozen=True)
class FillRequest:
    tokens: list[str]
    mask_indices: list[int]
    context_window: int = 64  # tokens kept per side; 0 = full text

    def validate(self) -> None:
        prev = -1
        for i in self.mask_indices:
            if not 0 <= i < len(self.tokens):
                raise ValueError(f"mask index {i} out of range")
            if i <= prev:
                raise ValueError("mask indices must be strictly increasing")
            prev = i


@dataclass(frozen=True)
class FillResponse:
    replacements: list[str]
    generator_id: str
    latency: float = 0.0


def check_arity(req: FillRequest, resp: FillResponse) -> None:
    """Central invariant check applied to every generator response."""
    if len(resp.replacements) != len(req.mask_indices):
        raise ProtocolError(
            f"arity mismatch: {len(resp.replacements)} replacements for "
            f"{len(req.mask_indices)} masks")
    for r in resp.replacements:
        if not isinstance(r, str) or not r:
            raise ProtocolError("empty or non-string replacement")


def build_pos_lexicon(tagged: list[TaggedText]) -> dict[str, list[str]]:
    """Frequency-ranked word list per POS tag, built from the attacker split."""
    counts: dict[str, Counter] = {}
    for tt in tagged:
        for (surface, _, _), t in zip(tt.tokens, tt.tags):
            counts.setdefault(t, Counter())[surface] += 1
    lexicon = {}
    for t, c in counts.items():
        lexicon[t] = [w for w, _ in sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))]
    return lexicon


def fallback_fill(req: FillRequest, pos_lexicon: dict[str, list[str]],
                  tags: list[str]) -> FillResponse:
    """Deterministic stand-in generator.

    Each mask gets the highest-frequency alphanumeric lexicon word of the
    same POS that differs from the original surface; identity if none
    exists.  Punctuation tokens are never rewritten.
    """
    req.validate()
    if len(tags) != len(req.tokens):
        raise ValueError("tags must align with tokens")
    replacements = []
    for i in req.mask_indices:
        original = req.tokens[i]
        chosen = original
        # punctuation is kept verbatim: swapping marks can merge with a
        # neighbouring mark in the rendered text and shift token counts
        if any(ch.isalnum() for ch in original):
            for w in pos_lexicon.get(tags[i], []):
                if w != original and w.isalnum():
                    chosen = w
                    break
        replacements.append(chosen)
    resp = FillResponse(replacements=replacements, generator_id="fallback")
    check_arity(req, resp)
    return resp


def remote_fill(req: FillRequest, endpoint: str, timeout: float = 10.0,
                retries: int = 2, backoff: float = 0.5,
                session: requests.Session | None = None) -> FillResponse:
    """POST /v1/fill client with exponential backoff and strict validation."""
    req.validate()
    tokens = req.tokens
    mask_indices = req.mask_indices
    if req.context_window > 0 and mask_indices:
        lo = max(0, mask_indices[0] - req.context_window)
        hi = min(len(tokens), mask_indices[-1] + 1 + req.context_window)
        tokens = tokens[lo:hi]
        mask_indices = [i - lo for i in mask_indices]

    body = {"tokens": tokens, "mask_indices": mask_indices}
    sess = session or requests
    last_exc: Exception | None = None
    start = time.perf_counter()
    for attempt in range(retries + 1):
        if attempt:
            time.sleep(backoff * (2 ** (attempt - 1)))
        try:
            r = sess.post(endpoint, json=body, timeout=timeout)
        except requests.Timeout as e:
            last_exc = e
            continue
        except requests.RequestException as e:
            last_exc = e
            continue
        if r.status_code >= 500 or r.status_code == 503:
            last_exc = ServerError(r.status_code)
            continue
        if r.status_code != 200:
            raise ServerError(r.status_code)
        try:
            payload = r.json()
        except ValueError:
            raise ProtocolError("response body is not JSON")
        if not isinstance(payload, dict) or "replacements" not in payload:
            raise ProtocolError("missing replacements field")
        resp = FillResponse(
            replacements=list(payload["replacements"]),
            generator_id=str(payload.get("model", "remote")),
            latency=time.perf_counter() - start,
        )
        check_arity(FillRequest(tokens=tokens, mask_indices=mask_indices), resp)
        return resp
    if isinstance(last_exc, ServerError):
        raise last_exc
    raise Timeout(f"no response from {endpoint} after {retries + 1} attempts: {last_exc}")


# ---------------------------------------------------------------------------
# Generator objects the obfuscator drives

class ReplacementGenerator:
    """Interface: fill(req, tags) -> FillResponse."""

    generator_id = "base"

    def fill(self, req: FillRequest, tags: list[str]) -> FillResponse:
        raise NotImplementedError


class IdentityGenerator(ReplacementGenerator):
    generator_id = "identity"

    def fill(self, req: FillRequest, tags: list[str]) -> FillResponse:
        req.validate()
        return FillResponse(replacements=[req.tokens[i] for i in req.mask_indices],
                            generator_id=self.generator_id)


class FallbackGenerator(ReplacementGenerator):
    generator_id = "fallback"

    def __init__(self, pos_lexicon: dict[str, list[str]]):
        self.pos_lexicon = pos_lexicon

    def fill(self, req: FillRequest, tags: list[str]) -> FillResponse:
        return fallback_fill(req, self.pos_lexicon, tags)


@dataclass
class RemoteGenerator(ReplacementGenerator):
    endpoint: str
    timeout: float = 10.0
    retries: int = 2
    backoff: float = 0.5
    session: requests.Session | None = field(default=None, repr=False)

    generator_id = "remote"

    def fill(self, req: FillRequest, tags: list[str]) -> FillResponse:
        return remote_fill(req, self.endpoint, timeout=self.timeout,
                           retries=self.retries, backoff=self.backoff,
                           session=self.session)
