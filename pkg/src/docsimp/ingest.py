"""Fetching parallel page revision histories from MediaWiki-style APIs.

Everything network-shaped goes through a small transport seam so tests (and
offline runs) can stub it: ``HttpTransport`` does real GETs with client-side
rate limiting and retry/backoff, ``CachingTransport`` wraps any transport
with an on-disk JSON cache keyed by the canonical request, written
atomically. A fully populated cache serves requests with no inner transport
at all.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol, Sequence

import requests

from .core import DocumentRevision
from .corpus import dumps_canonical, parse_timestamp

logger = logging.getLogger(__name__)

#: Bump when the stripping rules change; cleaned corpora record this so text
#: produced by different rule sets is never silently mixed.
WIKITEXT_RULES_VERSION = "1"


class TransportError(RuntimeError):
    """The API could not be reached (after retries) or answered malformed."""


class CacheMissError(TransportError):
    """An offline (cache-only) transport had no entry for the request."""


class PageNotFoundError(ValueError):
    """The wiki has no page by that title."""


@dataclass(frozen=True, slots=True)
class IngestionConfig:
    api_base_url: str = "https://en.wikipedia.org/w/api.php"
    sitelink_api_url: str = "https://www.wikidata.org/w/api.php"
    complex_site: str = "enwiki"
    simple_site: str = "simplewiki"
    revisions_per_page_max: int = 200
    request_rate_limit: float = 1.0  # requests per second
    cache_dir: Path | None = None
    user_agent: str = "docsimp/0.1 (research toolkit)"
    max_retries: int = 3
    backoff_seconds: float = 1.0


class Transport(Protocol):
    def get(self, url: str, params: Mapping[str, str | int]) -> dict: ...


class TokenBucket:
    """Client-side rate limiter: at most ``rate`` requests per second."""

    def __init__(
        self,
        rate: float,
        now: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.min_interval = 1.0 / rate
        self._now = now
        self._sleep = sleep
        self._next_ok = 0.0

    def acquire(self) -> None:
        now = self._now()
        if now < self._next_ok:
            self._sleep(self._next_ok - now)
            now = self._next_ok
        self._next_ok = now + self.min_interval


class HttpTransport:
    """requests-backed transport with rate limiting and retry/backoff."""

    def __init__(
        self,
        config: IngestionConfig,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.session = session or requests.Session()
        self.session.headers["User-Agent"] = config.user_agent
        self.bucket = TokenBucket(config.request_rate_limit, sleep=sleep)
        self._sleep = sleep

    def get(self, url: str, params: Mapping[str, str | int]) -> dict:
        last_error: Exception | None = None
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                self._sleep(self.config.backoff_seconds * (2 ** (attempt - 1)))
            self.bucket.acquire()
            try:
                resp = self.session.get(url, params=dict(params), timeout=30)
            except requests.RequestException as e:
                last_error = e
                logger.warning("request failed (attempt %d): %s", attempt + 1, e)
                continue
            if resp.status_code >= 500:
                last_error = RuntimeError(f"server error {resp.status_code}")
                logger.warning("server error %d (attempt %d)", resp.status_code, attempt + 1)
                continue
            if resp.status_code != 200:
                raise TransportError(f"GET {url} returned {resp.status_code}")
            try:
                return resp.json()
            except ValueError as e:
                raise TransportError(f"GET {url} returned non-JSON body: {e}") from None
        raise TransportError(f"GET {url} failed after {self.config.max_retries + 1} attempts: {last_error}")


def request_cache_key(url: str, params: Mapping[str, str | int]) -> str:
    canon = dumps_canonical({"url": url, "params": {k: str(v) for k, v in params.items()}})
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class CachingTransport:
    """On-disk JSON cache in front of another transport.

    Cache files are written to a temp file and renamed into place, so a
    crash mid-write never leaves a truncated entry. With ``inner=None`` the
    cache is the only source and misses raise :class:`CacheMissError`.
    """

    def __init__(self, cache_dir: str | Path, inner: Transport | None = None):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.inner = inner

    def _path(self, url: str, params: Mapping[str, str | int]) -> Path:
        return self.cache_dir / f"{request_cache_key(url, params)}.json"

    def get(self, url: str, params: Mapping[str, str | int]) -> dict:
        path = self._path(url, params)
        if path.exists():
            with open(path, "r", encoding="utf-8") as fh:
                return json.load(fh)["response"]
        if self.inner is None:
            raise CacheMissError(f"no cached response for {url} {dict(params)!r}")
        response = self.inner.get(url, params)
        payload = {
            "request": {"url": url, "params": {k: str(v) for k, v in params.items()}},
            "response": response,
        }
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, ensure_ascii=False)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return response


def default_transport(config: IngestionConfig) -> Transport:
    http = HttpTransport(config)
    if config.cache_dir is not None:
        return CachingTransport(config.cache_dir, http)
    return http


# ---------------------------------------------------------------------------
# wikitext -> plain text

_STRIP_PASSES = [
    # comments
    (r"<!--.*?-->", ""),
    # references, with or without a body
    (r"<ref[^>/]*/>", ""),
    (r"<ref[^>]*>.*?</ref>", ""),
]


def _strip_nested(text: str, opener: str, closer: str) -> str:
    """Remove possibly-nested {{...}} / {|...|} regions, innermost first."""
    while True:
        start = text.find(opener)
        if start == -1:
            return text
        depth = 0
        i = start
        end = -1
        while i < len(text):
            if text.startswith(opener, i):
                depth += 1
                i += len(opener)
            elif text.startswith(closer, i):
                depth -= 1
                i += len(closer)
                if depth == 0:
                    end = i
                    break
            else:
                i += 1
        if end == -1:  # unbalanced: drop the rest
            return text[:start]
        text = text[:start] + text[end:]


_LINK_RE = re.compile(r"\[\[([^\[\]]*?)\]\]")


def _replace_link(m: re.Match) -> str:
    inner = m.group(1)
    target, _, label = inner.partition("|")
    namespace = target.split(":", 1)[0].strip().lower()
    if namespace in ("file", "image", "category"):
        return ""
    return label if label else target


_EXTERNAL_LINK_RE = re.compile(r"\[(?:https?|ftp)://\S*\s*([^\]]*)\]")
_HTML_TAG_RE = re.compile(r"<[^>\n]+>")
_HEADING_RE = re.compile(r"^=+.*=+\s*$")


def strip_wikitext(text: str) -> str:
    """Reduce wikitext to plain prose.

    Versioned rules (see ``WIKITEXT_RULES_VERSION``): comments, refs,
    templates, tables and HTML tags are removed; wiki links keep their label
    (file/image/category links vanish); external bracket links keep their
    label; bold/italic quoting is unwrapped; whitespace collapses to single
    spaces.
    """
    for pattern, repl in _STRIP_PASSES:
        text = re.sub(pattern, repl, text, flags=re.DOTALL | re.IGNORECASE)
    text = _strip_nested(text, "{{", "}}")
    text = _strip_nested(text, "{|", "|}")
    # inner-most links first: [[a|[[b]]]] is not valid wikitext, plain loop is fine
    prev = None
    while prev != text:
        prev = text
        text = _LINK_RE.sub(_replace_link, text)
    text = _EXTERNAL_LINK_RE.sub(lambda m: m.group(1), text)
    text = text.replace("'''", "").replace("''", "")
    text = _HTML_TAG_RE.sub("", text)
    return " ".join(text.split())


def extract_intro(wikitext: str) -> str:
    """Everything before the first heading line (``== ... ==``)."""
    lines = []
    for line in wikitext.splitlines():
        if _HEADING_RE.match(line.strip()):
            break
        lines.append(line)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# API calls

def _api_result(transport: Transport, url: str, params: Mapping[str, str | int]) -> dict:
    data = transport.get(url, params)
    if "error" in data:
        raise TransportError(f"API error: {data['error']}")
    return data


def fetch_revisions(
    title: str,
    config: IngestionConfig,
    source_wiki: str = "complex",
    transport: Transport | None = None,
) -> list[DocumentRevision]:
    """Fetch a page's most recent revisions, reduced to plain intro text.

    At most ``config.revisions_per_page_max`` revisions are returned (the
    most recent ones when the history is longer), ordered chronologically.
    Revisions with hidden or empty content are skipped.
    """
    transport = transport or default_transport(config)
    limit = config.revisions_per_page_max
    revisions: list[DocumentRevision] = []
    params: dict[str, str | int] = {
        "action": "query",
        "format": "json",
        "formatversion": 2,
        "prop": "revisions",
        "titles": title,
        "rvprop": "ids|timestamp|content",
        "rvslots": "main",
        "rvlimit": min(limit, 50),
    }
    cont: dict[str, str | int] = {}
    while len(revisions) < limit:
        data = _api_result(transport, config.api_base_url, {**params, **cont})
        pages = data.get("query", {}).get("pages", [])
        if not pages:
            raise TransportError("revisions query returned no pages")
        page = pages[0]
        if page.get("missing"):
            raise PageNotFoundError(f"no page titled {title!r}")
        for rev in page.get("revisions", []):
            if len(revisions) >= limit:
                break
            content = rev.get("slots", {}).get("main", {}).get("content")
            if content is None:
                logger.debug("skipping revision %s: content hidden", rev.get("revid"))
                continue
            revisions.append(
                DocumentRevision(
                    page_id=page["pageid"],
                    revision_id=rev["revid"],
                    timestamp=parse_timestamp(rev["timestamp"]),
                    title=page["title"],
                    text=strip_wikitext(extract_intro(content)),
                    source_wiki=source_wiki,
                )
            )
        nxt = data.get("continue")
        if not nxt or len(revisions) >= limit:
            break
        cont = dict(nxt)
    revisions.reverse()  # API returns newest first; we hand back chronological
    return revisions


def _chunks(seq: Sequence[str], size: int) -> Iterable[Sequence[str]]:
    for i in range(0, len(seq), size):
        yield seq[i : i + size]


def fetch_paired_titles(
    config: IngestionConfig,
    entity_ids: Sequence[str] | None = None,
    category: str | None = None,
    transport: Transport | None = None,
    category_transport: Transport | None = None,
) -> list[tuple[str, str]]:
    """(complex title, simple title) pairs that exist on both wikis.

    Entity ids are looked up directly in the knowledge base's sitelinks;
    with ``category`` the member pages of that complex-wiki category are
    resolved to entity ids first. Exactly one of the two must be given.
    """
    if (entity_ids is None) == (category is None):
        raise ValueError("give either entity_ids or category")
    transport = transport or default_transport(config)
    category_transport = category_transport or transport

    if category is not None:
        entity_ids = _category_entity_ids(category, config, category_transport)

    pairs: list[tuple[str, str]] = []
    assert entity_ids is not None
    for chunk in _chunks(list(entity_ids), 50):
        data = _api_result(
            transport,
            config.sitelink_api_url,
            {
                "action": "wbgetentities",
                "format": "json",
                "ids": "|".join(chunk),
                "props": "sitelinks",
            },
        )
        for qid in chunk:
            entity = data.get("entities", {}).get(qid, {})
            links = entity.get("sitelinks", {})
            complex_link = links.get(config.complex_site)
            simple_link = links.get(config.simple_site)
            if complex_link and simple_link:
                pairs.append((complex_link["title"], simple_link["title"]))
    return pairs


def _category_entity_ids(
    category: str, config: IngestionConfig, transport: Transport
) -> list[str]:
    titles: list[str] = []
    cont: dict[str, str | int] = {}
    while True:
        data = _api_result(
            transport,
            config.api_base_url,
            {
                "action": "query",
                "format": "json",
                "formatversion": 2,
                "list": "categorymembers",
                "cmtitle": f"Category:{category}",
                "cmtype": "page",
                "cmlimit": 500,
                **cont,
            },
        )
        titles.extend(m["title"] for m in data.get("query", {}).get("categorymembers", []))
        nxt = data.get("continue")
        if not nxt:
            break
        cont = dict(nxt)

    entity_ids: list[str] = []
    for chunk in _chunks(titles, 50):
        data = _api_result(
            transport,
            config.api_base_url,
            {
                "action": "query",
                "format": "json",
                "formatversion": 2,
                "prop": "pageprops",
                "ppprop": "wikibase_item",
                "titles": "|".join(chunk),
            },
        )
        for page in data.get("query", {}).get("pages", []):
            qid = page.get("pageprops", {}).get("wikibase_item")
            if qid:
                entity_ids.append(qid)
    return entity_ids
