"""Shared fixtures: a loopback provider server speaking the wire protocols."""

import json
import socket
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from litmini.corpus import Corpus, DocMeta, SentenceRecord
from litmini.embed import DEFAULT_MODEL_SPECS, hash_embed


def corpus_from_docs(docs):
    """Build a corpus from (doc_id, journal, year, rows) tuples.

    Each row is a text string for a body sentence, or a (text, kind, asset)
    tuple for full control. Sids run sequentially across documents.
    """
    records = []
    metas = {}
    sid = 0
    for doc_id, journal, year, rows in docs:
        metas[doc_id] = DocMeta(doc_id=doc_id, journal_abbr=journal, year=year,
                                title=doc_id.split("-", 2)[-1],
                                source_path=doc_id + ".txt")
        pos = {"body": 0, "caption": 0}
        for row in rows:
            if isinstance(row, str):
                text, kind, asset = row, "body", None
            else:
                text, kind, asset = row
            records.append(SentenceRecord(
                sid=sid, doc_id=doc_id, pos=pos[kind], text=text,
                word_count=len(text.split()), kind=kind, asset=asset))
            pos[kind] += 1
            sid += 1
    return Corpus(records, metas)


def _default_models():
    """Mirror the stock registry: full name -> (dim, seed)."""
    table = {spec.full_name: (spec.dim, i)
             for i, spec in enumerate(DEFAULT_MODEL_SPECS, start=1)}
    table["tiny-test-model"] = (100, 9)  # deliberately narrow, for mismatch tests
    return table


class ProviderServer:
    """Embedding/classifier/summarizer provider running on a loopback port.

    Embeddings reuse the in-process hash embedder, so transported vectors can
    be compared bit-for-bit against locally computed ones. The classify and
    summarize behaviors are injectable per test.
    """

    def __init__(self):
        self.models = _default_models()
        self.fail_with = None  # set to an int status to force failures
        self.classify_fn = lambda task, texts: [
            {"label": "neutral", "score": 1.0} for _ in texts]
        self.summarize_fn = lambda prompt: prompt
        self.requests = []

        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                payload = json.loads(self.rfile.read(length) or b"{}")
                server.requests.append((self.path, payload))
                if server.fail_with is not None:
                    self._reply(server.fail_with, {"error": "forced failure"})
                    return
                try:
                    body = server.handle(self.path, payload)
                except KeyError as exc:
                    self._reply(400, {"error": f"bad request: {exc}"})
                    return
                if body is None:
                    self._reply(404, {"error": f"no route {self.path}"})
                else:
                    self._reply(200, body)

            def _reply(self, status, obj):
                data = json.dumps(obj).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

        self._httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    @property
    def url(self):
        host, port = self._httpd.server_address
        return f"http://{host}:{port}"

    def handle(self, path, payload):
        if path == "/embed":
            dim, seed = self.models[payload["model"]]
            vectors = [hash_embed(t, dim, seed).tolist() for t in payload["texts"]]
            return {"vectors": vectors}
        if path == "/classify":
            return {"labels": self.classify_fn(payload["task"], payload["texts"])}
        if path == "/summarize":
            return {"summary": self.summarize_fn(payload["prompt"])}
        return None

    def reset(self):
        self.fail_with = None
        self.requests.clear()

    def close(self):
        self._httpd.shutdown()
        self._httpd.server_close()


@pytest.fixture(scope="session")
def provider_server():
    server = ProviderServer()
    yield server
    server.close()


@pytest.fixture
def fresh_provider(provider_server):
    """The shared server, reset to defaults before and after each test."""
    provider_server.reset()
    yield provider_server
    provider_server.reset()


def closed_port_url():
    """A loopback URL nothing is listening on."""
    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return f"http://127.0.0.1:{port}"
