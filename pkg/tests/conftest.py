import json
import os
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from eventsum.apcluster import Clustering
from eventsum.objective import ObjectiveContext, make_context
from eventsum.simgraph import SimilarityMatrix

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")

# Worked 3-sentence instance used throughout: caps at alpha=0.3 are
# (0.51, 0.57, 0.48); C({0}) = 1.21.
WORKED_SIM = np.array([[1.0, 0.5, 0.2], [0.5, 1.0, 0.4], [0.2, 0.4, 1.0]])


@pytest.fixture
def worked_matrix():
    return SimilarityMatrix(n=3, values=WORKED_SIM.copy())


@pytest.fixture
def worked_context(worked_matrix):
    clustering = Clustering(
        k=1, exemplars=(0,), assignment={0: 0, 1: 0, 2: 0}, iterations_run=1, converged=True
    )
    return make_context(worked_matrix, clustering)


@pytest.fixture
def toy_cluster_path():
    return os.path.join(DATA_DIR, "toy_cluster.json")


@pytest.fixture
def toy_embeddings_path():
    return os.path.join(DATA_DIR, "toy_embeddings.semb")


@pytest.fixture
def flip_weights_path():
    return os.path.join(DATA_DIR, "flip_weights.json")


def random_similarity(rng: np.random.Generator, n: int) -> SimilarityMatrix:
    """Random valid similarity matrix: symmetric, [0,1], unit diagonal."""
    a = rng.uniform(0.0, 1.0, size=(n, n))
    values = np.clip((a + a.T) / 2.0, 0.0, 1.0)
    np.fill_diagonal(values, 1.0)
    return SimilarityMatrix(n=n, values=values)


def random_clustering(rng: np.random.Generator, matrix: SimilarityMatrix) -> Clustering:
    """Random valid clustering: random exemplars, nearest-exemplar assignment."""
    n = matrix.n
    k = int(rng.integers(1, n + 1))
    exemplars = tuple(sorted(int(e) for e in rng.choice(n, size=k, replace=False)))
    assignment = {}
    for i in range(n):
        sims = [matrix.values[i, e] for e in exemplars]
        assignment[i] = int(np.argmax(sims))
    for cid, e in enumerate(exemplars):
        assignment[e] = cid
    return Clustering(
        k=k, exemplars=exemplars, assignment=assignment, iterations_run=1, converged=True
    )


def random_context(rng: np.random.Generator, n: int, bias_scale: float = 1.0) -> ObjectiveContext:
    matrix = random_similarity(rng, n)
    clustering = random_clustering(rng, matrix)
    bias = rng.uniform(0.0, bias_scale, size=n)
    return make_context(matrix, clustering, bias)


class StubService:
    """Tiny single-purpose HTTP JSON server for exercising the clients.

    `responder(request_dict) -> (status, response_dict)`; records every
    request body it receives.
    """

    def __init__(self, responder):
        self.responder = responder
        self.requests = []
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length)) if length else {}
                outer.requests.append(body)
                status, payload = outer.responder(body)
                data = json.dumps(payload).encode("utf-8") if payload is not None else b"not json"
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self.server = HTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def url(self):
        return f"http://127.0.0.1:{self.server.server_port}/"

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def stub_service():
    services = []

    def factory(responder):
        service = StubService(responder)
        services.append(service)
        return service

    yield factory
    for service in services:
        service.close()
