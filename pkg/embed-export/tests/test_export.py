import hashlib
import json

import numpy as np
import pytest

from embed_export.cli import main as cli_main
from embed_export.corpus import read_sentences, segment_sentences
from embed_export.exporter import ExportJob, export, manifest_path

# Round-trip conformance is checked against the engine's own loader.
from eventsum.corpus import load_cluster
from eventsum.simgraph import load_embeddings

CLUSTER = {
    "cluster_id": "exp",
    "documents": [
        {"doc_id": "a", "sentences": ["One sentence.", "Another here.", "Third one."]},
        {"doc_id": "b", "text": "Dr. Smith spoke. Markets reacted fast. Calm returned."},
    ],
}


@pytest.fixture
def cluster_path(tmp_path):
    path = tmp_path / "cluster.json"
    path.write_text(json.dumps(CLUSTER), encoding="utf-8")
    return path


def run_export(cluster_path, tmp_path, **overrides):
    job = ExportJob(
        input_path=str(cluster_path),
        model_name=overrides.pop("model_name", "hash:64"),
        output_path=str(tmp_path / "out.semb"),
        **overrides,
    )
    return job, export(job)


class TestExport:
    def test_round_trips_through_engine_loader(self, cluster_path, tmp_path):
        job, manifest = run_export(cluster_path, tmp_path)
        store = load_embeddings(job.output_path)
        assert len(store) == manifest.count == 6
        assert store.dim == manifest.dim == 64

    def test_keys_exactly_cover_engine_universe(self, cluster_path, tmp_path):
        job, _ = run_export(cluster_path, tmp_path)
        store = load_embeddings(job.output_path)
        cluster = load_cluster(cluster_path)
        expected = {cluster.sentence_key(i) for i in range(len(cluster))}
        assert set(store.entries) == expected

    def test_vectors_unit_norm(self, cluster_path, tmp_path):
        job, _ = run_export(cluster_path, tmp_path)
        store = load_embeddings(job.output_path)
        for key, vector in store.entries.items():
            assert abs(np.linalg.norm(vector) - 1.0) <= 1e-6, key

    def test_no_normalize_keeps_raw_vectors(self, cluster_path, tmp_path):
        job, manifest = run_export(cluster_path, tmp_path, normalize=False)
        store = load_embeddings(job.output_path)
        norms = [np.linalg.norm(v) for v in store.entries.values()]
        assert manifest.normalize is False
        assert any(abs(n - 1.0) > 1e-3 for n in norms)

    def test_deterministic_output(self, cluster_path, tmp_path):
        job1 = ExportJob(str(cluster_path), "hash:32", str(tmp_path / "a.semb"))
        job2 = ExportJob(str(cluster_path), "hash:32", str(tmp_path / "b.semb"))
        export(job1)
        export(job2)
        assert (tmp_path / "a.semb").read_bytes() == (tmp_path / "b.semb").read_bytes()

    def test_manifest_contents_and_checksum(self, cluster_path, tmp_path):
        job, manifest = run_export(cluster_path, tmp_path)
        sidecar = json.loads((tmp_path / "out.semb.manifest.json").read_text())
        assert manifest_path(job.output_path) == str(tmp_path / "out.semb.manifest.json")
        assert sidecar == manifest.to_json_dict()
        digest = hashlib.sha256((tmp_path / "out.semb").read_bytes()).hexdigest()
        assert manifest.checksum == f"sha256:{digest}"
        assert sidecar["model_name"] == "hash:64"

    def test_jsonl_input(self, tmp_path):
        lines = [
            json.dumps({"key": "k/0/0", "text": "Alpha beta."}),
            json.dumps({"key": "k/0/1", "text": "Gamma delta."}),
        ]
        path = tmp_path / "sents.jsonl"
        path.write_text("\n".join(lines) + "\n")
        job = ExportJob(str(path), "hash:16", str(tmp_path / "out.semb"))
        manifest = export(job)
        store = load_embeddings(job.output_path)
        assert manifest.count == 2
        assert set(store.entries) == {"k/0/0", "k/0/1"}

    def test_bad_hash_spec(self, cluster_path, tmp_path):
        with pytest.raises(ValueError):
            run_export(cluster_path, tmp_path, model_name="hash:zero")

    def test_similar_texts_score_higher_than_unrelated(self, tmp_path):
        # sanity on the hashing encoder's geometry
        lines = [
            json.dumps({"key": "a", "text": "the quick brown fox jumps"}),
            json.dumps({"key": "b", "text": "the quick brown fox leaps"}),
            json.dumps({"key": "c", "text": "zzz completely different words qqq"}),
        ]
        path = tmp_path / "sents.jsonl"
        path.write_text("\n".join(lines) + "\n")
        job = ExportJob(str(path), "hash:128", str(tmp_path / "out.semb"))
        export(job)
        store = load_embeddings(job.output_path)
        close = float(np.dot(store.vector("a"), store.vector("b")))
        far = float(np.dot(store.vector("a"), store.vector("c")))
        assert close > far


class TestSegmentationParity:
    def test_matches_engine_splitter(self, cluster_path):
        pairs = read_sentences(cluster_path)
        cluster = load_cluster(cluster_path)
        assert [key for key, _ in pairs] == [cluster.sentence_key(i) for i in range(len(cluster))]
        assert [text for _, text in pairs] == cluster.texts()

    def test_abbreviation_rule(self):
        assert segment_sentences("Dr. Smith spoke. Done.") == ["Dr. Smith spoke.", "Done."]


class TestCli:
    def test_cli_export(self, cluster_path, tmp_path, capsys):
        out = tmp_path / "cli.semb"
        code = cli_main(["--input", str(cluster_path), "--output", str(out), "--model", "hash:32"])
        assert code == 0
        manifest = json.loads(capsys.readouterr().out)
        assert manifest["count"] == 6
        assert load_embeddings(out).dim == 32

    def test_cli_missing_input(self, tmp_path, capsys):
        code = cli_main(["--input", str(tmp_path / "nope.json"), "--output", str(tmp_path / "o.semb")])
        assert code == 2
        assert "error" in capsys.readouterr().err


def test_sentence_transformer_encoder(cluster_path, tmp_path, monkeypatch):
    """Runs only when a checkpoint is cached locally (offline mode, no download)."""
    st = pytest.importorskip("sentence_transformers")
    monkeypatch.setenv("HF_HUB_OFFLINE", "1")
    name = "sentence-transformers/all-MiniLM-L6-v2"
    try:
        st.SentenceTransformer(name)
    except Exception:
        pytest.skip(f"no local checkpoint for {name}")
    job = ExportJob(str(cluster_path), name, str(tmp_path / "st.semb"))
    manifest = export(job)
    store = load_embeddings(job.output_path)
    assert store.dim == manifest.dim > 0
    for vector in store.entries.values():
        assert abs(np.linalg.norm(vector) - 1.0) <= 1e-6
