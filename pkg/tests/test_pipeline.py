import dataclasses
import json

import numpy as np
import pytest

from eventsum.config import PipelineConfig, load_config
from eventsum.corpus import load_cluster
from eventsum.errors import ValidationError
from eventsum.pipeline import PipelineStageError, run_summarize
from eventsum.simgraph import EmbeddingStore, save_embeddings


@pytest.fixture
def toy_config(toy_embeddings_path):
    return PipelineConfig(embedding_source=toy_embeddings_path, k=2, c=0)


class TestRunSummarize:
    def test_passthrough_summary_in_document_order(self, toy_cluster_path, toy_config):
        out = run_summarize(toy_cluster_path, toy_config)
        cluster = load_cluster(toy_cluster_path)
        picked = sorted(out.result.selection.members)
        expected = " ".join(cluster.universe[i].text for i in picked)
        assert out.summary_text == expected
        assert out.rewrite_fallback is False

    def test_byte_identical_across_runs(self, toy_cluster_path, toy_config):
        payloads = {run_summarize(toy_cluster_path, toy_config).to_json() for _ in range(3)}
        assert len(payloads) == 1

    def test_lambda2_flips_designed_pick(self, toy_cluster_path, toy_config, flip_weights_path):
        base = dataclasses.replace(toy_config, cooc_weights=flip_weights_path)
        without_bias = run_summarize(toy_cluster_path, dataclasses.replace(base, lambda2=0.0))
        with_bias = run_summarize(toy_cluster_path, dataclasses.replace(base, lambda2=1.0))
        assert without_bias.result.selection.members == (0, 3)
        assert with_bias.result.selection.members == (0, 2)

    def test_zero_bias_without_weights(self, toy_cluster_path, toy_config):
        # no cooc weights -> bias contributes nothing: lambda2 is inert
        a = run_summarize(toy_cluster_path, dataclasses.replace(toy_config, lambda2=0.0))
        b = run_summarize(toy_cluster_path, dataclasses.replace(toy_config, lambda2=5.0))
        assert a.result.selection.members == b.result.selection.members
        assert a.result.objective_breakdown[2] == 0.0

    def test_missing_embedding_source(self, toy_cluster_path):
        with pytest.raises(PipelineStageError) as err:
            run_summarize(toy_cluster_path, PipelineConfig())
        assert err.value.stage == "embeddings"

    def test_stage_name_on_missing_keys(self, toy_cluster_path, tmp_path):
        # store that lacks the cluster's keys -> similarity stage fails
        store = EmbeddingStore(dim=2, entries={"other/0/0": np.array([1.0, 0.0])})
        path = tmp_path / "wrong.semb"
        save_embeddings(store, path)
        with pytest.raises(PipelineStageError) as err:
            run_summarize(toy_cluster_path, PipelineConfig(embedding_source=str(path)))
        assert err.value.stage == "similarity"

    def test_rewrite_fallback_on_failure(self, toy_cluster_path, toy_config, stub_service):
        service = stub_service(lambda req: (500, {"error": "down"}))
        config = dataclasses.replace(toy_config, rewrite_endpoint=service.url)
        out = run_summarize(toy_cluster_path, config)
        assert out.rewrite_fallback is True
        cluster = load_cluster(toy_cluster_path)
        picked = sorted(out.result.selection.members)
        assert out.summary_text == " ".join(cluster.universe[i].text for i in picked)

    def test_rewrite_used_when_healthy(self, toy_cluster_path, toy_config, stub_service):
        service = stub_service(lambda req: (200, {"summary": "Rewritten text."}))
        config = dataclasses.replace(toy_config, rewrite_endpoint=service.url)
        out = run_summarize(toy_cluster_path, config)
        assert out.summary_text == "Rewritten text."
        assert out.rewrite_fallback is False
        assert service.requests[0]["prompt"] == "re-write"

    def test_embedding_service_source(self, toy_cluster_path, stub_service):
        # serve the toy vectors over HTTP instead of the SEMB file
        vectors = {
            "Quake hits the coastal city.": [1.0, 0.0, 0.0, 1.0],
            "Rescue teams arrived overnight.": [0.0, 1.0, 0.0, 0.0],
            "Hospitals treat hundreds of injured.": [0.0, 0.0, 1.0, 1.0],
            "Officials promise aid funding.": [0.1, 0.9, 0.0, 0.0],
        }

        def responder(req):
            return (200, {"dim": 4, "vectors": [vectors[s] for s in req["sentences"]]})

        service = stub_service(responder)
        config = PipelineConfig(embedding_source=service.url, k=2, c=0)
        out = run_summarize(toy_cluster_path, config)
        assert out.result.selection.members == (0, 3)

    def test_output_schema(self, toy_cluster_path, toy_config):
        payload = run_summarize(toy_cluster_path, toy_config).to_json_dict()
        assert set(payload) == {
            "cluster_id", "main_index", "selection", "budget", "gains",
            "scores", "sentences", "summary", "rewrite_fallback",
        }
        assert set(payload["scores"]) == {"coverage", "diversity", "bias", "total"}
        assert payload["selection"][0] == payload["main_index"]


class TestConfig:
    def test_defaults_round_trip(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"alpha": 0.5, "k": 3, "margin": 2.0}))
        config = load_config(path)
        assert (config.alpha, config.k, config.margin) == (0.5, 3, 2.0)
        assert config.lambda1 == 1.0  # untouched default

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"alhpa": 0.5}))
        with pytest.raises(ValidationError):
            load_config(path)

    def test_bad_margin_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"margin": 0}))
        with pytest.raises(ValidationError):
            load_config(path)
