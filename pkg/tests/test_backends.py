import numpy as np
import httpx
import pytest
from fastapi.testclient import TestClient

from synthcurate.backends import (
    BackendEndpoint,
    HashBackends,
    HttpBackends,
    ScriptedBackends,
)
from synthcurate.backends.mocks import (
    aesthetic_key,
    caption_key,
    detect_key,
    embed_key,
    features_key,
    inpaint_key,
)
from synthcurate.backends.server import create_backend_server
from synthcurate.errors import (
    BackendError,
    FixtureMissError,
    TransportError,
    ValidationError,
)
from synthcurate.geometry import Box
from synthcurate.imagestore import ImageStore
from PIL import Image


@pytest.fixture
def store(tmp_path):
    s = ImageStore(tmp_path / "images")
    im = Image.new("RGB", (64, 48), (40, 90, 120))
    s.put_image("bg-a", im)
    return s


MASK = Box(10, 10, 30, 30)


class TestScripted:
    def test_detect_passthrough_and_sort(self, store):
        backends = ScriptedBackends(
            {
                "detect": {
                    detect_key("img1", "dog"): [
                        {"label": "dog", "confidence": 0.7, "box": [0, 0, 5, 5]},
                        {"label": "dog", "confidence": 0.9, "box": [10, 10, 50, 50]},
                    ]
                }
            }
        )
        dets = backends.detect("img1", "dog")
        assert [d.confidence for d in dets] == [0.9, 0.7]
        assert dets[0].box == Box(10, 10, 50, 50)

    def test_detect_empty(self):
        backends = ScriptedBackends({"detect": {detect_key("img1", "dog"): []}})
        assert backends.detect("img1", "dog") == []

    def test_aesthetic_passthrough(self):
        backends = ScriptedBackends({"aesthetic": {aesthetic_key("img1"): 6.2}})
        assert backends.aesthetic_score("img1") == 6.2

    def test_fixture_miss(self):
        backends = ScriptedBackends({})
        with pytest.raises(FixtureMissError):
            backends.aesthetic_score("unknown")

    def test_empty_caption_is_backend_error(self):
        backends = ScriptedBackends({"caption": {caption_key("img1", "p"): ""}})
        with pytest.raises(BackendError):
            backends.caption("img1", "p")

    def test_scripted_error_response(self, store):
        key = inpaint_key("bg-a", "p dog", MASK, 1)
        backends = ScriptedBackends(
            {"inpaint": {key: {"__error__": "backend refused"}}}, store=store
        )
        with pytest.raises(BackendError, match="refused"):
            backends.inpaint("bg-a", "p dog", MASK, 1)

    def test_inpaint_materializes_with_background_dims(self, store):
        key = inpaint_key("bg-a", "p", MASK, 1)
        backends = ScriptedBackends({"inpaint": {key: "gen-1"}}, store=store)
        image_id = backends.inpaint("bg-a", "p", MASK, 1)
        assert image_id == "gen-1"
        assert store.dims("gen-1") == store.dims("bg-a")


class TestHashMock:
    def test_inpaint_deterministic_and_dims_preserved(self, store):
        backends = HashBackends(store, seed=5)
        a = backends.inpaint("bg-a", "a dog", MASK, 7)
        b = backends.inpaint("bg-a", "a dog", MASK, 7)
        assert a == b
        assert store.get_bytes(a) == store.get_bytes(b)
        assert store.dims(a) == store.dims("bg-a")

    def test_different_seed_different_image(self, store):
        backends = HashBackends(store, seed=5)
        assert backends.inpaint("bg-a", "a dog", MASK, 7) != backends.inpaint(
            "bg-a", "a dog", MASK, 8
        )

    def test_mask_outside_bounds_rejected(self, store):
        backends = HashBackends(store, seed=5)
        with pytest.raises(ValidationError):
            backends.inpaint("bg-a", "a dog", Box(0, 0, 100, 100), 7)

    def test_embed_deterministic_dim_and_distinct(self, store):
        backends = HashBackends(store, seed=5, embed_dim=64)
        u = backends.embed_text("hello")
        assert u.shape == (64,)
        assert np.array_equal(u, backends.embed_text("hello"))
        assert not np.array_equal(u, backends.embed_text("world"))

    def test_embed_empty_text(self, store):
        with pytest.raises(ValidationError):
            HashBackends(store).embed_text("")

    def test_aesthetic_deterministic(self, store):
        backends = HashBackends(store, seed=5)
        assert backends.aesthetic_score("bg-a") == backends.aesthetic_score("bg-a")

    def test_features_dims_and_determinism(self, store):
        backends = HashBackends(store, seed=5, feature_dims=(768, 1024))
        crop = Box(0, 0, 32, 32)
        f1 = backends.extract_features("bg-a", crop)
        f2 = backends.extract_features("bg-a", crop)
        assert f1.global_features.shape == (768,)
        assert f1.spatial_features.shape == (1024,)
        assert np.array_equal(f1.global_features, f2.global_features)

    def test_features_crop_outside_bounds(self, store):
        backends = HashBackends(store, seed=5)
        with pytest.raises(ValidationError):
            backends.extract_features("bg-a", Box(0, 0, 999, 999))


class TestHttpClient:
    def _client(self, handler, retry_limit=2):
        transport = httpx.MockTransport(handler)
        endpoint = BackendEndpoint(base_url="http://backend", timeout=1, retry_limit=retry_limit)
        client = httpx.Client(base_url="http://backend", transport=transport)
        return HttpBackends(endpoint, client=client)

    def test_retries_then_transport_error(self):
        calls = []

        def handler(request):
            calls.append(1)
            raise httpx.ConnectError("unreachable")

        backends = self._client(handler, retry_limit=2)
        with pytest.raises(TransportError) as exc:
            backends.aesthetic_score("img1")
        assert len(calls) == 3
        assert exc.value.attempts == 3

    def test_5xx_retried(self):
        calls = []

        def handler(request):
            calls.append(1)
            return httpx.Response(500)

        with pytest.raises(TransportError):
            self._client(handler, retry_limit=1).aesthetic_score("img1")
        assert len(calls) == 2

    def test_4xx_not_retried(self):
        calls = []

        def handler(request):
            calls.append(1)
            return httpx.Response(422, text="bad request")

        with pytest.raises(BackendError):
            self._client(handler, retry_limit=3).aesthetic_score("img1")
        assert len(calls) == 1


class TestWireProtocol:
    """HttpBackends against the FastAPI wrapper around a hash mock."""

    @pytest.fixture
    def wired(self, store):
        app = create_backend_server(HashBackends(store, seed=5))
        client = TestClient(app)
        endpoint = BackendEndpoint(base_url="http://testserver", timeout=5)
        return HttpBackends(endpoint, client=client), HashBackends(store, seed=5)

    def test_round_trip_matches_in_process(self, wired, store):
        over_wire, direct = wired
        image_id = over_wire.inpaint("bg-a", "a dog", MASK, 3)
        assert image_id == direct.inpaint("bg-a", "a dog", MASK, 3)
        assert over_wire.detect(image_id, "dog") == direct.detect(image_id, "dog")
        assert over_wire.aesthetic_score(image_id) == direct.aesthetic_score(image_id)
        assert over_wire.caption(image_id, "a dog") == direct.caption(image_id, "a dog")
        assert np.array_equal(over_wire.embed_text("a dog"), direct.embed_text("a dog"))
        crop = Box(0, 0, 20, 20)
        assert np.array_equal(
            over_wire.extract_features(image_id, crop).global_features,
            direct.extract_features(image_id, crop).global_features,
        )

    def test_validation_maps_to_400(self, wired):
        over_wire, _ = wired
        with pytest.raises(BackendError):
            over_wire.inpaint("no-such-bg", "a dog", MASK, 3)
