from fastapi.testclient import TestClient

from src.hecke.api.main import app

client = TestClient(app)


def _element(coweight, coeff=1):
    return {"support": [{"coweight": [coweight], "class": [{"x_indices": [], "y_exponents": [0], "coeff": coeff}]}]}


class TestService:
    """Test service endpoints"""

    def test_root(self):
        """Root lists the suites"""
        response = client.get("/")
        assert response.status_code == 200
        assert "presentation" in response.json()["suites"]

    def test_health(self):
        """Health reports metrics"""
        response = client.get("/health")
        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"
        assert "metrics" in data


class TestSatakeEndpoints:
    """Test the toral and spherical algebra endpoints"""

    def test_multiply(self):
        """delta_1 * delta_1 = delta_2"""
        response = client.post("/satake/multiply", json={"elements": [_element(1), _element(1)]})
        assert response.status_code == 200
        data = response.json()
        assert data["product"] == _element(2)
        assert not data["spherical"]

    def test_multiply_bad_payload(self):
        """Malformed elements are a client error"""
        response = client.post("/satake/multiply", json={"elements": [{"values": []}, _element(1)]})
        assert response.status_code == 400

    def test_multiply_support_not_a_list(self):
        """A scalar support is rejected as input"""
        response = client.post("/satake/multiply", json={"elements": [{"support": 5}, _element(1)]})
        assert response.status_code == 400

    def test_presentation(self):
        """PGL2 dims for N = 3"""
        response = client.post("/satake/presentation", json={"support": 3, "max_degree": 2})
        assert response.status_code == 200
        assert response.json()["dims"] == {"0": 4, "1": 3, "2": 3}

    def test_regime_violation(self):
        """l^r = 9 does not divide q - 1 = 6"""
        response = client.post("/satake/presentation", json={"r": 2})
        assert response.status_code == 422
        assert "Regime violation" in response.json()["detail"]

    def test_invalid_parameters(self):
        """Out-of-range q is rejected"""
        response = client.post("/satake/presentation", json={"q": 1000})
        assert response.status_code == 400


class TestVerifyEndpoint:
    """Test running suites over HTTP"""

    def test_presentation_suite(self):
        """A passing suite returns passed: true"""
        response = client.post("/verify/presentation", json={"support": 2})
        assert response.status_code == 200
        data = response.json()
        assert data["passed"]
        assert data["reports"][0]["suite"] == "presentation"
        assert data["reports"][0]["checks_failed"] == 0

    def test_unknown_suite(self):
        """Unknown suites are not found"""
        response = client.post("/verify/nope", json={})
        assert response.status_code == 404

    def test_regime_override(self):
        """Explicit q, l, r are checked before running"""
        response = client.post("/verify/splitness", json={"q": 7, "ell": 3, "r": 2})
        assert response.status_code == 422
