import math

import pytest

from app.dependencies.services import get_sweep_use_case
from app.domain.entities.sweep import STATUS_OK, SweepRecord
from app.domain.use_cases.sweep_use_case import SweepUseCase
from app.main import app

RUN = "q1 Q0 a 1 2.0 t\nq1 Q0 b 2 1.0 t\nq2 Q0 c 1 5.0 t\nq2 Q0 d 2 4.0 t\n"
QRELS = "q1 0 a 1\nq2 0 d 1\n"


def test_root_endpoint(client):
    """Test root endpoint."""
    response = client.get("/")
    assert response.status_code == 200
    data = response.json()
    assert data["message"] == "Rank Distill Kit"
    assert "evaluate" in data["endpoints"]


def test_health_endpoint(client):
    """Test health endpoint."""
    response = client.get("/health")
    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "healthy"
    assert data["database_connected"] is True


def test_evaluate_standard_metrics(client):
    """Test evaluating a run with the default metric columns."""
    response = client.post("/evaluate", json={"run": RUN, "qrels": QRELS, "include_per_query": True})
    assert response.status_code == 200
    data = response.json()
    assert data["success"] is True
    assert data["empty_query_policy"] == "ignore"
    results = {r["metric"]: r for r in data["results"]}
    assert list(results) == ["MRR@10", "MRR", "NDCG@1", "NDCG@5", "NDCG"]
    assert results["MRR@10"]["aggregate"] == pytest.approx(75.0)
    assert results["NDCG@1"]["aggregate"] == pytest.approx(50.0)
    assert results["NDCG@5"]["per_query"]["q2"] == pytest.approx(1 / math.log2(3))


def test_evaluate_reference_line(client, fixtures_dir):
    """Test the reference run and qrel lines score perfectly."""
    response = client.post("/evaluate", json={
        "run": (fixtures_dir / "msmarco_dev_teacher.run").read_text(),
        "qrels": (fixtures_dir / "msmarco_dev.qrels").read_text(),
        "metrics": ["mrr@10", "ndcg@5"],
    })
    assert response.status_code == 200
    assert [r["aggregate"] for r in response.json()["results"]] == [100.0, 100.0]


def test_evaluate_policy_and_unjudged_queries(client):
    """Test the zero policy counts an unjudged query."""
    response = client.post("/evaluate", json={
        "run": RUN + "q3 Q0 e 1 1.0 t\n", "qrels": QRELS, "metrics": ["mrr"], "policy": "zero",
    })
    assert response.status_code == 200
    data = response.json()
    assert data["unjudged_queries"] == ["q3"]
    assert data["results"][0]["retained_count"] == 3
    assert data["results"][0]["aggregate"] == pytest.approx(50.0)


def test_evaluate_rejects_malformed_run(client):
    """Test a malformed run line is reported with its location."""
    response = client.post("/evaluate", json={"run": "q1 Q0 a 1\n", "qrels": QRELS})
    assert response.status_code == 422
    data = response.json()
    assert data["error"] == "TrecFormatError"
    assert "run:1:" in data["detail"]


def test_evaluate_rejects_unknown_metric(client):
    """Test metric names are validated."""
    response = client.post("/evaluate", json={"run": RUN, "qrels": QRELS, "metrics": ["map"]})
    assert response.status_code == 422


def test_evaluate_graded_mrr_needs_threshold(client):
    """Test graded labels without a threshold are rejected for MRR."""
    response = client.post("/evaluate", json={"run": RUN, "qrels": "q1 0 a 3\n", "metrics": ["mrr@10"]})
    assert response.status_code == 422
    assert response.json()["error"] == "MetricConfigurationError"


def test_stats_endpoint(client):
    """Test score statistics of a run."""
    response = client.post("/stats", json={"run": RUN})
    assert response.status_code == 200
    data = response.json()
    assert data["mean"] == 3.0
    assert data["min"] == 1.0
    assert data["max"] == 5.0
    assert data["count"] == 4


def test_unknown_sweep_is_404(client):
    """Test a missing sweep id."""
    response = client.get("/sweeps/missing")
    assert response.status_code == 404
    assert "not found" in response.json()["error"]


def test_stored_sweep_table(client, in_memory_repository):
    """Test a stored sweep is reselected through the API."""
    for ordinal, (method, val, ndcg) in enumerate([("MSE", 40.0, 39.0), ("MSE", 42.0, 41.0), ("Softmax", 41.0, 43.0)]):
        in_memory_repository.save(SweepRecord(
            sweep_id="abc", config_id=f"c{ordinal}", ordinal=ordinal, method=method, status=STATUS_OK,
            val_ndcg5=val, transform_on=True, test_metrics={"NDCG@5": ndcg},
        ))
    app.dependency_overrides[get_sweep_use_case] = lambda: SweepUseCase(in_memory_repository)
    try:
        response = client.get("/sweeps/abc")
    finally:
        app.dependency_overrides.pop(get_sweep_use_case, None)
    assert response.status_code == 200
    rows = {r["method"]: r for r in response.json()["rows"]}
    assert rows["MSE"]["config_id"] == "c1"
    assert rows["MSE"]["metrics"]["NDCG@5"] == 41.0
    assert rows["Softmax"]["metrics"]["NDCG@5"] == 43.0
