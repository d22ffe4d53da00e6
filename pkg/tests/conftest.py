import pytest

from texttab import synth


@pytest.fixture(scope="session")
def small_benchmark(tmp_path_factory):
    """A small planted-cluster benchmark on disk, shared across tests."""
    out = tmp_path_factory.mktemp("bench")
    bench = synth.generate(seed=7, n_documents=12)
    paths = synth.write_benchmark(bench, out)
    return bench, paths
