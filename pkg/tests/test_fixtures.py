import json

import pytest

from crext.fixtures import FIXTURES, verify_examples


def test_all_fixtures_pass():
    results = verify_examples()
    assert [r.fixture for r in results] == list(FIXTURES)
    failing = [r.line() for r in results if not r.passed]
    assert not failing, failing
    for r in results:
        json.dumps(r.to_json())


def test_unknown_fixture_id():
    with pytest.raises(ValueError):
        verify_examples(["1.1"])
