# Copyright 2026 The CPMA Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import numpy as np
import pytest

import cpma


@pytest.fixture(params=[cpma.Pma, cpma.Cpma], ids=["pma", "cpma"])
def set_type(request):
    return request.param


def test_point_ops(set_type):
    s = set_type()
    assert s.insert(10)
    assert not s.insert(10)
    assert s.insert(3)
    assert 10 in s and s.contains(3)
    assert s.search(4) == 10
    assert s.search(11) is None
    assert s.range_sum(1, 11) == 13
    assert s.erase(3)
    assert len(s) == 1
    with pytest.raises(ValueError):
        s.insert(0)


def test_batches_match_numpy(set_type):
    rng = np.random.default_rng(1)
    keys = rng.integers(1, 2**40, size=50_000, dtype=np.uint64)
    s = set_type()
    s.batch_insert(keys)
    want = np.unique(keys)
    assert np.array_equal(s.to_numpy(), want)
    gone = want[::3]
    s.batch_erase(gone)
    assert np.array_equal(s.to_numpy(), np.setdiff1d(want, gone))
    assert s.validate() == []
    assert s.sum() == int(np.setdiff1d(want, gone).sum(dtype=np.uint64))


def test_snapshot_round_trip(set_type):
    s = set_type()
    s.batch_insert(np.arange(1, 5001, dtype=np.uint64))
    back = set_type.loads(s.dumps())
    assert back.checksum() == s.checksum()
    assert len(back) == 5000
    with pytest.raises(ValueError):
        set_type.loads(b"not a snapshot")


def test_compressed_is_smaller():
    keys = np.random.default_rng(2).integers(1, 2**40, size=100_000, dtype=np.uint64)
    p, c = cpma.Pma(), cpma.Cpma()
    p.batch_insert(keys)
    c.batch_insert(keys)
    assert c.bytes_per_element < 0.6 * p.bytes_per_element


def test_graph():
    g = cpma.Graph(4)
    g.insert_edges(np.array([[0, 1], [1, 2]], dtype=np.uint64))
    assert g.num_edges == 4
    assert g.has_edge(2, 1)
    assert g.neighbors(1) == [0, 2]
    assert list(g.degrees()) == [1, 2, 1, 0]
    assert cpma.connected_components(g) == [0, 0, 0, 3]
    two = cpma.Graph(2)
    two.insert_edges(np.array([[0, 1]], dtype=np.uint64))
    assert cpma.pagerank(two) == pytest.approx([0.5, 0.5], abs=1e-12)


def test_rmat():
    edges = cpma.rmat(1024, 1000, 0.57, 0.19, 0.19, 0.05, seed=3)
    assert edges.shape == (1000, 2)
    assert edges.max() < 1024
    assert np.array_equal(edges, cpma.rmat(1024, 1000, 0.57, 0.19, 0.19, 0.05, seed=3))
    with pytest.raises(ValueError):
        cpma.rmat(1000, 10)
