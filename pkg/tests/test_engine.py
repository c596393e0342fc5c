import threading
import time

import pytest

from fintxn.core import TruncationOrder, TruncationSpec
from fintxn.engine import Engine, IsolationLevel
from fintxn.errors import (
    DuplicateEntityError,
    MissingEntityError,
    MultiplicityError,
    SchemaError,
    SerializationConflict,
    TransactionError,
)

from conftest import account_props, build_fx, person_props


@pytest.fixture
def engine():
    e = Engine(IsolationLevel.SERIALIZABLE)
    yield e
    e.close()


class TestLifecycle:
    def test_open_empty(self, engine):
        t = engine.begin()
        assert engine.scan(t, "Person") == []
        engine.commit(t)

    def test_abort_discards_insert(self, engine):
        t = engine.begin()
        engine.insert_vertex(t, "Person", 1, person_props())
        engine.abort(t)
        t2 = engine.begin()
        assert not engine.vertex_exists(t2, "Person", 1)
        engine.commit(t2)

    def test_commit_makes_visible(self, engine):
        t = engine.begin()
        engine.insert_vertex(t, "Person", 1, person_props())
        engine.commit(t)
        t2 = engine.begin()
        assert engine.vertex_exists(t2, "Person", 1)
        engine.commit(t2)

    def test_no_ops_after_terminal_state(self, engine):
        t = engine.begin()
        engine.commit(t)
        with pytest.raises(TransactionError):
            engine.insert_vertex(t, "Person", 1, person_props())
        with pytest.raises(TransactionError):
            engine.commit(t)

    def test_abort_is_idempotent(self, engine):
        t = engine.begin()
        engine.abort(t)
        engine.abort(t)

    def test_read_uncommitted_open(self):
        e = Engine(IsolationLevel.READ_UNCOMMITTED)
        t = e.begin()
        assert e.scan(t, "Account") == []
        e.commit(t)
        e.close()

    def test_open_with_string_isolation(self):
        e = Engine("read_committed")
        assert e.isolation is IsolationLevel.READ_COMMITTED
        e.close()


class TestInserts:
    def test_duplicate_vertex_in_one_txn(self, engine):
        t = engine.begin()
        engine.insert_vertex(t, "Person", 1, person_props())
        with pytest.raises(DuplicateEntityError):
            engine.insert_vertex(t, "Person", 1, person_props())
        engine.abort(t)

    def test_ids_unique_per_kind_only(self, engine):
        t = engine.begin()
        engine.insert_vertex(t, "Person", 7, person_props())
        engine.insert_vertex(t, "Account", 7, account_props())
        engine.commit(t)

    def test_multiplicity_one(self, fx_engine):
        t = fx_engine.begin()
        with pytest.raises(MultiplicityError):
            fx_engine.insert_edge(t, "own", "Person", 1, "Account", 1, 99)
        fx_engine.abort(t)

    def test_multiplicity_n(self, fx_engine):
        t = fx_engine.begin()
        e1 = fx_engine.insert_edge(t, "transfer", "Account", 1, "Account", 2, 70, 100)
        e2 = fx_engine.insert_edge(t, "transfer", "Account", 1, "Account", 2, 71, 100)
        assert e1 != e2
        fx_engine.abort(t)

    def test_account_has_one_owner(self, fx_engine):
        t = fx_engine.begin()
        with pytest.raises(MultiplicityError):
            fx_engine.insert_edge(t, "own", "Person", 2, "Account", 1, 99)
        fx_engine.abort(t)

    def test_endpoint_kinds_checked(self, engine):
        t = engine.begin()
        engine.insert_vertex(t, "Person", 1, person_props())
        engine.insert_vertex(t, "Account", 1, account_props())
        with pytest.raises(SchemaError):
            engine.insert_edge(t, "deposit", "Person", 1, "Account", 1, 5, 100)
        engine.abort(t)

    def test_missing_endpoint(self, engine):
        t = engine.begin()
        engine.insert_vertex(t, "Account", 1, account_props())
        with pytest.raises(MissingEntityError):
            engine.insert_edge(t, "transfer", "Account", 1, "Account", 2, 5, 100)
        engine.abort(t)

    def test_strict_schema_rejects_missing_attrs(self, engine):
        t = engine.begin()
        with pytest.raises(SchemaError):
            engine.insert_vertex(t, "Person", 1, {"name": "x"})
        engine.abort(t)

    def test_relaxed_schema_allows_partial_records(self):
        e = Engine(strict_schema=False)
        t = e.begin()
        e.insert_vertex(t, "Account", 1, {"id": 1, "transHistory": [100]})
        e.commit(t)
        e.close()


class TestUpdatesAndVisibility:
    def test_own_writes_visible(self, fx_engine):
        t = fx_engine.begin()
        fx_engine.update_property(t, "Account", 1, "isBlocked", True)
        assert fx_engine.read_prop(t, "Account", 1, "isBlocked") is True
        fx_engine.abort(t)
        t2 = fx_engine.begin()
        assert fx_engine.read_prop(t2, "Account", 1, "isBlocked") is False
        fx_engine.commit(t2)

    def test_unknown_property_strict(self, fx_engine):
        t = fx_engine.begin()
        with pytest.raises(SchemaError):
            fx_engine.update_property(t, "Account", 1, "favoriteColor", "red")
        fx_engine.abort(t)

    def test_read_committed_blocks_dirty_read(self):
        e = Engine(IsolationLevel.READ_COMMITTED)
        build_fx(e)
        writer = e.begin()
        e.update_property(writer, "Account", 1, "isBlocked", True)
        observed = []

        def read():
            t = e.begin()
            observed.append(e.read_prop(t, "Account", 1, "isBlocked"))
            e.commit(t)

        th = threading.Thread(target=read)
        th.start()
        time.sleep(0.15)  # reader must be parked on the writer's lock
        assert observed == []
        e.abort(writer)
        th.join(timeout=5)
        assert observed == [False]
        e.close()

    def test_read_uncommitted_sees_in_flight_write(self):
        e = Engine(IsolationLevel.READ_UNCOMMITTED)
        build_fx(e)
        writer = e.begin()
        e.update_property(writer, "Account", 1, "isBlocked", True)
        reader = e.begin()
        assert e.read_prop(reader, "Account", 1, "isBlocked") is True
        e.commit(reader)
        e.abort(writer)
        reader2 = e.begin()
        assert e.read_prop(reader2, "Account", 1, "isBlocked") is False
        e.commit(reader2)
        e.close()


class TestDeleteCascade:
    def test_fx_cascade_summary(self, fx_engine):
        t = fx_engine.begin()
        summary = fx_engine.delete_vertex_cascade(t, "Account", 2)
        fx_engine.commit(t)
        assert summary == {
            "Account": 1,
            "Loan": 1,
            "own": 1,
            "transfer": 2,
            "deposit": 1,
            "repay": 1,
            "signIn": 1,
            "apply": 1,
        }
        t2 = fx_engine.begin()
        assert not fx_engine.vertex_exists(t2, "Account", 2)
        assert not fx_engine.vertex_exists(t2, "Loan", 1)
        assert fx_engine.vertex_exists(t2, "Loan", 2)
        fx_engine.commit(t2)

    def test_isolated_account(self, engine):
        t = engine.begin()
        engine.insert_vertex(t, "Account", 9, account_props())
        engine.commit(t)
        t2 = engine.begin()
        assert engine.delete_vertex_cascade(t2, "Account", 9) == {"Account": 1}
        engine.commit(t2)

    def test_abort_restores_cascade(self, fx_engine):
        before = fx_engine.state_digest()
        t = fx_engine.begin()
        fx_engine.delete_vertex_cascade(t, "Account", 2)
        fx_engine.abort(t)
        assert fx_engine.state_digest() == before

    def test_missing_vertex(self, fx_engine):
        t = fx_engine.begin()
        with pytest.raises(MissingEntityError):
            fx_engine.delete_vertex_cascade(t, "Account", 99)
        fx_engine.abort(t)


class TestNeighborsAndTruncation:
    @pytest.fixture
    def hub(self, engine):
        t = engine.begin()
        engine.insert_vertex(t, "Account", 1, account_props())
        for i in range(2, 8):
            engine.insert_vertex(t, "Account", i, account_props())
        for i, (ts, amt) in enumerate(zip(range(1, 6), range(1000, 6000, 1000)), start=2):
            engine.insert_edge(t, "transfer", "Account", 1, "Account", i, ts, amt)
        engine.commit(t)
        return engine

    def test_timestamp_descending_limit(self, hub):
        t = hub.begin()
        batch = hub.edges(t, "Account", 1, "transfer", "out",
                          trunc=TruncationSpec(3, TruncationOrder.TIMESTAMP_DESCENDING))
        assert batch.ts == [5, 4, 3]
        hub.commit(t)

    def test_amount_ascending_limit(self, hub):
        t = hub.begin()
        batch = hub.edges(t, "Account", 1, "transfer", "out",
                          trunc=TruncationSpec(3, TruncationOrder.AMOUNT_ASCENDING))
        assert batch.amt == [1000, 2000, 3000]
        hub.commit(t)

    def test_window_strict_bounds(self, engine):
        t = engine.begin()
        engine.insert_vertex(t, "Account", 1, account_props())
        engine.insert_vertex(t, "Account", 2, account_props())
        for ts in (10, 20, 30):
            engine.insert_edge(t, "transfer", "Account", 1, "Account", 2, ts, 100)
        batch = engine.edges(t, "Account", 1, "transfer", "out", window=(10, 30))
        assert batch.ts == [20]
        engine.commit(t)

    def test_adjacency_is_timestamp_sorted(self, fx_engine):
        t = fx_engine.begin()
        # Insert out of timestamp order; list stays sorted.
        fx_engine.insert_edge(t, "transfer", "Account", 1, "Account", 2, 5, 100)
        batch = fx_engine.edges(t, "Account", 1, "transfer", "out")
        assert batch.ts == sorted(batch.ts)
        fx_engine.abort(t)

    def test_neighbors_materializes_attrs(self, fx_engine):
        t = fx_engine.begin()
        views = fx_engine.neighbors(t, "Account", 1, "transfer", "out")
        assert [v.ts for v in views] == [10, 40]
        assert views[0].attrs["ordernumber"] == "ORD1"
        fx_engine.commit(t)

    def test_unknown_vertex(self, fx_engine):
        t = fx_engine.begin()
        with pytest.raises(MissingEntityError):
            fx_engine.edges(t, "Account", 99, "transfer", "out")
        fx_engine.abort(t)


class TestConcurrency:
    def test_serializable_writers_serialize_or_conflict(self):
        e = Engine(IsolationLevel.SERIALIZABLE)
        build_fx(e)
        outcomes = []

        def writer(value):
            t = e.begin()
            try:
                e.update_property(t, "Account", 1, "nickname", value)
                time.sleep(0.05)
                e.commit(t)
                outcomes.append(("commit", value))
            except SerializationConflict:
                outcomes.append(("conflict", value))

        threads = [threading.Thread(target=writer, args=(f"w{i}",)) for i in range(2)]
        for th in threads:
            th.start()
        for th in threads:
            th.join(timeout=10)
        commits = [o for o in outcomes if o[0] == "commit"]
        assert len(commits) >= 1
        t = e.begin()
        final = e.read_prop(t, "Account", 1, "nickname")
        e.commit(t)
        assert ("commit", final) in outcomes
        e.close()

    def test_deadlock_breaks_with_victim(self):
        e = Engine(IsolationLevel.SERIALIZABLE, lock_timeout=10)
        build_fx(e)
        barrier = threading.Barrier(2)
        results = []

        def worker(first, second):
            t = e.begin()
            try:
                e.update_property(t, "Account", first, "nickname", "x")
                barrier.wait(timeout=5)
                e.update_property(t, "Account", second, "nickname", "y")
                e.commit(t)
                results.append("commit")
            except SerializationConflict:
                results.append("conflict")

        t1 = threading.Thread(target=worker, args=(1, 2))
        t2 = threading.Thread(target=worker, args=(2, 1))
        t1.start(); t2.start()
        t1.join(timeout=15); t2.join(timeout=15)
        assert sorted(results) == ["commit", "conflict"]
        e.close()


class TestStateDigest:
    def test_reads_leave_state_unchanged(self, fx_engine):
        before = fx_engine.state_digest()
        t = fx_engine.begin()
        fx_engine.scan(t, "Account")
        fx_engine.edges(t, "Account", 1, "transfer", "out", window=(0, 1000))
        fx_engine.neighbors(t, "Account", 2, "transfer", "in")
        fx_engine.commit(t)
        assert fx_engine.state_digest() == before
