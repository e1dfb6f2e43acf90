#include "doctest.h"

#include <random>

#include "numaperf/object_registry.hpp"
#include "oracles.hpp"

using namespace numaperf;

TEST_CASE("allocation on an empty registry is live with id 1") {
  ObjectRegistry registry;
  ObjectId id = registry.register_allocation(1, 0, 0x1000, 64, 5);
  CHECK(id == 1);
  CHECK(registry.live_count() == 1);
  CHECK(registry.record(id).origin.callsite == 5);
}

TEST_CASE("overlapping live allocation is rejected naming both objects") {
  ObjectRegistry registry;
  registry.register_allocation(1, 0, 0x1000, 64, 5);
  CHECK_THROWS_WITH_AS(registry.register_allocation(2, 0, 0x1020, 64, 6),
                       doctest::Contains("live object 1"), RegistryError);
}

TEST_CASE("address reuse after free creates a fresh generation") {
  ObjectRegistry registry;
  ObjectId first = registry.register_allocation(1, 0, 0x1000, 64, 5);
  registry.on_free(10, 0, 0x1000);
  ObjectId second = registry.register_allocation(20, 0, 0x1000, 32, 9);
  CHECK(second != first);
  CHECK(registry.resolve(0x1000, 25) == second);
  CHECK(registry.resolve(0x1000, 5) == first);
  // Between death and rebirth nothing is live; the dead generation is the
  // access fallback.
  CHECK(!registry.resolve(0x1000, 15).has_value());
  auto res = registry.resolve_for_access(0x1000, 15);
  CHECK(res.id == first);
  CHECK(res.dead);
}

TEST_CASE("resolve finds globals and returns none for untracked addresses") {
  ObjectRegistry registry;
  ObjectId gid = registry.register_global(0x8000, 4096, "table");
  CHECK(registry.resolve(0x8100, 50) == gid);
  CHECK(!registry.resolve(0xdeadbeef, 50).has_value());
}

TEST_CASE("record_object_access keeps reads-after-last-write per the replay rule") {
  ObjectRegistry registry;
  ObjectId id = registry.register_allocation(0, 0, 0x1000, 64, 1);

  SUBCASE("W,R,R,R -> 3") {
    registry.record_object_access(id, 1, AccessKind::Write);
    registry.record_object_access(id, 2, AccessKind::Read);
    registry.record_object_access(id, 3, AccessKind::Read);
    registry.record_object_access(id, 4, AccessKind::Read);
    CHECK(registry.record(id).reads_after_last_write == 3);
  }
  SUBCASE("W,R,W,R -> 1 (reset on write)") {
    registry.record_object_access(id, 1, AccessKind::Write);
    registry.record_object_access(id, 2, AccessKind::Read);
    registry.record_object_access(id, 3, AccessKind::Write);
    registry.record_object_access(id, 4, AccessKind::Read);
    CHECK(registry.record(id).reads_after_last_write == 1);
  }
  SUBCASE("random sequence equals a single-loop replay oracle") {
    std::mt19937_64 rng(7);
    std::optional<Timestamp> last_write;
    std::uint64_t expected = 0;
    for (Timestamp ts = 1; ts <= 1000; ++ts) {
      const bool write = rng() % 3 == 0;
      registry.record_object_access(id, ts, write ? AccessKind::Write : AccessKind::Read);
      if (write) {
        last_write = ts;
        expected = 0;
      } else if (!last_write || ts > *last_write) {
        expected += 1;
      }
    }
    CHECK(registry.record(id).reads_after_last_write == expected);
    CHECK(registry.record(id).reads_after_last_write <= registry.record(id).reads);
  }
}

TEST_CASE("resolution agrees with the brute-force lifetime oracle") {
  ObjectRegistry registry;
  oracle::NaiveRegistry naive;
  std::mt19937_64 rng(123);

  struct Live {
    std::uint64_t addr;
    std::uint64_t size;
  };
  std::vector<Live> live;
  Timestamp ts = 0;
  std::uint64_t checked = 0;

  for (int step = 0; step < 10000; ++step) {
    ++ts;
    const std::uint64_t action = rng() % 10;
    if (action < 2) {  // alloc
      const std::uint64_t slot = rng() % 256;
      const std::uint64_t addr = 0x10000 + slot * 256;
      const std::uint64_t size = 32 + (rng() % 7) * 32;
      bool overlaps = false;
      for (const Live& l : live) {
        if (addr < l.addr + l.size && l.addr < addr + size) {
          overlaps = true;
          break;
        }
      }
      if (overlaps) {
        continue;
      }
      registry.register_allocation(ts, 0, addr, size, 1);
      naive.alloc(ts, addr, size);
      live.push_back({addr, size});
    } else if (action < 3 && !live.empty()) {  // free
      const std::size_t pick = rng() % live.size();
      registry.on_free(ts, 0, live[pick].addr);
      naive.free(ts, live[pick].addr);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
    } else {  // resolve a random address, sometimes in gaps
      const std::uint64_t addr = 0x10000 + (rng() % (256 * 256 + 512));
      ++checked;
      const std::uint32_t want = naive.resolve(addr, ts);
      const auto got_access = registry.resolve_for_access(addr, ts);
      CHECK(got_access.id == want);
      if (auto got = registry.resolve(addr, ts)) {
        CHECK(*got == want);
      }
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("callsite aggregates sum member objects") {
  ObjectRegistry registry;
  ObjectId a = registry.register_allocation(1, 0, 0x1000, 64, 5);
  ObjectId b = registry.register_allocation(2, 0, 0x2000, 64, 5);
  ObjectId c = registry.register_allocation(3, 0, 0x3000, 64, 8);
  registry.record_object_access(a, 4, AccessKind::Write);
  registry.record_object_access(a, 5, AccessKind::Read);
  registry.record_object_access(b, 6, AccessKind::Read);
  registry.record_object_access(c, 7, AccessKind::Read);
  registry.add_remote_access(a);

  auto aggregates = registry.callsite_aggregates();
  REQUIRE(aggregates.size() == 2);
  const auto& cs5 = aggregates[0].callsite == 5 ? aggregates[0] : aggregates[1];
  CHECK(cs5.object_count == 2);
  CHECK(cs5.reads == 2);
  CHECK(cs5.writes == 1);
  CHECK(cs5.remote_accesses == 1);

  std::uint64_t total_reads = 0;
  std::uint64_t total_writes = 0;
  for (const ObjectRecord& obj : registry.objects()) {
    total_reads += obj.reads;
    total_writes += obj.writes;
  }
  CHECK(total_reads + total_writes == 4);
}

TEST_CASE("unknown object ids are rejected") {
  ObjectRegistry registry;
  CHECK_THROWS_AS(registry.record(42), RegistryError);
}
