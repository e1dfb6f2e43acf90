#include "doctest.h"

#include <random>

#include "numaperf/cache_profiler.hpp"
#include "oracles.hpp"

using namespace numaperf;

namespace {

AnalyzerConfig cache_config(std::uint64_t track_threshold) {
  AnalyzerConfig config;
  config.word_track_threshold = track_threshold;
  return config;
}

}  // namespace

TEST_CASE("a write invalidates the other holders, not the writer") {
  CacheProfiler cache(cache_config(0));
  cache.record_access(1, 1, 0x1000, 8, AccessKind::Read);
  cache.record_access(2, 2, 0x1008, 8, AccessKind::Read);
  InvalidationDelta delta = cache.record_access(3, 1, 0x1000, 8, AccessKind::Write);
  CHECK(delta.count == 1);  // only thread 2; the writer's copy is upgraded
  CHECK(cache.line(64)->invalidations == 1);
}

TEST_CASE("a sole owner writing repeatedly causes no invalidations") {
  CacheProfiler cache(cache_config(0));
  cache.record_access(1, 1, 0x1000, 8, AccessKind::Write);
  InvalidationDelta delta = cache.record_access(2, 1, 0x1000, 8, AccessKind::Write);
  CHECK(delta.count == 0);
  CHECK(cache.line(64)->invalidations == 0);
}

TEST_CASE("word detail separates false from true sharing") {
  SUBCASE("reader on a different word: false sharing") {
    CacheProfiler cache(cache_config(0));
    cache.record_access(1, 2, 0x1028, 8, AccessKind::Read);  // word 5
    for (int i = 0; i < 5; ++i) {
      InvalidationDelta d = cache.record_access(2 + i, 1, 0x1000, 8, AccessKind::Write);
      if (i == 0) {
        CHECK(d.false_part == 1);
        CHECK(d.true_part == 0);
      } else {
        CHECK(d.count == 0);  // t2 no longer holds a copy
      }
    }
    CHECK(cache.line(64)->classified_false == 1);
    CHECK(cache.line(64)->classified_true == 0);
  }
  SUBCASE("reader on the written word: true sharing") {
    CacheProfiler cache(cache_config(0));
    cache.record_access(1, 2, 0x1000, 8, AccessKind::Read);  // word 0
    InvalidationDelta d = cache.record_access(2, 1, 0x1000, 8, AccessKind::Write);
    CHECK(d.true_part == 1);
    CHECK(d.false_part == 0);
  }
  SUBCASE("alternating writers to one word are true sharing") {
    CacheProfiler cache(cache_config(0));
    cache.record_access(1, 1, 0x1000, 8, AccessKind::Write);
    InvalidationDelta d = cache.record_access(2, 2, 0x1000, 8, AccessKind::Write);
    // The writer's own words count as accessed for later rounds.
    CHECK(d.true_part == 1);
    d = cache.record_access(3, 1, 0x1000, 8, AccessKind::Write);
    CHECK(d.true_part == 1);
  }
}

TEST_CASE("pre-detail invalidations stay unclassified") {
  CacheProfiler cache(cache_config(2));
  cache.record_access(1, 2, 0x1000, 8, AccessKind::Read);
  InvalidationDelta d = cache.record_access(2, 1, 0x1000, 8, AccessKind::Write);  // write 1
  CHECK(d.unclassified_part == 1);
  cache.record_access(3, 2, 0x1000, 8, AccessKind::Read);
  d = cache.record_access(4, 1, 0x1000, 8, AccessKind::Write);  // write 2, still pre-detail
  CHECK(d.unclassified_part == 1);
  cache.record_access(5, 2, 0x1000, 8, AccessKind::Read);
  d = cache.record_access(6, 1, 0x1000, 8, AccessKind::Write);  // detail active now
  CHECK(d.unclassified_part == 0);
  CHECK(d.true_part == 1);
  const CacheLineRecord* line = cache.line(64);
  CHECK(line->classified_false + line->classified_true <= line->invalidations);
}

TEST_CASE("single-thread traces never invalidate") {
  CacheProfiler cache(cache_config(4));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    cache.record_access(i, 7, 0x4000 + rng() % 1024, 1 + rng() % 16,
                        rng() % 2 ? AccessKind::Read : AccessKind::Write);
  }
  CHECK(cache.totals().invalidations == 0);
}

TEST_CASE("repeated reads by a copy-set member change nothing") {
  CacheProfiler cache(cache_config(0));
  cache.record_access(1, 1, 0x1000, 8, AccessKind::Read);
  cache.record_access(2, 2, 0x1000, 8, AccessKind::Read);
  cache.record_access(3, 2, 0x1000, 8, AccessKind::Read);  // duplicate read
  cache.record_access(4, 2, 0x1000, 8, AccessKind::Read);
  InvalidationDelta d = cache.record_access(5, 3, 0x1000, 8, AccessKind::Write);
  CHECK(d.count == 2);  // threads 1 and 2 exactly once each
}

TEST_CASE("threshold zero classifies every invalidation") {
  CacheProfiler cache(cache_config(0));
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5000; ++i) {
    cache.record_access(i, rng() % 3, 0x8000 + (rng() % 4) * 64 + rng() % 56,
                        1 + rng() % 8, rng() % 2 ? AccessKind::Read : AccessKind::Write);
  }
  auto totals = cache.totals();
  CHECK(totals.unclassified == 0);
  CHECK(totals.classified_false + totals.classified_true == totals.invalidations);
}

TEST_CASE("random traces match the naive state-machine oracle exactly") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const bool single_line = seed % 2 == 0;
    const std::uint64_t threshold = seed % 3 == 0 ? 0 : 8;
    CacheProfiler cache(cache_config(threshold));
    oracle::InvalidationOracle naive(64, 8, threshold);
    std::mt19937_64 rng(seed);
    const std::uint64_t range = single_line ? 64 : 16 * 64;
    for (int i = 0; i < 4000; ++i) {
      const ThreadId tid = rng() % 4;
      const std::uint32_t size = 1 + rng() % 16;
      const std::uint64_t addr = 0x9000 + rng() % (range - size);
      const AccessKind kind = rng() % 2 ? AccessKind::Read : AccessKind::Write;
      cache.record_access(i, tid, addr, size, kind);
      naive.record(tid, addr, size, kind);
    }
    auto got = cache.totals();
    auto want = naive.totals();
    CAPTURE(seed);
    CHECK(got.invalidations == want.invalidations);
    CHECK(got.classified_false == want.classified_false);
    CHECK(got.classified_true == want.classified_true);
    CHECK(got.unclassified == want.unclassified);
  }
}

TEST_CASE("classified totals never decrease as the threshold drops") {
  auto run = [](std::uint64_t threshold) {
    CacheProfiler cache(cache_config(threshold));
    std::mt19937_64 rng(99);
    for (int i = 0; i < 3000; ++i) {
      cache.record_access(i, rng() % 3, 0xa000 + (rng() % 8) * 64 + (rng() % 8) * 8, 8,
                          rng() % 2 ? AccessKind::Read : AccessKind::Write);
    }
    auto t = cache.totals();
    return std::pair<std::uint64_t, std::uint64_t>{t.classified_false + t.classified_true,
                                                   t.invalidations};
  };
  auto [classified0, inv0] = run(0);
  auto [classified8, inv8] = run(8);
  auto [classified32, inv32] = run(32);
  CHECK(inv0 == inv8);  // invalidation counting is threshold-independent
  CHECK(inv8 == inv32);
  CHECK(classified0 >= classified8);
  CHECK(classified8 >= classified32);
}

TEST_CASE("object sharing counts attribute lines by their first byte") {
  CacheProfiler cache(cache_config(0));
  // Lines 64..67 (addresses 0x1000..0x10ff); invalidations only on line 66.
  cache.record_access(1, 1, 0x1080, 8, AccessKind::Read);
  cache.record_access(2, 2, 0x1080, 8, AccessKind::Write);

  auto counts = cache.object_sharing_counts(0x1000, 256);
  CHECK(counts.invalidations == 1);
  auto outside = cache.object_sharing_counts(0x2000, 256);
  CHECK(outside.invalidations == 0);

  SUBCASE("no writes anywhere yields all-zero") {
    CacheProfiler quiet(cache_config(0));
    quiet.record_access(1, 1, 0x1000, 8, AccessKind::Read);
    quiet.record_access(2, 2, 0x1000, 8, AccessKind::Read);
    auto zero = quiet.object_sharing_counts(0x1000, 4096);
    CHECK(zero.invalidations == 0);
    CHECK(zero.classified_false == 0);
    CHECK(zero.classified_true == 0);
  }
  SUBCASE("straddling line goes to the object owning its first byte") {
    // Object B starts mid-line at 0x10a0; line 66 (0x1080) belongs to A.
    auto a = cache.object_sharing_counts(0x1000, 0xa0);
    auto b = cache.object_sharing_counts(0x10a0, 0x100);
    CHECK(a.invalidations == 1);
    CHECK(b.invalidations == 0);
  }
}

TEST_CASE("per-object sharing totals match a line-level oracle on a random trace") {
  CacheProfiler cache(cache_config(0));
  oracle::InvalidationOracle naive(64, 8, 0);
  std::mt19937_64 rng(31);
  struct Obj {
    std::uint64_t addr;
    std::uint64_t size;
  };
  // Unaligned sizes so some lines straddle objects.
  std::vector<Obj> objects = {{0x1000, 200}, {0x10c8, 312}, {0x1200, 512}, {0x1400, 96}};
  for (int i = 0; i < 8000; ++i) {
    const Obj& obj = objects[rng() % objects.size()];
    const std::uint32_t size = 1 + rng() % 8;
    const std::uint64_t addr = obj.addr + rng() % (obj.size - size);
    const ThreadId tid = rng() % 3;
    const AccessKind kind = rng() % 2 ? AccessKind::Read : AccessKind::Write;
    cache.record_access(i, tid, addr, size, kind);
    naive.record(tid, addr, size, kind);
  }
  for (const Obj& obj : objects) {
    std::uint64_t want = 0;
    for (const auto& [line, counts] : naive.lines()) {
      const std::uint64_t first_byte = line * 64;
      if (first_byte >= obj.addr && first_byte < obj.addr + obj.size) {
        want += counts.invalidations;
      }
    }
    CHECK(cache.object_sharing_counts(obj.addr, obj.size).invalidations == want);
  }
}
