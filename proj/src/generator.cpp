#include "numaperf/generator.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "numaperf/config.hpp"

namespace numaperf {

namespace {

constexpr std::uint64_t kPage = 4096;
constexpr std::uint64_t kLine = 64;
constexpr std::uint64_t kHeapBase = 0x100000;
constexpr std::uint64_t kArenaBase = 0x40000000;
constexpr std::uint64_t kGlobalBase = 0x80000000;
constexpr std::uint64_t kWordTrackDefault = 16;

constexpr const char* kPatternNames[] = {
    "single-thread", "false-sharing", "true-sharing",    "remote-page", "remote-block",
    "read-mostly",   "migration-heavy", "imbalance",     "mixed",       "random",
};

// Events are emitted with a running index as timestamp and rescaled onto
// [0, span_ns] at the end, so the first event lands at 0 and the last exactly
// at span_ns.
struct Builder {
  std::vector<TraceEvent> events;
  EventCounts counts;
  std::map<CallsiteId, std::string> callsites;
  std::uint64_t next_index = 0;

  template <typename E>
  void push(E ev) {
    ev.ts = next_index++;
    counts.add(event_kind(TraceEvent{ev}));
    events.emplace_back(std::move(ev));
  }

  void push_global(GlobalDecl gb) {
    counts.add(EventKind::GlobalDecl);
    events.emplace_back(std::move(gb));
  }

  void callsite(CallsiteId id, std::string text) { callsites[id] = std::move(text); }

  void rescale(std::uint64_t span_ns) {
    if (next_index <= 1) {
      return;
    }
    const unsigned __int128 denom = next_index - 1;
    for (TraceEvent& ev : events) {
      std::visit(
          [&](auto& e) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(e)>, GlobalDecl>) {
              e.ts = static_cast<Timestamp>(static_cast<unsigned __int128>(e.ts) * span_ns /
                                            denom);
            }
          },
          ev);
    }
  }
};

double clamp_ms(std::uint64_t span_ns) {
  return std::max(static_cast<double>(span_ns) / 1e6, 1.0);
}
double clamp_s(std::uint64_t span_ns) {
  return std::max(static_cast<double>(span_ns) / 1e9, 1e-3);
}

void base_manifest(Manifest& m, Pattern pattern, const GenParams& p,
                   std::uint32_t total_threads) {
  m.pattern = pattern_name(pattern);
  m.seed = p.seed;
  m.span_ns = p.span_ns;
  m.duration_ms = clamp_ms(p.span_ns);
  m.duration_s = clamp_s(p.span_ns);
  m.total_threads = total_threads;
  m.assumed_word_track_threshold = kWordTrackDefault;
}

// Sharing split for n alternating writes on one line under the default
// word-track threshold: invalidations start with the second write, detail
// activates after write 16.
struct LineSplit {
  std::uint64_t invalidations;
  std::uint64_t classified_false;
  std::uint64_t classified_true;
  std::uint64_t unclassified;
};

LineSplit alternating_write_split(std::uint64_t n, bool same_word) {
  LineSplit s{};
  if (n < 2) {
    return s;
  }
  s.invalidations = n - 1;
  s.unclassified = std::min<std::uint64_t>(n - 1, kWordTrackDefault - 1);
  const std::uint64_t classified = s.invalidations - s.unclassified;
  if (!same_word) {
    s.classified_false = classified;
  } else if (classified > 0) {
    // The first tracked write still sees empty word sets.
    s.classified_false = 1;
    s.classified_true = classified - 1;
  }
  return s;
}

void finish_scores(Manifest& m) {
  m.expected_remote_score = static_cast<double>(m.remote_accesses) / m.duration_ms;
  m.expected_sharing_score = static_cast<double>(m.invalidations) /
                             (m.duration_ms * static_cast<double>(m.total_threads));
}

void expect_site_issue(Manifest& m, bool sharing_dominant, const char* sharing_kind,
                       const char* sharing_fix, const char* remote_fix) {
  const Thresholds defaults;
  if (sharing_dominant) {
    if (m.expected_sharing_score >= defaults.sharing_min) {
      m.expected_issues.emplace_back(sharing_kind, sharing_fix);
    }
  } else if (m.expected_remote_score >= defaults.remote_min) {
    m.expected_issues.emplace_back("remote_access", remote_fix);
  }
}

GenResult gen_single_thread(const GenParams& p) {
  Builder b;
  const std::uint64_t size = std::max<std::uint64_t>(p.pages, 1) * kPage;
  b.callsite(1, "gen/single_thread.c:11");
  b.push(Alloc{0, 0, kHeapBase, size, 1});
  for (std::uint64_t i = 0; i < p.events; ++i) {
    const std::uint64_t addr = kHeapBase + (i * 8) % (size - 8);
    b.push(MemAccess{0, 0, i % 4 == 0 ? AccessKind::Write : AccessKind::Read, addr, 8});
  }
  b.rescale(p.span_ns);

  GenResult out;
  base_manifest(out.manifest, Pattern::SingleThread, p, 1);
  out.manifest.counts = b.counts;
  finish_scores(out.manifest);
  out.events = std::move(b.events);
  out.callsites = std::move(b.callsites);
  return out;
}

GenResult gen_sharing(const GenParams& p, bool same_word) {
  if (p.workers < 2 || p.workers % 2 != 0) {
    throw std::invalid_argument("sharing patterns need an even worker count >= 2");
  }
  if (p.events < 2) {
    throw std::invalid_argument("sharing patterns need at least 2 writes per pair");
  }
  const std::uint32_t pairs = p.workers / 2;
  const std::uint64_t n = p.events;

  Builder b;
  b.callsite(1, same_word ? "gen/true_sharing.c:21" : "gen/false_sharing.c:21");
  b.push(Alloc{0, 0, kHeapBase, pairs * kPage, 1});
  for (std::uint32_t t = 1; t <= p.workers; ++t) {
    b.push(ThreadCreate{0, t, 0, 1});
  }
  // Pair q works on line 0 of page q; writers alternate between the pair's
  // two threads, on the same word (true sharing) or adjacent words (false).
  for (std::uint64_t j = 1; j <= n; ++j) {
    for (std::uint32_t q = 0; q < pairs; ++q) {
      const ThreadId writer = (j % 2 == 1) ? 2 * q + 1 : 2 * q + 2;
      const std::uint64_t word = same_word ? 0 : (j % 2 == 1 ? 0 : 1);
      b.push(MemAccess{0, writer, AccessKind::Write, kHeapBase + q * kPage + word * 8, 8});
    }
  }
  b.rescale(p.span_ns);

  GenResult out;
  base_manifest(out.manifest, same_word ? Pattern::TrueSharing : Pattern::FalseSharing, p,
                p.workers + 1);
  out.manifest.counts = b.counts;
  out.manifest.remote_accesses = static_cast<std::uint64_t>(pairs) * (n / 2);
  const LineSplit split = alternating_write_split(n, same_word);
  out.manifest.invalidations = pairs * split.invalidations;
  out.manifest.classified_false = pairs * split.classified_false;
  out.manifest.classified_true = pairs * split.classified_true;
  out.manifest.unclassified = pairs * split.unclassified;
  finish_scores(out.manifest);
  // The reported kind follows the classified ratio; all-unclassified
  // invalidations count as estimated true sharing.
  const std::uint64_t classified = split.classified_false + split.classified_true;
  const bool false_larger = classified > 0 && split.classified_false > split.classified_true;
  expect_site_issue(out.manifest, /*sharing_dominant=*/true,
                    false_larger ? "false_sharing" : "true_sharing",
                    false_larger ? "padding" : "page_interleave", "page_interleave");
  out.events = std::move(b.events);
  out.callsites = std::move(b.callsites);
  return out;
}

GenResult gen_remote_page(const GenParams& p) {
  if (p.workers < 2 || p.workers > 64) {
    throw std::invalid_argument("remote-page needs 2..64 workers");
  }
  const std::uint64_t pages = std::max<std::uint64_t>(p.pages, 1);
  const std::uint32_t hammers = p.workers - 1;

  Builder b;
  b.callsite(1, "gen/remote_page.c:33");
  b.push(Alloc{0, 0, kHeapBase, pages * kPage, 1});
  for (std::uint32_t t = 1; t <= p.workers; ++t) {
    b.push(ThreadCreate{0, t, 0, 1});
  }
  // Thread 1 first-touches line 0 of every page; the remaining workers hammer
  // disjoint higher lines, so every one of their accesses is remote and no
  // cache line is ever shared.
  for (std::uint64_t pg = 0; pg < pages; ++pg) {
    b.push(MemAccess{0, 1, AccessKind::Write, kHeapBase + pg * kPage, 8});
  }
  const std::uint64_t lines_per_hammer = std::max<std::uint64_t>(63 / hammers, 1);
  for (std::uint64_t i = 0; i < p.events; ++i) {
    const std::uint32_t h = static_cast<std::uint32_t>(i % hammers);
    const ThreadId tid = 2 + h;
    const std::uint64_t pg = (i / hammers) % pages;
    const std::uint64_t line = 1 + h * lines_per_hammer + (i / (hammers * pages)) % lines_per_hammer;
    b.push(MemAccess{0, tid, AccessKind::Write,
                     kHeapBase + pg * kPage + std::min<std::uint64_t>(line, 63) * kLine, 8});
  }
  b.rescale(p.span_ns);

  GenResult out;
  base_manifest(out.manifest, Pattern::RemotePage, p, p.workers + 1);
  out.manifest.counts = b.counts;
  out.manifest.remote_accesses = p.events;
  finish_scores(out.manifest);
  expect_site_issue(out.manifest, false, "", "", "page_interleave");
  out.events = std::move(b.events);
  out.callsites = std::move(b.callsites);
  return out;
}

GenResult gen_remote_block(const GenParams& p) {
  if (p.group_size == 0 || p.workers == 0 || p.workers % p.group_size != 0) {
    throw std::invalid_argument("remote-block needs workers divisible by group_size");
  }
  const std::uint32_t groups = p.workers / p.group_size;
  const std::uint64_t pages_per_group = std::max<std::uint64_t>(p.pages / groups, 1);
  const std::uint64_t pages = pages_per_group * groups;
  const std::uint64_t per_page = std::max<std::uint64_t>(p.events / pages, 1);
  if (p.group_size > 63) {
    throw std::invalid_argument("remote-block group_size above 63");
  }

  Builder b;
  b.callsite(1, "gen/remote_block.c:47");
  b.push(Alloc{0, 0, kHeapBase, pages * kPage, 1});
  for (std::uint32_t t = 1; t <= p.workers; ++t) {
    b.push(ThreadCreate{0, t, 0, 1});
  }
  // Main first-touches every page (the usual init-then-fork shape), then each
  // group hammers its own page run; group members keep to disjoint lines.
  for (std::uint64_t pg = 0; pg < pages; ++pg) {
    b.push(MemAccess{0, 0, AccessKind::Write, kHeapBase + pg * kPage, 8});
  }
  const std::uint64_t strides = std::max<std::uint64_t>(63 / p.group_size, 1);
  for (std::uint32_t g = 0; g < groups; ++g) {
    for (std::uint64_t pg = g * pages_per_group; pg < (g + 1) * pages_per_group; ++pg) {
      for (std::uint64_t k = 0; k < per_page; ++k) {
        const std::uint32_t member = static_cast<std::uint32_t>(k % p.group_size);
        const ThreadId tid = g * p.group_size + member + 1;
        const std::uint64_t line = 1 + member + p.group_size * ((k / p.group_size) % strides);
        b.push(MemAccess{0, tid, AccessKind::Write,
                         kHeapBase + pg * kPage + std::min<std::uint64_t>(line, 63) * kLine, 8});
      }
    }
  }
  b.rescale(p.span_ns);

  GenResult out;
  base_manifest(out.manifest, Pattern::RemoteBlock, p, p.workers + 1);
  out.manifest.counts = b.counts;
  out.manifest.remote_accesses = per_page * pages;
  finish_scores(out.manifest);
  expect_site_issue(out.manifest, false, "", "", "block_interleave");
  out.events = std::move(b.events);
  out.callsites = std::move(b.callsites);
  return out;
}

GenResult gen_read_mostly(const GenParams& p) {
  if (p.workers == 0) {
    throw std::invalid_argument("read-mostly needs >= 1 worker");
  }
  const std::uint64_t pages = std::max<std::uint64_t>(p.pages, 1);
  const std::uint64_t lines = pages * (kPage / kLine);
  if (p.span_ns < p.events + lines + p.workers + 2) {
    // Distinct timestamps keep every read strictly after the last write.
    throw std::invalid_argument("read-mostly span_ns too small for the event count");
  }

  Builder b;
  b.callsite(1, "gen/read_mostly.c:58");
  b.push(Alloc{0, 0, kHeapBase, pages * kPage, 1});
  for (std::uint32_t t = 1; t <= p.workers; ++t) {
    b.push(ThreadCreate{0, t, 0, 1});
  }
  // Main writes the whole object once (first touch + init), workers then only
  // read: every read is remote and follows the last write.
  for (std::uint64_t ln = 0; ln < lines; ++ln) {
    b.push(MemAccess{0, 0, AccessKind::Write, kHeapBase + ln * kLine, 8});
  }
  for (std::uint64_t i = 0; i < p.events; ++i) {
    const ThreadId tid = 1 + static_cast<ThreadId>(i % p.workers);
    const std::uint64_t ln = i % lines;
    b.push(MemAccess{0, tid, AccessKind::Read, kHeapBase + ln * kLine, 8});
  }
  b.rescale(p.span_ns);

  GenResult out;
  base_manifest(out.manifest, Pattern::ReadMostly, p, p.workers + 1);
  out.manifest.counts = b.counts;
  out.manifest.remote_accesses = p.events;
  finish_scores(out.manifest);
  const Thresholds defaults;
  const double ralw_fraction =
      static_cast<double>(p.events) / static_cast<double>(p.events + lines);
  if (out.manifest.expected_remote_score >= defaults.remote_min &&
      ralw_fraction >= defaults.duplicate_read_fraction) {
    out.manifest.expected_issues.emplace_back("remote_access", "duplicate");
  }
  out.events = std::move(b.events);
  out.callsites = std::move(b.callsites);
  return out;
}

GenResult gen_migration_heavy(const GenParams& p) {
  if (p.workers == 0) {
    throw std::invalid_argument("migration-heavy needs >= 1 worker");
  }
  Builder b;
  for (std::uint32_t t = 1; t <= p.workers; ++t) {
    b.push(ThreadCreate{0, t, 0, 1});
  }
  // Every thread (main included) hits m barriers; workers never exit, so the
  // whole span is parallel.
  for (std::uint64_t k = 0; k < p.waits_per_thread; ++k) {
    for (std::uint32_t t = 0; t <= p.workers; ++t) {
      b.push(BarrierWait{0, t, k % 3});
    }
  }
  b.rescale(p.span_ns);

  GenResult out;
  base_manifest(out.manifest, Pattern::MigrationHeavy, p, p.workers + 1);
  out.manifest.counts = b.counts;
  for (std::uint32_t t = 0; t <= p.workers; ++t) {
    out.manifest.migration_events[t] = p.waits_per_thread;
  }
  out.manifest.parallel_fraction = 1.0;
  out.manifest.expected_migration_score =
      static_cast<double>(p.waits_per_thread) / out.manifest.duration_s;
  finish_scores(out.manifest);
  const Thresholds defaults;
  if (out.manifest.expected_migration_score >= defaults.migration_min) {
    out.manifest.expected_issues.emplace_back("thread_migration", "thread_binding");
  }
  out.events = std::move(b.events);
  out.callsites = std::move(b.callsites);
  return out;
}

GenResult gen_imbalance(const GenParams& p) {
  if (p.per_type_totals.size() < 2) {
    throw std::invalid_argument("imbalance needs >= 2 per-type totals");
  }
  const auto k = static_cast<std::uint32_t>(p.per_type_totals.size());
  const std::uint64_t obj_pages = 4;
  const std::uint64_t obj_size = obj_pages * kPage;

  Builder b;
  for (std::uint32_t r = 1; r <= k; ++r) {
    b.callsite(r, "gen/imbalance.c:" + std::to_string(100 + r));
    b.push(Alloc{0, 0, kHeapBase + (r - 1) * obj_size, obj_size, r});
    b.push(ThreadCreate{0, r, 0, r});
  }
  for (std::uint32_t r = 1; r <= k; ++r) {
    const std::uint64_t base = kHeapBase + (r - 1) * obj_size;
    for (std::uint64_t i = 0; i < p.per_type_totals[r - 1]; ++i) {
      b.push(MemAccess{0, r, AccessKind::Read, base + (i * 8) % (obj_size - 8), 8});
    }
  }
  b.rescale(p.span_ns);

  GenResult out;
  base_manifest(out.manifest, Pattern::Imbalance, p, k + 1);
  out.manifest.counts = b.counts;
  for (std::uint32_t r = 1; r <= k; ++r) {
    out.manifest.per_type_totals[r] = p.per_type_totals[r - 1];
  }
  finish_scores(out.manifest);
  const auto [min_it, max_it] =
      std::minmax_element(p.per_type_totals.begin(), p.per_type_totals.end());
  const Thresholds defaults;
  if (*min_it > 0 &&
      static_cast<double>(*max_it) / static_cast<double>(*min_it) >=
          defaults.imbalance_ratio) {
    out.manifest.expected_issues.emplace_back("thread_imbalance", "adjust_threads");
  }
  out.events = std::move(b.events);
  out.callsites = std::move(b.callsites);
  return out;
}

GenResult gen_mixed(const GenParams& p) {
  // Remote-block partition on one object plus one false-sharing pair on
  // another; exact counts stay additive because the regions and threads are
  // disjoint.
  const std::uint32_t rb_workers = 8;
  const std::uint64_t rb_pages = 8;
  const std::uint64_t rb_per_page = std::max<std::uint64_t>(p.events / (2 * rb_pages), 64);
  const std::uint64_t fs_writes = std::max<std::uint64_t>(p.events / 4, 32);

  Builder b;
  b.callsite(1, "gen/mixed.c:61");
  b.callsite(2, "gen/mixed.c:79");
  const std::uint64_t rb_base = kHeapBase;
  const std::uint64_t fs_base = kHeapBase + (rb_pages + 4) * kPage;
  b.push(Alloc{0, 0, rb_base, rb_pages * kPage, 1});
  b.push(Alloc{0, 0, fs_base, kPage, 2});
  for (std::uint32_t t = 1; t <= rb_workers + 2; ++t) {
    b.push(ThreadCreate{0, t, 0, 1});
  }
  for (std::uint64_t pg = 0; pg < rb_pages; ++pg) {
    b.push(MemAccess{0, 0, AccessKind::Write, rb_base + pg * kPage, 8});
  }
  for (std::uint32_t g = 0; g < rb_workers; ++g) {
    for (std::uint64_t k = 0; k < rb_per_page; ++k) {
      b.push(MemAccess{0, g + 1, AccessKind::Write,
                       rb_base + g * kPage + (1 + k % 63) * kLine, 8});
    }
  }
  const ThreadId fs_a = rb_workers + 1;
  const ThreadId fs_b = rb_workers + 2;
  for (std::uint64_t j = 1; j <= fs_writes; ++j) {
    const ThreadId writer = (j % 2 == 1) ? fs_a : fs_b;
    b.push(MemAccess{0, writer, AccessKind::Write, fs_base + (j % 2 == 1 ? 0 : 8), 8});
  }
  b.rescale(p.span_ns);

  GenResult out;
  base_manifest(out.manifest, Pattern::Mixed, p, rb_workers + 3);
  out.manifest.counts = b.counts;
  out.manifest.remote_accesses = rb_pages * rb_per_page + fs_writes / 2;
  const LineSplit split = alternating_write_split(fs_writes, false);
  out.manifest.invalidations = split.invalidations;
  out.manifest.classified_false = split.classified_false;
  out.manifest.classified_true = split.classified_true;
  out.manifest.unclassified = split.unclassified;
  finish_scores(out.manifest);
  const Thresholds defaults;
  const double rb_score =
      static_cast<double>(rb_pages * rb_per_page) / out.manifest.duration_ms;
  if (rb_score >= defaults.remote_min) {
    out.manifest.expected_issues.emplace_back("remote_access", "block_interleave");
  }
  const double fs_score =
      static_cast<double>(split.invalidations) /
      (out.manifest.duration_ms * static_cast<double>(out.manifest.total_threads));
  if (fs_score >= defaults.sharing_min) {
    out.manifest.expected_issues.emplace_back("false_sharing", "padding");
  }
  out.events = std::move(b.events);
  out.callsites = std::move(b.callsites);
  return out;
}

// Valid-by-construction random workload. Uses raw engine output (not
// std::distributions) so the same seed gives the same bytes on any stdlib.
class RandomWorkload {
 public:
  RandomWorkload(const GenParams& p) : p_(p), rng_(p.seed) {}

  GenResult run() {
    const std::uint64_t slots = std::max<std::uint64_t>(p_.pages, 1) * (kPage / kSlot);
    slot_live_.assign(slots, false);
    b_.events.reserve(p_.events + p_.workers + 16);

    b_.push_global(GlobalDecl{kGlobalBase, kPage, "gen_table"});
    b_.push_global(GlobalDecl{kGlobalBase + kPage, kPage, "gen_flags"});
    objects_.push_back({kGlobalBase, kPage, 0, false});
    objects_.push_back({kGlobalBase + kPage, kPage, 0, false});

    for (std::uint32_t t = 1; t <= p_.workers; ++t) {
      b_.push(ThreadCreate{0, t, 0, 1 + t % 2});
    }
    for (int i = 0; i < 8; ++i) {
      try_alloc();
    }
    for (std::uint64_t i = 0; i < p_.events; ++i) {
      step();
    }
    b_.rescale(p_.span_ns);

    GenResult out;
    base_manifest(out.manifest, Pattern::Random, p_, p_.workers + 1);
    out.manifest.counts = b_.counts;
    finish_scores(out.manifest);
    out.events = std::move(b_.events);
    out.callsites = std::move(b_.callsites);
    return out;
  }

 private:
  static constexpr std::uint64_t kSlot = 256;

  struct LiveObject {
    std::uint64_t addr;
    std::uint64_t size;
    std::uint64_t slot;  // slot index for heap objects
    bool heap;
  };

  const GenParams& p_;
  std::mt19937_64 rng_;
  Builder b_;
  std::vector<bool> slot_live_;
  std::vector<LiveObject> objects_;
  std::map<std::uint64_t, ThreadId> lock_holder_;
  std::map<ThreadId, std::optional<std::uint64_t>> pending_;
  std::map<ThreadId, std::optional<std::uint64_t>> holding_;
  CallsiteId next_callsite_ = 1;

  std::uint64_t roll(std::uint64_t n) { return rng_() % n; }
  ThreadId any_thread() { return static_cast<ThreadId>(roll(p_.workers + 1)); }

  void step() {
    const std::uint64_t r = roll(100);
    if (r < 70) {
      access();
    } else if (r < 75) {
      if (!p_.alloc_churn || !try_alloc()) access();
    } else if (r < 80) {
      if (!p_.alloc_churn || !try_free()) access();
    } else if (r < 92 && p_.sync_mix) {
      lock_step();
    } else if (r < 96 && p_.sync_mix) {
      b_.push(CondWait{0, any_thread(), roll(2)});
    } else if (p_.sync_mix) {
      b_.push(BarrierWait{0, any_thread(), roll(2)});
    } else {
      access();
    }
  }

  void access() {
    const ThreadId tid = any_thread();
    const AccessKind kind = roll(2) == 0 ? AccessKind::Read : AccessKind::Write;
    if (objects_.empty() || roll(100) < 8) {
      // Untracked address: lands in the unattributed bucket.
      const std::uint64_t wild = kArenaBase / 2 + roll(p_.pages * kPage);
      b_.push(MemAccess{0, tid, kind, wild, 1 + static_cast<std::uint32_t>(roll(8))});
      return;
    }
    const LiveObject& obj = objects_[roll(objects_.size())];
    const auto max_size =
        static_cast<std::uint32_t>(std::min<std::uint64_t>(p_.max_access_size, obj.size));
    const std::uint32_t size = 1 + static_cast<std::uint32_t>(roll(max_size));
    const std::uint64_t offset = roll(obj.size - size + 1);
    b_.push(MemAccess{0, tid, kind, obj.addr + offset, size});
  }

  bool try_alloc() {
    const std::uint64_t len = 1 + roll(8);  // slots
    const std::uint64_t start = roll(slot_live_.size());
    if (start + len > slot_live_.size()) {
      return false;
    }
    for (std::uint64_t s = start; s < start + len; ++s) {
      if (slot_live_[s]) {
        return false;
      }
    }
    for (std::uint64_t s = start; s < start + len; ++s) {
      slot_live_[s] = true;
    }
    const std::uint64_t addr = kArenaBase + start * kSlot;
    const CallsiteId cs = 1 + (next_callsite_++ % 5);
    b_.callsites.try_emplace(cs, "gen/random.c:" + std::to_string(200 + cs));
    b_.push(Alloc{0, any_thread(), addr, len * kSlot, cs});
    objects_.push_back({addr, len * kSlot, start, true});
    return true;
  }

  bool try_free() {
    std::vector<std::size_t> heap_idx;
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      if (objects_[i].heap) {
        heap_idx.push_back(i);
      }
    }
    if (heap_idx.empty()) {
      return false;
    }
    const std::size_t pick = heap_idx[roll(heap_idx.size())];
    const LiveObject obj = objects_[pick];
    for (std::uint64_t s = obj.slot; s < obj.slot + obj.size / kSlot; ++s) {
      slot_live_[s] = false;
    }
    b_.push(Free{0, any_thread(), obj.addr});
    objects_.erase(objects_.begin() + static_cast<std::ptrdiff_t>(pick));
    return true;
  }

  void lock_step() {
    const std::uint64_t lock = roll(3);
    const ThreadId tid = any_thread();
    auto& held = holding_[tid];
    auto& pend = pending_[tid];
    if (held && roll(2) == 0) {
      b_.push(LockRelease{0, tid, *held});
      lock_holder_.erase(*held);
      held.reset();
      return;
    }
    if (pend) {
      // Grant once the requested lock is free.
      if (lock_holder_.find(*pend) == lock_holder_.end()) {
        b_.push(LockGrant{0, tid, *pend});
        lock_holder_[*pend] = tid;
        held = *pend;
        pend.reset();
      } else {
        b_.push(CondWait{0, tid, 0});
      }
      return;
    }
    if (!held) {
      b_.push(LockRequest{0, tid, lock});
      pend = lock;
      return;
    }
    b_.push(BarrierWait{0, tid, 1});
  }
};

}  // namespace

const char* pattern_name(Pattern pattern) {
  return kPatternNames[static_cast<std::size_t>(pattern)];
}

std::optional<Pattern> pattern_from_name(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kPatternNames); ++i) {
    if (name == kPatternNames[i]) {
      return static_cast<Pattern>(i);
    }
  }
  return std::nullopt;
}

GenResult generate(Pattern pattern, const GenParams& params) {
  switch (pattern) {
    case Pattern::SingleThread:
      return gen_single_thread(params);
    case Pattern::FalseSharing:
      return gen_sharing(params, false);
    case Pattern::TrueSharing:
      return gen_sharing(params, true);
    case Pattern::RemotePage:
      return gen_remote_page(params);
    case Pattern::RemoteBlock:
      return gen_remote_block(params);
    case Pattern::ReadMostly:
      return gen_read_mostly(params);
    case Pattern::MigrationHeavy:
      return gen_migration_heavy(params);
    case Pattern::Imbalance:
      return gen_imbalance(params);
    case Pattern::Mixed:
      return gen_mixed(params);
    case Pattern::Random:
      return RandomWorkload(params).run();
  }
  throw std::invalid_argument("unknown pattern");
}

std::string Manifest::to_json() const {
  using json = nlohmann::ordered_json;
  json root;
  root["pattern"] = pattern;
  root["seed"] = seed;
  root["span_ns"] = span_ns;
  root["duration_ms"] = duration_ms;
  root["duration_s"] = duration_s;
  root["total_threads"] = total_threads;
  json counts_json;
  for (std::size_t k = 0; k < kEventKindCount; ++k) {
    counts_json[event_code(static_cast<EventKind>(k))] = counts.by_kind[k];
  }
  root["counts"] = counts_json;
  json expected;
  expected["remote_accesses"] = remote_accesses;
  expected["invalidations"] = invalidations;
  expected["classified_false"] = classified_false;
  expected["classified_true"] = classified_true;
  expected["unclassified"] = unclassified;
  expected["assumed_word_track_threshold"] = assumed_word_track_threshold;
  expected["parallel_fraction"] = parallel_fraction;
  expected["migration_score"] = expected_migration_score;
  expected["remote_score"] = expected_remote_score;
  expected["sharing_score"] = expected_sharing_score;
  json m_t = json::object();
  for (const auto& [tid, m] : migration_events) {
    m_t[std::to_string(tid)] = m;
  }
  expected["migration_events"] = m_t;
  json types = json::object();
  for (const auto& [rid, total] : per_type_totals) {
    types[std::to_string(rid)] = total;
  }
  expected["per_type_totals"] = types;
  json issues = json::array();
  for (const auto& [kind, fix] : expected_issues) {
    issues.push_back(json{{"kind", kind}, {"fix", fix}});
  }
  expected["issues"] = issues;
  root["expected"] = expected;
  return root.dump(2) + "\n";
}

}  // namespace numaperf
