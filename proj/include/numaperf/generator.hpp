#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "numaperf/trace.hpp"

namespace numaperf {

enum class Pattern : std::uint8_t {
  SingleThread,
  FalseSharing,
  TrueSharing,
  RemotePage,
  RemoteBlock,
  ReadMostly,
  MigrationHeavy,
  Imbalance,
  Mixed,
  Random,
};

const char* pattern_name(Pattern pattern);
std::optional<Pattern> pattern_from_name(std::string_view name);

struct GenParams {
  std::uint32_t workers = 4;        // non-main threads; the main thread always exists
  std::uint64_t events = 10000;     // pattern-specific primary count (accesses/writes)
  std::uint64_t span_ns = 1000000000;  // first event at 0, last exactly at span_ns
  std::uint64_t seed = 1;
  std::uint64_t pages = 16;         // footprint (remote patterns, random arena)
  std::uint32_t group_size = 1;     // remote-block: threads per partition group
  std::uint64_t waits_per_thread = 2;   // migration-heavy: barrier waits per thread (m_t)
  std::vector<std::uint64_t> per_type_totals = {922, 3, 34};  // imbalance
  std::uint32_t max_access_size = 16;  // random
  bool alloc_churn = true;             // random: free/realloc cycles
  bool sync_mix = true;                // random: lock/cond/barrier traffic
};

// Planted ground truth for a generated trace. Counter expectations are exact;
// classification splits assume the stated word-track threshold.
struct Manifest {
  std::string pattern;
  std::uint64_t seed = 0;
  std::uint64_t span_ns = 0;
  double duration_ms = 0.0;
  double duration_s = 0.0;
  std::uint32_t total_threads = 0;  // including main
  EventCounts counts;

  std::uint64_t remote_accesses = 0;
  std::uint64_t invalidations = 0;
  std::uint64_t classified_false = 0;
  std::uint64_t classified_true = 0;
  std::uint64_t unclassified = 0;
  std::uint64_t assumed_word_track_threshold = 16;

  std::map<ThreadId, std::uint64_t> migration_events;  // m_t
  double parallel_fraction = 0.0;
  double expected_migration_score = 0.0;

  std::map<RoutineId, std::uint64_t> per_type_totals;

  double expected_remote_score = 0.0;
  double expected_sharing_score = 0.0;  // combined invalidation score

  // (kind, fix) machine names expected in the reported tier under default
  // thresholds; empty when the pattern plants no reportable issue.
  std::vector<std::pair<std::string, std::string>> expected_issues;

  std::string to_json() const;
};

struct GenResult {
  std::vector<TraceEvent> events;  // emission order, non-decreasing timestamps
  std::map<CallsiteId, std::string> callsites;
  Manifest manifest;
};

// Deterministic for fixed (pattern, params): same inputs, byte-identical trace.
// Throws std::invalid_argument for unusable parameter combinations.
GenResult generate(Pattern pattern, const GenParams& params);

}  // namespace numaperf
