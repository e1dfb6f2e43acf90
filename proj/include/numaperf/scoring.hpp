#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "numaperf/config.hpp"
#include "numaperf/object_registry.hpp"
#include "numaperf/sync_profiler.hpp"

namespace numaperf {

enum class IssueKind : std::uint8_t {
  RemoteAccess,
  FalseSharing,
  TrueSharing,
  ThreadMigration,
  ThreadImbalance,
};

enum class FixStrategy : std::uint8_t {
  BlockInterleave,
  PageInterleave,
  Padding,
  Duplicate,
  ThreadBinding,
  AdjustThreads,
};

enum class DominantIssue : std::uint8_t { None, RemoteAccess, FalseSharing, TrueSharing };

const char* issue_kind_name(IssueKind kind);        // machine form, e.g. "remote_access"
const char* issue_kind_label(IssueKind kind);       // report form, e.g. "remote access"
const char* fix_strategy_name(FixStrategy fix);     // machine form
const char* fix_strategy_label(FixStrategy fix);    // report form

// Counter slice shared by ObjectRecord and CallsiteAggregate.
struct SiteCounters {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t reads_after_last_write = 0;
  std::uint64_t remote_accesses = 0;
  std::uint64_t false_invalidations = 0;
  std::uint64_t true_invalidations = 0;
  std::uint64_t unclassified_invalidations = 0;

  std::uint64_t total_accesses() const { return reads + writes; }
  std::uint64_t total_invalidations() const {
    return false_invalidations + true_invalidations + unclassified_invalidations;
  }
};

SiteCounters counters_of(const ObjectRecord& obj);
SiteCounters counters_of(const CallsiteAggregate& agg);

struct Scores {
  double remote_score = 0.0;         // remote accesses per ms
  double false_sharing_score = 0.0;  // split invalidations per (ms * threads)
  double true_sharing_score = 0.0;
  std::uint64_t reads_after_last_write = 0;
  DominantIssue dominant = DominantIssue::None;
  // True when unclassified invalidations were split by the classified ratio
  // (or could not be split at all).
  bool estimated_split = false;

  double sharing_score() const { return false_sharing_score + true_sharing_score; }
};

// Sharing dominates when total invalidations exceed 50% of remote accesses;
// the unclassified remainder is scaled by the classified ratio, or counted as
// (estimated) true sharing when nothing was classified.
Scores compute_object_scores(const SiteCounters& counters, double duration_ms,
                             std::uint32_t thread_count);
Scores compute_object_scores(const ObjectRecord& obj, double duration_ms,
                             std::uint32_t thread_count);

struct FixEvidence {
  std::uint64_t total_accesses = 0;
  std::uint64_t detailed_pages = 0;
  // Detailed pages whose dominant thread span covers < 25% of all threads.
  std::uint64_t partitioned_pages = 0;
};

FixStrategy suggest_fix(const Scores& scores, const FixEvidence& evidence,
                        const Thresholds& thresholds);

class BudgetTooSmall : public std::runtime_error {
 public:
  explicit BudgetTooSmall(const std::string& what) : std::runtime_error(what) {}
};

// Thread counts proportional to per-type access totals: each type gets at
// least one thread and either the floor or the ceiling of its exact quota,
// with the leftover threads awarded in ascending RoutineId order. Among all
// valid roundings this picks the lexicographically largest, which keeps ties
// deterministic.
std::map<RoutineId, std::uint32_t> suggest_assignment(const std::vector<RoutineTotals>& totals,
                                                      std::uint32_t thread_budget);

}  // namespace numaperf
