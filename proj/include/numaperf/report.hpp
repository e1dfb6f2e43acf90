#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "numaperf/cache_profiler.hpp"
#include "numaperf/config.hpp"
#include "numaperf/object_registry.hpp"
#include "numaperf/page_profiler.hpp"
#include "numaperf/scoring.hpp"
#include "numaperf/sync_profiler.hpp"

namespace numaperf {

enum class IssueTier : std::uint8_t { Reported, Informational };

struct TypeShare {
  RoutineId rid = 0;
  std::uint32_t thread_count = 0;
  std::uint64_t total_accesses = 0;
  double per_thread_mean = 0.0;
};

struct Issue {
  IssueTier tier = IssueTier::Reported;
  IssueKind kind = IssueKind::RemoteAccess;
  double score = 0.0;
  std::string site;  // empty for whole-program issues
  FixStrategy fix = FixStrategy::PageInterleave;
  bool suppressed_by_dominance = false;

  // Site evidence
  double remote_score = 0.0;
  double false_sharing_score = 0.0;
  double true_sharing_score = 0.0;
  bool estimated_split = false;
  std::uint64_t reads_after_last_write = 0;
  std::uint64_t total_accesses = 0;
  std::uint64_t object_count = 0;
  std::vector<std::string> page_spans;  // "lo--hi" per detailed page, capped

  // Migration evidence
  double parallel_fraction = 0.0;
  std::uint64_t migration_events = 0;
  double running_seconds = 0.0;
  std::uint32_t thread_count = 0;

  // Imbalance evidence
  double imbalance_ratio = 0.0;
  std::vector<TypeShare> per_type;
  std::map<RoutineId, std::uint32_t> suggested_assignment;
};

struct UnattributedCounts {
  std::uint64_t events = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
};

struct ReplayDiagnostics {
  std::uint64_t dead_object_accesses = 0;
  std::uint64_t straddling_accesses = 0;
  std::uint64_t lock_release_corrections = 0;
};

struct IssueReport {
  AnalyzerConfig config;
  DurationStats duration;
  std::uint32_t thread_count = 0;
  double parallel_fraction = 0.0;
  std::uint64_t event_total = 0;
  std::uint64_t mem_access_events = 0;
  std::vector<Issue> issues;  // reported tier first, then informational
  UnattributedCounts unattributed;
  ReplayDiagnostics diagnostics;

  std::vector<const Issue*> tier(IssueTier tier) const;
};

struct ReportInputs {
  const AnalyzerConfig* config = nullptr;
  DurationStats duration;
  const ObjectRegistry* registry = nullptr;
  const PageProfiler* pages = nullptr;
  const CacheProfiler* cache = nullptr;
  const SyncProfiler* sync = nullptr;
  const std::map<CallsiteId, std::string>* callsites = nullptr;
  UnattributedCounts unattributed;
  ReplayDiagnostics diagnostics;
  std::uint64_t event_total = 0;
  std::uint64_t mem_access_events = 0;
};

// Applies thresholds and the dominance rule. Only the dominant side of a
// remote/sharing pair may reach the reported tier; the other side is demoted
// to informational. Issues within 10x below a threshold land in the
// informational tier as well.
IssueReport build_report(const ReportInputs& in);

void write_text_report(std::ostream& out, const IssueReport& report);
void write_json_report(std::ostream& out, const IssueReport& report);
std::string json_report_string(const IssueReport& report);

}  // namespace numaperf
