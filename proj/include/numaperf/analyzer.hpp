#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "numaperf/cache_profiler.hpp"
#include "numaperf/config.hpp"
#include "numaperf/object_registry.hpp"
#include "numaperf/page_profiler.hpp"
#include "numaperf/report.hpp"
#include "numaperf/sync_profiler.hpp"
#include "numaperf/trace.hpp"

namespace numaperf {

// Replays a trace through every profiler in total order. Events must arrive
// non-decreasing in timestamp (GlobalDecl lines excepted); out-of-order input
// has to be sorted by the caller first. Single-threaded by design: remote
// classification depends on first-touch order.
class Analyzer {
 public:
  explicit Analyzer(AnalyzerConfig config);

  void feed(const TraceEvent& ev);
  void finish();

  IssueReport report() const;  // valid after finish()

  const AnalyzerConfig& config() const { return config_; }
  const ObjectRegistry& registry() const { return registry_; }
  const PageProfiler& pages() const { return pages_; }
  const CacheProfiler& cache() const { return cache_; }
  const SyncProfiler& sync() const { return sync_; }
  const std::map<CallsiteId, std::string>& callsites() const { return callsites_; }
  void set_callsites(const std::map<CallsiteId, std::string>& table) { callsites_ = table; }
  DurationStats duration() const;
  const UnattributedCounts& unattributed() const { return unattributed_; }
  const ReplayDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  AnalyzerConfig config_;
  ObjectRegistry registry_;
  PageProfiler pages_;
  CacheProfiler cache_;
  SyncProfiler sync_;
  TraceValidator validator_;
  std::map<CallsiteId, std::string> callsites_;
  UnattributedCounts unattributed_;
  ReplayDiagnostics diagnostics_;
  EventCounts counts_;
  std::optional<Timestamp> min_ts_;
  std::optional<Timestamp> max_ts_;
  std::optional<Timestamp> last_ts_;
  std::uint64_t position_ = 0;
  bool finished_ = false;

  void on_mem_access(const MemAccess& ma);
};

// Replays an already-parsed trace.
IssueReport analyze_trace(const ValidatedTrace& trace, const AnalyzerConfig& config);

// Streams events straight from a trace file in one forward pass; throws
// TraceError{UnsortedInput} when timestamps regress (use sort_input for
// small out-of-order traces, at the cost of holding them in memory).
IssueReport analyze_stream(std::istream& in, const AnalyzerConfig& config,
                           bool sort_input = false);
IssueReport analyze_file(const std::string& path, const AnalyzerConfig& config,
                         bool sort_input = false);

}  // namespace numaperf
