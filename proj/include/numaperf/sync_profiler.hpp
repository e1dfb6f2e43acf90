#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "numaperf/trace.hpp"

namespace numaperf {

struct ThreadStats {
  ThreadId tid = 0;
  RoutineId rid = 0;
  std::optional<Timestamp> birth_ts;
  std::optional<Timestamp> exit_ts;
  std::uint64_t access_count = 0;  // MemAccess events attributed to an object
  std::uint64_t lock_contentions = 0;
  std::uint64_t cond_waits = 0;
  std::uint64_t barrier_waits = 0;

  // m_t: possible migration triggers for this thread.
  std::uint64_t migration_events() const {
    return lock_contentions + cond_waits + barrier_waits;
  }
};

struct PhaseStats {
  std::uint64_t parallel_ns = 0;  // time with >= 2 live threads
  std::uint64_t total_ns = 0;
  double p = 0.0;  // parallel phase percentage
};

struct RoutineTotals {
  RoutineId rid = 0;
  std::uint32_t thread_count = 0;
  std::uint64_t total_accesses = 0;
  double per_thread_mean = 0.0;
};

// Thread lifecycles, per-thread access totals, lock-contention inference, and
// condition/barrier waits. A lock request is contended iff the lock is held
// by a different thread at its position in the total order.
class SyncProfiler {
 public:
  void on_thread_create(Timestamp ts, ThreadId tid, ThreadId parent_tid, RoutineId rid);
  void on_thread_exit(Timestamp ts, ThreadId tid);
  void record_sync_event(const TraceEvent& ev);
  void count_access(ThreadId tid) { stats(tid).access_count += 1; }

  // Fills the main thread's lifetime, defaults missing exits to end-of-trace,
  // and sweeps lifecycles for the parallel-phase percentage.
  void finalize(Timestamp min_ts, Timestamp max_ts);

  const std::map<ThreadId, ThreadStats>& threads() const { return threads_; }
  const PhaseStats& phase() const { return phase_; }
  std::uint32_t thread_count() const { return static_cast<std::uint32_t>(threads_.size()); }
  std::uint64_t lock_release_corrections() const { return lock_release_corrections_; }

 private:
  std::map<ThreadId, ThreadStats> threads_;
  std::map<std::uint64_t, ThreadId> lock_holder_;
  PhaseStats phase_;
  std::uint64_t lock_release_corrections_ = 0;

  ThreadStats& stats(ThreadId tid);
};

// S = p * sum(m_t) / (rt * |T|). |T| is every profiled thread, main included.
double migration_score(const std::map<ThreadId, ThreadStats>& threads,
                       const PhaseStats& phase, double duration_s);

// Per-routine access totals; the main thread's routine (rid 0) is included
// here and excluded from imbalance judgment by the caller.
std::vector<RoutineTotals> routine_access_totals(const std::map<ThreadId, ThreadStats>& threads);

}  // namespace numaperf
