#include "numaperf/sync_profiler.hpp"

#include <algorithm>

namespace numaperf {

ThreadStats& SyncProfiler::stats(ThreadId tid) {
  auto [it, inserted] = threads_.try_emplace(tid);
  if (inserted) {
    it->second.tid = tid;
    it->second.rid = 0;
  }
  return it->second;
}

void SyncProfiler::on_thread_create(Timestamp ts, ThreadId tid, ThreadId parent_tid,
                                    RoutineId rid) {
  ThreadStats& t = stats(tid);
  t.rid = rid;
  t.birth_ts = ts;
  stats(parent_tid);  // make sure the parent (usually main) is represented
}

void SyncProfiler::on_thread_exit(Timestamp ts, ThreadId tid) {
  stats(tid).exit_ts = ts;
}

void SyncProfiler::record_sync_event(const TraceEvent& ev) {
  if (const auto* la = std::get_if<LockRequest>(&ev)) {
    auto holder = lock_holder_.find(la->lock_id);
    if (holder != lock_holder_.end() && holder->second != la->tid) {
      stats(la->tid).lock_contentions += 1;
    } else {
      stats(la->tid);
    }
  } else if (const auto* lg = std::get_if<LockGrant>(&ev)) {
    lock_holder_[lg->lock_id] = lg->tid;
    stats(lg->tid);
  } else if (const auto* lr = std::get_if<LockRelease>(&ev)) {
    auto holder = lock_holder_.find(lr->lock_id);
    if (holder == lock_holder_.end() || holder->second != lr->tid) {
      ++lock_release_corrections_;  // force-correct and keep going
    }
    lock_holder_.erase(lr->lock_id);
    stats(lr->tid);
  } else if (const auto* cw = std::get_if<CondWait>(&ev)) {
    stats(cw->tid).cond_waits += 1;
  } else if (const auto* bw = std::get_if<BarrierWait>(&ev)) {
    stats(bw->tid).barrier_waits += 1;
  }
}

void SyncProfiler::finalize(Timestamp min_ts, Timestamp max_ts) {
  ThreadStats& main = stats(0);
  if (!main.birth_ts) {
    main.birth_ts = min_ts;
  }
  for (auto& [tid, t] : threads_) {
    if (!t.birth_ts) {
      t.birth_ts = min_ts;
    }
    if (!t.exit_ts) {
      t.exit_ts = max_ts;
    }
    // Guard against exits recorded at the birth instant on degenerate traces.
    if (*t.exit_ts < *t.birth_ts) {
      t.exit_ts = t.birth_ts;
    }
  }

  // Sweep lifecycle boundaries; parallel time is where >= 2 threads are live.
  std::vector<std::pair<Timestamp, int>> boundaries;
  boundaries.reserve(threads_.size() * 2);
  for (const auto& [tid, t] : threads_) {
    boundaries.emplace_back(*t.birth_ts, +1);
    boundaries.emplace_back(*t.exit_ts, -1);
  }
  std::sort(boundaries.begin(), boundaries.end());

  phase_ = PhaseStats{};
  phase_.total_ns = max_ts - min_ts;
  int live = 0;
  Timestamp prev = min_ts;
  for (const auto& [ts, delta] : boundaries) {
    if (ts > prev) {
      if (live >= 2) {
        phase_.parallel_ns += ts - prev;
      }
      prev = ts;
    }
    live += delta;
  }
  if (max_ts > prev && live >= 2) {
    phase_.parallel_ns += max_ts - prev;
  }
  phase_.p = phase_.total_ns == 0
                 ? 0.0
                 : static_cast<double>(phase_.parallel_ns) / static_cast<double>(phase_.total_ns);
}

double migration_score(const std::map<ThreadId, ThreadStats>& threads,
                       const PhaseStats& phase, double duration_s) {
  if (threads.empty() || duration_s <= 0.0) {
    return 0.0;
  }
  std::uint64_t sum = 0;
  for (const auto& [tid, t] : threads) {
    sum += t.migration_events();
  }
  return phase.p * static_cast<double>(sum) /
         (duration_s * static_cast<double>(threads.size()));
}

std::vector<RoutineTotals> routine_access_totals(
    const std::map<ThreadId, ThreadStats>& threads) {
  std::map<RoutineId, RoutineTotals> by_rid;
  for (const auto& [tid, t] : threads) {
    RoutineTotals& r = by_rid[t.rid];
    r.rid = t.rid;
    r.thread_count += 1;
    r.total_accesses += t.access_count;
  }
  std::vector<RoutineTotals> out;
  out.reserve(by_rid.size());
  for (auto& [rid, r] : by_rid) {
    r.per_thread_mean = static_cast<double>(r.total_accesses) / r.thread_count;
    out.push_back(r);
  }
  return out;
}

}  // namespace numaperf
