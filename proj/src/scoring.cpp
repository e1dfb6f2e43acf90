#include "numaperf/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace numaperf {

namespace {

constexpr const char* kKindNames[] = {
    "remote_access", "false_sharing", "true_sharing", "thread_migration", "thread_imbalance",
};
constexpr const char* kKindLabels[] = {
    "remote access", "false sharing", "true sharing", "thread migration", "thread imbalance",
};
constexpr const char* kFixNames[] = {
    "block_interleave", "page_interleave", "padding", "duplicate", "thread_binding",
    "adjust_threads",
};
constexpr const char* kFixLabels[] = {
    "block interleave", "page interleave", "padding", "duplicate", "thread binding",
    "adjust threads",
};

}  // namespace

const char* issue_kind_name(IssueKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}
const char* issue_kind_label(IssueKind kind) {
  return kKindLabels[static_cast<std::size_t>(kind)];
}
const char* fix_strategy_name(FixStrategy fix) {
  return kFixNames[static_cast<std::size_t>(fix)];
}
const char* fix_strategy_label(FixStrategy fix) {
  return kFixLabels[static_cast<std::size_t>(fix)];
}

SiteCounters counters_of(const ObjectRecord& obj) {
  return SiteCounters{obj.reads,
                      obj.writes,
                      obj.reads_after_last_write,
                      obj.remote_accesses,
                      obj.false_invalidations,
                      obj.true_invalidations,
                      obj.unclassified_invalidations};
}

SiteCounters counters_of(const CallsiteAggregate& agg) {
  return SiteCounters{agg.reads,
                      agg.writes,
                      agg.reads_after_last_write,
                      agg.remote_accesses,
                      agg.false_invalidations,
                      agg.true_invalidations,
                      agg.unclassified_invalidations};
}

Scores compute_object_scores(const SiteCounters& counters, double duration_ms,
                             std::uint32_t thread_count) {
  Scores scores;
  scores.reads_after_last_write = counters.reads_after_last_write;
  scores.remote_score = static_cast<double>(counters.remote_accesses) / duration_ms;

  const double total_inv = static_cast<double>(counters.total_invalidations());
  const std::uint64_t classified =
      counters.false_invalidations + counters.true_invalidations;
  double false_scaled = 0.0;
  double true_scaled = 0.0;
  if (classified >= 1) {
    const double ratio_false =
        static_cast<double>(counters.false_invalidations) / static_cast<double>(classified);
    false_scaled = total_inv * ratio_false;
    true_scaled = total_inv - false_scaled;
    scores.estimated_split = counters.unclassified_invalidations > 0;
  } else if (total_inv > 0) {
    // Nothing classified: report the whole count as (estimated) true sharing,
    // whose fix strategy is the safe one either way.
    true_scaled = total_inv;
    scores.estimated_split = true;
  }

  const double denom = duration_ms * static_cast<double>(thread_count);
  scores.false_sharing_score = false_scaled / denom;
  scores.true_sharing_score = true_scaled / denom;

  if (total_inv > 0 &&
      total_inv > 0.5 * static_cast<double>(counters.remote_accesses)) {
    scores.dominant = false_scaled > true_scaled ? DominantIssue::FalseSharing
                                                 : DominantIssue::TrueSharing;
  } else if (counters.remote_accesses > 0) {
    scores.dominant = DominantIssue::RemoteAccess;
  } else {
    scores.dominant = DominantIssue::None;
  }
  return scores;
}

Scores compute_object_scores(const ObjectRecord& obj, double duration_ms,
                             std::uint32_t thread_count) {
  return compute_object_scores(counters_of(obj), duration_ms, thread_count);
}

FixStrategy suggest_fix(const Scores& scores, const FixEvidence& evidence,
                        const Thresholds& thresholds) {
  if (scores.dominant == DominantIssue::FalseSharing) {
    return FixStrategy::Padding;
  }
  if (scores.dominant == DominantIssue::TrueSharing) {
    return FixStrategy::PageInterleave;
  }
  if (evidence.total_accesses > 0 &&
      static_cast<double>(scores.reads_after_last_write) >=
          thresholds.duplicate_read_fraction * static_cast<double>(evidence.total_accesses)) {
    return FixStrategy::Duplicate;
  }
  if (evidence.detailed_pages > 0 &&
      static_cast<double>(evidence.partitioned_pages) >=
          0.8 * static_cast<double>(evidence.detailed_pages)) {
    return FixStrategy::BlockInterleave;
  }
  return FixStrategy::PageInterleave;
}

std::map<RoutineId, std::uint32_t> suggest_assignment(const std::vector<RoutineTotals>& totals,
                                                      std::uint32_t thread_budget) {
  if (totals.empty()) {
    return {};
  }
  if (thread_budget < totals.size()) {
    throw BudgetTooSmall("thread budget " + std::to_string(thread_budget) +
                         " below the number of thread types " + std::to_string(totals.size()));
  }

  std::vector<RoutineTotals> types = totals;
  std::sort(types.begin(), types.end(),
            [](const RoutineTotals& a, const RoutineTotals& b) { return a.rid < b.rid; });

  long double weight_sum = 0.0L;
  for (const RoutineTotals& t : types) {
    weight_sum += static_cast<long double>(t.total_accesses);
  }

  struct Slot {
    RoutineId rid;
    std::uint32_t floor;
    std::uint32_t ceil;
    std::uint32_t assigned;
  };
  std::vector<Slot> slots;
  slots.reserve(types.size());
  std::uint64_t base = 0;
  for (const RoutineTotals& t : types) {
    long double quota =
        weight_sum > 0.0L
            ? static_cast<long double>(t.total_accesses) * thread_budget / weight_sum
            : static_cast<long double>(thread_budget) / types.size();
    auto floor_q = static_cast<std::uint32_t>(std::floor(quota));
    auto ceil_q = static_cast<std::uint32_t>(std::ceil(quota));
    floor_q = std::max<std::uint32_t>(floor_q, 1);
    ceil_q = std::max(ceil_q, floor_q);
    slots.push_back({t.rid, floor_q, ceil_q, floor_q});
    base += floor_q;
  }

  if (base <= thread_budget) {
    // Award the leftover threads in ascending rid order; among all valid
    // roundings this is the lexicographically largest.
    std::uint64_t need = thread_budget - base;
    for (Slot& s : slots) {
      if (need == 0) break;
      if (s.ceil > s.floor) {
        s.assigned = s.ceil;
        --need;
      }
    }
    for (Slot& s : slots) {  // only reachable when every quota was integral
      if (need == 0) break;
      s.assigned += 1;
      --need;
    }
  } else {
    // Minimum-one bumps overshot the budget; shave the largest types first.
    std::uint64_t excess = base - thread_budget;
    while (excess > 0) {
      Slot* victim = nullptr;
      for (Slot& s : slots) {
        if (s.assigned > 1 && (victim == nullptr || s.assigned >= victim->assigned)) {
          victim = &s;
        }
      }
      if (victim == nullptr) {
        break;  // everyone at 1; budget == type count was checked above
      }
      victim->assigned -= 1;
      --excess;
    }
  }

  std::map<RoutineId, std::uint32_t> out;
  for (const Slot& s : slots) {
    out[s.rid] = s.assigned;
  }
  return out;
}

}  // namespace numaperf
