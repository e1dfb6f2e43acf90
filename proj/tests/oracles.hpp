// Reference implementations used to check the analyzer. Kept deliberately
// naive: plain maps/sets, one loop per event, no shared code with the
// library's replay path.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "numaperf/trace.hpp"

namespace oracle {

using numaperf::AccessKind;
using numaperf::ThreadId;
using numaperf::Timestamp;

// ---- First-touch remote-access oracle ------------------------------------

struct PageStats {
  ThreadId first_toucher = 0;
  std::uint64_t accesses = 0;
  std::uint64_t remote = 0;
};

class FirstTouchOracle {
 public:
  explicit FirstTouchOracle(std::uint64_t page_size) : page_size_(page_size) {}

  // Splits per page; returns whether the piece containing the first byte was
  // remote.
  bool record(ThreadId tid, std::uint64_t addr, std::uint64_t size) {
    bool first_remote = false;
    bool first = true;
    std::uint64_t cursor = addr;
    const std::uint64_t end = addr + size;
    while (cursor < end) {
      const std::uint64_t page = cursor / page_size_;
      auto it = pages_.find(page);
      if (it == pages_.end()) {
        it = pages_.emplace(page, PageStats{tid, 0, 0}).first;
      }
      it->second.accesses += 1;
      const bool remote = tid != it->second.first_toucher;
      if (remote) {
        it->second.remote += 1;
      }
      if (first) {
        first_remote = remote;
        first = false;
      }
      cursor = (page + 1) * page_size_;
      if (cursor > end) {
        cursor = end;
      }
    }
    return first_remote;
  }

  const std::map<std::uint64_t, PageStats>& pages() const { return pages_; }

 private:
  std::uint64_t page_size_;
  std::map<std::uint64_t, PageStats> pages_;
};

// ---- Lifetime-aware object resolution oracle ------------------------------

struct NaiveObject {
  std::uint32_t id = 0;
  std::uint64_t addr = 0;
  std::uint64_t size = 0;
  Timestamp birth = 0;
  std::optional<Timestamp> death;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t remote = 0;
  std::optional<Timestamp> last_write;
  std::uint64_t reads_after_last_write = 0;
};

class NaiveRegistry {
 public:
  std::uint32_t alloc(Timestamp ts, std::uint64_t addr, std::uint64_t size) {
    NaiveObject obj;
    obj.id = static_cast<std::uint32_t>(objects_.size() + 1);
    obj.addr = addr;
    obj.size = size;
    obj.birth = ts;
    objects_.push_back(obj);
    return obj.id;
  }

  void free(Timestamp ts, std::uint64_t addr) {
    for (auto it = objects_.rbegin(); it != objects_.rend(); ++it) {
      if (it->addr == addr && !it->death) {
        it->death = ts;
        return;
      }
    }
  }

  // Range plus lifetime scan, newest first; 0 means unattributed.
  std::uint32_t resolve(std::uint64_t addr, Timestamp ts) const {
    for (auto it = objects_.rbegin(); it != objects_.rend(); ++it) {
      if (addr < it->addr || addr >= it->addr + it->size) {
        continue;
      }
      if (ts < it->birth) {
        continue;
      }
      if (!it->death || ts < *it->death) {
        return it->id;
      }
    }
    // Fall back to the most recently dead covering object.
    std::uint32_t best = 0;
    Timestamp best_death = 0;
    for (const NaiveObject& obj : objects_) {
      if (addr < obj.addr || addr >= obj.addr + obj.size || !obj.death || *obj.death > ts) {
        continue;
      }
      if (best == 0 || *obj.death > best_death) {
        best = obj.id;
        best_death = *obj.death;
      }
    }
    return best;
  }

  void count_access(std::uint32_t id, Timestamp ts, AccessKind kind, bool remote) {
    NaiveObject& obj = objects_[id - 1];
    if (kind == AccessKind::Write) {
      obj.writes += 1;
      obj.last_write = ts;
      obj.reads_after_last_write = 0;
    } else {
      obj.reads += 1;
      if (!obj.last_write || ts > *obj.last_write) {
        obj.reads_after_last_write += 1;
      }
    }
    if (remote) {
      obj.remote += 1;
    }
  }

  const std::vector<NaiveObject>& objects() const { return objects_; }

 private:
  std::vector<NaiveObject> objects_;
};

// ---- Invalidation state-machine oracle -------------------------------------

struct LineCounts {
  std::uint64_t invalidations = 0;
  std::uint64_t classified_false = 0;
  std::uint64_t classified_true = 0;
  std::uint64_t unclassified = 0;
};

class InvalidationOracle {
 public:
  InvalidationOracle(std::uint64_t line_size, std::uint64_t word_size,
                     std::uint64_t track_threshold)
      : line_size_(line_size), word_size_(word_size), threshold_(track_threshold) {}

  void record(ThreadId tid, std::uint64_t addr, std::uint64_t size, AccessKind kind) {
    std::uint64_t cursor = addr;
    const std::uint64_t end = addr + size;
    while (cursor < end) {
      const std::uint64_t line = cursor / line_size_;
      const std::uint64_t piece_end = std::min(end, (line + 1) * line_size_);
      touch(tid, line, cursor % line_size_, piece_end - cursor, kind);
      cursor = piece_end;
    }
  }

  const std::map<std::uint64_t, LineCounts>& lines() const { return counts_; }

  LineCounts totals() const {
    LineCounts sum;
    for (const auto& [line, c] : counts_) {
      sum.invalidations += c.invalidations;
      sum.classified_false += c.classified_false;
      sum.classified_true += c.classified_true;
      sum.unclassified += c.unclassified;
    }
    return sum;
  }

 private:
  struct LineState {
    std::set<ThreadId> copy_set;
    std::map<std::uint64_t, std::set<ThreadId>> words;
    std::uint64_t writes = 0;
    bool tracking = false;
    bool seen = false;
  };

  void touch(ThreadId tid, std::uint64_t line, std::uint64_t offset, std::uint64_t len,
             AccessKind kind) {
    LineState& st = states_[line];
    if (!st.seen) {
      st.seen = true;
      st.tracking = threshold_ == 0;
    }
    const std::uint64_t first_word = offset / word_size_;
    const std::uint64_t last_word = (offset + len - 1) / word_size_;

    if (kind == AccessKind::Read) {
      st.copy_set.insert(tid);
      if (st.tracking) {
        for (std::uint64_t w = first_word; w <= last_word; ++w) {
          st.words[w].insert(tid);
        }
      }
      return;
    }

    LineCounts& c = counts_[line];
    for (ThreadId victim : st.copy_set) {
      if (victim == tid) {
        continue;
      }
      c.invalidations += 1;
      if (!st.tracking) {
        c.unclassified += 1;
        continue;
      }
      bool touched_written_word = false;
      for (std::uint64_t w = first_word; w <= last_word; ++w) {
        auto it = st.words.find(w);
        if (it != st.words.end() && it->second.count(victim) > 0) {
          touched_written_word = true;
          break;
        }
      }
      if (touched_written_word) {
        c.classified_true += 1;
      } else {
        c.classified_false += 1;
      }
    }

    st.copy_set.clear();
    st.copy_set.insert(tid);
    if (st.tracking) {
      st.words.clear();
      for (std::uint64_t w = first_word; w <= last_word; ++w) {
        st.words[w].insert(tid);
      }
    }
    st.writes += 1;
    if (!st.tracking && st.writes >= threshold_) {
      st.tracking = true;
    }
  }

  std::uint64_t line_size_;
  std::uint64_t word_size_;
  std::uint64_t threshold_;
  std::map<std::uint64_t, LineState> states_;
  std::map<std::uint64_t, LineCounts> counts_;
};

// ---- Lock contention oracle -------------------------------------------------

class ContentionOracle {
 public:
  void feed(const numaperf::TraceEvent& ev) {
    if (const auto* la = std::get_if<numaperf::LockRequest>(&ev)) {
      auto it = holder_.find(la->lock_id);
      if (it != holder_.end() && it->second != la->tid) {
        contentions_[la->tid] += 1;
      }
    } else if (const auto* lg = std::get_if<numaperf::LockGrant>(&ev)) {
      holder_[lg->lock_id] = lg->tid;
    } else if (const auto* lr = std::get_if<numaperf::LockRelease>(&ev)) {
      holder_.erase(lr->lock_id);
    }
  }

  std::uint64_t contentions(ThreadId tid) const {
    auto it = contentions_.find(tid);
    return it == contentions_.end() ? 0 : it->second;
  }

 private:
  std::map<std::uint64_t, ThreadId> holder_;
  std::map<ThreadId, std::uint64_t> contentions_;
};

// ---- Assignment enumeration oracle -------------------------------------------

// Enumerates every per-type choice of floor/ceil (with a minimum of one) that
// sums to the budget and returns the lexicographically largest.
inline std::optional<std::vector<std::uint32_t>> enumerate_assignment(
    const std::vector<double>& weights, std::uint32_t budget) {
  const std::size_t k = weights.size();
  double sum = 0.0;
  for (double w : weights) {
    sum += w;
  }
  std::vector<std::vector<std::uint32_t>> options(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double quota = sum > 0 ? weights[i] * budget / sum
                                 : static_cast<double>(budget) / static_cast<double>(k);
    auto lo = static_cast<std::uint32_t>(std::floor(quota));
    auto hi = static_cast<std::uint32_t>(std::ceil(quota));
    lo = std::max<std::uint32_t>(lo, 1);
    hi = std::max(hi, lo);
    options[i].push_back(lo);
    if (hi != lo) {
      options[i].push_back(hi);
    }
  }

  std::optional<std::vector<std::uint32_t>> best;
  std::vector<std::uint32_t> current(k);
  auto visit = [&](auto&& self, std::size_t idx, std::uint32_t used) -> void {
    if (used > budget) {
      return;
    }
    if (idx == k) {
      if (used == budget && (!best || current > *best)) {
        best = current;
      }
      return;
    }
    for (std::uint32_t choice : options[idx]) {
      current[idx] = choice;
      self(self, idx + 1, used + choice);
    }
  };
  visit(visit, 0, 0);
  return best;
}

}  // namespace oracle
