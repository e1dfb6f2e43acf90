#include "numaperf/cache_profiler.hpp"

#include <algorithm>

namespace numaperf {

void WordDetail::add(std::uint64_t word, ThreadId tid) {
  auto& set = word_accessors[word];
  if (std::find(set.begin(), set.end(), tid) == set.end()) {
    set.push_back(tid);
  }
}

bool WordDetail::accessed_any(ThreadId tid, std::uint64_t word_begin,
                              std::uint64_t word_end) const {
  for (std::uint64_t w = word_begin; w < word_end; ++w) {
    const auto& set = word_accessors[w];
    if (std::find(set.begin(), set.end(), tid) != set.end()) {
      return true;
    }
  }
  return false;
}

void WordDetail::reset() {
  for (auto& set : word_accessors) {
    set.clear();
  }
}

bool CacheLineRecord::in_copy_set(ThreadId tid) const {
  return std::find(copy_set.begin(), copy_set.end(), tid) != copy_set.end();
}

CacheProfiler::CacheProfiler(const AnalyzerConfig& config)
    : line_size_(config.line_size),
      word_size_(config.word_size),
      words_per_line_(config.words_per_line()),
      track_threshold_(config.word_track_threshold) {}

InvalidationDelta CacheProfiler::touch_line(ThreadId tid, std::uint64_t addr,
                                            std::uint64_t len, AccessKind kind) {
  std::uint64_t line = addr / line_size_;
  auto [it, inserted] = lines_.try_emplace(line);
  CacheLineRecord& rec = it->second;
  if (inserted && track_threshold_ == 0) {
    rec.word_detail = std::make_unique<WordDetail>(words_per_line_);
  }

  std::uint64_t word_begin = (addr % line_size_) / word_size_;
  std::uint64_t word_end = ((addr % line_size_) + len - 1) / word_size_ + 1;

  InvalidationDelta delta;
  if (kind == AccessKind::Read) {
    if (!rec.in_copy_set(tid)) {
      rec.copy_set.push_back(tid);
    }
    if (rec.word_detail) {
      for (std::uint64_t w = word_begin; w < word_end; ++w) {
        rec.word_detail->add(w, tid);
      }
    }
    return delta;
  }

  // Write: every other holder of the line loses its copy.
  for (ThreadId victim : rec.copy_set) {
    if (victim == tid) {
      continue;
    }
    delta.count += 1;
    if (rec.word_detail) {
      if (rec.word_detail->accessed_any(victim, word_begin, word_end)) {
        delta.true_part += 1;
      } else {
        delta.false_part += 1;
      }
    } else {
      delta.unclassified_part += 1;
    }
  }
  rec.invalidations += delta.count;
  rec.classified_false += delta.false_part;
  rec.classified_true += delta.true_part;
  rec.unclassified += delta.unclassified_part;

  rec.copy_set.clear();
  rec.copy_set.push_back(tid);
  if (rec.word_detail) {
    rec.word_detail->reset();
    for (std::uint64_t w = word_begin; w < word_end; ++w) {
      rec.word_detail->add(w, tid);
    }
  }

  rec.write_count += 1;
  if (!rec.word_detail && rec.write_count >= track_threshold_) {
    // Activates for subsequent events; this write stayed unclassified.
    rec.word_detail = std::make_unique<WordDetail>(words_per_line_);
  }
  return delta;
}

InvalidationDelta CacheProfiler::record_access(Timestamp /*ts*/, ThreadId tid,
                                               std::uint64_t addr, std::uint64_t size,
                                               AccessKind kind) {
  InvalidationDelta total;
  std::uint64_t end = addr + size;
  while (addr < end) {
    std::uint64_t line_end = (addr / line_size_ + 1) * line_size_;
    std::uint64_t len = std::min(end, line_end) - addr;
    InvalidationDelta piece = touch_line(tid, addr, len, kind);
    total.count += piece.count;
    total.false_part += piece.false_part;
    total.true_part += piece.true_part;
    total.unclassified_part += piece.unclassified_part;
    addr += len;
  }
  return total;
}

CacheProfiler::SharingCounts CacheProfiler::object_sharing_counts(std::uint64_t addr,
                                                                  std::uint64_t size) const {
  SharingCounts counts;
  if (size == 0) {
    return counts;
  }
  std::uint64_t obj_end = addr + size;
  std::uint64_t first_line = addr / line_size_;
  std::uint64_t last_line = (obj_end - 1) / line_size_;
  for (std::uint64_t line = first_line; line <= last_line; ++line) {
    std::uint64_t line_start = line * line_size_;
    if (line_start < addr || line_start >= obj_end) {
      continue;  // straddling line owned by the object holding its first byte
    }
    auto it = lines_.find(line);
    if (it == lines_.end()) {
      continue;
    }
    counts.invalidations += it->second.invalidations;
    counts.classified_false += it->second.classified_false;
    counts.classified_true += it->second.classified_true;
    counts.unclassified += it->second.unclassified;
  }
  return counts;
}

CacheProfiler::SharingCounts CacheProfiler::totals() const {
  SharingCounts counts;
  for (const auto& [line, rec] : lines_) {
    counts.invalidations += rec.invalidations;
    counts.classified_false += rec.classified_false;
    counts.classified_true += rec.classified_true;
    counts.unclassified += rec.unclassified;
  }
  return counts;
}

const CacheLineRecord* CacheProfiler::line(std::uint64_t line_number) const {
  auto it = lines_.find(line_number);
  return it == lines_.end() ? nullptr : &it->second;
}

}  // namespace numaperf
