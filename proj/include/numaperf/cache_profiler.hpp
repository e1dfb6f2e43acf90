#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "numaperf/config.hpp"
#include "numaperf/trace.hpp"

namespace numaperf {

struct InvalidationDelta {
  std::uint64_t count = 0;
  std::uint64_t false_part = 0;
  std::uint64_t true_part = 0;
  std::uint64_t unclassified_part = 0;
};

// Per-word accessor sets, tracked only once a line's write count reaches
// word_track_threshold. Sets are cleared on every write and re-seeded with
// the writer's written words.
struct WordDetail {
  std::vector<std::vector<ThreadId>> word_accessors;

  explicit WordDetail(std::uint64_t words) : word_accessors(words) {}

  void add(std::uint64_t word, ThreadId tid);
  bool accessed_any(ThreadId tid, std::uint64_t word_begin, std::uint64_t word_end) const;
  void reset();
};

struct CacheLineRecord {
  std::vector<ThreadId> copy_set;  // threads modeled as holding a valid copy
  std::uint64_t write_count = 0;
  std::uint64_t invalidations = 0;
  std::uint64_t classified_false = 0;
  std::uint64_t classified_true = 0;
  std::uint64_t unclassified = 0;
  std::unique_ptr<WordDetail> word_detail;

  bool in_copy_set(ThreadId tid) const;
};

// Invalidation counting: a write invalidates every *other* thread holding the
// line (the writer's own copy is upgraded, not invalidated). With word detail
// active, invalidated threads that touched a written word count as true
// sharing, the rest as false sharing; without detail they stay unclassified.
class CacheProfiler {
 public:
  explicit CacheProfiler(const AnalyzerConfig& config);

  // Splits per line; within a line the touched words are those overlapping
  // [addr, addr+size). Returns the summed deltas over all pieces.
  InvalidationDelta record_access(Timestamp ts, ThreadId tid, std::uint64_t addr,
                                  std::uint64_t size, AccessKind kind);

  struct SharingCounts {
    std::uint64_t invalidations = 0;
    std::uint64_t classified_false = 0;
    std::uint64_t classified_true = 0;
    std::uint64_t unclassified = 0;
  };
  // Line-granularity attribution: a line belongs to the object owning its
  // first byte.
  SharingCounts object_sharing_counts(std::uint64_t addr, std::uint64_t size) const;
  SharingCounts totals() const;

  const CacheLineRecord* line(std::uint64_t line_number) const;
  const std::unordered_map<std::uint64_t, CacheLineRecord>& lines() const { return lines_; }

 private:
  std::uint64_t line_size_;
  std::uint64_t word_size_;
  std::uint64_t words_per_line_;
  std::uint64_t track_threshold_;
  std::unordered_map<std::uint64_t, CacheLineRecord> lines_;

  InvalidationDelta touch_line(ThreadId tid, std::uint64_t addr, std::uint64_t len,
                               AccessKind kind);
};

}  // namespace numaperf
