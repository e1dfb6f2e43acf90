#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "numaperf/config.hpp"
#include "numaperf/trace.hpp"

namespace numaperf {

enum class AccessClass : std::uint8_t { Local, Remote };

// Allocated once a page's access count reaches page_detail_threshold; earlier
// accesses are not retroactively distributed, so block sums are lower bounds.
struct PageDetail {
  std::vector<std::uint64_t> block_access;
  std::vector<std::uint64_t> block_remote;
  // tid -> accesses since detail activation; key set is the accessing-thread set.
  std::vector<std::pair<ThreadId, std::uint64_t>> thread_accesses;

  explicit PageDetail(std::uint64_t blocks)
      : block_access(blocks, 0), block_remote(blocks, 0) {}

  void count_thread(ThreadId tid);
};

struct PageRecord {
  ThreadId first_toucher = 0;
  std::uint64_t access_count = 0;
  std::uint64_t remote_count = 0;
  std::unique_ptr<PageDetail> detail;
};

struct PageSpan {
  std::uint64_t page_number = 0;
  // Minimal contiguous tid interval covering >= quantile of the page's
  // (post-activation) accesses; nullopt when the page never reached detail.
  std::optional<std::pair<ThreadId, ThreadId>> dominant_range;
};

// Shadow page map with first-touch ownership. Keyed by raw page number and
// never reset mid-trace, matching the physical-page analogy even when an
// allocator recycles pages across threads.
class PageProfiler {
 public:
  explicit PageProfiler(const AnalyzerConfig& config);

  // Splits the access per page and classifies each piece against the page's
  // first toucher. Returns the classification of the piece containing the
  // first byte, which is also what object-level attribution uses.
  AccessClass record_access(Timestamp ts, ThreadId tid, std::uint64_t addr,
                            std::uint64_t size, AccessKind kind);

  // Block-level estimate of an object's remote accesses: detailed pages sum
  // the blocks whose first byte lies inside the object; undetailed pages
  // contribute whole counts when fully covered, else a byte-overlap share
  // rounded half-up.
  std::uint64_t object_remote_count(std::uint64_t addr, std::uint64_t size) const;

  std::vector<PageSpan> page_thread_spans(std::uint64_t addr, std::uint64_t size,
                                          double quantile) const;

  const PageRecord* page(std::uint64_t page_number) const;
  const std::unordered_map<std::uint64_t, PageRecord>& pages() const { return pages_; }
  std::uint64_t total_pieces() const { return total_pieces_; }

 private:
  std::uint64_t page_size_;
  std::uint64_t block_size_;
  std::uint64_t blocks_per_page_;
  std::uint64_t detail_threshold_;
  std::unordered_map<std::uint64_t, PageRecord> pages_;
  std::uint64_t total_pieces_ = 0;

  AccessClass touch_page(ThreadId tid, std::uint64_t addr, std::uint64_t len);
};

// Computes the minimal contiguous tid window covering >= quantile of the
// total weight; ties prefer the lower-tid window. Exposed for tests.
std::optional<std::pair<ThreadId, ThreadId>> dominant_thread_span(
    std::vector<std::pair<ThreadId, std::uint64_t>> weights, double quantile);

}  // namespace numaperf
