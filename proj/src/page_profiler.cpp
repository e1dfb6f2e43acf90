#include "numaperf/page_profiler.hpp"

#include <algorithm>

namespace numaperf {

void PageDetail::count_thread(ThreadId tid) {
  for (auto& [t, n] : thread_accesses) {
    if (t == tid) {
      ++n;
      return;
    }
  }
  thread_accesses.emplace_back(tid, 1);
}

PageProfiler::PageProfiler(const AnalyzerConfig& config)
    : page_size_(config.page_size),
      block_size_(config.block_size()),
      blocks_per_page_(config.blocks_per_page),
      detail_threshold_(config.page_detail_threshold) {}

AccessClass PageProfiler::touch_page(ThreadId tid, std::uint64_t addr, std::uint64_t len) {
  std::uint64_t page = addr / page_size_;
  auto [it, inserted] = pages_.try_emplace(page);
  PageRecord& rec = it->second;
  if (inserted) {
    rec.first_toucher = tid;
    if (detail_threshold_ == 0) {
      rec.detail = std::make_unique<PageDetail>(blocks_per_page_);
    }
  }
  AccessClass cls = tid == rec.first_toucher ? AccessClass::Local : AccessClass::Remote;
  rec.access_count += 1;
  if (cls == AccessClass::Remote) {
    rec.remote_count += 1;
  }
  if (!rec.detail && rec.access_count >= detail_threshold_) {
    rec.detail = std::make_unique<PageDetail>(blocks_per_page_);
  }
  if (rec.detail) {
    // The piece lands in the block holding its first byte, keeping
    // sum(block_access) <= access_count even for multi-block pieces.
    std::uint64_t block = (addr % page_size_) / block_size_;
    rec.detail->block_access[block] += 1;
    if (cls == AccessClass::Remote) {
      rec.detail->block_remote[block] += 1;
    }
    rec.detail->count_thread(tid);
  }
  (void)len;
  ++total_pieces_;
  return cls;
}

AccessClass PageProfiler::record_access(Timestamp /*ts*/, ThreadId tid, std::uint64_t addr,
                                        std::uint64_t size, AccessKind /*kind*/) {
  std::uint64_t end = addr + size;
  AccessClass first_cls = AccessClass::Local;
  bool first = true;
  while (addr < end) {
    std::uint64_t page_end = (addr / page_size_ + 1) * page_size_;
    std::uint64_t len = std::min(end, page_end) - addr;
    AccessClass cls = touch_page(tid, addr, len);
    if (first) {
      first_cls = cls;
      first = false;
    }
    addr += len;
  }
  return first_cls;
}

std::uint64_t PageProfiler::object_remote_count(std::uint64_t addr, std::uint64_t size) const {
  if (size == 0) {
    return 0;
  }
  std::uint64_t obj_end = addr + size;
  std::uint64_t first_page = addr / page_size_;
  std::uint64_t last_page = (obj_end - 1) / page_size_;
  std::uint64_t total = 0;
  for (std::uint64_t page = first_page; page <= last_page; ++page) {
    auto it = pages_.find(page);
    if (it == pages_.end()) {
      continue;
    }
    const PageRecord& rec = it->second;
    std::uint64_t page_start = page * page_size_;
    if (rec.detail) {
      for (std::uint64_t b = 0; b < blocks_per_page_; ++b) {
        std::uint64_t block_start = page_start + b * block_size_;
        if (block_start >= addr && block_start < obj_end) {
          total += rec.detail->block_remote[b];
        }
      }
      continue;
    }
    std::uint64_t overlap_begin = std::max(addr, page_start);
    std::uint64_t overlap_end = std::min(obj_end, page_start + page_size_);
    std::uint64_t overlap = overlap_end - overlap_begin;
    if (overlap == page_size_) {
      total += rec.remote_count;
    } else {
      // Apportion by byte overlap, rounded half-up.
      total += (rec.remote_count * overlap + page_size_ / 2) / page_size_;
    }
  }
  return total;
}

std::optional<std::pair<ThreadId, ThreadId>> dominant_thread_span(
    std::vector<std::pair<ThreadId, std::uint64_t>> weights, double quantile) {
  if (weights.empty()) {
    return std::nullopt;
  }
  std::sort(weights.begin(), weights.end());
  std::uint64_t total = 0;
  for (const auto& [tid, n] : weights) {
    total += n;
  }
  const double target = quantile * static_cast<double>(total);

  std::optional<std::pair<ThreadId, ThreadId>> best;
  std::uint64_t window = 0;
  std::size_t lo = 0;
  for (std::size_t hi = 0; hi < weights.size(); ++hi) {
    window += weights[hi].second;
    while (static_cast<double>(window - weights[lo].second) >= target && lo < hi) {
      window -= weights[lo].second;
      ++lo;
    }
    if (static_cast<double>(window) >= target) {
      ThreadId span_lo = weights[lo].first;
      ThreadId span_hi = weights[hi].first;
      if (!best || span_hi - span_lo < best->second - best->first) {
        best = {span_lo, span_hi};
      }
    }
  }
  return best;
}

std::vector<PageSpan> PageProfiler::page_thread_spans(std::uint64_t addr, std::uint64_t size,
                                                      double quantile) const {
  std::vector<PageSpan> spans;
  if (size == 0) {
    return spans;
  }
  std::uint64_t first_page = addr / page_size_;
  std::uint64_t last_page = (addr + size - 1) / page_size_;
  for (std::uint64_t page = first_page; page <= last_page; ++page) {
    auto it = pages_.find(page);
    if (it == pages_.end()) {
      continue;
    }
    PageSpan span;
    span.page_number = page;
    if (it->second.detail) {
      span.dominant_range = dominant_thread_span(it->second.detail->thread_accesses, quantile);
    }
    spans.push_back(span);
  }
  return spans;
}

const PageRecord* PageProfiler::page(std::uint64_t page_number) const {
  auto it = pages_.find(page_number);
  return it == pages_.end() ? nullptr : &it->second;
}

}  // namespace numaperf
