#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace numaperf {

// Reporting cutoffs; anything at or above is reported, anything within 10x
// below lands in the informational tier. All tunable per run.
struct Thresholds {
  double remote_min = 1500.0;            // remote accesses per ms
  double sharing_min = 1.0;              // invalidations per (ms * threads)
  double migration_min = 150.0;          // migration score
  double duplicate_read_fraction = 0.9;  // reads-after-last-write share for Duplicate
  double imbalance_ratio = 2.0;          // max/min per-thread mean accesses across types
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct AnalyzerConfig {
  std::uint64_t page_size = 4096;
  std::uint64_t line_size = 64;
  std::uint64_t word_size = 8;
  std::uint64_t blocks_per_page = 64;
  std::uint64_t page_detail_threshold = 64;  // accesses before per-page detail
  std::uint64_t word_track_threshold = 16;   // writes before per-word detail
  double dominance_quantile = 0.9;           // share of page accesses a thread span must cover
  Thresholds thresholds;
  std::optional<std::uint32_t> thread_budget;  // default: observed non-main thread count

  std::uint64_t block_size() const { return page_size / blocks_per_page; }
  std::uint64_t words_per_line() const { return line_size / word_size; }

  // Throws ConfigError naming the offending flag.
  void validate() const;
};

}  // namespace numaperf
