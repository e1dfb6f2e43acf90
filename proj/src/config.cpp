#include "numaperf/config.hpp"

namespace numaperf {

namespace {

bool power_of_two(std::uint64_t v) {
  return v != 0 && (v & (v - 1)) == 0;
}

}  // namespace

void AnalyzerConfig::validate() const {
  if (!power_of_two(page_size)) throw ConfigError("--page-size must be a power of two");
  if (!power_of_two(line_size)) throw ConfigError("--line-size must be a power of two");
  if (!power_of_two(word_size)) throw ConfigError("--word-size must be a power of two");
  if (!power_of_two(blocks_per_page)) {
    throw ConfigError("--blocks-per-page must be a power of two");
  }
  if (word_size > line_size) throw ConfigError("--word-size must not exceed --line-size");
  if (line_size > page_size) throw ConfigError("--line-size must not exceed --page-size");
  if (blocks_per_page > page_size) {
    throw ConfigError("--blocks-per-page must not exceed --page-size");
  }
  if (block_size() < word_size) {
    throw ConfigError("--blocks-per-page yields blocks smaller than --word-size");
  }
  if (dominance_quantile <= 0.0 || dominance_quantile > 1.0) {
    throw ConfigError("--dominance-quantile must be in (0, 1]");
  }
  if (thresholds.remote_min <= 0) throw ConfigError("--remote-min must be > 0");
  if (thresholds.sharing_min <= 0) throw ConfigError("--sharing-min must be > 0");
  if (thresholds.migration_min <= 0) throw ConfigError("--migration-min must be > 0");
  if (thresholds.duplicate_read_fraction <= 0 || thresholds.duplicate_read_fraction > 1) {
    throw ConfigError("--duplicate-read-fraction must be in (0, 1]");
  }
  if (thresholds.imbalance_ratio <= 0) throw ConfigError("--imbalance-ratio must be > 0");
}

}  // namespace numaperf
