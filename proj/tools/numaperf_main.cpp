#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "numaperf/analyzer.hpp"
#include "numaperf/generator.hpp"
#include "numaperf/report.hpp"
#include "numaperf/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitTraceError = 2;

struct AnalyzeOptions {
  std::string trace_path;
  std::string output = "text";
  bool sort_input = false;
  numaperf::AnalyzerConfig config;
};

void add_config_flags(CLI::App* cmd, numaperf::AnalyzerConfig& config) {
  cmd->add_option("--page-size", config.page_size, "Shadow page size in bytes")
      ->envname("NUMAPERF_PAGE_SIZE");
  cmd->add_option("--line-size", config.line_size, "Cache line size in bytes")
      ->envname("NUMAPERF_LINE_SIZE");
  cmd->add_option("--word-size", config.word_size, "Word size for sharing classification")
      ->envname("NUMAPERF_WORD_SIZE");
  cmd->add_option("--blocks-per-page", config.blocks_per_page, "Blocks per page")
      ->envname("NUMAPERF_BLOCKS_PER_PAGE");
  cmd->add_option("--page-detail-threshold", config.page_detail_threshold,
                  "Accesses before a page records block/thread detail")
      ->envname("NUMAPERF_PAGE_DETAIL_THRESHOLD");
  cmd->add_option("--word-track-threshold", config.word_track_threshold,
                  "Writes before a line records word-level accessors")
      ->envname("NUMAPERF_WORD_TRACK_THRESHOLD");
  cmd->add_option("--dominance-quantile", config.dominance_quantile,
                  "Share of page accesses a dominant thread span must cover")
      ->envname("NUMAPERF_DOMINANCE_QUANTILE");
  cmd->add_option("--remote-min", config.thresholds.remote_min,
                  "Reporting threshold for remote-access scores")
      ->envname("NUMAPERF_REMOTE_MIN");
  cmd->add_option("--sharing-min", config.thresholds.sharing_min,
                  "Reporting threshold for sharing scores")
      ->envname("NUMAPERF_SHARING_MIN");
  cmd->add_option("--migration-min", config.thresholds.migration_min,
                  "Reporting threshold for the migration score")
      ->envname("NUMAPERF_MIGRATION_MIN");
  cmd->add_option("--duplicate-read-fraction", config.thresholds.duplicate_read_fraction,
                  "Reads-after-last-write share that suggests duplication")
      ->envname("NUMAPERF_DUPLICATE_READ_FRACTION");
  cmd->add_option("--imbalance-ratio", config.thresholds.imbalance_ratio,
                  "Max/min per-thread mean access ratio that flags imbalance")
      ->envname("NUMAPERF_IMBALANCE_RATIO");
  cmd->add_option_function<std::uint32_t>(
         "--thread-budget",
         [&config](std::uint32_t v) { config.thread_budget = v; },
         "Thread budget for suggested assignments (default: observed workers)")
      ->envname("NUMAPERF_THREAD_BUDGET");
}

int run_analyze(const AnalyzeOptions& opt) {
  numaperf::IssueReport report = numaperf::analyze_file(opt.trace_path, opt.config,
                                                        opt.sort_input);
  if (opt.output == "structured") {
    numaperf::write_json_report(std::cout, report);
  } else {
    numaperf::write_text_report(std::cout, report);
  }
  const numaperf::ReplayDiagnostics& diag = report.diagnostics;
  if (diag.dead_object_accesses > 0 || diag.straddling_accesses > 0 ||
      diag.lock_release_corrections > 0) {
    std::cerr << "warning: " << diag.dead_object_accesses << " accesses to freed objects, "
              << diag.straddling_accesses << " accesses past an object end, "
              << diag.lock_release_corrections << " lock releases by non-holders\n";
  }
  if (report.unattributed.events > 0) {
    std::cerr << "note: " << report.unattributed.events
              << " accesses resolved to no tracked object\n";
  }
  return kExitOk;
}

int run_validate(const std::string& path) {
  numaperf::ValidatedTrace trace = numaperf::parse_trace_file(path);
  std::cout << "OK: " << trace.counts.total() << " events";
  for (std::size_t k = 0; k < numaperf::kEventKindCount; ++k) {
    const auto kind = static_cast<numaperf::EventKind>(k);
    if (trace.counts[kind] > 0) {
      std::cout << " " << numaperf::event_code(kind) << "=" << trace.counts[kind];
    }
  }
  std::cout << "\n";
  if (trace.min_ts) {
    const auto d = numaperf::trace_duration(trace);
    std::cout << "duration: " << d.total_ns << " ns, threads: " << trace.routines.size() + 1
              << ", callsites: " << trace.callsites.size() << ", globals: "
              << trace.globals.size() << "\n";
  }
  return kExitOk;
}

struct GenOptions {
  std::string pattern = "random";
  std::string out_path;
  numaperf::GenParams params;
};

int run_gen(const GenOptions& opt) {
  auto pattern = numaperf::pattern_from_name(opt.pattern);
  if (!pattern) {
    std::cerr << "unknown pattern '" << opt.pattern << "'\n";
    return kExitInternal;
  }
  numaperf::GenResult result = numaperf::generate(*pattern, opt.params);

  std::ofstream out(opt.out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot open " << opt.out_path << " for writing\n";
    return kExitInternal;
  }
  numaperf::write_trace(out, result.events, &result.callsites);
  out.close();

  const std::string manifest_path = opt.out_path + ".manifest.json";
  std::ofstream manifest(manifest_path, std::ios::binary);
  if (!manifest) {
    std::cerr << "cannot open " << manifest_path << " for writing\n";
    return kExitInternal;
  }
  manifest << result.manifest.to_json();
  std::cerr << "wrote " << result.events.size() << " events to " << opt.out_path
            << " (manifest: " << manifest_path << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline NUMA performance-issue analyzer: replays memory/sync/allocation "
               "traces and reports remote-access, sharing, migration, and imbalance issues"};
  app.require_subcommand(1);

  AnalyzeOptions analyze_opt;
  CLI::App* analyze = app.add_subcommand("analyze", "Replay a trace and emit the issue report");
  analyze->add_option("trace", analyze_opt.trace_path, "Trace file (NPTRACE 1)")
      ->required();
  analyze->add_option("--output", analyze_opt.output, "Report format: text | structured")
      ->check(CLI::IsMember({"text", "structured"}))
      ->envname("NUMAPERF_OUTPUT");
  analyze->add_flag("--sort", analyze_opt.sort_input,
                    "Sort out-of-order input in memory before replay");
  add_config_flags(analyze, analyze_opt.config);

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Parse a trace and report event counts");
  validate->add_option("trace", validate_path, "Trace file")->required();

  GenOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic trace with a known manifest");
  gen->add_option("pattern", gen_opt.pattern,
                  "single-thread | false-sharing | true-sharing | remote-page | remote-block | "
                  "read-mostly | migration-heavy | imbalance | mixed | random")
      ->required();
  gen->add_option("--out", gen_opt.out_path, "Output trace path")->required();
  gen->add_option("--threads", gen_opt.params.workers, "Worker thread count");
  gen->add_option("--events", gen_opt.params.events, "Primary event count");
  gen->add_option("--span-ns", gen_opt.params.span_ns, "Trace duration in nanoseconds");
  gen->add_option("--seed", gen_opt.params.seed, "Generator seed")->envname("NUMAPERF_SEED");
  gen->add_option("--pages", gen_opt.params.pages, "Footprint in pages");
  gen->add_option("--group-size", gen_opt.params.group_size,
                  "remote-block: threads per partition group");
  gen->add_option("--waits-per-thread", gen_opt.params.waits_per_thread,
                  "migration-heavy: barrier waits per thread");
  gen->add_option("--type-totals", gen_opt.params.per_type_totals,
                  "imbalance: per-type access totals");
  gen->add_option("--max-access-size", gen_opt.params.max_access_size,
                  "random: largest access in bytes");
  gen->add_flag("!--no-churn", gen_opt.params.alloc_churn, "random: disable alloc/free churn");
  gen->add_flag("!--no-sync", gen_opt.params.sync_mix, "random: disable sync traffic");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      return run_analyze(analyze_opt);
    }
    if (*validate) {
      return run_validate(validate_path);
    }
    if (*gen) {
      return run_gen(gen_opt);
    }
  } catch (const numaperf::TraceError& err) {
    std::cerr << "trace error: " << err.what() << "\n";
    return kExitTraceError;
  } catch (const numaperf::RegistryError& err) {
    std::cerr << "trace error: " << err.what() << "\n";
    return kExitTraceError;
  } catch (const numaperf::ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitInternal;
  } catch (const std::invalid_argument& err) {
    std::cerr << "invalid parameters: " << err.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
