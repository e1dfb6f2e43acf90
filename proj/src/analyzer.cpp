#include "numaperf/analyzer.hpp"

#include <fstream>

namespace numaperf {

Analyzer::Analyzer(AnalyzerConfig config)
    : config_(config),
      registry_(config.page_size),
      pages_(config),
      cache_(config),
      sync_() {
  config_.validate();
}

void Analyzer::on_mem_access(const MemAccess& ma) {
  // Object attribution goes by the first byte; the page profiler still counts
  // every page piece and the cache profiler every line piece.
  auto res = registry_.resolve_for_access(ma.addr, ma.ts);
  const AccessClass first_cls = pages_.record_access(ma.ts, ma.tid, ma.addr, ma.size, ma.kind);
  cache_.record_access(ma.ts, ma.tid, ma.addr, ma.size, ma.kind);

  if (res.id != 0) {
    registry_.record_object_access(res.id, ma.ts, ma.kind);
    if (first_cls == AccessClass::Remote) {
      registry_.add_remote_access(res.id);
    }
    sync_.count_access(ma.tid);
    if (res.dead) {
      diagnostics_.dead_object_accesses += 1;
    }
    const ObjectRecord& obj = registry_.record(res.id);
    if (ma.addr + ma.size > obj.end()) {
      diagnostics_.straddling_accesses += 1;
    }
  } else {
    unattributed_.events += 1;
    if (ma.kind == AccessKind::Read) {
      unattributed_.reads += 1;
    } else {
      unattributed_.writes += 1;
    }
  }
}

void Analyzer::feed(const TraceEvent& ev) {
  ++position_;
  validator_.check(ev, position_);
  counts_.add(event_kind(ev));
  if (auto ts = event_ts(ev)) {
    if (last_ts_ && *ts < *last_ts_) {
      throw TraceError(TraceErrorCode::UnsortedInput, position_,
                       "timestamps regress; re-run with --sort");
    }
    last_ts_ = *ts;
    if (!min_ts_ || *ts < *min_ts_) min_ts_ = *ts;
    if (!max_ts_ || *ts > *max_ts_) max_ts_ = *ts;
  }

  if (const auto* ma = std::get_if<MemAccess>(&ev)) {
    on_mem_access(*ma);
  } else if (const auto* al = std::get_if<Alloc>(&ev)) {
    registry_.register_allocation(al->ts, al->tid, al->addr, al->size, al->callsite);
    callsites_.try_emplace(al->callsite, "callsite-" + std::to_string(al->callsite));
  } else if (const auto* fr = std::get_if<Free>(&ev)) {
    registry_.on_free(fr->ts, fr->tid, fr->addr);
  } else if (const auto* gb = std::get_if<GlobalDecl>(&ev)) {
    registry_.register_global(gb->addr, gb->size, gb->name);
  } else if (const auto* tc = std::get_if<ThreadCreate>(&ev)) {
    sync_.on_thread_create(tc->ts, tc->tid, tc->parent_tid, tc->rid);
  } else if (const auto* tx = std::get_if<ThreadExit>(&ev)) {
    sync_.on_thread_exit(tx->ts, tx->tid);
  } else {
    sync_.record_sync_event(ev);
  }
}

void Analyzer::finish() {
  if (finished_) {
    return;
  }
  finished_ = true;
  const Timestamp min_ts = min_ts_.value_or(0);
  const Timestamp max_ts = max_ts_.value_or(0);
  registry_.finalize(max_ts);
  sync_.finalize(min_ts, max_ts);
  diagnostics_.lock_release_corrections = sync_.lock_release_corrections();

  // Sharing counts attribute per cache line to the object owning the line's
  // first byte; with address reuse the counts repeat on each generation, the
  // same approximation the raw-page shadow map makes.
  for (const ObjectRecord& obj : registry_.objects()) {
    auto counts = cache_.object_sharing_counts(obj.addr, obj.size);
    registry_.set_sharing_counts(obj.id, counts.classified_false, counts.classified_true,
                                 counts.unclassified);
  }
}

DurationStats Analyzer::duration() const {
  if (!min_ts_ || !max_ts_) {
    return duration_from_span(0);
  }
  return duration_from_span(*max_ts_ - *min_ts_);
}

IssueReport Analyzer::report() const {
  ReportInputs in;
  in.config = &config_;
  in.duration = duration();
  in.registry = &registry_;
  in.pages = &pages_;
  in.cache = &cache_;
  in.sync = &sync_;
  in.callsites = &callsites_;
  in.unattributed = unattributed_;
  in.diagnostics = diagnostics_;
  in.event_total = counts_.total();
  in.mem_access_events = counts_[EventKind::MemAccess];
  return build_report(in);
}

IssueReport analyze_trace(const ValidatedTrace& trace, const AnalyzerConfig& config) {
  Analyzer analyzer(config);
  analyzer.set_callsites(trace.callsites);
  for (const TraceEvent& ev : trace.events) {
    analyzer.feed(ev);
  }
  analyzer.finish();
  return analyzer.report();
}

IssueReport analyze_stream(std::istream& in, const AnalyzerConfig& config, bool sort_input) {
  if (sort_input) {
    return analyze_trace(parse_trace(in), config);
  }
  Analyzer analyzer(config);
  LineParser parser(in);
  while (auto ev = parser.next()) {
    try {
      analyzer.feed(*ev);
    } catch (const TraceError& err) {
      throw TraceError(err.code(), parser.line_no(), err.what());
    }
  }
  analyzer.set_callsites([&] {
    auto table = parser.callsites();
    for (const auto& [id, text] : analyzer.callsites()) {
      table.try_emplace(id, text);
    }
    return table;
  }());
  analyzer.finish();
  return analyzer.report();
}

IssueReport analyze_file(const std::string& path, const AnalyzerConfig& config,
                         bool sort_input) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TraceError(TraceErrorCode::Io, 0, "cannot open " + path);
  }
  return analyze_stream(in, config, sort_input);
}

}  // namespace numaperf
