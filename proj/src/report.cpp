#include "numaperf/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace numaperf {

namespace {

constexpr std::size_t kMaxSpansShown = 8;

std::optional<IssueTier> tier_for(double score, double threshold) {
  if (score >= threshold) {
    return IssueTier::Reported;
  }
  if (score >= threshold / 10.0) {
    return IssueTier::Informational;
  }
  return std::nullopt;
}

struct SiteData {
  std::string label;
  SiteCounters counters;
  std::uint64_t object_count = 0;
  FixEvidence evidence;
  std::vector<std::string> spans;
};

std::string span_string(const std::pair<ThreadId, ThreadId>& range) {
  return std::to_string(range.first) + "--" + std::to_string(range.second);
}

void collect_page_evidence(const ReportInputs& in, const ObjectRecord& obj, SiteData& site) {
  const double quantile = in.config->dominance_quantile;
  const auto thread_total = static_cast<double>(in.sync->thread_count());
  for (const PageSpan& span : in.pages->page_thread_spans(obj.addr, obj.size, quantile)) {
    if (!span.dominant_range) {
      continue;
    }
    site.evidence.detailed_pages += 1;
    const double width =
        static_cast<double>(span.dominant_range->second - span.dominant_range->first + 1);
    if (width < 0.25 * thread_total) {
      site.evidence.partitioned_pages += 1;
    }
    site.spans.push_back(span_string(*span.dominant_range));
  }
}

void add_counters(SiteCounters& sum, const SiteCounters& part) {
  sum.reads += part.reads;
  sum.writes += part.writes;
  sum.reads_after_last_write += part.reads_after_last_write;
  sum.remote_accesses += part.remote_accesses;
  sum.false_invalidations += part.false_invalidations;
  sum.true_invalidations += part.true_invalidations;
  sum.unclassified_invalidations += part.unclassified_invalidations;
}

std::vector<SiteData> collect_sites(const ReportInputs& in) {
  std::map<std::string, SiteData> by_label;
  for (const ObjectRecord& obj : in.registry->objects()) {
    std::string label;
    if (obj.origin.kind == ObjectOrigin::Kind::Global) {
      label = "global " + obj.origin.global_name;
    } else {
      auto it = in.callsites->find(obj.origin.callsite);
      label = it != in.callsites->end() ? it->second
                                        : "callsite-" + std::to_string(obj.origin.callsite);
    }
    SiteData& site = by_label[label];
    site.label = label;
    add_counters(site.counters, counters_of(obj));
    site.object_count += 1;
    collect_page_evidence(in, obj, site);
  }
  std::vector<SiteData> out;
  out.reserve(by_label.size());
  for (auto& [label, site] : by_label) {
    site.evidence.total_accesses = site.counters.total_accesses();
    out.push_back(std::move(site));
  }
  return out;
}

Issue make_site_issue(const SiteData& site, const Scores& scores, IssueKind kind,
                      double score, IssueTier tier, FixStrategy fix, bool suppressed) {
  Issue issue;
  issue.tier = tier;
  issue.kind = kind;
  issue.score = score;
  issue.site = site.label;
  issue.fix = fix;
  issue.suppressed_by_dominance = suppressed;
  issue.remote_score = scores.remote_score;
  issue.false_sharing_score = scores.false_sharing_score;
  issue.true_sharing_score = scores.true_sharing_score;
  issue.estimated_split = scores.estimated_split;
  issue.reads_after_last_write = scores.reads_after_last_write;
  issue.total_accesses = site.counters.total_accesses();
  issue.object_count = site.object_count;
  issue.page_spans = site.spans;
  if (issue.page_spans.size() > kMaxSpansShown) {
    issue.page_spans.resize(kMaxSpansShown);
    issue.page_spans.push_back("......");
  }
  return issue;
}

int kind_rank(IssueKind kind) {
  return static_cast<int>(kind);
}

}  // namespace

std::vector<const Issue*> IssueReport::tier(IssueTier tier) const {
  std::vector<const Issue*> out;
  for (const Issue& issue : issues) {
    if (issue.tier == tier) {
      out.push_back(&issue);
    }
  }
  return out;
}

IssueReport build_report(const ReportInputs& in) {
  IssueReport report;
  report.config = *in.config;
  report.duration = in.duration;
  report.thread_count = in.sync->thread_count();
  report.parallel_fraction = in.sync->phase().p;
  report.event_total = in.event_total;
  report.mem_access_events = in.mem_access_events;
  report.unattributed = in.unattributed;
  report.diagnostics = in.diagnostics;

  const Thresholds& thresholds = in.config->thresholds;
  const double ms = in.duration.duration_ms;
  const std::uint32_t threads = std::max<std::uint32_t>(report.thread_count, 1);

  std::vector<Issue> issues;
  for (const SiteData& site : collect_sites(in)) {
    const Scores scores = compute_object_scores(site.counters, ms, threads);
    const bool sharing_dominant = scores.dominant == DominantIssue::FalseSharing ||
                                  scores.dominant == DominantIssue::TrueSharing;

    // Remote-access side.
    if (site.counters.remote_accesses > 0) {
      if (auto tier = tier_for(scores.remote_score, thresholds.remote_min)) {
        const bool demoted = sharing_dominant;
        const IssueTier final_tier = demoted ? IssueTier::Informational : *tier;
        FixStrategy fix = suggest_fix(scores, site.evidence, thresholds);
        if (sharing_dominant) {
          // The fix reflects the remote-access view of the site.
          Scores remote_view = scores;
          remote_view.dominant = DominantIssue::RemoteAccess;
          fix = suggest_fix(remote_view, site.evidence, thresholds);
        }
        issues.push_back(make_site_issue(site, scores, IssueKind::RemoteAccess,
                                         scores.remote_score, final_tier, fix,
                                         demoted && *tier == IssueTier::Reported));
      }
    }

    // Sharing side: the larger split kind carries the issue.
    if (site.counters.total_invalidations() > 0) {
      const bool false_larger = scores.false_sharing_score > scores.true_sharing_score;
      const IssueKind kind = false_larger ? IssueKind::FalseSharing : IssueKind::TrueSharing;
      const double score =
          false_larger ? scores.false_sharing_score : scores.true_sharing_score;
      if (auto tier = tier_for(score, thresholds.sharing_min)) {
        const bool demoted = !sharing_dominant;
        const IssueTier final_tier = demoted ? IssueTier::Informational : *tier;
        const FixStrategy fix =
            kind == IssueKind::FalseSharing ? FixStrategy::Padding : FixStrategy::PageInterleave;
        issues.push_back(make_site_issue(site, scores, kind, score, final_tier, fix,
                                         demoted && *tier == IssueTier::Reported));
      }
    }
  }

  // Whole-program: thread migration.
  {
    const double score =
        migration_score(in.sync->threads(), in.sync->phase(), in.duration.duration_s);
    if (auto tier = tier_for(score, thresholds.migration_min)) {
      Issue issue;
      issue.tier = *tier;
      issue.kind = IssueKind::ThreadMigration;
      issue.score = score;
      issue.fix = FixStrategy::ThreadBinding;
      issue.parallel_fraction = in.sync->phase().p;
      std::uint64_t sum = 0;
      for (const auto& [tid, t] : in.sync->threads()) {
        sum += t.migration_events();
      }
      issue.migration_events = sum;
      issue.running_seconds = in.duration.duration_s;
      issue.thread_count = in.sync->thread_count();
      issues.push_back(std::move(issue));
    }
  }

  // Whole-program: load imbalance across non-main thread types.
  {
    std::vector<RoutineTotals> types;
    for (const RoutineTotals& r : routine_access_totals(in.sync->threads())) {
      if (r.rid != 0) {
        types.push_back(r);
      }
    }
    if (types.size() >= 2) {
      double max_mean = 0.0;
      double min_mean = std::numeric_limits<double>::max();
      for (const RoutineTotals& r : types) {
        max_mean = std::max(max_mean, r.per_thread_mean);
        min_mean = std::min(min_mean, r.per_thread_mean);
      }
      double ratio = 0.0;
      if (max_mean > 0.0) {
        ratio = min_mean > 0.0 ? max_mean / min_mean : 1e18;
      }
      if (ratio >= thresholds.imbalance_ratio) {
        Issue issue;
        issue.tier = IssueTier::Reported;
        issue.kind = IssueKind::ThreadImbalance;
        issue.score = std::min(ratio, 1e18);
        issue.fix = FixStrategy::AdjustThreads;
        issue.imbalance_ratio = issue.score;
        std::uint32_t observed_workers = 0;
        for (const RoutineTotals& r : types) {
          issue.per_type.push_back({r.rid, r.thread_count, r.total_accesses, r.per_thread_mean});
          observed_workers += r.thread_count;
        }
        const std::uint32_t budget = in.config->thread_budget.value_or(observed_workers);
        try {
          issue.suggested_assignment = suggest_assignment(types, budget);
        } catch (const BudgetTooSmall&) {
          // Assignment omitted; the proportions are still reported.
        }
        issues.push_back(std::move(issue));
      }
    }
  }

  std::stable_sort(issues.begin(), issues.end(), [](const Issue& a, const Issue& b) {
    if (a.tier != b.tier) {
      return a.tier == IssueTier::Reported;
    }
    if (kind_rank(a.kind) != kind_rank(b.kind)) {
      return kind_rank(a.kind) < kind_rank(b.kind);
    }
    if (a.score != b.score) {
      return a.score > b.score;
    }
    return a.site < b.site;
  });
  report.issues = std::move(issues);
  return report;
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_site_issue_text(std::ostream& out, const Issue& issue) {
  out << "Allocation Site: " << issue.site << "\n";
  out << "Remote score:  " << fmt_double(issue.remote_score) << "\n";
  out << "False sharing score:  " << fmt_double(issue.false_sharing_score) << "\n";
  out << "True Sharing score:   " << fmt_double(issue.true_sharing_score) << "\n";
  if (issue.estimated_split &&
      (issue.kind == IssueKind::FalseSharing || issue.kind == IssueKind::TrueSharing)) {
    out << "    (sharing split estimated: some invalidations predate word tracking)\n";
  }
  if (issue.fix == FixStrategy::Duplicate) {
    out << "Continuous reads after the last write:   " << issue.reads_after_last_write << "\n";
  }
  if ((issue.fix == FixStrategy::BlockInterleave || issue.fix == FixStrategy::PageInterleave) &&
      !issue.page_spans.empty()) {
    out << "Pages accessed by threads:\n    ";
    for (std::size_t i = 0; i < issue.page_spans.size(); ++i) {
      if (i > 0) {
        out << ", ";
      }
      out << issue.page_spans[i];
    }
    out << "\n";
  }
}

void write_issue_text(std::ostream& out, const Issue& issue, std::size_t index) {
  out << "#" << index << " " << issue_kind_label(issue.kind) << ", score "
      << fmt_double(issue.score) << ", fix: " << fix_strategy_label(issue.fix);
  if (issue.suppressed_by_dominance) {
    out << " [suppressed by dominance rule]";
  }
  out << "\n";
  switch (issue.kind) {
    case IssueKind::RemoteAccess:
    case IssueKind::FalseSharing:
    case IssueKind::TrueSharing:
      write_site_issue_text(out, issue);
      break;
    case IssueKind::ThreadMigration:
      out << "parallel phase: " << fmt_double(issue.parallel_fraction)
          << ", migration events: " << issue.migration_events
          << ", running seconds: " << fmt_double(issue.running_seconds)
          << ", threads: " << issue.thread_count << "\n";
      out << "    bind threads round-robin across nodes\n";
      break;
    case IssueKind::ThreadImbalance: {
      out << "per-type accesses:";
      std::uint64_t sum = 0;
      for (const TypeShare& t : issue.per_type) {
        sum += t.total_accesses;
      }
      for (const TypeShare& t : issue.per_type) {
        out << " rid " << t.rid << ": " << t.total_accesses << " over " << t.thread_count
            << (t.thread_count == 1 ? " thread" : " threads") << ";";
      }
      out << "\n";
      out << "proportions: ";
      for (std::size_t i = 0; i < issue.per_type.size(); ++i) {
        if (i > 0) {
          out << " : ";
        }
        const double share =
            sum == 0 ? 0.0
                     : 100.0 * static_cast<double>(issue.per_type[i].total_accesses) /
                           static_cast<double>(sum);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", share);
        out << buf;
      }
      out << "\n";
      if (!issue.suggested_assignment.empty()) {
        out << "suggested assignment:";
        for (const auto& [rid, n] : issue.suggested_assignment) {
          out << " rid " << rid << " -> " << n << ";";
        }
        out << "\n";
      }
      break;
    }
  }
  out << "\n";
}

}  // namespace

void write_text_report(std::ostream& out, const IssueReport& report) {
  out << "NumaPerf replay report\n";
  out << "duration: " << fmt_double(report.duration.duration_ms)
      << " ms, threads: " << report.thread_count << ", events: " << report.event_total
      << " (memory accesses: " << report.mem_access_events << ")\n";
  const AnalyzerConfig& c = report.config;
  out << "config: page_size=" << c.page_size << " line_size=" << c.line_size
      << " word_size=" << c.word_size << " blocks_per_page=" << c.blocks_per_page
      << " page_detail_threshold=" << c.page_detail_threshold
      << " word_track_threshold=" << c.word_track_threshold << "\n";
  out << "thresholds: remote >= " << fmt_double(c.thresholds.remote_min) << ", sharing >= "
      << fmt_double(c.thresholds.sharing_min) << ", migration >= "
      << fmt_double(c.thresholds.migration_min)
      << " (informational tier within 10x below)\n";
  out << "sharing score denominator: all threads (" << report.thread_count << ")\n\n";

  auto reported = report.tier(IssueTier::Reported);
  out << "Reported issues: " << reported.size() << "\n";
  out << "--------------------------------------------------------------\n";
  std::size_t index = 1;
  for (const Issue* issue : reported) {
    write_issue_text(out, *issue, index++);
  }

  auto informational = report.tier(IssueTier::Informational);
  out << "Informational issues (below threshold): " << informational.size() << "\n";
  out << "--------------------------------------------------------------\n";
  for (const Issue* issue : informational) {
    write_issue_text(out, *issue, index++);
  }

  out << "Unattributed accesses: " << report.unattributed.events << " ("
      << report.unattributed.reads << " reads, " << report.unattributed.writes
      << " writes)\n";
  if (report.diagnostics.dead_object_accesses > 0 ||
      report.diagnostics.straddling_accesses > 0 ||
      report.diagnostics.lock_release_corrections > 0) {
    out << "diagnostics: dead-object accesses " << report.diagnostics.dead_object_accesses
        << ", straddling accesses " << report.diagnostics.straddling_accesses
        << ", lock release corrections " << report.diagnostics.lock_release_corrections
        << "\n";
  }
}

void write_json_report(std::ostream& out, const IssueReport& report) {
  using json = nlohmann::ordered_json;
  json root;
  root["schema_version"] = 1;
  root["tool"] = "numaperf-replay";

  const AnalyzerConfig& c = report.config;
  json config;
  config["page_size"] = c.page_size;
  config["line_size"] = c.line_size;
  config["word_size"] = c.word_size;
  config["blocks_per_page"] = c.blocks_per_page;
  config["page_detail_threshold"] = c.page_detail_threshold;
  config["word_track_threshold"] = c.word_track_threshold;
  config["dominance_quantile"] = c.dominance_quantile;
  config["sharing_denominator"] = "all_threads";
  json thresholds;
  thresholds["remote_min"] = c.thresholds.remote_min;
  thresholds["sharing_min"] = c.thresholds.sharing_min;
  thresholds["migration_min"] = c.thresholds.migration_min;
  thresholds["duplicate_read_fraction"] = c.thresholds.duplicate_read_fraction;
  thresholds["imbalance_ratio"] = c.thresholds.imbalance_ratio;
  config["thresholds"] = thresholds;
  root["config"] = config;

  json trace;
  trace["events"] = report.event_total;
  trace["mem_accesses"] = report.mem_access_events;
  trace["threads"] = report.thread_count;
  trace["duration_ns"] = report.duration.total_ns;
  trace["duration_ms"] = report.duration.duration_ms;
  trace["duration_s"] = report.duration.duration_s;
  trace["parallel_fraction"] = report.parallel_fraction;
  root["trace"] = trace;

  json issues = json::array();
  for (const Issue& issue : report.issues) {
    json j;
    j["tier"] = issue.tier == IssueTier::Reported ? "reported" : "informational";
    j["kind"] = issue_kind_name(issue.kind);
    j["score"] = issue.score;
    j["fix"] = fix_strategy_name(issue.fix);
    if (!issue.site.empty()) {
      j["site"] = issue.site;
    }
    if (issue.suppressed_by_dominance) {
      j["suppressed_by_dominance"] = true;
    }
    switch (issue.kind) {
      case IssueKind::RemoteAccess:
      case IssueKind::FalseSharing:
      case IssueKind::TrueSharing: {
        json ev;
        ev["remote_score"] = issue.remote_score;
        ev["false_sharing_score"] = issue.false_sharing_score;
        ev["true_sharing_score"] = issue.true_sharing_score;
        ev["estimated_split"] = issue.estimated_split;
        ev["reads_after_last_write"] = issue.reads_after_last_write;
        ev["total_accesses"] = issue.total_accesses;
        ev["object_count"] = issue.object_count;
        ev["page_spans"] = issue.page_spans;
        j["evidence"] = ev;
        break;
      }
      case IssueKind::ThreadMigration: {
        json ev;
        ev["parallel_fraction"] = issue.parallel_fraction;
        ev["migration_events"] = issue.migration_events;
        ev["running_seconds"] = issue.running_seconds;
        ev["threads"] = issue.thread_count;
        j["evidence"] = ev;
        break;
      }
      case IssueKind::ThreadImbalance: {
        json ev;
        ev["ratio"] = issue.imbalance_ratio;
        json per_type = json::array();
        for (const TypeShare& t : issue.per_type) {
          json jt;
          jt["rid"] = t.rid;
          jt["threads"] = t.thread_count;
          jt["total_accesses"] = t.total_accesses;
          jt["per_thread_mean"] = t.per_thread_mean;
          per_type.push_back(jt);
        }
        ev["per_type"] = per_type;
        json assignment = json::object();
        for (const auto& [rid, n] : issue.suggested_assignment) {
          assignment[std::to_string(rid)] = n;
        }
        ev["suggested_assignment"] = assignment;
        j["evidence"] = ev;
        break;
      }
    }
    issues.push_back(j);
  }
  root["issues"] = issues;

  json unattributed;
  unattributed["events"] = report.unattributed.events;
  unattributed["reads"] = report.unattributed.reads;
  unattributed["writes"] = report.unattributed.writes;
  root["unattributed"] = unattributed;

  json diag;
  diag["dead_object_accesses"] = report.diagnostics.dead_object_accesses;
  diag["straddling_accesses"] = report.diagnostics.straddling_accesses;
  diag["lock_release_corrections"] = report.diagnostics.lock_release_corrections;
  root["diagnostics"] = diag;

  out << root.dump(2) << "\n";
}

std::string json_report_string(const IssueReport& report) {
  std::ostringstream out;
  write_json_report(out, report);
  return out.str();
}

}  // namespace numaperf
