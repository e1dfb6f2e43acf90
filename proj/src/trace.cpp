#include "numaperf/trace.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string_view>

namespace numaperf {

namespace {

constexpr std::uint32_t kMaxAccessSize = 4096;

constexpr const char* kEventCodes[kEventKindCount] = {
    "TC", "TX", "MA", "AL", "FR", "GB", "LA", "LG", "LR", "CW", "BW",
};

constexpr const char* kErrorNames[] = {
    "MissingHeader",      "MalformedLine",  "UnknownEventCode", "DanglingThreadRef",
    "DuplicateThreadCreate", "LockStateViolation", "DoubleFree",
    "InvariantViolation", "UnsortedInput",  "EmptyTrace",       "Io",
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

class FieldCursor {
 public:
  FieldCursor(std::string_view line, std::uint64_t line_no) : rest_(line), line_no_(line_no) {}

  std::string_view take() {
    skip_spaces();
    if (rest_.empty()) {
      throw TraceError(TraceErrorCode::MalformedLine, line_no_, "missing field");
    }
    std::size_t end = rest_.find_first_of(" \t");
    std::string_view tok = rest_.substr(0, end);
    rest_ = end == std::string_view::npos ? std::string_view{} : rest_.substr(end);
    return tok;
  }

  // Remainder of the line, for free-form tails (global names, callsite strings).
  std::string take_tail() {
    skip_spaces();
    if (rest_.empty()) {
      throw TraceError(TraceErrorCode::MalformedLine, line_no_, "missing field");
    }
    std::string out(trim(rest_));
    rest_ = {};
    return out;
  }

  void expect_end() {
    skip_spaces();
    if (!rest_.empty()) {
      throw TraceError(TraceErrorCode::MalformedLine, line_no_, "trailing fields");
    }
  }

  template <typename T>
  T number(const char* what) {
    std::string_view tok = take();
    T value{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value, 10);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw TraceError(TraceErrorCode::MalformedLine, line_no_,
                       std::string("bad ") + what + " '" + std::string(tok) + "'");
    }
    return value;
  }

  std::uint64_t hex_addr() {
    std::string_view tok = take();
    if (tok.size() < 3 || tok[0] != '0' || (tok[1] != 'x' && tok[1] != 'X')) {
      throw TraceError(TraceErrorCode::MalformedLine, line_no_,
                       "address must have 0x prefix: '" + std::string(tok) + "'");
    }
    tok.remove_prefix(2);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value, 16);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw TraceError(TraceErrorCode::MalformedLine, line_no_, "bad hex address");
    }
    return value;
  }

 private:
  std::string_view rest_;
  std::uint64_t line_no_;

  void skip_spaces() {
    while (!rest_.empty() && (rest_.front() == ' ' || rest_.front() == '\t')) {
      rest_.remove_prefix(1);
    }
  }
};

struct EventWriter {
  std::string buf;

  void dec(std::uint64_t v) {
    char tmp[24];
    auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
    (void)ec;
    buf.append(tmp, ptr);
  }
  void hex(std::uint64_t v) {
    char tmp[24];
    auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof tmp, v, 16);
    (void)ec;
    buf.append("0x");
    buf.append(tmp, ptr);
  }
  void sp() { buf.push_back(' '); }

  void emit(const TraceEvent& ev) {
    buf.append(event_code(event_kind(ev)));
    sp();
    std::visit([this](const auto& e) { fields(e); }, ev);
    buf.push_back('\n');
  }

  void fields(const ThreadCreate& e) {
    dec(e.ts); sp(); dec(e.tid); sp(); dec(e.parent_tid); sp(); dec(e.rid);
  }
  void fields(const ThreadExit& e) { dec(e.ts); sp(); dec(e.tid); }
  void fields(const MemAccess& e) {
    dec(e.ts); sp(); dec(e.tid); sp();
    buf.push_back(e.kind == AccessKind::Read ? 'R' : 'W');
    sp(); hex(e.addr); sp(); dec(e.size);
  }
  void fields(const Alloc& e) {
    dec(e.ts); sp(); dec(e.tid); sp(); hex(e.addr); sp(); dec(e.size); sp(); dec(e.callsite);
  }
  void fields(const Free& e) { dec(e.ts); sp(); dec(e.tid); sp(); hex(e.addr); }
  void fields(const GlobalDecl& e) { hex(e.addr); sp(); dec(e.size); sp(); buf.append(e.name); }
  void fields(const LockRequest& e) { dec(e.ts); sp(); dec(e.tid); sp(); dec(e.lock_id); }
  void fields(const LockGrant& e) { dec(e.ts); sp(); dec(e.tid); sp(); dec(e.lock_id); }
  void fields(const LockRelease& e) { dec(e.ts); sp(); dec(e.tid); sp(); dec(e.lock_id); }
  void fields(const CondWait& e) { dec(e.ts); sp(); dec(e.tid); sp(); dec(e.cond_id); }
  void fields(const BarrierWait& e) { dec(e.ts); sp(); dec(e.tid); sp(); dec(e.barrier_id); }
};

// Structural checks a single event must satisfy regardless of context.
void check_event_shape(const TraceEvent& ev, std::uint64_t position) {
  if (const auto* ma = std::get_if<MemAccess>(&ev)) {
    if (ma->size < 1 || ma->size > kMaxAccessSize) {
      throw TraceError(TraceErrorCode::InvariantViolation, position,
                       "MemAccess size out of range 1..4096");
    }
  } else if (const auto* gb = std::get_if<GlobalDecl>(&ev)) {
    if (gb->name.empty() || gb->name.find_first_of("\n\r") != std::string::npos ||
        trim(gb->name).size() != gb->name.size()) {
      throw TraceError(TraceErrorCode::InvariantViolation, position, "bad global name");
    }
    if (gb->size == 0) {
      throw TraceError(TraceErrorCode::InvariantViolation, position, "global size 0");
    }
  } else if (const auto* al = std::get_if<Alloc>(&ev)) {
    if (al->size == 0) {
      throw TraceError(TraceErrorCode::InvariantViolation, position, "alloc size 0");
    }
  }
}

}  // namespace

EventKind event_kind(const TraceEvent& ev) {
  return static_cast<EventKind>(ev.index());
}

const char* event_code(EventKind kind) {
  return kEventCodes[static_cast<std::size_t>(kind)];
}

Timestamp sort_ts(const TraceEvent& ev) {
  return event_ts(ev).value_or(0);
}

std::optional<Timestamp> event_ts(const TraceEvent& ev) {
  return std::visit(
      [](const auto& e) -> std::optional<Timestamp> {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, GlobalDecl>) {
          return std::nullopt;
        } else {
          return e.ts;
        }
      },
      ev);
}

const char* trace_error_name(TraceErrorCode code) {
  return kErrorNames[static_cast<std::size_t>(code)];
}

TraceError::TraceError(TraceErrorCode code, std::uint64_t position, const std::string& detail)
    : std::runtime_error(std::string(trace_error_name(code)) + " at " +
                         std::to_string(position) + ": " + detail),
      code_(code),
      position_(position) {}

std::uint64_t EventCounts::total() const {
  return std::accumulate(by_kind.begin(), by_kind.end(), std::uint64_t{0});
}

DurationStats duration_from_span(std::uint64_t total_ns) {
  DurationStats d;
  d.total_ns = total_ns;
  d.duration_ms = std::max(static_cast<double>(total_ns) / 1e6, 1.0);
  d.duration_s = std::max(static_cast<double>(total_ns) / 1e9, 1e-3);
  return d;
}

DurationStats trace_duration(const ValidatedTrace& trace) {
  if (!trace.min_ts || !trace.max_ts) {
    throw TraceError(TraceErrorCode::EmptyTrace, 0, "no timestamped events");
  }
  return duration_from_span(*trace.max_ts - *trace.min_ts);
}

void TraceValidator::require_thread(ThreadId tid, std::uint64_t position) {
  if (tid == 0) {
    return;
  }
  if (tid >= created_.size() || !created_[tid]) {
    throw TraceError(TraceErrorCode::DanglingThreadRef, position,
                     "thread " + std::to_string(tid) + " referenced before ThreadCreate");
  }
}

void TraceValidator::check(const TraceEvent& ev, std::uint64_t position) {
  check_event_shape(ev, position);
  if (const auto* tc = std::get_if<ThreadCreate>(&ev)) {
    if (tc->tid == 0) {
      throw TraceError(TraceErrorCode::MalformedLine, position, "main thread cannot be created");
    }
    require_thread(tc->parent_tid, position);
    if (tc->tid < created_.size() && created_[tc->tid]) {
      throw TraceError(TraceErrorCode::DuplicateThreadCreate, position,
                       "thread " + std::to_string(tc->tid) + " created twice");
    }
    if (tc->tid >= created_.size()) {
      created_.resize(static_cast<std::size_t>(tc->tid) + 1, false);
    }
    created_[tc->tid] = true;
    return;
  }

  std::visit([&](const auto& e) {
    using T = std::decay_t<decltype(e)>;
    if constexpr (!std::is_same_v<T, GlobalDecl>) {
      require_thread(e.tid, position);
    }
  }, ev);

  if (const auto* lg = std::get_if<LockGrant>(&ev)) {
    auto pending = lock_pending_.find({lg->lock_id, lg->tid});
    if (pending == lock_pending_.end() || !pending->second) {
      throw TraceError(TraceErrorCode::LockStateViolation, position,
                       "grant without request (lock " + std::to_string(lg->lock_id) + ")");
    }
    if (auto holder = lock_holder_.find(lg->lock_id); holder != lock_holder_.end()) {
      throw TraceError(TraceErrorCode::LockStateViolation, position,
                       "lock " + std::to_string(lg->lock_id) + " already held by thread " +
                           std::to_string(holder->second));
    }
    pending->second = false;
    lock_holder_[lg->lock_id] = lg->tid;
  } else if (const auto* la = std::get_if<LockRequest>(&ev)) {
    lock_pending_[{la->lock_id, la->tid}] = true;
  } else if (const auto* lr = std::get_if<LockRelease>(&ev)) {
    auto holder = lock_holder_.find(lr->lock_id);
    if (holder != lock_holder_.end() && holder->second == lr->tid) {
      lock_holder_.erase(holder);
    } else {
      // Release by a non-holder is a producer bug but not fatal; the replay
      // side force-corrects and reports a diagnostic.
      ++lock_release_corrections_;
      lock_holder_.erase(lr->lock_id);
    }
  } else if (const auto* al = std::get_if<Alloc>(&ev)) {
    live_allocs_[al->addr] = al->size;
  } else if (const auto* fr = std::get_if<Free>(&ev)) {
    auto it = live_allocs_.find(fr->addr);
    if (it == live_allocs_.end()) {
      throw TraceError(TraceErrorCode::DoubleFree, position,
                       "free of non-live address");
    }
    live_allocs_.erase(it);
  }
}

LineParser::LineParser(std::istream& in) : in_(in) {
  if (!std::getline(in_, line_)) {
    throw TraceError(TraceErrorCode::MissingHeader, 0, "empty input");
  }
  ++line_no_;
  if (trim(line_) != "NPTRACE 1") {
    throw TraceError(TraceErrorCode::MissingHeader, line_no_, "expected 'NPTRACE 1'");
  }
}

std::optional<TraceEvent> LineParser::next() {
  while (std::getline(in_, line_)) {
    ++line_no_;
    std::string_view body = trim(line_);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    FieldCursor cur(body, line_no_);
    std::string_view code = cur.take();

    if (code == "TC") {
      ThreadCreate e;
      e.ts = cur.number<Timestamp>("ts");
      e.tid = cur.number<ThreadId>("tid");
      e.parent_tid = cur.number<ThreadId>("ptid");
      e.rid = cur.number<RoutineId>("rid");
      cur.expect_end();
      return e;
    }
    if (code == "TX") {
      ThreadExit e;
      e.ts = cur.number<Timestamp>("ts");
      e.tid = cur.number<ThreadId>("tid");
      cur.expect_end();
      return e;
    }
    if (code == "MA") {
      MemAccess e;
      e.ts = cur.number<Timestamp>("ts");
      e.tid = cur.number<ThreadId>("tid");
      std::string_view k = cur.take();
      if (k == "R") {
        e.kind = AccessKind::Read;
      } else if (k == "W") {
        e.kind = AccessKind::Write;
      } else {
        throw TraceError(TraceErrorCode::MalformedLine, line_no_, "access kind must be R or W");
      }
      e.addr = cur.hex_addr();
      e.size = cur.number<std::uint32_t>("size");
      cur.expect_end();
      if (e.size < 1 || e.size > kMaxAccessSize) {
        throw TraceError(TraceErrorCode::MalformedLine, line_no_, "size out of range 1..4096");
      }
      return e;
    }
    if (code == "AL") {
      Alloc e;
      e.ts = cur.number<Timestamp>("ts");
      e.tid = cur.number<ThreadId>("tid");
      e.addr = cur.hex_addr();
      e.size = cur.number<std::uint64_t>("size");
      e.callsite = cur.number<CallsiteId>("callsite");
      cur.expect_end();
      return e;
    }
    if (code == "FR") {
      Free e;
      e.ts = cur.number<Timestamp>("ts");
      e.tid = cur.number<ThreadId>("tid");
      e.addr = cur.hex_addr();
      cur.expect_end();
      return e;
    }
    if (code == "GB") {
      GlobalDecl e;
      e.addr = cur.hex_addr();
      e.size = cur.number<std::uint64_t>("size");
      e.name = cur.take_tail();
      return e;
    }
    if (code == "LA" || code == "LG" || code == "LR") {
      Timestamp ts = cur.number<Timestamp>("ts");
      ThreadId tid = cur.number<ThreadId>("tid");
      std::uint64_t lock = cur.number<std::uint64_t>("lock");
      cur.expect_end();
      if (code == "LA") return LockRequest{ts, tid, lock};
      if (code == "LG") return LockGrant{ts, tid, lock};
      return LockRelease{ts, tid, lock};
    }
    if (code == "CW") {
      CondWait e;
      e.ts = cur.number<Timestamp>("ts");
      e.tid = cur.number<ThreadId>("tid");
      e.cond_id = cur.number<std::uint64_t>("cond");
      cur.expect_end();
      return e;
    }
    if (code == "BW") {
      BarrierWait e;
      e.ts = cur.number<Timestamp>("ts");
      e.tid = cur.number<ThreadId>("tid");
      e.barrier_id = cur.number<std::uint64_t>("barrier");
      cur.expect_end();
      return e;
    }
    if (code == "CS") {
      CallsiteId id = cur.number<CallsiteId>("callsite_id");
      callsites_[id] = cur.take_tail();
      continue;  // side table, not an event
    }
    throw TraceError(TraceErrorCode::UnknownEventCode, line_no_,
                     "unknown code '" + std::string(code) + "'");
  }
  if (in_.bad()) {
    throw TraceError(TraceErrorCode::Io, line_no_, "read failure");
  }
  return std::nullopt;
}

ValidatedTrace parse_trace(std::istream& in) {
  LineParser parser(in);
  ValidatedTrace trace;
  std::vector<std::uint64_t> lines;
  while (auto ev = parser.next()) {
    trace.events.push_back(std::move(*ev));
    lines.push_back(parser.line_no());
  }
  trace.callsites = parser.callsites();

  // Stable sort keeps input order for equal timestamps: the trace file's order
  // is the declared total order for ties.
  std::vector<std::uint32_t> order(trace.events.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return sort_ts(trace.events[a]) < sort_ts(trace.events[b]);
  });
  std::vector<TraceEvent> sorted;
  sorted.reserve(trace.events.size());
  for (std::uint32_t idx : order) {
    sorted.push_back(std::move(trace.events[idx]));
  }
  trace.events = std::move(sorted);

  TraceValidator validator;
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    validator.check(trace.events[i], lines[order[i]]);
    const TraceEvent& ev = trace.events[i];
    trace.counts.add(event_kind(ev));
    if (auto ts = event_ts(ev)) {
      if (!trace.min_ts || *ts < *trace.min_ts) trace.min_ts = *ts;
      if (!trace.max_ts || *ts > *trace.max_ts) trace.max_ts = *ts;
    }
    if (const auto* gb = std::get_if<GlobalDecl>(&ev)) {
      trace.globals.push_back(*gb);
    } else if (const auto* tc = std::get_if<ThreadCreate>(&ev)) {
      trace.routines[tc->tid] = tc->rid;
    } else if (const auto* al = std::get_if<Alloc>(&ev)) {
      trace.callsites.try_emplace(al->callsite,
                                  "callsite-" + std::to_string(al->callsite));
    }
  }
  return trace;
}

ValidatedTrace parse_trace_string(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

ValidatedTrace parse_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TraceError(TraceErrorCode::Io, 0, "cannot open " + path);
  }
  return parse_trace(in);
}

void write_trace(std::ostream& out, std::span<const TraceEvent> events,
                 const std::map<CallsiteId, std::string>* callsites) {
  // Validate in total order but report the original index of the offender.
  std::vector<std::uint32_t> order(events.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return sort_ts(events[a]) < sort_ts(events[b]);
  });
  TraceValidator validator;
  for (std::uint32_t idx : order) {
    try {
      validator.check(events[idx], idx);
    } catch (const TraceError& err) {
      throw TraceError(TraceErrorCode::InvariantViolation, idx, err.what());
    }
  }

  EventWriter w;
  w.buf.reserve(1 << 16);
  w.buf.append("NPTRACE 1\n");
  if (callsites != nullptr) {
    for (const auto& [id, text] : *callsites) {
      w.buf.append("CS ");
      w.dec(id);
      w.sp();
      w.buf.append(text);
      w.buf.push_back('\n');
    }
  }
  for (const TraceEvent& ev : events) {
    w.emit(ev);
    if (w.buf.size() > (1 << 16)) {
      out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
      w.buf.clear();
    }
  }
  out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
  if (!out) {
    throw TraceError(TraceErrorCode::Io, 0, "write failure");
  }
}

std::string write_trace_string(std::span<const TraceEvent> events,
                               const std::map<CallsiteId, std::string>* callsites) {
  std::ostringstream out;
  write_trace(out, events, callsites);
  return out.str();
}

}  // namespace numaperf
