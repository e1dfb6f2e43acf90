#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace numaperf {

using Timestamp = std::uint64_t;  // nanoseconds from an arbitrary monotonic origin
using ThreadId = std::uint32_t;   // main thread is tid 0
using RoutineId = std::uint32_t;  // thread start routine ("thread type"); main is rid 0
using CallsiteId = std::uint32_t;

enum class AccessKind : std::uint8_t { Read, Write };

struct ThreadCreate {
  Timestamp ts = 0;
  ThreadId tid = 0;
  ThreadId parent_tid = 0;
  RoutineId rid = 0;
  bool operator==(const ThreadCreate&) const = default;
};

struct ThreadExit {
  Timestamp ts = 0;
  ThreadId tid = 0;
  bool operator==(const ThreadExit&) const = default;
};

struct MemAccess {
  Timestamp ts = 0;
  ThreadId tid = 0;
  AccessKind kind = AccessKind::Read;
  std::uint64_t addr = 0;
  std::uint32_t size = 0;  // bytes, 1..=4096; producers split larger transfers
  bool operator==(const MemAccess&) const = default;
};

struct Alloc {
  Timestamp ts = 0;
  ThreadId tid = 0;
  std::uint64_t addr = 0;
  std::uint64_t size = 0;
  CallsiteId callsite = 0;
  bool operator==(const Alloc&) const = default;
};

struct Free {
  Timestamp ts = 0;
  ThreadId tid = 0;
  std::uint64_t addr = 0;
  bool operator==(const Free&) const = default;
};

// Globals carry no timestamp; they exist from the start of the trace.
struct GlobalDecl {
  std::uint64_t addr = 0;
  std::uint64_t size = 0;
  std::string name;
  bool operator==(const GlobalDecl&) const = default;
};

struct LockRequest {
  Timestamp ts = 0;
  ThreadId tid = 0;
  std::uint64_t lock_id = 0;
  bool operator==(const LockRequest&) const = default;
};

struct LockGrant {
  Timestamp ts = 0;
  ThreadId tid = 0;
  std::uint64_t lock_id = 0;
  bool operator==(const LockGrant&) const = default;
};

struct LockRelease {
  Timestamp ts = 0;
  ThreadId tid = 0;
  std::uint64_t lock_id = 0;
  bool operator==(const LockRelease&) const = default;
};

struct CondWait {
  Timestamp ts = 0;
  ThreadId tid = 0;
  std::uint64_t cond_id = 0;
  bool operator==(const CondWait&) const = default;
};

struct BarrierWait {
  Timestamp ts = 0;
  ThreadId tid = 0;
  std::uint64_t barrier_id = 0;
  bool operator==(const BarrierWait&) const = default;
};

using TraceEvent =
    std::variant<ThreadCreate, ThreadExit, MemAccess, Alloc, Free, GlobalDecl,
                 LockRequest, LockGrant, LockRelease, CondWait, BarrierWait>;

// Mirrors the alternatives of TraceEvent, in declaration order.
enum class EventKind : std::uint8_t {
  ThreadCreate,
  ThreadExit,
  MemAccess,
  Alloc,
  Free,
  GlobalDecl,
  LockRequest,
  LockGrant,
  LockRelease,
  CondWait,
  BarrierWait,
};
inline constexpr std::size_t kEventKindCount = 11;

EventKind event_kind(const TraceEvent& ev);
const char* event_code(EventKind kind);  // two-letter trace code, e.g. "MA"

// Timestamp used for ordering; GlobalDecl sorts to the front as 0.
Timestamp sort_ts(const TraceEvent& ev);
// Timestamp for duration purposes; GlobalDecl has none.
std::optional<Timestamp> event_ts(const TraceEvent& ev);

enum class TraceErrorCode {
  MissingHeader,
  MalformedLine,
  UnknownEventCode,
  DanglingThreadRef,
  DuplicateThreadCreate,
  LockStateViolation,
  DoubleFree,
  InvariantViolation,
  UnsortedInput,
  EmptyTrace,
  Io,
};

const char* trace_error_name(TraceErrorCode code);

class TraceError : public std::runtime_error {
 public:
  TraceError(TraceErrorCode code, std::uint64_t position, const std::string& detail);

  TraceErrorCode code() const { return code_; }
  // Line number for parse errors, event index for in-memory validation.
  std::uint64_t position() const { return position_; }

 private:
  TraceErrorCode code_;
  std::uint64_t position_;
};

struct EventCounts {
  std::array<std::uint64_t, kEventKindCount> by_kind{};

  std::uint64_t operator[](EventKind k) const {
    return by_kind[static_cast<std::size_t>(k)];
  }
  std::uint64_t total() const;
  void add(EventKind k) { ++by_kind[static_cast<std::size_t>(k)]; }
};

struct ValidatedTrace {
  std::vector<TraceEvent> events;  // sorted by (ts, input order); this IS the replay order
  std::map<CallsiteId, std::string> callsites;
  std::vector<GlobalDecl> globals;
  std::map<ThreadId, RoutineId> routines;  // non-main threads; main is implicitly rid 0
  EventCounts counts;
  std::optional<Timestamp> min_ts;
  std::optional<Timestamp> max_ts;
};

struct DurationStats {
  std::uint64_t total_ns = 0;
  double duration_ms = 0.0;
  double duration_s = 0.0;
};

// Floors at 1 ms / 1e-3 s so degenerate traces never divide by zero.
DurationStats duration_from_span(std::uint64_t total_ns);
DurationStats trace_duration(const ValidatedTrace& trace);  // throws EmptyTrace

// Incremental semantic checks over the total order. Used by parse_trace after
// sorting and by the streaming replay path as events arrive.
class TraceValidator {
 public:
  void check(const TraceEvent& ev, std::uint64_t position);

  std::uint64_t lock_release_corrections() const { return lock_release_corrections_; }

 private:
  std::vector<bool> created_;  // indexed by tid; tid 0 pre-created
  std::map<std::uint64_t, ThreadId> lock_holder_;
  std::map<std::pair<std::uint64_t, ThreadId>, bool> lock_pending_;
  std::map<std::uint64_t, std::uint64_t> live_allocs_;  // addr -> size
  std::uint64_t lock_release_corrections_ = 0;

  void require_thread(ThreadId tid, std::uint64_t position);
};

// Pull parser for one event per line; syntax only, no ordering checks.
class LineParser {
 public:
  // Reads and checks the `NPTRACE 1` header.
  explicit LineParser(std::istream& in);

  // nullopt at end of stream. Comment and blank lines are skipped.
  std::optional<TraceEvent> next();

  std::uint64_t line_no() const { return line_no_; }
  const std::map<CallsiteId, std::string>& callsites() const { return callsites_; }

 private:
  std::istream& in_;
  std::string line_;
  std::uint64_t line_no_ = 0;
  std::map<CallsiteId, std::string> callsites_;
};

ValidatedTrace parse_trace(std::istream& in);
ValidatedTrace parse_trace_string(const std::string& text);
ValidatedTrace parse_trace_file(const std::string& path);

// Serializes events in the given order, canonical single-space separated form.
// Validates trace invariants first; throws TraceError{InvariantViolation} with
// the index of the first offending event. `callsites` adds CS side-table lines
// after the header when present.
void write_trace(std::ostream& out, std::span<const TraceEvent> events,
                 const std::map<CallsiteId, std::string>* callsites = nullptr);
std::string write_trace_string(std::span<const TraceEvent> events,
                               const std::map<CallsiteId, std::string>* callsites = nullptr);

}  // namespace numaperf
