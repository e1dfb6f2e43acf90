#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "numaperf/trace.hpp"

namespace numaperf {

using ObjectId = std::uint32_t;  // 1-based; 0 is never a valid id

struct ObjectOrigin {
  enum class Kind : std::uint8_t { Heap, Global };
  Kind kind = Kind::Heap;
  CallsiteId callsite = 0;  // Heap only
  std::string global_name;  // Global only
};

struct ObjectRecord {
  ObjectId id = 0;
  ObjectOrigin origin;
  std::uint64_t addr = 0;
  std::uint64_t size = 0;
  Timestamp birth_ts = 0;
  std::optional<Timestamp> death_ts;  // set on free or at finalize()
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::optional<Timestamp> last_write_ts;
  std::uint64_t reads_after_last_write = 0;
  std::uint64_t remote_accesses = 0;
  std::uint64_t false_invalidations = 0;
  std::uint64_t true_invalidations = 0;
  std::uint64_t unclassified_invalidations = 0;

  std::uint64_t end() const { return addr + size; }
  std::uint64_t total_accesses() const { return reads + writes; }
  std::uint64_t total_invalidations() const {
    return false_invalidations + true_invalidations + unclassified_invalidations;
  }
};

struct CallsiteAggregate {
  CallsiteId callsite = 0;
  std::uint64_t object_count = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t reads_after_last_write = 0;
  std::uint64_t remote_accesses = 0;
  std::uint64_t false_invalidations = 0;
  std::uint64_t true_invalidations = 0;
  std::uint64_t unclassified_invalidations = 0;
};

class RegistryError : public std::runtime_error {
 public:
  explicit RegistryError(const std::string& what) : std::runtime_error(what) {}
};

// Live address ranges for heap objects and globals, with lifetime-aware
// resolution. Address reuse after free starts a fresh object; dead
// generations are kept so late accesses can still be attributed.
class ObjectRegistry {
 public:
  explicit ObjectRegistry(std::uint64_t page_size = 4096);

  // Throws RegistryError (names both object ids) if [addr, addr+size)
  // overlaps a live object.
  ObjectId register_allocation(Timestamp ts, ThreadId tid, std::uint64_t addr,
                               std::uint64_t size, CallsiteId callsite);
  ObjectId register_global(std::uint64_t addr, std::uint64_t size, const std::string& name);

  // Throws TraceError{DoubleFree} when addr does not match a live allocation.
  void on_free(Timestamp ts, ThreadId tid, std::uint64_t addr);

  // The object whose range contains addr and whose lifetime [birth, death)
  // contains ts; nullopt for untracked addresses (stack accesses are not in
  // the trace to begin with).
  std::optional<ObjectId> resolve(std::uint64_t addr, Timestamp ts) const;

  struct AccessResolution {
    ObjectId id = 0;   // 0: unattributed
    bool dead = false; // fell back to the most recently dead covering object
  };
  // Resolution used during replay: prefers the live covering object, falls
  // back to the most recently dead one (diagnostic counted by the caller).
  AccessResolution resolve_for_access(std::uint64_t addr, Timestamp ts) const;

  void record_object_access(ObjectId id, Timestamp ts, AccessKind kind);
  void add_remote_access(ObjectId id) { record(id).remote_accesses += 1; }

  void set_sharing_counts(ObjectId id, std::uint64_t false_inv, std::uint64_t true_inv,
                          std::uint64_t unclassified);

  // Objects never freed are finalized at end-of-trace.
  void finalize(Timestamp end_ts);

  const ObjectRecord& record(ObjectId id) const;
  ObjectRecord& record(ObjectId id);
  std::span<const ObjectRecord> objects() const { return objects_; }
  std::size_t live_count() const { return live_count_; }

  // Heap objects grouped by allocation callsite; counters are sums over the
  // member objects.
  std::vector<CallsiteAggregate> callsite_aggregates() const;

 private:
  std::uint64_t page_size_;
  std::vector<ObjectRecord> objects_;
  // Page-granularity buckets; the live index stays small (live ranges never
  // overlap) so replay-time resolution is a short scan. Dead generations move
  // to a separate index used only for historical and fallback lookups.
  std::unordered_map<std::uint64_t, std::vector<ObjectId>> live_index_;
  std::unordered_map<std::uint64_t, std::vector<ObjectId>> dead_index_;
  std::unordered_map<std::uint64_t, ObjectId> live_by_addr_;
  std::size_t live_count_ = 0;

  void index_range(ObjectId id, std::uint64_t addr, std::uint64_t size);
  void unindex_range(ObjectId id, std::uint64_t addr, std::uint64_t size);
};

}  // namespace numaperf
