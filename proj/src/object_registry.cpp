#include "numaperf/object_registry.hpp"

#include <algorithm>
#include <map>

namespace numaperf {

ObjectRegistry::ObjectRegistry(std::uint64_t page_size) : page_size_(page_size) {}

void ObjectRegistry::index_range(ObjectId id, std::uint64_t addr, std::uint64_t size) {
  std::uint64_t first = addr / page_size_;
  std::uint64_t last = (addr + size - 1) / page_size_;
  for (std::uint64_t page = first; page <= last; ++page) {
    live_index_[page].push_back(id);
  }
}

void ObjectRegistry::unindex_range(ObjectId id, std::uint64_t addr, std::uint64_t size) {
  std::uint64_t first = addr / page_size_;
  std::uint64_t last = (addr + size - 1) / page_size_;
  for (std::uint64_t page = first; page <= last; ++page) {
    auto& bucket = live_index_[page];
    bucket.erase(std::remove(bucket.begin(), bucket.end(), id), bucket.end());
    dead_index_[page].push_back(id);
  }
}

ObjectId ObjectRegistry::register_allocation(Timestamp ts, ThreadId /*tid*/,
                                             std::uint64_t addr, std::uint64_t size,
                                             CallsiteId callsite) {
  if (size == 0) {
    throw RegistryError("zero-size allocation at 0x" + std::to_string(addr));
  }
  // Live objects never overlap; dead generations may share the range.
  std::uint64_t first = addr / page_size_;
  std::uint64_t last = (addr + size - 1) / page_size_;
  for (std::uint64_t page = first; page <= last; ++page) {
    auto bucket = live_index_.find(page);
    if (bucket == live_index_.end()) {
      continue;
    }
    for (ObjectId other : bucket->second) {
      const ObjectRecord& obj = objects_[other - 1];
      if (addr < obj.end() && obj.addr < addr + size) {
        ObjectId id = static_cast<ObjectId>(objects_.size() + 1);
        throw RegistryError("allocation overlaps live object: new object " +
                            std::to_string(id) + " vs live object " + std::to_string(other));
      }
    }
  }

  ObjectRecord rec;
  rec.id = static_cast<ObjectId>(objects_.size() + 1);
  rec.origin.kind = ObjectOrigin::Kind::Heap;
  rec.origin.callsite = callsite;
  rec.addr = addr;
  rec.size = size;
  rec.birth_ts = ts;
  objects_.push_back(std::move(rec));
  index_range(objects_.back().id, addr, size);
  live_by_addr_[addr] = objects_.back().id;
  ++live_count_;
  return objects_.back().id;
}

ObjectId ObjectRegistry::register_global(std::uint64_t addr, std::uint64_t size,
                                         const std::string& name) {
  ObjectId id = register_allocation(0, 0, addr, size, 0);
  ObjectRecord& rec = objects_[id - 1];
  rec.origin.kind = ObjectOrigin::Kind::Global;
  rec.origin.callsite = 0;
  rec.origin.global_name = name;
  return id;
}

void ObjectRegistry::on_free(Timestamp ts, ThreadId /*tid*/, std::uint64_t addr) {
  auto it = live_by_addr_.find(addr);
  if (it == live_by_addr_.end()) {
    throw TraceError(TraceErrorCode::DoubleFree, 0,
                     "free of non-live address during replay");
  }
  ObjectRecord& obj = objects_[it->second - 1];
  obj.death_ts = ts;
  unindex_range(obj.id, obj.addr, obj.size);
  live_by_addr_.erase(it);
  --live_count_;
}

std::optional<ObjectId> ObjectRegistry::resolve(std::uint64_t addr, Timestamp ts) const {
  if (auto bucket = live_index_.find(addr / page_size_); bucket != live_index_.end()) {
    for (ObjectId id : bucket->second) {
      const ObjectRecord& obj = objects_[id - 1];
      if (addr < obj.addr || addr >= obj.end() || ts < obj.birth_ts) {
        continue;
      }
      if (!obj.death_ts || ts < *obj.death_ts) {
        return id;
      }
    }
  }
  // Historical lookups may land in a generation that has since died.
  if (auto bucket = dead_index_.find(addr / page_size_); bucket != dead_index_.end()) {
    for (ObjectId id : bucket->second) {
      const ObjectRecord& obj = objects_[id - 1];
      if (addr >= obj.addr && addr < obj.end() && ts >= obj.birth_ts &&
          ts < *obj.death_ts) {
        return id;
      }
    }
  }
  return std::nullopt;
}

ObjectRegistry::AccessResolution ObjectRegistry::resolve_for_access(std::uint64_t addr,
                                                                    Timestamp ts) const {
  if (auto id = resolve(addr, ts)) {
    return {*id, false};
  }
  // Most recently dead covering object, if any.
  auto bucket = dead_index_.find(addr / page_size_);
  if (bucket == dead_index_.end()) {
    return {};
  }
  ObjectId best = 0;
  Timestamp best_death = 0;
  for (ObjectId id : bucket->second) {
    const ObjectRecord& obj = objects_[id - 1];
    if (addr < obj.addr || addr >= obj.end() || !obj.death_ts || *obj.death_ts > ts) {
      continue;
    }
    if (best == 0 || *obj.death_ts > best_death) {
      best = id;
      best_death = *obj.death_ts;
    }
  }
  return {best, best != 0};
}

void ObjectRegistry::record_object_access(ObjectId id, Timestamp ts, AccessKind kind) {
  ObjectRecord& obj = record(id);
  if (kind == AccessKind::Write) {
    obj.writes += 1;
    obj.last_write_ts = ts;
    obj.reads_after_last_write = 0;
  } else {
    obj.reads += 1;
    // No write yet counts as "after the last write": never-written data is
    // trivially duplicable.
    if (!obj.last_write_ts || ts > *obj.last_write_ts) {
      obj.reads_after_last_write += 1;
    }
  }
}

void ObjectRegistry::set_sharing_counts(ObjectId id, std::uint64_t false_inv,
                                        std::uint64_t true_inv, std::uint64_t unclassified) {
  ObjectRecord& obj = record(id);
  obj.false_invalidations = false_inv;
  obj.true_invalidations = true_inv;
  obj.unclassified_invalidations = unclassified;
}

void ObjectRegistry::finalize(Timestamp end_ts) {
  for (ObjectRecord& obj : objects_) {
    if (!obj.death_ts) {
      obj.death_ts = std::max(end_ts, obj.birth_ts);
    }
  }
  live_by_addr_.clear();
  live_count_ = 0;
}

const ObjectRecord& ObjectRegistry::record(ObjectId id) const {
  if (id == 0 || id > objects_.size()) {
    throw RegistryError("unknown object id " + std::to_string(id));
  }
  return objects_[id - 1];
}

ObjectRecord& ObjectRegistry::record(ObjectId id) {
  if (id == 0 || id > objects_.size()) {
    throw RegistryError("unknown object id " + std::to_string(id));
  }
  return objects_[id - 1];
}

std::vector<CallsiteAggregate> ObjectRegistry::callsite_aggregates() const {
  std::map<CallsiteId, CallsiteAggregate> by_site;
  for (const ObjectRecord& obj : objects_) {
    if (obj.origin.kind != ObjectOrigin::Kind::Heap) {
      continue;
    }
    CallsiteAggregate& agg = by_site[obj.origin.callsite];
    agg.callsite = obj.origin.callsite;
    agg.object_count += 1;
    agg.reads += obj.reads;
    agg.writes += obj.writes;
    agg.reads_after_last_write += obj.reads_after_last_write;
    agg.remote_accesses += obj.remote_accesses;
    agg.false_invalidations += obj.false_invalidations;
    agg.true_invalidations += obj.true_invalidations;
    agg.unclassified_invalidations += obj.unclassified_invalidations;
  }
  std::vector<CallsiteAggregate> out;
  out.reserve(by_site.size());
  for (auto& [site, agg] : by_site) {
    out.push_back(agg);
  }
  return out;
}

}  // namespace numaperf
