#include "dbtune/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dbtune/errors.hpp"
#include "dbtune/ladder.hpp"

namespace dbtune {

std::uint64_t SimConfig::blocks_per_mb() const {
  return 1024u / static_cast<std::uint64_t>(block_size_kb);
}

std::uint64_t SimConfig::buffer_capacity_blocks(int mb) const {
  return static_cast<std::uint64_t>(mb) * blocks_per_mb();
}

std::uint64_t SimConfig::plan_capacity_slots(int mb) const {
  return static_cast<std::uint64_t>(mb) *
         static_cast<std::uint64_t>(plan_slots_per_mb);
}

void SimConfig::validate() const {
  if (block_size_kb <= 0 || block_size_kb > 1024) {
    throw ValidationError("sim.block_size_kb must be in [1, 1024]");
  }
  auto require_nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) {
      throw ValidationError(std::string(name) + " must be non-negative");
    }
  };
  require_nonneg(t_cpu_ms, "sim.t_cpu_ms");
  require_nonneg(t_io_ms, "sim.t_io_ms");
  require_nonneg(t_parse_ms, "sim.t_parse_ms");
  if (user_capacity <= 0) {
    throw ValidationError("sim.user_capacity must be positive");
  }
  if (plan_slots_per_mb <= 0) {
    throw ValidationError("sim.plan_slots_per_mb must be positive");
  }
  if (!(utilization_ceiling > 0.0) || !(utilization_ceiling < 1.0)) {
    throw ValidationError("sim.utilization_ceiling must be in (0, 1)");
  }
  validate_ladder(buffer_ladder_mb, "sim.buffer_ladder_mb");
  validate_ladder(pool_ladder_mb, "sim.pool_ladder_mb");
}

LruCache::LruCache(std::uint64_t capacity) : capacity_(capacity) {}

LruCache::LruCache(const LruCache& other)
    : capacity_(other.capacity_), order_(other.order_) {
  index_.reserve(order_.size());
  for (auto it = order_.begin(); it != order_.end(); ++it) {
    index_.emplace(*it, it);
  }
}

LruCache& LruCache::operator=(const LruCache& other) {
  if (this == &other) return *this;
  capacity_ = other.capacity_;
  order_ = other.order_;
  index_.clear();
  index_.reserve(order_.size());
  for (auto it = order_.begin(); it != order_.end(); ++it) {
    index_.emplace(*it, it);
  }
  return *this;
}

bool LruCache::access(std::uint64_t key) {
  auto found = index_.find(key);
  if (found != index_.end()) {
    order_.splice(order_.begin(), order_, found->second);
    return true;
  }
  if (capacity_ == 0) return false;
  if (order_.size() >= capacity_) {
    index_.erase(order_.back());
    order_.pop_back();
  }
  order_.push_front(key);
  index_.emplace(key, order_.begin());
  return false;
}

void LruCache::resize(std::uint64_t capacity) {
  capacity_ = capacity;
  evict_to_fit();
}

void LruCache::evict_to_fit() {
  while (order_.size() > capacity_) {
    index_.erase(order_.back());
    order_.pop_back();
  }
}

std::vector<std::uint64_t> LruCache::keys_mru_order() const {
  return {order_.begin(), order_.end()};
}

SimState make_sim_state(const SimConfig& cfg, int cache_mb, int pool_mb) {
  cfg.validate();
  ladder_index(cfg.buffer_ladder_mb, cache_mb, "buffer cache");
  ladder_index(cfg.pool_ladder_mb, pool_mb, "shared pool");
  SimState state;
  state.buffer_cache_mb = cache_mb;
  state.shared_pool_mb = pool_mb;
  state.lru_queue = LruCache(cfg.buffer_capacity_blocks(cache_mb));
  state.plan_cache = LruCache(cfg.plan_capacity_slots(pool_mb));
  return state;
}

double contention_multiplier(const SimConfig& cfg, int active_users) {
  if (active_users < 0) {
    throw ValidationError("active_users must be non-negative");
  }
  const double utilization =
      std::min(static_cast<double>(active_users) /
                   static_cast<double>(cfg.user_capacity),
               cfg.utilization_ceiling);
  return 1.0 / (1.0 - utilization);
}

QueryResult execute_query(SimState& state, const SimConfig& cfg,
                          const std::vector<std::uint64_t>& blocks,
                          std::uint64_t stmt, int active_users) {
  if (blocks.empty()) {
    throw ValidationError("execute_query: block list must be nonempty");
  }
  if (active_users < 1) {
    throw ValidationError("execute_query: active_users must be >= 1");
  }
  QueryResult result;
  for (const std::uint64_t block : blocks) {
    if (!state.lru_queue.access(block)) ++result.block_misses;
  }
  result.plan_miss = !state.plan_cache.access(stmt);
  const double base_ms =
      cfg.t_cpu_ms + static_cast<double>(result.block_misses) * cfg.t_io_ms +
      (result.plan_miss ? cfg.t_parse_ms : 0.0);
  result.response_ms = base_ms * contention_multiplier(cfg, active_users);

  state.counters.accesses += blocks.size();
  state.counters.misses += result.block_misses;
  state.counters.parses += result.plan_miss ? 1 : 0;
  state.counters.queries += 1;
  state.counters.cumulative_response_ms += result.response_ms;
  return result;
}

void resize_buffer_cache(SimState& state, const SimConfig& cfg, int new_mb) {
  ladder_index(cfg.buffer_ladder_mb, new_mb, "buffer cache");
  state.buffer_cache_mb = new_mb;
  state.lru_queue.resize(cfg.buffer_capacity_blocks(new_mb));
}

void resize_shared_pool(SimState& state, const SimConfig& cfg, int new_mb) {
  ladder_index(cfg.pool_ladder_mb, new_mb, "shared pool");
  state.shared_pool_mb = new_mb;
  state.plan_cache.resize(cfg.plan_capacity_slots(new_mb));
}

double analytic_hit_ratio(std::uint64_t cache_blocks,
                          std::uint64_t working_set, double zipf_s) {
  if (working_set == 0) {
    throw ValidationError("working_set must be positive");
  }
  if (!(zipf_s >= 0.0)) {
    throw ValidationError("zipf_s must be non-negative");
  }
  const std::uint64_t top = std::min(cache_blocks, working_set);
  double total = 0.0;
  double head = 0.0;
  for (std::uint64_t rank = 1; rank <= working_set; ++rank) {
    const double w = 1.0 / std::pow(static_cast<double>(rank), zipf_s);
    total += w;
    if (rank <= top) head += w;
  }
  return head / total;
}

}  // namespace dbtune
