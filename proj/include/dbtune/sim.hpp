#pragma once

#include <cstdint>
#include <list>
#include <unordered_map>
#include <vector>

namespace dbtune {

/// Fixed cost model and resource ladders for the simulated DBMS instance.
/// A ladder lists the permitted sizes in MB; resizes land on rungs only.
struct SimConfig {
  int block_size_kb = 8;         // one cached block
  double t_cpu_ms = 0.5;         // per-statement CPU cost
  double t_io_ms = 1.0;          // per missed block
  double t_parse_ms = 2.0;       // per plan-cache miss (hard parse)
  int user_capacity = 16;        // users at which contention saturates
  double utilization_ceiling = 0.95;
  std::vector<int> buffer_ladder_mb = {4, 8, 16, 32, 64, 128, 256};
  std::vector<int> pool_ladder_mb = {32, 40, 48, 56, 64, 80, 96, 128};
  int plan_slots_per_mb = 4;

  /// Blocks per MB of buffer cache (1024 / block_size_kb).
  std::uint64_t blocks_per_mb() const;
  /// Buffer-cache capacity in blocks at `mb` megabytes.
  std::uint64_t buffer_capacity_blocks(int mb) const;
  /// Plan-cache capacity in slots at `mb` megabytes of shared pool.
  std::uint64_t plan_capacity_slots(int mb) const;

  /// Throws ValidationError on negative costs, non-positive capacities,
  /// malformed ladders, or a utilization ceiling outside (0, 1).
  void validate() const;
};

/// LRU set with O(1) touch. Copying rebuilds the iterator index so copies
/// are independent (used to fork simulator state in tests).
class LruCache {
 public:
  explicit LruCache(std::uint64_t capacity);
  LruCache(const LruCache& other);
  LruCache& operator=(const LruCache& other);
  LruCache(LruCache&&) = default;
  LruCache& operator=(LruCache&&) = default;

  /// Touch `key`: returns true on hit. On miss, inserts `key` as most
  /// recent, evicting the least recent entry if at capacity. Capacity 0
  /// caches nothing and always misses.
  bool access(std::uint64_t key);

  /// Change capacity. Shrinking evicts from the cold end until the
  /// residents fit; growing evicts nothing.
  void resize(std::uint64_t capacity);

  bool contains(std::uint64_t key) const { return index_.count(key) != 0; }
  std::uint64_t size() const { return order_.size(); }
  std::uint64_t capacity() const { return capacity_; }

  /// Resident keys, most recent first.
  std::vector<std::uint64_t> keys_mru_order() const;

 private:
  void evict_to_fit();

  std::uint64_t capacity_;
  std::list<std::uint64_t> order_;  // front = most recent
  std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> index_;
};

/// Monotone totals accumulated over a run; windowed metrics are computed
/// from deltas of these.
struct SimCounters {
  std::uint64_t accesses = 0;  // block probes
  std::uint64_t misses = 0;    // block misses
  std::uint64_t parses = 0;    // plan-cache misses
  std::uint64_t queries = 0;
  double cumulative_response_ms = 0.0;
};

struct QueryResult {
  double response_ms = 0.0;
  std::uint64_t block_misses = 0;
  bool plan_miss = false;
};

/// One simulated DBMS instance: both caches plus running counters.
struct SimState {
  int buffer_cache_mb = 0;
  int shared_pool_mb = 0;
  LruCache lru_queue{0};
  LruCache plan_cache{0};
  SimCounters counters;
};

/// Validates the config and that the initial sizes sit on their ladders,
/// then returns a cold (empty-cache) instance.
SimState make_sim_state(const SimConfig& cfg, int cache_mb, int pool_mb);

/// Queueing-style slowdown 1 / (1 - u) with utilization u =
/// min(users / user_capacity, utilization_ceiling). The ceiling keeps the
/// multiplier finite at saturation.
double contention_multiplier(const SimConfig& cfg, int active_users);

/// Run one statement: probe each block against the buffer cache and the
/// statement against the plan cache, then price it:
///   response = (t_cpu + misses*t_io + plan_miss*t_parse) * contention(U).
QueryResult execute_query(SimState& state, const SimConfig& cfg,
                          const std::vector<std::uint64_t>& blocks,
                          std::uint64_t stmt, int active_users);

/// Move a cache to a new ladder rung; shrinking evicts cold entries.
void resize_buffer_cache(SimState& state, const SimConfig& cfg, int new_mb);
void resize_shared_pool(SimState& state, const SimConfig& cfg, int new_mb);

/// Hit ratio of a cache holding the `cache_blocks` most popular of
/// `working_set` blocks referenced with Zipf(s) popularity: the popularity
/// mass of the top-min(C,B) ranks (independent-reference approximation).
double analytic_hit_ratio(std::uint64_t cache_blocks,
                          std::uint64_t working_set, double zipf_s);

}  // namespace dbtune
