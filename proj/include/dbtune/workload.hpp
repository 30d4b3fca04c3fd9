#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dbtune/rng.hpp"

namespace dbtune {

/// One step of the user-count schedule: from `tick` onward, `users`
/// concurrent sessions are active (until a later step overrides it).
struct UserStep {
  std::uint64_t tick = 0;
  int users = 1;
};

/// Parameters of the synthetic OLTP stream: short skewed-read transactions
/// against one linearly growing table, under a scheduled session count.
struct WorkloadSpec {
  std::uint64_t initial_table_rows = 64000;
  std::uint64_t rows_per_block = 64;
  std::uint64_t growth_rows_per_tick = 0;
  double zipf_s = 1.0;
  int blocks_per_query_min = 2;
  int blocks_per_query_max = 8;
  int distinct_statements = 200;
  std::vector<UserStep> user_schedule = {{0, 1}};
  std::uint64_t seed = 1;

  /// Throws ValidationError on non-positive counts, min > max, a negative
  /// skew, or a schedule that is empty or not strictly ascending in tick.
  void validate() const;
};

struct Transaction {
  int user_id = 0;
  std::vector<std::uint64_t> blocks;  // 0-based block ids < table blocks
  std::uint64_t stmt = 0;             // 0-based statement id
};

/// Table size and session count in effect at `clock`: rows grow linearly,
/// users follow the latest schedule step with step.tick <= clock (the first
/// step's value applies before any step is reached).
struct TickInfo {
  std::uint64_t table_rows = 0;
  int active_users = 0;
};
TickInfo advance_tick(const WorkloadSpec& spec, std::uint64_t clock);

/// Rank sampler for Zipf(s) over [1, n]: P(i) proportional to i^-s, drawn by
/// inverting a precomputed CDF (one uniform double per sample).
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double s);
  std::uint64_t sample(Rng& rng) const;  // rank in [1, n]
  std::uint64_t n() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

/// Single Zipf draw through a throwaway sampler; rank in [1, n].
std::uint64_t zipf_sample(Rng& rng, std::uint64_t n, double s);

/// Number of blocks occupied by `table_rows` rows (last block may be
/// partial).
std::uint64_t table_blocks(const WorkloadSpec& spec, std::uint64_t table_rows);

/// Draw one transaction: block count uniform in [min, max], then that many
/// Zipf-ranked block ids over the current table, then a Zipf-ranked
/// statement id. Ranks map to 0-based ids (rank 1 = hottest block).
Transaction next_transaction(const WorkloadSpec& spec, Rng& rng,
                             std::uint64_t table_rows, int user_id);

/// Drawing-order-compatible wrapper around next_transaction that reuses
/// Zipf CDFs across calls (they are O(n) to build). Produces exactly the
/// same stream as the free function for the same Rng.
class WorkloadGenerator {
 public:
  explicit WorkloadGenerator(const WorkloadSpec& spec);
  Transaction next_transaction(Rng& rng, std::uint64_t table_rows,
                               int user_id);
  const WorkloadSpec& spec() const { return spec_; }

 private:
  const ZipfSampler& block_sampler(std::uint64_t n_blocks);

  WorkloadSpec spec_;
  ZipfSampler stmt_sampler_;
  std::map<std::uint64_t, ZipfSampler> block_samplers_;
};

}  // namespace dbtune
