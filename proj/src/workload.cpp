#include "dbtune/workload.hpp"

#include <algorithm>
#include <cmath>

#include "dbtune/errors.hpp"

namespace dbtune {

void WorkloadSpec::validate() const {
  if (initial_table_rows == 0) {
    throw ValidationError("workload.initial_table_rows must be positive");
  }
  if (rows_per_block == 0) {
    throw ValidationError("workload.rows_per_block must be positive");
  }
  if (initial_table_rows < rows_per_block) {
    throw ValidationError(
        "workload.initial_table_rows must be at least rows_per_block");
  }
  if (!(zipf_s >= 0.0)) {
    throw ValidationError("workload.zipf_s must be non-negative");
  }
  if (blocks_per_query_min <= 0 || blocks_per_query_max <= 0) {
    throw ValidationError("workload.blocks_per_query_min/max must be positive");
  }
  if (blocks_per_query_min > blocks_per_query_max) {
    throw ValidationError(
        "workload.blocks_per_query_min must not exceed blocks_per_query_max");
  }
  if (distinct_statements <= 0) {
    throw ValidationError("workload.distinct_statements must be positive");
  }
  if (user_schedule.empty()) {
    throw ValidationError("workload.user_schedule must have at least one step");
  }
  for (std::size_t i = 0; i < user_schedule.size(); ++i) {
    if (user_schedule[i].users <= 0) {
      throw ValidationError("workload.user_schedule users must be positive");
    }
    if (i > 0 && user_schedule[i].tick <= user_schedule[i - 1].tick) {
      throw ValidationError(
          "workload.user_schedule ticks must be strictly ascending");
    }
  }
}

TickInfo advance_tick(const WorkloadSpec& spec, std::uint64_t clock) {
  TickInfo info;
  info.table_rows = spec.initial_table_rows + spec.growth_rows_per_tick * clock;
  info.active_users = spec.user_schedule.front().users;
  for (const UserStep& step : spec.user_schedule) {
    if (step.tick <= clock) {
      info.active_users = step.users;
    } else {
      break;
    }
  }
  return info;
}

ZipfSampler::ZipfSampler(std::uint64_t n, double s) {
  if (n == 0) {
    throw ValidationError("zipf sampler needs n >= 1");
  }
  cdf_.resize(n);
  double total = 0.0;
  for (std::uint64_t rank = 1; rank <= n; ++rank) {
    total += 1.0 / std::pow(static_cast<double>(rank), s);
    cdf_[rank - 1] = total;
  }
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;  // guard against rounding shortfall
}

std::uint64_t ZipfSampler::sample(Rng& rng) const {
  const double u = rng.next_double();  // in [0, 1)
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<std::uint64_t>(it - cdf_.begin()) + 1;
}

std::uint64_t zipf_sample(Rng& rng, std::uint64_t n, double s) {
  return ZipfSampler(n, s).sample(rng);
}

std::uint64_t table_blocks(const WorkloadSpec& spec,
                           std::uint64_t table_rows) {
  return (table_rows + spec.rows_per_block - 1) / spec.rows_per_block;
}

namespace {

Transaction draw_transaction(const WorkloadSpec& spec, Rng& rng,
                             const ZipfSampler& blocks,
                             const ZipfSampler& stmts, int user_id) {
  Transaction txn;
  txn.user_id = user_id;
  const int n_blocks =
      rng.uniform_int(spec.blocks_per_query_min, spec.blocks_per_query_max);
  txn.blocks.reserve(static_cast<std::size_t>(n_blocks));
  for (int i = 0; i < n_blocks; ++i) {
    txn.blocks.push_back(blocks.sample(rng) - 1);
  }
  txn.stmt = stmts.sample(rng) - 1;
  return txn;
}

}  // namespace

Transaction next_transaction(const WorkloadSpec& spec, Rng& rng,
                             std::uint64_t table_rows, int user_id) {
  if (table_rows < spec.rows_per_block) {
    throw ValidationError("table_rows must be at least rows_per_block");
  }
  const ZipfSampler blocks(table_blocks(spec, table_rows), spec.zipf_s);
  const ZipfSampler stmts(
      static_cast<std::uint64_t>(spec.distinct_statements), spec.zipf_s);
  return draw_transaction(spec, rng, blocks, stmts, user_id);
}

WorkloadGenerator::WorkloadGenerator(const WorkloadSpec& spec)
    : spec_(spec),
      stmt_sampler_(static_cast<std::uint64_t>(spec.distinct_statements),
                    spec.zipf_s) {
  spec_.validate();
}

const ZipfSampler& WorkloadGenerator::block_sampler(std::uint64_t n_blocks) {
  auto it = block_samplers_.find(n_blocks);
  if (it == block_samplers_.end()) {
    it = block_samplers_.emplace(n_blocks, ZipfSampler(n_blocks, spec_.zipf_s))
             .first;
  }
  return it->second;
}

Transaction WorkloadGenerator::next_transaction(Rng& rng,
                                                std::uint64_t table_rows,
                                                int user_id) {
  if (table_rows < spec_.rows_per_block) {
    throw ValidationError("table_rows must be at least rows_per_block");
  }
  return draw_transaction(spec_, rng, block_sampler(table_blocks(spec_, table_rows)),
                          stmt_sampler_, user_id);
}

}  // namespace dbtune
