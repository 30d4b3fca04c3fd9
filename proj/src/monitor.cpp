#include "dbtune/monitor.hpp"

#include "dbtune/errors.hpp"

namespace dbtune {

void MonitorConfig::validate() const {
  if (window_ticks < 1) {
    throw ValidationError("monitor.window_ticks must be >= 1");
  }
}

Monitor::Monitor(const MonitorConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

void Monitor::record(const QueryResult& result, std::uint64_t blocks_touched) {
  accesses_ += blocks_touched;
  misses_ += result.block_misses;
  queries_ += 1;
  response_sum_ms_ += result.response_ms;
}

MetricsSnapshot Monitor::close_window(std::uint64_t end_tick, int active_users,
                                      std::uint64_t table_rows) {
  MetricsSnapshot snap;
  snap.window_id = next_window_id_++;
  snap.end_tick = end_tick;
  snap.buffer_miss_ratio =
      accesses_ == 0 ? 0.0
                     : static_cast<double>(misses_) /
                           static_cast<double>(accesses_);
  snap.active_users = active_users;
  snap.table_rows = table_rows;
  snap.mean_response_ms =
      queries_ == 0 ? 0.0 : response_sum_ms_ / static_cast<double>(queries_);
  snap.queries = queries_;

  accesses_ = 0;
  misses_ = 0;
  queries_ = 0;
  response_sum_ms_ = 0.0;
  return snap;
}

}  // namespace dbtune
