#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flame/board.hpp"

namespace flame {

/// Matched (message, reader) pairs seen by one worker during one layer.
struct DeliveryTally {
  std::int64_t local = 0;
  std::int64_t cross = 0;

  void record(std::uint32_t producer_partition, std::uint32_t reader_partition) {
    if (producer_partition == reader_partition)
      ++local;
    else
      ++cross;
  }
};

/// Communication counters for one layer of one iteration.
struct LayerExchange {
  std::int64_t iteration = 0;
  std::size_t layer = 0;
  std::int64_t messages_posted = 0;
  std::int64_t local_deliveries = 0;
  std::int64_t cross_partition_deliveries = 0;

  std::int64_t total_deliveries() const { return local_deliveries + cross_partition_deliveries; }

  friend bool operator==(const LayerExchange&, const LayerExchange&) = default;
};

/// Layer barrier across partitions: publishes every partition's posts into
/// the shared board (canonical order, so the merged view is the one a serial
/// run sees) and folds the partitions' delivery tallies into the layer's
/// metrics.
inline LayerExchange exchange_and_count(MessageBoard& board, std::span<PostBuffer> partition_posts,
                                        std::span<DeliveryTally> partition_tallies, std::int64_t iteration,
                                        std::size_t layer) {
  LayerExchange out;
  out.iteration = iteration;
  out.layer = layer;
  for (auto& t : partition_tallies) {
    out.local_deliveries += t.local;
    out.cross_partition_deliveries += t.cross;
    t = {};
  }
  out.messages_posted = static_cast<std::int64_t>(board.commit(partition_posts));
  return out;
}

}  // namespace flame
