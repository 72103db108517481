#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "flame/error.hpp"
#include "flame/model.hpp"
#include "flame/value.hpp"

namespace flame {

struct Message {
  std::size_t type = 0;  // index into ModelDef::message_types
  std::int64_t sender_id = 0;
  std::int64_t seq = 0;  // per sender, per iteration
  Record payload;

  friend bool operator==(const Message& a, const Message& b) {
    return a.type == b.type && a.sender_id == b.sender_id && a.seq == b.seq && bit_equal(a.payload, b.payload);
  }
};

struct RadialRange {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
};

/// Conjunction of optional constraints. `range` keeps messages whose (x, y)
/// lies within `radius` (inclusive) of the centre and needs a positional type.
struct MessageFilter {
  std::optional<std::int64_t> scene_id;
  std::vector<std::pair<std::string, std::int64_t>> equal;
  std::optional<RadialRange> range;

  MessageFilter& scene(std::int64_t id) {
    scene_id = id;
    return *this;
  }
  MessageFilter& where(std::string field, std::int64_t value) {
    equal.emplace_back(std::move(field), value);
    return *this;
  }
  MessageFilter& within(double x, double y, double radius) {
    range = RadialRange{x, y, radius};
    return *this;
  }
};

/// Posts made by one worker during one layer, bucketed by message type.
class PostBuffer {
 public:
  explicit PostBuffer(std::size_t n_types = 0) : by_type_(n_types) {}

  void push(Message msg) { by_type_.at(msg.type).push_back(std::move(msg)); }
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& v : by_type_) n += v.size();
    return n;
  }
  std::vector<std::vector<Message>>& by_type() { return by_type_; }
  void clear() {
    for (auto& v : by_type_) v.clear();
  }

 private:
  std::vector<std::vector<Message>> by_type_;
};

/// Iteration-scoped message store. Posted messages sit in pending buffers and
/// become readable only when commit() runs at a layer barrier; readable
/// messages of each type are kept in canonical order
/// (scene_id when the type has one, sender_id, seq).
class MessageBoard {
 public:
  explicit MessageBoard(const ModelDef& model) : pending_(model.message_types.size()) {
    channels_.reserve(model.message_types.size());
    for (const auto& spec : model.message_types) {
      Channel c;
      c.spec = &spec;
      c.scene = spec.field_of_kind("scene_id", ScalarKind::Integer);
      if (spec.positional()) {
        c.x = spec.field_of_kind("x", ScalarKind::Real);
        c.y = spec.field_of_kind("y", ScalarKind::Real);
      }
      channels_.push_back(std::move(c));
    }
  }

  std::size_t type_count() const { return channels_.size(); }

  std::size_t type_index(std::string_view name) const {
    for (std::size_t i = 0; i < channels_.size(); ++i)
      if (channels_[i].spec->name == name) return i;
    fail(ErrorCode::UnknownMessageType, std::string(name));
  }

  const MessageTypeSpec& spec(std::size_t type) const { return *channel(type).spec; }

  PostBuffer make_buffer() const { return PostBuffer(channels_.size()); }

  /// Validates and stages a message; it stays invisible until commit().
  void post(Message msg) {
    check_payload(msg);
    pending_.push(std::move(msg));
  }

  void check_payload(const Message& msg) const {
    const auto& spec = *channel(msg.type).spec;
    if (!matches_layout(msg.payload, spec.payload))
      fail(ErrorCode::PayloadMismatch, "payload does not match layout of message '" + spec.name + "'");
  }

  /// Layer barrier for single-threaded use: publishes everything posted via post().
  std::size_t commit() { return commit(std::span<PostBuffer>(&pending_, 1)); }

  /// Layer barrier: moves all buffered posts into the readable store and
  /// restores canonical order. Returns the number of messages published.
  std::size_t commit(std::span<PostBuffer> buffers) {
    std::size_t published = 0;
    for (std::size_t t = 0; t < channels_.size(); ++t) {
      auto& dst = channels_[t].messages;
      const std::size_t before = dst.size();
      for (auto& buffer : buffers) {
        auto& src = buffer.by_type()[t];
        dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
        src.clear();
      }
      if (dst.size() == before) continue;
      published += dst.size() - before;
      const auto& c = channels_[t];
      std::sort(dst.begin(), dst.end(), [&c](const Message& a, const Message& b) {
        return c.key(a) < c.key(b);
      });
    }
    return published;
  }

  /// Readable messages of a type in canonical order.
  std::span<const Message> messages(std::size_t type) const { return channel(type).messages; }

  /// Calls fn(const Message&) for every readable message matching the filter,
  /// in canonical order. Returns the number of matches.
  template <class Fn>
  std::size_t visit(std::size_t type, const MessageFilter& filter, Fn&& fn) const {
    const Channel& c = channel(type);
    if (filter.range && !(c.x && c.y))
      fail(ErrorCode::RangeFilterOnNonPositional, "message '" + c.spec->name + "' has no x/y");
    if (filter.scene_id && !c.scene)
      fail(ErrorCode::InvalidArgument, "message '" + c.spec->name + "' has no scene_id");

    std::vector<std::pair<std::size_t, std::int64_t>> equal;
    equal.reserve(filter.equal.size());
    for (const auto& [field, value] : filter.equal) {
      auto idx = c.spec->field_of_kind(field, ScalarKind::Integer);
      if (!idx) fail(ErrorCode::InvalidArgument, "message '" + c.spec->name + "' has no integer field '" + field + "'");
      equal.emplace_back(*idx, value);
    }

    auto first = c.messages.begin();
    auto last = c.messages.end();
    if (filter.scene_id) {
      const std::size_t s = *c.scene;
      const std::int64_t want = *filter.scene_id;
      first = std::partition_point(first, last, [&](const Message& m) { return as_int(m.payload[s]) < want; });
      last = std::partition_point(first, last, [&](const Message& m) { return as_int(m.payload[s]) <= want; });
    }

    std::size_t matched = 0;
    const double r2 = filter.range ? filter.range->radius * filter.range->radius : 0.0;
    for (auto it = first; it != last; ++it) {
      const Message& m = *it;
      bool ok = true;
      for (const auto& [idx, value] : equal)
        if (as_int(m.payload[idx]) != value) {
          ok = false;
          break;
        }
      if (!ok) continue;
      if (filter.range) {
        const double dx = std::get<double>(m.payload[*c.x]) - filter.range->x;
        const double dy = std::get<double>(m.payload[*c.y]) - filter.range->y;
        if (dx * dx + dy * dy > r2) continue;
      }
      ++matched;
      fn(m);
    }
    return matched;
  }

  std::vector<Message> read(std::string_view type, const MessageFilter& filter = {}) const {
    std::vector<Message> out;
    visit(type_index(type), filter, [&](const Message& m) { out.push_back(m); });
    return out;
  }

 private:
  struct Channel {
    const MessageTypeSpec* spec = nullptr;
    std::optional<std::size_t> scene, x, y;
    std::vector<Message> messages;

    std::tuple<std::int64_t, std::int64_t, std::int64_t> key(const Message& m) const {
      return {scene ? as_int(m.payload[*scene]) : 0, m.sender_id, m.seq};
    }
  };

  const Channel& channel(std::size_t type) const {
    if (type >= channels_.size()) fail(ErrorCode::UnknownMessageType, "type index " + std::to_string(type));
    return channels_[type];
  }

  std::vector<Channel> channels_;
  PostBuffer pending_;
};

/// Free-function form of MessageBoard::post.
inline void post_message(MessageBoard& board, Message msg) { board.post(std::move(msg)); }

inline std::vector<Message> read_messages(const MessageBoard& board, std::string_view type,
                                          const MessageFilter& filter = {}) {
  return board.read(type, filter);
}

}  // namespace flame
