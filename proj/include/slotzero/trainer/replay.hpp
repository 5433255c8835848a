#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "slotzero/model/params.hpp"
#include "slotzero/slots/encoder.hpp"

namespace sz::trainer {

struct TransitionRecord {
  slots::SlotSet slots;       // s_t
  slots::SlotSet next_slots;  // s_{t+1}, the consistency target
  model::ModelAction action;
  double reward = 0.0;        // u_t
  bool done = false;          // contact ended the episode on this step
  bool truncated = false;     // the horizon ended the episode on this step
  std::vector<double> policy;                  // search policy over root actions / candidates
  std::vector<model::ModelAction> candidates;  // continuous roots only
  double search_value = 0.0;
  std::uint64_t episode = 0;
  std::int64_t position = 0;  // step index within the episode
  std::int64_t insertion_iteration = 0;

  bool ends_episode() const { return done || truncated; }
  bool operator==(const TransitionRecord&) const = default;
};

/// Bounded FIFO of transitions. Episodes are inserted whole, so the records of one
/// episode are always contiguous.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::int64_t capacity);

  void insert(TransitionRecord record);
  void insert_episode(std::vector<TransitionRecord> episode);

  std::size_t size() const { return records_.size(); }
  std::int64_t capacity() const { return capacity_; }
  std::int64_t total_inserted() const { return total_; }
  const TransitionRecord& at(std::size_t index) const { return records_.at(index); }

  /// Global insertion index of the record at buffer position `index`.
  std::int64_t insertion_index(std::size_t index) const;
  /// Insertions made after this record: 0 for the newest.
  std::int64_t age(std::size_t index) const;
  /// True when position index + offset holds the same episode's step offset later.
  bool same_episode(std::size_t index, std::size_t offset) const;

  /// Uniform draws with replacement.
  std::vector<std::size_t> sample(std::size_t count, std::mt19937_64& rng) const;

  const std::deque<TransitionRecord>& records() const { return records_; }
  /// Rebuilds a buffer from saved contents.
  static ReplayBuffer restore(std::int64_t capacity, std::int64_t total,
                              std::deque<TransitionRecord> records);
  bool operator==(const ReplayBuffer&) const = default;

 private:
  std::int64_t capacity_;
  std::int64_t total_ = 0;
  std::deque<TransitionRecord> records_;
};

}  // namespace sz::trainer
