#include "slotzero/trainer/replay.hpp"

#include <cmath>
#include <stdexcept>

namespace sz::trainer {

ReplayBuffer::ReplayBuffer(std::int64_t capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::insert(TransitionRecord record) {
  if (!std::isfinite(record.reward)) throw std::invalid_argument("ReplayBuffer: non-finite reward");
  if (!records_.empty()) {
    const auto& last = records_.back();
    if (last.episode == record.episode && record.position <= last.position) {
      throw std::invalid_argument("ReplayBuffer: positions must increase within an episode");
    }
  }
  records_.push_back(std::move(record));
  ++total_;
  while (static_cast<std::int64_t>(records_.size()) > capacity_) records_.pop_front();
}

void ReplayBuffer::insert_episode(std::vector<TransitionRecord> episode) {
  for (auto& r : episode) insert(std::move(r));
}

std::int64_t ReplayBuffer::insertion_index(std::size_t index) const {
  return total_ - static_cast<std::int64_t>(records_.size()) + static_cast<std::int64_t>(index);
}

std::int64_t ReplayBuffer::age(std::size_t index) const {
  return total_ - 1 - insertion_index(index);
}

bool ReplayBuffer::same_episode(std::size_t index, std::size_t offset) const {
  const std::size_t j = index + offset;
  if (j >= records_.size()) return false;
  const auto& a = records_[index];
  const auto& b = records_[j];
  return a.episode == b.episode && b.position == a.position + static_cast<std::int64_t>(offset);
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t count, std::mt19937_64& rng) const {
  if (records_.empty()) throw std::logic_error("ReplayBuffer: sample from an empty buffer");
  std::uniform_int_distribution<std::size_t> pick(0, records_.size() - 1);
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = pick(rng);
  return out;
}

ReplayBuffer ReplayBuffer::restore(std::int64_t capacity, std::int64_t total,
                                   std::deque<TransitionRecord> records) {
  ReplayBuffer buffer(capacity);
  if (static_cast<std::int64_t>(records.size()) > capacity ||
      total < static_cast<std::int64_t>(records.size())) {
    throw std::invalid_argument("ReplayBuffer::restore: inconsistent sizes");
  }
  buffer.total_ = total;
  buffer.records_ = std::move(records);
  return buffer;
}

}  // namespace sz::trainer
