#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "evonas/genome.hpp"

namespace evonas {

struct Individual {
  Genome genome;
  std::uint64_t model_id = 0;  // unique per evaluation, equals created_index
  std::uint64_t genome_id = 0;  // content hash
  std::optional<std::uint64_t> parent_id;
  double fitness = 0.0;
  std::uint64_t steps_trained = 0;
  std::uint64_t created_index = 0;
};

/// Fixed-capacity multiset of evaluated individuals. Kill-then-insert keeps
/// the size at capacity once initialization fills it.
class Population {
 public:
  Population() = default;
  explicit Population(std::size_t capacity) : capacity_(capacity) {}

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return members_.size(); }
  bool full() const { return members_.size() == capacity_; }
  const std::vector<Individual>& members() const { return members_; }
  const Individual& at(std::size_t i) const { return members_.at(i); }

  void add(Individual individual) {
    if (members_.size() >= capacity_)
      throw std::logic_error("population already at capacity");
    members_.push_back(std::move(individual));
  }

  Individual remove_at(std::size_t i) {
    Individual removed = std::move(members_.at(i));
    members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(i));
    return removed;
  }

 private:
  std::vector<Individual> members_;
  std::size_t capacity_ = 0;
};

}  // namespace evonas
