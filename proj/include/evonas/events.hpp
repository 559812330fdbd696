#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evonas/population.hpp"

namespace evonas {

enum class EventType {
  kInit,
  kEvalStart,
  kHurdleGate,
  kEvalDone,
  kHurdleCreated,
  kKill,
  kInsert,
  kConfigSwitch,
};

std::string to_string(EventType type);
EventType event_type_from_string(const std::string& text);

/// One line of the append-only search log. Field presence depends on the
/// event type; `order` is the wall-order index of the state transaction.
struct Event {
  EventType type = EventType::kInit;
  std::uint64_t order = 0;
  std::optional<std::uint64_t> model_id;
  std::optional<std::uint64_t> parent_id;
  std::optional<std::uint64_t> steps;
  std::optional<double> fitness;
  std::optional<int> hurdle_index;
  std::optional<double> hurdle_value;
  std::optional<bool> passed;
  std::optional<std::string> genome_text;        // canonical genome JSON
  std::optional<std::vector<int>> mutation_mask;  // flat field indices
  std::optional<std::string> note;
};

std::string event_to_json_line(const Event& event);
Event event_from_json_line(const std::string& line);

std::vector<Event> read_event_log(const std::string& path);
void append_event_log(const std::string& path, const Event& event);

/// Final population as the fold of INIT/KILL/INSERT events; the search state
/// is fully determined by its event log.
std::vector<Individual> replay_population(const std::vector<Event>& events);

using EventSink = std::function<void(const Event&)>;

}  // namespace evonas
