#include "evonas/events.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "evonas/genome_io.hpp"

namespace evonas {

namespace {
using OrderedJson = nlohmann::ordered_json;
}

std::string to_string(EventType type) {
  switch (type) {
    case EventType::kInit: return "INIT";
    case EventType::kEvalStart: return "EVAL_START";
    case EventType::kHurdleGate: return "HURDLE_GATE";
    case EventType::kEvalDone: return "EVAL_DONE";
    case EventType::kHurdleCreated: return "HURDLE_CREATED";
    case EventType::kKill: return "KILL";
    case EventType::kInsert: return "INSERT";
    case EventType::kConfigSwitch: return "CONFIG_SWITCH";
  }
  return "?";
}

EventType event_type_from_string(const std::string& text) {
  for (EventType type :
       {EventType::kInit, EventType::kEvalStart, EventType::kHurdleGate,
        EventType::kEvalDone, EventType::kHurdleCreated, EventType::kKill,
        EventType::kInsert, EventType::kConfigSwitch})
    if (to_string(type) == text) return type;
  throw std::invalid_argument("unknown event type '" + text + "'");
}

std::string event_to_json_line(const Event& event) {
  OrderedJson j;
  j["event"] = to_string(event.type);
  j["order"] = event.order;
  if (event.model_id) j["model"] = *event.model_id;
  if (event.parent_id) j["parent"] = *event.parent_id;
  if (event.steps) j["steps"] = *event.steps;
  if (event.fitness) j["fitness"] = *event.fitness;
  if (event.hurdle_index) j["hurdle_index"] = *event.hurdle_index;
  if (event.hurdle_value) j["hurdle"] = *event.hurdle_value;
  if (event.passed) j["passed"] = *event.passed;
  if (event.mutation_mask) j["mutation_mask"] = *event.mutation_mask;
  if (event.genome_text) j["genome"] = OrderedJson::parse(*event.genome_text);
  if (event.note) j["note"] = *event.note;
  return j.dump();
}

Event event_from_json_line(const std::string& line) {
  OrderedJson j = OrderedJson::parse(line);
  Event event;
  event.type = event_type_from_string(j.at("event").get<std::string>());
  event.order = j.at("order").get<std::uint64_t>();
  if (j.contains("model")) event.model_id = j["model"].get<std::uint64_t>();
  if (j.contains("parent")) event.parent_id = j["parent"].get<std::uint64_t>();
  if (j.contains("steps")) event.steps = j["steps"].get<std::uint64_t>();
  if (j.contains("fitness")) event.fitness = j["fitness"].get<double>();
  if (j.contains("hurdle_index")) event.hurdle_index = j["hurdle_index"].get<int>();
  if (j.contains("hurdle")) event.hurdle_value = j["hurdle"].get<double>();
  if (j.contains("passed")) event.passed = j["passed"].get<bool>();
  if (j.contains("mutation_mask"))
    event.mutation_mask = j["mutation_mask"].get<std::vector<int>>();
  if (j.contains("genome")) event.genome_text = j["genome"].dump();
  if (j.contains("note")) event.note = j["note"].get<std::string>();
  return event;
}

std::vector<Event> read_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open event log '" + path + "'");
  std::vector<Event> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(event_from_json_line(line));
  }
  return events;
}

void append_event_log(const std::string& path, const Event& event) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to event log '" + path + "'");
  out << event_to_json_line(event) << "\n";
}

std::vector<Individual> replay_population(const std::vector<Event>& events) {
  std::vector<Individual> members;
  for (const Event& event : events) {
    switch (event.type) {
      case EventType::kInit:
      case EventType::kInsert: {
        Individual member;
        member.model_id = event.model_id.value();
        member.created_index = member.model_id;
        member.parent_id = event.parent_id;
        member.fitness = event.fitness.value();
        member.steps_trained = event.steps.value();
        member.genome = deserialize(event.genome_text.value());
        member.genome_id = genome_hash(member.genome);
        members.push_back(std::move(member));
        break;
      }
      case EventType::kKill: {
        const std::uint64_t victim = event.model_id.value();
        for (std::size_t i = 0; i < members.size(); ++i) {
          if (members[i].model_id == victim) {
            members.erase(members.begin() + static_cast<std::ptrdiff_t>(i));
            break;
          }
        }
        break;
      }
      default:
        break;
    }
  }
  return members;
}

}  // namespace evonas
