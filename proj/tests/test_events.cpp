#include "doctest.h"

#include <cstdio>

#include "evonas/events.hpp"
#include "evonas/genome_io.hpp"
#include "evonas/seeds.hpp"

using namespace evonas;

TEST_CASE("event lines round-trip through JSON") {
  Event event;
  event.type = EventType::kEvalDone;
  event.order = 42;
  event.model_id = 7;
  event.parent_id = 3;
  event.steps = 30;
  event.fitness = -1.6180339887;
  const std::string line = event_to_json_line(event);
  const Event parsed = event_from_json_line(line);
  CHECK(parsed.type == EventType::kEvalDone);
  CHECK(parsed.order == 42);
  CHECK(parsed.model_id == 7);
  CHECK(parsed.parent_id == 3);
  CHECK(parsed.fitness == event.fitness);
  CHECK(event_to_json_line(parsed) == line);
}

TEST_CASE("gate events carry the hurdle context") {
  Event event;
  event.type = EventType::kHurdleGate;
  event.order = 3;
  event.model_id = 12;
  event.hurdle_index = 1;
  event.hurdle_value = -1.9;
  event.passed = false;
  event.steps = 20;
  const Event parsed = event_from_json_line(event_to_json_line(event));
  CHECK(parsed.hurdle_index == 1);
  CHECK(parsed.hurdle_value == -1.9);
  CHECK(parsed.passed == false);
}

TEST_CASE("events with genomes embed the canonical document") {
  Event event;
  event.type = EventType::kInsert;
  event.order = 0;
  event.model_id = 1;
  event.steps = 10;
  event.fitness = -2.0;
  event.genome_text = serialize(et_seed());
  const Event parsed = event_from_json_line(event_to_json_line(event));
  CHECK(deserialize(*parsed.genome_text) == et_seed());
}

TEST_CASE("replay folds INIT, KILL and INSERT into the surviving set") {
  std::vector<Event> events;
  auto add = [&events](EventType type, std::uint64_t model, double fitness) {
    Event event;
    event.type = type;
    event.order = events.size();
    event.model_id = model;
    if (type != EventType::kKill) {
      event.steps = 10;
      event.fitness = fitness;
      event.genome_text = serialize(transformer_seed());
    } else {
      event.fitness = fitness;
      event.steps = 10;
    }
    events.push_back(event);
  };
  add(EventType::kInit, 0, -2.0);
  add(EventType::kInit, 1, -2.1);
  add(EventType::kInsert, 2, -1.8);
  add(EventType::kKill, 0, -2.0);
  add(EventType::kInsert, 3, -1.7);
  add(EventType::kKill, 2, -1.8);

  const std::vector<Individual> members = replay_population(events);
  REQUIRE(members.size() == 2);
  CHECK(members[0].model_id == 1);
  CHECK(members[1].model_id == 3);
  CHECK(members[1].fitness == -1.7);
}

TEST_CASE("event logs write and read back through files") {
  const std::string path = "test_events_tmp.jsonl";
  std::remove(path.c_str());
  for (int i = 0; i < 3; ++i) {
    Event event;
    event.type = EventType::kHurdleCreated;
    event.order = i;
    event.hurdle_index = i;
    event.hurdle_value = -2.0 + i * 0.1;
    append_event_log(path, event);
  }
  const std::vector<Event> events = read_event_log(path);
  REQUIRE(events.size() == 3);
  CHECK(events[2].hurdle_value == doctest::Approx(-1.8));
  std::remove(path.c_str());
}
