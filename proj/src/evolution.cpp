#include "evonas/evolution.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "evonas/genome_io.hpp"
#include "evonas/seeds.hpp"

namespace evonas {

namespace {

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::mt19937_64& rng) {
  std::vector<std::size_t> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> dist(i, n - 1);
    std::swap(indices[i], indices[dist(rng)]);
  }
  indices.resize(k);
  return indices;
}

struct EvalTask {
  std::uint64_t model_id = 0;
  std::optional<std::uint64_t> parent_id;
  Genome genome;
  std::vector<int> mutation_mask;
  HurdleSchedule schedule_snapshot;  // hurdles observed at issue time stay valid
};

struct EvalResult {
  EvalTask task;
  double fitness = 0.0;
  std::uint64_t steps_used = 0;
  std::vector<GateRecord> gates;
  BudgetLedger ledger;  // merged into the owner's ledger on completion
  bool failed = false;
  std::string error;
};

EvalResult evaluate_candidate(EvalTask task, const FitnessMode& mode,
                              const Evaluator& evaluator) {
  EvalResult result;
  result.task = std::move(task);
  try {
    if (mode.kind == FitnessModeKind::kPdh) {
      HurdleOutcome outcome = fitness_with_hurdles(
          result.task.genome, result.task.schedule_snapshot, evaluator, result.ledger);
      result.fitness = outcome.fitness;
      result.steps_used = outcome.steps_used;
      result.gates = std::move(outcome.gates);
    } else {
      result.ledger.models_evaluated += 1;
      result.ledger.record_steps(genome_hash(result.task.genome), mode.fixed_steps);
      result.steps_used = mode.fixed_steps;
      result.fitness = evaluator.evaluate(result.task.genome, mode.fixed_steps, 0);
    }
  } catch (const EvaluationError& e) {
    result.failed = true;
    result.error = e.what();
  }
  return result;
}

/// Single-producer single-consumer-ish queues guarded by one mutex; the
/// worker pool is small and evaluations dominate, so contention is moot.
class WorkerPool {
 public:
  WorkerPool(int worker_count, const FitnessMode& mode, const Evaluator& evaluator)
      : mode_(mode), evaluator_(evaluator) {
    for (int i = 0; i < worker_count; ++i)
      workers_.emplace_back([this] { worker_loop(); });
  }

  ~WorkerPool() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      closed_ = true;
    }
    task_ready_.notify_all();
    for (std::thread& t : workers_) t.join();
  }

  void submit(EvalTask task) {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      tasks_.push_back(std::move(task));
    }
    task_ready_.notify_one();
  }

  EvalResult wait_result() {
    std::unique_lock<std::mutex> lock(mutex_);
    result_ready_.wait(lock, [this] { return !results_.empty(); });
    EvalResult result = std::move(results_.front());
    results_.pop_front();
    return result;
  }

 private:
  void worker_loop() {
    while (true) {
      EvalTask task;
      {
        std::unique_lock<std::mutex> lock(mutex_);
        task_ready_.wait(lock, [this] { return closed_ || !tasks_.empty(); });
        if (tasks_.empty()) return;
        task = std::move(tasks_.front());
        tasks_.pop_front();
      }
      EvalResult result = evaluate_candidate(std::move(task), mode_, evaluator_);
      {
        std::lock_guard<std::mutex> lock(mutex_);
        results_.push_back(std::move(result));
      }
      result_ready_.notify_one();
    }
  }

  const FitnessMode& mode_;
  const Evaluator& evaluator_;
  std::mutex mutex_;
  std::condition_variable task_ready_;
  std::condition_variable result_ready_;
  std::deque<EvalTask> tasks_;
  std::deque<EvalResult> results_;
  bool closed_ = false;
  std::vector<std::thread> workers_;
};

class SearchDriver {
 public:
  SearchDriver(SearchState& state, const Evaluator& evaluator, const EventSink& sink)
      : state_(state), evaluator_(evaluator), sink_(sink) {}

  void initialize() {
    state_.population = Population(state_.config.population_capacity);
    state_.schedule.step_increments = state_.config.fitness_mode.step_increments;
    state_.schedule.models_per_hurdle = state_.config.fitness_mode.models_per_hurdle;
    state_.schedule.hurdles.clear();
    for (int i = 0; i < state_.config.population_capacity; ++i) {
      Genome genome = state_.config.seed_mode == SeedMode::kTransformerSeed
                          ? transformer_seed()
                          : random_genome(state_.rng, state_.config.validation);
      EvalTask task;
      task.model_id = state_.next_model_id++;
      task.genome = std::move(genome);
      task.schedule_snapshot = state_.schedule;
      EvalResult result =
          evaluate_candidate(std::move(task), state_.config.fitness_mode, evaluator_);
      state_.ledger.merge(result.ledger);
      if (result.failed)
        throw EvaluationError("initial population evaluation failed: " + result.error);
      Individual member = make_individual(result);
      emit_member_event(EventType::kInit, member);
      state_.population.add(std::move(member));
      if (state_.config.count_init_toward_hurdle) {
        state_.models_since_last_hurdle += 1;
        maybe_emit_hurdle();
      }
    }
  }

  void run() {
    if (state_.config.worker_count <= 1)
      run_single_worker();
    else
      run_worker_pool();
  }

 private:
  Individual make_individual(const EvalResult& result) {
    Individual member;
    member.genome = result.task.genome;
    member.model_id = result.task.model_id;
    member.genome_id = genome_hash(member.genome);
    member.parent_id = result.task.parent_id;
    member.fitness = result.fitness;
    member.steps_trained = result.steps_used;
    member.created_index = result.task.model_id;
    return member;
  }

  void emit(Event event) {
    event.order = state_.event_count++;
    if (sink_) sink_(event);
  }

  void emit_member_event(EventType type, const Individual& member) {
    Event event;
    event.type = type;
    event.model_id = member.model_id;
    event.parent_id = member.parent_id;
    event.steps = member.steps_trained;
    event.fitness = member.fitness;
    event.genome_text = serialize(member.genome);
    emit(std::move(event));
    state_.evaluated.push_back(member);
  }

  void maybe_emit_hurdle() {
    if (state_.config.fitness_mode.kind != FitnessModeKind::kPdh) return;
    const std::size_t before = state_.schedule.hurdles.size();
    if (maybe_create_hurdle(state_.schedule, state_.population,
                            state_.models_since_last_hurdle)) {
      Event event;
      event.type = EventType::kHurdleCreated;
      event.hurdle_index = static_cast<int>(before);
      event.hurdle_value = state_.schedule.hurdles.back();
      emit(std::move(event));
    }
  }

  void maybe_switch_config() {
    if (state_.mutation_switch_applied || !state_.config.mutation_switch) return;
    const MutationSwitch& sw = *state_.config.mutation_switch;
    if (state_.children_produced < sw.at_child_models) return;
    state_.config.mutation_rate = sw.new_rate;
    if (sw.readd_none_normalization)
      state_.config.validation.space.allow_none_normalization = true;
    state_.mutation_switch_applied = true;
    Event event;
    event.type = EventType::kConfigSwitch;
    event.note = "mutation_rate=" + std::to_string(sw.new_rate) +
                 (sw.readd_none_normalization ? ",normalization+=none" : "");
    emit(std::move(event));
  }

  bool budget_remaining() const {
    if (state_.aborted) return false;
    if (state_.config.total_model_budget)
      return state_.children_produced < *state_.config.total_model_budget;
    return state_.ledger.total_steps_consumed < *state_.config.total_step_budget;
  }

  EvalTask issue_task() {
    maybe_switch_config();
    const Individual& parent =
        select_parent(state_.population, state_.config.parent_subpop_size, state_.rng);
    MutationDraw draw =
        mutate_with_mask(parent.genome, state_.config.mutation_rate, state_.rng,
                         state_.config.validation);
    EvalTask task;
    task.model_id = state_.next_model_id++;
    task.parent_id = parent.model_id;
    task.genome = std::move(draw.child);
    task.mutation_mask = std::move(draw.mask);
    task.schedule_snapshot = state_.schedule;
    state_.children_produced += 1;

    Event event;
    event.type = EventType::kEvalStart;
    event.model_id = task.model_id;
    event.parent_id = task.parent_id;
    event.mutation_mask = task.mutation_mask;
    emit(std::move(event));
    return task;
  }

  void process_result(const EvalResult& result) {
    state_.ledger.merge(result.ledger);
    for (const GateRecord& gate : result.gates) {
      Event event;
      event.type = EventType::kHurdleGate;
      event.model_id = result.task.model_id;
      event.hurdle_index = gate.hurdle_index;
      event.hurdle_value = gate.hurdle;
      event.fitness = gate.fitness;
      event.passed = gate.passed;
      event.steps = gate.cumulative_steps;
      emit(std::move(event));
    }
    if (result.failed) {
      Event event;
      event.type = EventType::kEvalDone;
      event.model_id = result.task.model_id;
      event.parent_id = result.task.parent_id;
      event.note = "failed: " + result.error;
      emit(std::move(event));
      state_.consecutive_failures += 1;
      if (state_.consecutive_failures > state_.config.max_consecutive_failures)
        state_.aborted = true;
      return;
    }
    state_.consecutive_failures = 0;

    Individual child = make_individual(result);
    {
      Event event;
      event.type = EventType::kEvalDone;
      event.model_id = child.model_id;
      event.parent_id = child.parent_id;
      event.steps = child.steps_trained;
      event.fitness = child.fitness;
      emit(std::move(event));
      state_.evaluated.push_back(child);
    }

    Individual victim = kill_and_insert(state_.population, child,
                                        state_.config.kill_subpop_size, state_.rng);
    {
      Event event;
      event.type = EventType::kKill;
      event.model_id = victim.model_id;
      event.fitness = victim.fitness;
      event.steps = victim.steps_trained;
      emit(std::move(event));
    }
    {
      Event event;
      event.type = EventType::kInsert;
      event.model_id = child.model_id;
      event.parent_id = child.parent_id;
      event.steps = child.steps_trained;
      event.fitness = child.fitness;
      event.genome_text = serialize(child.genome);
      emit(std::move(event));
    }
    state_.models_since_last_hurdle += 1;
    maybe_emit_hurdle();
  }

  void run_single_worker() {
    while (budget_remaining()) {
      EvalTask task = issue_task();
      EvalResult result =
          evaluate_candidate(std::move(task), state_.config.fitness_mode, evaluator_);
      process_result(result);
    }
  }

  void run_worker_pool() {
    WorkerPool pool(state_.config.worker_count, state_.config.fitness_mode, evaluator_);
    int in_flight = 0;
    while (true) {
      while (in_flight < state_.config.worker_count && budget_remaining()) {
        pool.submit(issue_task());
        ++in_flight;
      }
      if (in_flight == 0) break;
      EvalResult result = pool.wait_result();  // completion order
      --in_flight;
      process_result(result);
    }
  }

  SearchState& state_;
  const Evaluator& evaluator_;
  const EventSink& sink_;
};

}  // namespace

void check_config(const SearchConfig& config) {
  if (config.population_capacity < 1)
    throw ConfigError("population_capacity must be >= 1");
  if (config.parent_subpop_size < 1 ||
      config.parent_subpop_size > config.population_capacity)
    throw ConfigError("parent_subpop_size must lie in [1, population_capacity]");
  if (config.kill_subpop_size < 1 ||
      config.kill_subpop_size > config.population_capacity)
    throw ConfigError("kill_subpop_size must lie in [1, population_capacity]");
  if (config.mutation_rate < 0.0 || config.mutation_rate > 1.0)
    throw ConfigError("mutation_rate must lie in [0, 1]");
  if (config.total_model_budget.has_value() == config.total_step_budget.has_value())
    throw ConfigError("exactly one of total_model_budget/total_step_budget must be set");
  if (config.worker_count < 1) throw ConfigError("worker_count must be >= 1");
  if (config.fitness_mode.kind == FitnessModeKind::kPdh) {
    if (config.fitness_mode.step_increments.empty())
      throw ConfigError("fitness_mode.step_increments must be non-empty");
    for (std::uint64_t s : config.fitness_mode.step_increments)
      if (s == 0) throw ConfigError("fitness_mode.step_increments must be positive");
    if (config.fitness_mode.models_per_hurdle < 1)
      throw ConfigError("fitness_mode.models_per_hurdle must be >= 1");
  } else if (config.fitness_mode.fixed_steps == 0) {
    throw ConfigError("fitness_mode.fixed_steps must be positive");
  }
  if (config.max_consecutive_failures < 0)
    throw ConfigError("max_consecutive_failures must be >= 0");
  if (config.validation.max_resample_attempts < 1)
    throw ConfigError("validation.max_resample_attempts must be >= 1");
}

const Individual& select_parent(const Population& population, int subpop_size,
                                std::mt19937_64& rng) {
  const std::vector<std::size_t> sample = sample_without_replacement(
      population.size(), static_cast<std::size_t>(subpop_size), rng);
  const Individual* best = nullptr;
  for (std::size_t index : sample) {
    const Individual& candidate = population.at(index);
    if (best == nullptr || candidate.fitness > best->fitness ||
        (candidate.fitness == best->fitness &&
         candidate.created_index < best->created_index))
      best = &candidate;
  }
  return *best;
}

Individual kill_and_insert(Population& population, Individual child, int subpop_size,
                           std::mt19937_64& rng) {
  const std::vector<std::size_t> sample = sample_without_replacement(
      population.size(), static_cast<std::size_t>(subpop_size), rng);
  std::size_t victim = sample.front();
  for (std::size_t index : sample) {
    const Individual& candidate = population.at(index);
    const Individual& current = population.at(victim);
    if (candidate.fitness < current.fitness ||
        (candidate.fitness == current.fitness &&
         candidate.created_index > current.created_index))
      victim = index;
  }
  Individual removed = population.remove_at(victim);
  population.add(std::move(child));
  return removed;
}

SearchResult run_search(const SearchConfig& config, const Evaluator& evaluator,
                        const EventSink& sink) {
  check_config(config);
  SearchState state;
  state.config = config;
  state.rng.seed(config.rng_seed);
  std::vector<Event> events;
  EventSink recording = [&events, &sink](const Event& event) {
    events.push_back(event);
    if (sink) sink(event);
  };
  SearchDriver driver(state, evaluator, recording);
  driver.initialize();
  driver.run();
  return SearchResult{std::move(state), std::move(events)};
}

SearchResult resume_search(SearchState state, const Evaluator& evaluator,
                           const EventSink& sink) {
  check_config(state.config);
  std::vector<Event> events;
  EventSink recording = [&events, &sink](const Event& event) {
    events.push_back(event);
    if (sink) sink(event);
  };
  SearchDriver driver(state, evaluator, recording);
  driver.run();
  return SearchResult{std::move(state), std::move(events)};
}

std::vector<Individual> top_k(const SearchResult& result, std::size_t k) {
  std::vector<Individual> all = result.state.evaluated;
  std::sort(all.begin(), all.end(), [](const Individual& a, const Individual& b) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    return a.created_index < b.created_index;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace evonas
