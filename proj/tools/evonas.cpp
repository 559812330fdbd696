// Command-line front end: searches, the ablation harness, and genome tooling.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "evonas/ablation.hpp"
#include "evonas/checkpoint.hpp"
#include "evonas/config.hpp"
#include "evonas/config_json.hpp"
#include "evonas/events.hpp"
#include "evonas/evolution.hpp"
#include "evonas/forward.hpp"
#include "evonas/genome_io.hpp"
#include "evonas/seeds.hpp"

namespace fs = std::filesystem;
using OrderedJson = nlohmann::ordered_json;
using namespace evonas;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainFailure = 1;
constexpr int kExitUsage = 2;

std::size_t count_lines(const std::string& path) {
  std::ifstream in(path);
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return lines;
}

void write_search_csv(const SearchResult& result, const SimulatedOracle& oracle,
                      const std::string& arm, const std::string& path) {
  std::ofstream out(path);
  out << "model_id,parent_id,created_index,steps,fitness,true_asymptote,arm,"
         "replication\n";
  for (const Individual& member : result.state.evaluated) {
    out << member.model_id << ",";
    if (member.parent_id) out << *member.parent_id;
    out << "," << member.created_index << "," << member.steps_trained << ","
        << member.fitness << "," << oracle.true_asymptote(member.genome) << "," << arm
        << ",0\n";
  }
}

void write_search_summary(const SearchResult& result, const SimulatedOracle& oracle,
                          const ExperimentConfig& config, const std::string& path) {
  const std::vector<Individual> best = top_k(result, 1);
  OrderedJson j;
  j["experiment"] = config.name;
  j["children_produced"] = result.state.children_produced;
  j["models_evaluated"] = result.ledger().models_evaluated;
  j["total_steps_consumed"] = result.ledger().total_steps_consumed;
  j["hurdles"] = result.schedule().hurdles;
  j["aborted"] = result.aborted();
  if (!best.empty()) {
    OrderedJson top;
    top["model_id"] = best.front().model_id;
    top["fitness"] = best.front().fitness;
    top["perplexity"] = perplexity_from_fitness(best.front().fitness);
    top["steps_trained"] = best.front().steps_trained;
    top["true_asymptote"] = oracle.true_asymptote(best.front().genome);
    j["top_model"] = top;
  }
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

int cmd_search(const std::optional<std::string>& config_path,
               const std::optional<std::string>& preset_name,
               const std::optional<std::uint64_t>& seed,
               const std::optional<int>& workers,
               const std::optional<std::uint64_t>& models,
               const std::optional<std::string>& resume_path,
               const std::string& out_dir) {
  fs::create_directories(out_dir);
  const std::string events_path = out_dir + "/events.jsonl";
  const std::string checkpoint_path = out_dir + "/checkpoint.json";

  std::ofstream events_out;
  EventSink sink = [&events_out](const Event& event) {
    events_out << event_to_json_line(event) << "\n";
  };

  if (resume_path) {
    Checkpoint checkpoint = load_checkpoint(*resume_path);
    if (models) checkpoint.state.config.total_model_budget = *models;
    if (workers) checkpoint.state.config.worker_count = *workers;
    if (fs::exists(events_path)) {
      const std::size_t lines = count_lines(events_path);
      if (lines != checkpoint.state.event_count) {
        std::cerr << "events log '" << events_path << "' has " << lines
                  << " lines but the checkpoint expects "
                  << checkpoint.state.event_count << "\n";
        return kExitDomainFailure;
      }
    } else if (checkpoint.state.event_count != 0) {
      std::cerr << "events log '" << events_path << "' missing for resume\n";
      return kExitDomainFailure;
    }
    events_out.open(events_path, std::ios::app);
    SimulatedOracle oracle(checkpoint.oracle, checkpoint.oracle_seed);
    SearchResult result = resume_search(std::move(checkpoint.state), oracle, sink);
    events_out.flush();
    save_checkpoint(Checkpoint{result.state, checkpoint.oracle, checkpoint.oracle_seed,
                               checkpoint.experiment_name},
                    checkpoint_path);
    ExperimentConfig summary_config;
    summary_config.name = checkpoint.experiment_name;
    write_search_summary(result, oracle, summary_config, out_dir + "/summary.json");
    write_search_csv(result, oracle, checkpoint.experiment_name,
                     out_dir + "/report.csv");
    const std::vector<Individual> best = top_k(result, 1);
    std::cout << "resumed search: " << result.state.children_produced
              << " children, top fitness " << best.front().fitness << " (perplexity "
              << perplexity_from_fitness(best.front().fitness) << ")\n";
    return result.aborted() ? kExitDomainFailure : kExitOk;
  }

  ExperimentConfig config =
      config_path ? load_experiment_file(*config_path)
                  : make_preset(preset_name.value_or("desk"));
  if (seed) {
    config.search.rng_seed = *seed;
    config.oracle_seed = *seed;
  }
  if (workers) config.search.worker_count = *workers;
  if (models) config.search.total_model_budget = *models;
  config.output_dir = out_dir;
  check_config(config.search);
  save_experiment_file(config, out_dir + "/resolved_config.json");

  events_out.open(events_path, std::ios::trunc);
  SimulatedOracle oracle(config.oracle, config.oracle_seed);
  SearchResult result = run_search(config.search, oracle, sink);
  events_out.flush();
  save_checkpoint(Checkpoint{result.state, config.oracle, config.oracle_seed,
                             config.name},
                  checkpoint_path);
  write_search_summary(result, oracle, config, out_dir + "/summary.json");
  write_search_csv(result, oracle, config.name, out_dir + "/report.csv");

  const std::vector<Individual> best = top_k(result, 1);
  std::cout << "search '" << config.name << "': " << result.state.children_produced
            << " children, " << result.ledger().total_steps_consumed
            << " steps, top fitness " << best.front().fitness << " (perplexity "
            << perplexity_from_fitness(best.front().fitness) << "), true asymptote "
            << oracle.true_asymptote(best.front().genome) << "\n";
  return result.aborted() ? kExitDomainFailure : kExitOk;
}

int cmd_ablation(const std::optional<std::string>& config_path,
                 const std::optional<std::string>& preset_name,
                 const std::optional<std::uint64_t>& seed,
                 const std::optional<int>& replications, const std::string& out_dir) {
  ExperimentConfig config =
      config_path ? load_experiment_file(*config_path)
                  : make_preset(preset_name.value_or("desk"));
  if (seed) {
    config.search.rng_seed = *seed;
    config.oracle_seed = *seed;
  }
  if (replications) config.ablation.replications = *replications;
  config.output_dir = out_dir;
  fs::create_directories(out_dir);
  save_experiment_file(config, out_dir + "/resolved_config.json");

  AblationReport report = run_ablation(config, &std::cout);
  write_report_csv(report, out_dir + "/report.csv");
  const std::string summary = ablation_summary_text(report);
  std::ofstream(out_dir + "/summary.txt") << summary;
  std::cout << summary;
  return kExitOk;
}

void print_branch(const std::string& label, const BranchGene& branch) {
  std::cout << "    " << label << ": input " << branch.input << " | "
            << to_string(branch.normalization) << " | " << to_string(branch.layer)
            << " | d" << branch.relative_dim << " | "
            << to_string(branch.activation) << "\n";
}

int cmd_genome_show(const std::string& path) {
  const Genome genome = load_genome_file(path);
  std::cout << "encoder (" << genome.encoder_cells << " cells)\n";
  for (int i = 0; i < kEncoderBlockCount; ++i) {
    const BlockGene& block = genome.encoder_blocks[i];
    std::cout << "  block " << i << " [" << to_string(block.combiner) << "]\n";
    print_branch("left ", block.left);
    print_branch("right", block.right);
  }
  std::cout << "decoder (" << genome.decoder_cells << " cells)\n";
  for (int i = 0; i < kDecoderBlockCount; ++i) {
    const BlockGene& block = genome.decoder_blocks[i];
    std::cout << "  block " << i << " [" << to_string(block.combiner) << "]\n";
    print_branch("left ", block.left);
    print_branch("right", block.right);
  }
  return kExitOk;
}

ModelConfig model_from_flags(int embedding, int vocab, std::int64_t min_params,
                             std::int64_t max_params) {
  ModelConfig model;
  model.input_embedding_dim = embedding;
  model.vocab_size = vocab;
  model.min_params = min_params;
  model.max_params = max_params;
  return model;
}

int cmd_genome_validate(const std::string& path, const ModelConfig& model) {
  const Genome genome = load_genome_file(path);
  ValidationConfig config;
  config.model = model;
  const ValidityReport report = validate(genome, config);
  if (report.valid) {
    std::cout << "valid\n";
    return kExitOk;
  }
  std::cout << "invalid:";
  for (ValidationFailure failure : report.failures)
    std::cout << " " << to_string(failure);
  std::cout << "\n";
  return kExitDomainFailure;
}

int cmd_genome_diff(const std::string& path_a, const std::string& path_b) {
  const Genome a = load_genome_file(path_a);
  const Genome b = load_genome_file(path_b);
  for (const FieldDiff& d : diff(a, b)) {
    std::cout << to_string(d.section);
    if (d.section != GeneSection::kCells)
      std::cout << " block " << d.block_index << " " << to_string(d.branch);
    std::cout << " " << to_string(d.field) << ": " << to_string(d.value_a) << " -> "
              << to_string(d.value_b) << "\n";
  }
  return kExitOk;
}

int cmd_genome_params(const std::string& path, const ModelConfig& model,
                      bool scaled) {
  const Genome genome = load_genome_file(path);
  if (scaled) {
    const ScaledArchitecture arch = scale_dimensions(genome, model);
    std::cout << "sigma " << arch.scale_factor << ", total params "
              << arch.total_params << "\n";
  } else {
    const double sigma = reference_sigma(model);
    std::cout << "sigma " << sigma << " (reference), total params "
              << param_count_at_scale(genome, model, sigma) << "\n";
  }
  return kExitOk;
}

OrderedJson cell_report(const CellGraph& cell, const CellWidths& widths) {
  OrderedJson nodes = OrderedJson::array();
  for (int i = 0; i < static_cast<int>(cell.blocks.size()); ++i) {
    const BlockGene& block = cell.blocks[i];
    const BranchGene* genes[2] = {&block.left, &block.right};
    for (int side = 0; side < 2; ++side) {
      const BranchGene& gene = *genes[side];
      const BranchDims& dims = widths.branch_dims[i][side];
      OrderedJson node;
      node["block"] = i;
      node["branch"] = side == 0 ? "left" : "right";
      node["input_state"] = gene.input;
      node["norm"] = to_string(gene.normalization);
      node["layer"] = to_string(gene.layer);
      node["rel_dim"] = gene.relative_dim;
      node["activation"] = to_string(gene.activation);
      node["in_width"] = dims.in;
      node["out_width"] = dims.out;
      node["params"] = dims.params;
      node["causal_shift"] = causal_shift(cell, gene);
      nodes.push_back(node);
    }
  }
  OrderedJson j;
  j["nodes"] = nodes;
  OrderedJson combiners = OrderedJson::array();
  for (const BlockGene& block : cell.blocks) combiners.push_back(to_string(block.combiner));
  j["combiners"] = combiners;
  j["state_widths"] = widths.state_width;
  j["unused_states_added_to_output"] = cell.unused_states;
  j["output_width"] = widths.output_width;
  j["cell_params"] = widths.cell_params;
  return j;
}

int cmd_genome_compose(const std::string& path, const ModelConfig& model,
                       const std::optional<std::string>& out_path) {
  const Genome genome = load_genome_file(path);
  const ScaledArchitecture arch =
      architecture_at_scale(genome, model, reference_sigma(model));
  OrderedJson j;
  j["scale_factor"] = arch.scale_factor;
  j["encoder_cells"] = genome.encoder_cells;
  j["decoder_cells"] = genome.decoder_cells;
  j["encoder"] = cell_report(arch.encoder, arch.encoder_widths);
  j["decoder"] = cell_report(arch.decoder, arch.decoder_widths);
  j["embedding_params"] =
      static_cast<std::int64_t>(model.vocab_size) * model.input_embedding_dim;
  j["total_params"] = arch.total_params;
  const std::string text = j.dump(2) + "\n";
  if (out_path) {
    std::ofstream out(*out_path);
    out << text;
  } else {
    std::cout << text;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evolutionary architecture search over sequence-model genomes"};
  app.require_subcommand(1);

  std::optional<std::string> config_path, preset_name, resume_path;
  std::optional<std::uint64_t> seed, models;
  std::optional<int> workers, replications;
  std::string out_dir = "out";

  CLI::App* search = app.add_subcommand("search", "run an evolutionary search");
  search->add_option("--config", config_path, "experiment config file");
  search->add_option("--preset", preset_name,
                     "named preset: desk, desk-5.1, desk-5.2, paper-5.1, paper-5.2");
  search->add_option("--seed", seed, "rng and oracle seed");
  search->add_option("--workers", workers, "concurrent evaluation workers");
  search->add_option("--models", models, "child model budget");
  search->add_option("--resume", resume_path, "resume from a checkpoint file");
  search->add_option("--out", out_dir, "output directory");

  CLI::App* ablation = app.add_subcommand(
      "ablation", "run the budget-equalized search-technique comparison");
  ablation->add_option("--config", config_path, "experiment config file");
  ablation->add_option("--preset", preset_name, "named preset");
  ablation->add_option("--seed", seed, "base seed");
  ablation->add_option("--replications", replications, "replications per arm");
  ablation->add_option("--out", out_dir, "output directory");

  CLI::App* genome = app.add_subcommand("genome", "genome file tooling");
  genome->require_subcommand(1);
  std::string genome_path, genome_path_b;
  std::optional<std::string> compose_out;
  int embedding = 512, vocab = 32768;
  std::int64_t min_params = 59'100'000, max_params = 64'100'000;
  bool params_scaled = false;

  CLI::App* show = genome->add_subcommand("show", "pretty-print a genome file");
  show->add_option("file", genome_path, "genome file")->required();

  CLI::App* validate_cmd = genome->add_subcommand("validate", "check search-space membership");
  validate_cmd->add_option("file", genome_path, "genome file")->required();
  validate_cmd->add_option("--embedding", embedding, "input embedding width");
  validate_cmd->add_option("--vocab", vocab, "vocabulary size");
  validate_cmd->add_option("--min-params", min_params, "parameter range lower bound");
  validate_cmd->add_option("--max-params", max_params, "parameter range upper bound");

  CLI::App* diff_cmd = genome->add_subcommand("diff", "field-level genome diff");
  diff_cmd->add_option("file_a", genome_path, "first genome")->required();
  diff_cmd->add_option("file_b", genome_path_b, "second genome")->required();

  CLI::App* params_cmd = genome->add_subcommand("params", "parameter counting");
  params_cmd->add_option("file", genome_path, "genome file")->required();
  params_cmd->add_option("--embedding", embedding, "input embedding width");
  params_cmd->add_option("--vocab", vocab, "vocabulary size");
  params_cmd->add_option("--min-params", min_params, "parameter range lower bound");
  params_cmd->add_option("--max-params", max_params, "parameter range upper bound");
  params_cmd->add_flag("--scaled", params_scaled,
                       "search for a scale inside the parameter range instead of "
                       "using the reference scale");

  CLI::App* compose_cmd =
      genome->add_subcommand("compose", "emit the composed graph description");
  compose_cmd->add_option("--genome", genome_path, "genome file")->required();
  bool report_flag = false;
  compose_cmd->add_flag("--report", report_flag, "emit the graph report document");
  compose_cmd->add_option("--embedding", embedding, "input embedding width");
  compose_cmd->add_option("--vocab", vocab, "vocabulary size");
  compose_cmd->add_option("--out", compose_out, "write the report to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (search->parsed())
      return cmd_search(config_path, preset_name, seed, workers, models, resume_path,
                        out_dir);
    if (ablation->parsed())
      return cmd_ablation(config_path, preset_name, seed, replications, out_dir);
    if (show->parsed()) return cmd_genome_show(genome_path);
    if (validate_cmd->parsed())
      return cmd_genome_validate(
          genome_path, model_from_flags(embedding, vocab, min_params, max_params));
    if (diff_cmd->parsed()) return cmd_genome_diff(genome_path, genome_path_b);
    if (params_cmd->parsed())
      return cmd_genome_params(
          genome_path, model_from_flags(embedding, vocab, min_params, max_params),
          params_scaled);
    if (compose_cmd->parsed())
      return cmd_genome_compose(
          genome_path, model_from_flags(embedding, vocab, min_params, max_params),
          compose_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainFailure;
  }
  return kExitUsage;
}
