#include "doctest.h"

#include <random>

#include "evonas/genome_io.hpp"
#include "evonas/sampling.hpp"
#include "evonas/seeds.hpp"

using namespace evonas;

namespace {

ValidationConfig desk_constraints() {
  ValidationConfig config;
  config.model.input_embedding_dim = 64;
  config.model.vocab_size = 1024;
  config.model.min_params = 250'000;
  config.model.max_params = 2'500'000;
  config.max_resample_attempts = 2'000'000;
  return config;
}

}  // namespace

TEST_CASE("seed genomes round-trip bit-exactly") {
  for (const Genome* genome : {&transformer_seed(), &et_seed()}) {
    const std::string text = serialize(*genome);
    const Genome parsed = deserialize(text);
    CHECK(parsed == *genome);
    CHECK(serialize(parsed) == text);
  }
}

TEST_CASE("checked-in seed files parse to the canonical seeds") {
  CHECK(deserialize(transformer_seed_text()) == transformer_seed());
  CHECK(deserialize(et_seed_text()) == et_seed());
}

TEST_CASE("out-of-vocabulary values raise VocabError") {
  std::string text = serialize(transformer_seed());

  SUBCASE("relative dim 11") {
    auto pos = text.find("\"rel_dim\": 8");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "\"rel_dim\": 11");
    CHECK_THROWS_AS(deserialize(text), VocabError);
  }
  SUBCASE("attend_to_encoder in an encoder block") {
    auto pos = text.find("attention_8");  // first hit is encoder block 0
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 11, "attend_to_encoder");
    CHECK_THROWS_AS(deserialize(text), VocabError);
  }
  SUBCASE("unknown layer name") {
    auto pos = text.find("attention_8");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 11, "attention_9");
    CHECK_THROWS_AS(deserialize(text), VocabError);
  }
  SUBCASE("cell count outside [1,6]") {
    auto pos = text.find("\"decoder_cells\": 3");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 18, "\"decoder_cells\": 7");
    CHECK_THROWS_AS(deserialize(text), VocabError);
  }
  SUBCASE("input index outside [0, i]") {
    auto pos = text.find("\"input\": 0");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 10, "\"input\": 3");
    CHECK_THROWS_AS(deserialize(text), VocabError);
  }
}

TEST_CASE("malformed documents raise ParseError") {
  CHECK_THROWS_AS(deserialize("not json"), ParseError);
  CHECK_THROWS_AS(deserialize("{}"), ParseError);
  CHECK_THROWS_AS(deserialize("{\"encoder_blocks\": []}"), ParseError);
  std::string text = serialize(transformer_seed());
  auto pos = text.find("\"norm\"");
  text.replace(pos, 6, "\"nrm\"");
  CHECK_THROWS_AS(deserialize(text), ParseError);
}

TEST_CASE("random genomes round-trip with stable hashes") {
  std::mt19937_64 rng(2024);
  const ValidationConfig constraints = desk_constraints();
  for (int i = 0; i < 100; ++i) {
    const Genome genome = random_genome(rng, constraints);
    const Genome parsed = deserialize(serialize(genome));
    CHECK(parsed == genome);
    CHECK(genome_hash(parsed) == genome_hash(genome));
  }
}
