#include "doctest.h"

#include <set>

#include "evonas/genome.hpp"
#include "evonas/seeds.hpp"

using namespace evonas;

TEST_CASE("flattened encoding has exactly 156 addressable fields") {
  CHECK(kGenomeFieldCount == 156);
  std::set<std::pair<int, int>> seen;  // (block-ish key, field) uniqueness proxy
  for (int i = 0; i < kGenomeFieldCount; ++i) {
    FieldRef ref = field_ref_at(i);
    CHECK(flat_index_of(ref) == i);
  }
  CHECK_THROWS(field_ref_at(156));
  CHECK_THROWS(field_ref_at(-1));
}

TEST_CASE("field order per block matches the encoding layout") {
  CHECK(field_ref_at(0).field == GeneField::kInput);
  CHECK(field_ref_at(0).branch == GeneBranch::kLeft);
  CHECK(field_ref_at(5).branch == GeneBranch::kRight);
  CHECK(field_ref_at(10).field == GeneField::kCombiner);
  CHECK(field_ref_at(11).block_index == 1);
  CHECK(field_ref_at(66).section == GeneSection::kDecoder);
  CHECK(field_ref_at(66).block_index == 0);
  CHECK(field_ref_at(154).field == GeneField::kEncoderCells);
  CHECK(field_ref_at(155).field == GeneField::kDecoderCells);
}

TEST_CASE("layer vocabulary sizes and ordering") {
  const auto& encoder = layer_vocabulary(false);
  const auto& decoder = layer_vocabulary(true);
  CHECK(encoder.size() == 25);
  CHECK(decoder.size() == 26);
  for (const LayerKind& layer : encoder)
    CHECK(layer.type != LayerType::kAttendToEncoder);
  CHECK(encoder.front() == standard_conv(1));
  CHECK(encoder.back() == dead_branch());
  CHECK(decoder[decoder.size() - 3] == attend_to_encoder());
}

TEST_CASE("unrepresentable layer parameter tuples are rejected") {
  CHECK_THROWS(standard_conv(5));
  CHECK_THROWS(separable_conv(4));
  CHECK_THROWS(lightweight_conv(9, 4));
  CHECK_THROWS(lightweight_conv(7, 2));
  CHECK_THROWS(attention(6));
}

TEST_CASE("layer string forms") {
  CHECK(to_string(separable_conv(9)) == "separable_conv_9x1");
  CHECK(to_string(attention(8)) == "attention_8");
  CHECK(to_string(lightweight_conv(7, 4)) == "lightweight_conv_7x1_r4");
  CHECK(to_string(standard_conv(1)) == "standard_conv_1x1");
}

TEST_CASE("field vocabularies") {
  SearchSpaceOptions defaults;
  FieldRef input0{GeneSection::kEncoder, 0, GeneBranch::kLeft, GeneField::kInput};
  CHECK(field_vocabulary(input0, defaults).size() == 1);
  FieldRef input5{GeneSection::kEncoder, 5, GeneBranch::kRight, GeneField::kInput};
  CHECK(field_vocabulary(input5, defaults).size() == 6);

  FieldRef norm{GeneSection::kDecoder, 3, GeneBranch::kLeft, GeneField::kNormalization};
  CHECK(field_vocabulary(norm, defaults).size() == 1);  // NONE removed by default
  SearchSpaceOptions with_none;
  with_none.allow_none_normalization = true;
  CHECK(field_vocabulary(norm, with_none).size() == 2);

  FieldRef rel{GeneSection::kDecoder, 3, GeneBranch::kLeft, GeneField::kRelativeDim};
  CHECK(field_vocabulary(rel, defaults).size() == 10);
  FieldRef cells{GeneSection::kCells, -1, GeneBranch::kCellLevel,
                 GeneField::kEncoderCells};
  CHECK(field_vocabulary(cells, defaults).size() == 6);
}

TEST_CASE("get/set round-trips every field") {
  Genome genome = transformer_seed();
  for (int i = 0; i < kGenomeFieldCount; ++i) {
    FieldRef ref = field_ref_at(i);
    FieldValue value = get_field(genome, ref);
    set_field(genome, ref, value);
  }
  CHECK(genome == transformer_seed());
}

TEST_CASE("diff is empty on self and symmetric in size") {
  const Genome& t = transformer_seed();
  const Genome& e = et_seed();
  CHECK(diff(t, t).empty());
  CHECK(diff(e, e).empty());
  CHECK(diff(t, e).size() == diff(e, t).size());
}

TEST_CASE("genome hash separates the seeds and is copy-stable") {
  const Genome& t = transformer_seed();
  Genome copy = t;
  CHECK(genome_hash(t) == genome_hash(copy));
  CHECK(genome_hash(t) != genome_hash(et_seed()));
}
