#pragma once

#include <cstdint>
#include <vector>

#include "retro/corpus.hpp"
#include "retro/eval.hpp"

namespace retro {

/// Adversarial corpus for the false-pruning study. Each family holds one
/// target ("the capital city of C is K ...") and several decoys ("the capital
/// of X is Y ...") that share the frequent opening words but never mention C.
struct DecoyOptions {
  std::size_t families = 50;
  std::size_t decoys_per_family = 4;
  std::uint64_t seed = 7;
};

struct DecoyFixture {
  std::vector<RawDocument> corpus;
  std::vector<EvalRecord> eval;         // "what is the capital of C" -> K
  std::vector<ExampleRecord> examples;  // one formatted target per family
};

/// Deterministic for a given seed. Names are built from random syllables and
/// are unique across the whole fixture. Throws InputError for zero families.
DecoyFixture generate_decoy_fixture(const DecoyOptions& options);

}  // namespace retro
