#include "retro/decoy.hpp"

#include <random>
#include <set>

#include "retro/errors.hpp"

namespace retro {

namespace {

const char* const kSyllables[] = {"ba", "ko", "ri", "ta", "mu", "le", "sa", "vo", "ni", "de", "ga", "pe",
                                  "lu", "zo", "ma", "ki", "ro", "fe", "shi", "dan", "tor", "vel", "mar", "quin"};
constexpr std::size_t kSyllableCount = sizeof(kSyllables) / sizeof(kSyllables[0]);

/// Words of the fixed templates; generated names must not collide with them.
const std::set<std::string> kTemplateWords = {"the",  "capital", "city", "of",  "is",   "and",
                                              "it",   "famous",  "for",  "its", "lies", "near",
                                              "what", "a",       "an"};

class NameSource {
 public:
  explicit NameSource(std::uint64_t seed) : rng_(seed) {}

  std::string next() {
    for (;;) {
      const auto parts = 2 + rng_() % 2;
      std::string name;
      for (std::size_t i = 0; i < parts; ++i) name += kSyllables[rng_() % kSyllableCount];
      if (kTemplateWords.count(name) == 0 && used_.insert(name).second) return name;
    }
  }

 private:
  std::mt19937_64 rng_;
  std::set<std::string> used_;
};

}  // namespace

DecoyFixture generate_decoy_fixture(const DecoyOptions& options) {
  if (options.families == 0) throw InputError("decoy fixture needs at least one family");
  NameSource names(options.seed);
  DecoyFixture fx;
  for (std::size_t f = 0; f < options.families; ++f) {
    const auto country = names.next();
    const auto capital = names.next();
    const auto landmark = names.next();
    const auto family = "f" + std::to_string(f);

    // decoys first, so ascending-id tie-breaks never favour the target
    for (std::size_t d = 0; d < options.decoys_per_family; ++d) {
      const auto place = names.next();
      const auto seat = names.next();
      const auto river = names.next();
      fx.corpus.push_back({family + "-decoy" + std::to_string(d), place,
                           "The capital of " + place + " is " + seat + ", and it lies near " + river + "."});
    }
    const auto target = "The capital city of " + country + " is " + capital + ", and it is famous for its " +
                        landmark + ".";
    fx.corpus.push_back({family + "-target", country, target});

    const auto query = "What is the capital of " + country + "?";
    fx.eval.push_back({query, {capital}, {family + "-target"}});
    fx.examples.push_back({query, {country}, {target}, capital});
  }
  return fx;
}

}  // namespace retro
