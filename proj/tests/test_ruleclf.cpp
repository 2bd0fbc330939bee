#include "doctest.h"
#include "hfscreen/ruleclf.hpp"

using namespace hfscreen;

namespace {

DataElements elements(bool consult, bool hf, bool galter, bool transplant, bool nonactive) {
  return DataElements::from_flags({consult, hf, galter, transplant, nonactive});
}

// The colour descriptions written out as independent predicates.
Fine expected(bool consult, bool hf, bool galter, bool transplant, bool nonactive) {
  if (transplant) return Fine::Purple;
  if (!hf) return Fine::Grey;
  if (nonactive) return Fine::Red;
  if (consult || galter) return Fine::Orange;
  return Fine::Green;
}

}  // namespace

TEST_CASE("flowchart examples") {
  CHECK(classify_rules(elements(false, true, false, false, false)).predicted.coarse() == Coarse::Green);
  CHECK(classify_rules(elements(true, true, false, false, false)).predicted.coarse() == Coarse::Orange);
  const auto purple = classify_rules(elements(true, true, false, true, false));
  CHECK(purple.predicted.coarse() == Coarse::Other);
  CHECK(purple.predicted.fine() == Fine::Purple);
  CHECK(purple.fired_rule == FiredRule::TransplantRule);
  const auto grey = classify_rules(elements(false, false, false, false, false));
  CHECK(grey.predicted.fine() == Fine::Grey);
  CHECK(grey.fired_rule == FiredRule::NoHFRule);
}

TEST_CASE("all 32 element combinations") {
  int seen[kNumFine] = {};
  for (int mask = 0; mask < 32; ++mask) {
    const bool c = mask & 1, h = mask & 2, g = mask & 4, t = mask & 8, n = mask & 16;
    const RuleTrace a = classify_rules(elements(c, h, g, t, n));
    const RuleTrace b = classify_rules(elements(c, h, g, t, n));
    CHECK(a.predicted == b.predicted);
    CHECK(a.fired_rule == b.fired_rule);
    REQUIRE(a.predicted.fine().has_value());
    CHECK(*a.predicted.fine() == expected(c, h, g, t, n));
    CHECK(a.predicted.coarse() == coarse_of(*a.predicted.fine()));
    if (a.predicted.coarse() == Coarse::Green) CHECK((h && !c && !g && !t && !n));
    ++seen[index(*a.predicted.fine())];
  }
  CHECK(seen[index(Fine::Purple)] == 16);
  CHECK(seen[index(Fine::Grey)] == 8);
  CHECK(seen[index(Fine::Red)] == 4);
  CHECK(seen[index(Fine::Orange)] == 3);
  CHECK(seen[index(Fine::Green)] == 1);
}

TEST_CASE("fired rule names") {
  CHECK(to_string(FiredRule::ConsultOrGalterRule) == "consult_or_galter");
  CHECK(to_string(FiredRule::DefaultGreenRule) == "default_green");
}
