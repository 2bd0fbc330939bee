#include "hfscreen/ruleclf.hpp"

namespace hfscreen {

std::string_view to_string(FiredRule rule) {
  switch (rule) {
    case FiredRule::TransplantRule: return "transplant";
    case FiredRule::NoHFRule: return "no_heart_failure";
    case FiredRule::NonActiveRule: return "non_active";
    case FiredRule::ConsultOrGalterRule: return "consult_or_galter";
    case FiredRule::DefaultGreenRule: return "default_green";
  }
  return "?";
}

RuleTrace classify_rules(const DataElements& elements) {
  if (elements.heart_transplant()) {
    return {ColorLabel(Fine::Purple), FiredRule::TransplantRule, elements};
  }
  if (!elements.heart_failure()) {
    return {ColorLabel(Fine::Grey), FiredRule::NoHFRule, elements};
  }
  if (elements.non_active_issue()) {
    return {ColorLabel(Fine::Red), FiredRule::NonActiveRule, elements};
  }
  if (elements.cardiology_consulted() || elements.at_galter_10()) {
    return {ColorLabel(Fine::Orange), FiredRule::ConsultOrGalterRule, elements};
  }
  return {ColorLabel(Fine::Green), FiredRule::DefaultGreenRule, elements};
}

}  // namespace hfscreen
