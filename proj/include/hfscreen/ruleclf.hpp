#pragma once

#include <string_view>

#include "hfscreen/extraction.hpp"
#include "hfscreen/labels.hpp"

namespace hfscreen {

enum class FiredRule { TransplantRule, NoHFRule, NonActiveRule, ConsultOrGalterRule, DefaultGreenRule };

std::string_view to_string(FiredRule rule);

struct RuleTrace {
  ColorLabel predicted;
  FiredRule fired_rule;
  DataElements elements;
};

/// Rules in precedence order:
///   heart transplant/VAD          -> Other (Purple)
///   no heart failure              -> Other (Grey)
///   heart failure not active      -> Other (Red)
///   cardiology consulted/Galter10 -> Orange
///   otherwise                     -> Green
RuleTrace classify_rules(const DataElements& elements);

}  // namespace hfscreen
