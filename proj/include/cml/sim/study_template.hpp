#pragma once

#include <map>
#include <string>

#include "cml/sim/scm.hpp"

namespace cml::sim {

inline constexpr double kTemplatePhysicalEffect = 7.3;
inline constexpr double kTemplatePsychologicalEffect = 3.4;

/// Synthetic stand-in for the perinatal activity cohort: covariates age, bmi,
/// children, work, relationship; binary treatment `active`; mediators steps,
/// average_met, epds; outcomes qol_physical (role outcome) and
/// qol_psychological (auxiliary), both clamped to [0, 100].
/// Overrides are keyed "parent->child" and replace that edge's coefficient.
Scm study_template(const std::map<std::string, double>& effect_overrides = {});

}  // namespace cml::sim
