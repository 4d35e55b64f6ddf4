#pragma once

#include <string_view>

namespace cml::data {

/// Declared in ascending order so the built-in comparison is the band order.
enum class QoLBand { Bad, SomewhatBad, Moderate, Good, VeryGood, NearPerfect };

/// Lower-inclusive bands over [0, 100]:
/// [95,100] NearPerfect, [85,95) VeryGood, [70,85) Good,
/// [57.5,70) Moderate, [40,57.5) SomewhatBad, [0,40) Bad.
QoLBand qol_band(double score);

std::string_view label(QoLBand band);

}  // namespace cml::data
