#include "cml/data/qol_band.hpp"

#include <string>

#include "cml/util/error.hpp"

namespace cml::data {

QoLBand qol_band(double score) {
    if (!(score >= 0.0 && score <= 100.0))
        throw DataError("QoL score " + std::to_string(score) + " outside [0, 100]");
    if (score >= 95.0) return QoLBand::NearPerfect;
    if (score >= 85.0) return QoLBand::VeryGood;
    if (score >= 70.0) return QoLBand::Good;
    if (score >= 57.5) return QoLBand::Moderate;
    if (score >= 40.0) return QoLBand::SomewhatBad;
    return QoLBand::Bad;
}

std::string_view label(QoLBand band) {
    switch (band) {
        case QoLBand::NearPerfect: return "Near perfect";
        case QoLBand::VeryGood: return "Very good";
        case QoLBand::Good: return "Good";
        case QoLBand::Moderate: return "Moderate";
        case QoLBand::SomewhatBad: return "Somewhat bad";
        case QoLBand::Bad: return "Bad";
    }
    return "?";
}

}  // namespace cml::data
