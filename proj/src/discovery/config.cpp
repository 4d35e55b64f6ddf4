#include "cml/discovery/config.hpp"

#include "cml/util/error.hpp"

namespace cml::discovery {

void DiscoveryConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DiscoveryError("alpha must lie in (0, 1)");
    if (!(bic_penalty > 0.0)) throw DiscoveryError("bic_penalty must be positive");
}

}  // namespace cml::discovery
