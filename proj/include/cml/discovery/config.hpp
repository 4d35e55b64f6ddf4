#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cml::discovery {

struct DiscoveryConfig {
    double alpha = 0.05;
    /// Largest conditioning set PC will try.
    std::size_t max_cond_size = 3;
    /// Multiplier on the BIC complexity term.
    double bic_penalty = 1.0;
    /// GIES only: intervention target sets by node name. Regime k >= 1 of a
    /// row selects intervention_targets[k - 1]; regime 0 is observational.
    std::vector<std::vector<std::string>> intervention_targets;

    void validate() const;
};

}  // namespace cml::discovery
