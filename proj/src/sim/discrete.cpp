#include "cml/sim/discrete.hpp"

#include <cmath>
#include <random>

#include "cml/util/error.hpp"
#include "cml/util/random.hpp"

namespace cml::sim {

void DiscreteScm::validate() const {
    if (!(p_treatment > 0.0 && p_treatment < 1.0)) throw ScmError("treatment probability must lie in (0, 1)");
    if (mediator_given_treatment.size() != 2 || outcome_mean.size() != 2)
        throw ScmError("tables need one row per treatment level");
    const std::size_t k = mediator_levels();
    if (k < 2) throw ScmError("mediator needs at least two levels");
    for (int x = 0; x < 2; ++x) {
        const auto& row = mediator_given_treatment[static_cast<std::size_t>(x)];
        if (row.size() != k || outcome_mean[static_cast<std::size_t>(x)].size() != k)
            throw ScmError("table rows must have one entry per mediator level");
        double sum = 0.0;
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0)) throw ScmError("probabilities must lie in [0, 1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ScmError("probability row does not sum to 1");
        for (double v : outcome_mean[static_cast<std::size_t>(x)])
            if (!std::isfinite(v)) throw ScmError("outcome means must be finite");
    }
    if (!(outcome_noise_sd >= 0.0)) throw ScmError("noise sd must be >= 0");
}

OracleMediation oracle_mediation(const DiscreteScm& scm, int x, int x_prime) {
    scm.validate();
    if ((x != 0 && x != 1) || (x_prime != 0 && x_prime != 1)) throw ScmError("treatment levels must be 0 or 1");
    const auto& pz = scm.mediator_given_treatment;
    const auto& ey = scm.outcome_mean;
    const std::size_t k = scm.mediator_levels();
    const auto xi = static_cast<std::size_t>(x), xp = static_cast<std::size_t>(x_prime);

    auto nde = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t z = 0; z < k; ++z) s += (ey[b][z] - ey[a][z]) * pz[a][z];
        return s;
    };
    auto nie = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t z = 0; z < k; ++z) s += ey[a][z] * (pz[b][z] - pz[a][z]);
        return s;
    };
    auto do_mean = [&](std::size_t a) {
        double s = 0.0;
        for (std::size_t z = 0; z < k; ++z) s += ey[a][z] * pz[a][z];
        return s;
    };

    OracleMediation out;
    out.effects.x = x;
    out.effects.x_prime = x_prime;
    out.effects.nde = nde(xi, xp);
    out.effects.nie = nie(xi, xp);
    out.effects.nie_reverse = nie(xp, xi);
    out.effects.te = estimation::total_effect(out.effects.nde, out.effects.nie_reverse);
    out.do_y_x = do_mean(xi);
    out.do_y_x_prime = do_mean(xp);
    out.do_te = out.do_y_x_prime - out.do_y_x;
    out.effects.ate = out.do_te;
    return out;
}

data::Cohort sample(const DiscreteScm& scm, std::size_t n, std::uint64_t seed) {
    scm.validate();
    if (n == 0) throw ScmError("sample size must be at least 1");
    const std::size_t k = scm.mediator_levels();
    std::vector<double> xs(n), zs(n), ys(n);
    Rng rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t x = uniform(rng) < scm.p_treatment ? 1 : 0;
        const double u = uniform(rng);
        std::size_t z = k - 1;
        double cum = 0.0;
        for (std::size_t level = 0; level + 1 < k; ++level) {
            cum += scm.mediator_given_treatment[x][level];
            if (u < cum) {
                z = level;
                break;
            }
        }
        xs[r] = static_cast<double>(x);
        zs[r] = static_cast<double>(z);
        ys[r] = scm.outcome_mean[x][z] + scm.outcome_noise_sd * normal(rng);
    }
    data::VariableSchema zvar{"z", data::VarKind::Binary, data::Role::Mediator, "", {}};
    if (k > 2) {
        zvar.kind = data::VarKind::Categorical;
        for (std::size_t level = 0; level < k; ++level) zvar.levels.push_back(std::to_string(level));
    }
    data::Schema schema{{"x", data::VarKind::Binary, data::Role::Treatment, "", {}}, zvar,
                        {"y", data::VarKind::Continuous, data::Role::Outcome, "", {}}};
    return data::Cohort(std::move(schema), {std::move(xs), std::move(zs), std::move(ys)});
}

}  // namespace cml::sim
