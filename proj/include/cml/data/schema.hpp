#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cml::data {

enum class VarKind { Continuous, Binary, Categorical };

enum class Role { Treatment, Outcome, Mediator, Covariate, Auxiliary };

struct VariableSchema {
    std::string name;
    VarKind kind = VarKind::Continuous;
    Role role = Role::Covariate;
    std::string units;
    /// Level labels for categorical variables; cells hold the level index.
    std::vector<std::string> levels;

    bool operator==(const VariableSchema&) const = default;
};

using Schema = std::vector<VariableSchema>;

std::string_view to_string(VarKind kind);
std::string_view to_string(Role role);
VarKind parse_kind(std::string_view text);
Role parse_role(std::string_view text);

/// Schema files are a JSON array of {name, kind, role, units[, levels]}.
Schema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const Schema& schema);
Schema load_schema(const std::filesystem::path& path);

/// Throws DataError on duplicate names.
void validate_schema(const Schema& schema);

/// Returns a copy with roles replaced per `overrides` (name -> role).
Schema with_roles(Schema schema, const std::map<std::string, Role>& overrides);

}  // namespace cml::data
