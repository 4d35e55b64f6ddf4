#include "cml/data/schema.hpp"

#include <fstream>
#include <set>

#include "cml/util/error.hpp"

namespace cml::data {

std::string_view to_string(VarKind kind) {
    switch (kind) {
        case VarKind::Continuous: return "continuous";
        case VarKind::Binary: return "binary";
        case VarKind::Categorical: return "categorical";
    }
    return "?";
}

std::string_view to_string(Role role) {
    switch (role) {
        case Role::Treatment: return "treatment";
        case Role::Outcome: return "outcome";
        case Role::Mediator: return "mediator";
        case Role::Covariate: return "covariate";
        case Role::Auxiliary: return "auxiliary";
    }
    return "?";
}

VarKind parse_kind(std::string_view text) {
    if (text == "continuous") return VarKind::Continuous;
    if (text == "binary") return VarKind::Binary;
    if (text == "categorical") return VarKind::Categorical;
    throw DataError("unknown variable kind '" + std::string(text) + "'");
}

Role parse_role(std::string_view text) {
    if (text == "treatment") return Role::Treatment;
    if (text == "outcome") return Role::Outcome;
    if (text == "mediator") return Role::Mediator;
    if (text == "covariate") return Role::Covariate;
    if (text == "auxiliary") return Role::Auxiliary;
    throw DataError("unknown variable role '" + std::string(text) + "'");
}

Schema schema_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw DataError("schema must be a JSON array");
    Schema schema;
    for (const auto& item : j) {
        VariableSchema v;
        try {
            v.name = item.at("name").get<std::string>();
            v.kind = parse_kind(item.at("kind").get<std::string>());
            v.role = parse_role(item.at("role").get<std::string>());
            v.units = item.value("units", std::string{});
            if (item.contains("levels")) v.levels = item.at("levels").get<std::vector<std::string>>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed schema entry: ") + e.what());
        }
        schema.push_back(std::move(v));
    }
    validate_schema(schema);
    return schema;
}

nlohmann::json schema_to_json(const Schema& schema) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : schema) {
        nlohmann::json item = {{"name", v.name},
                               {"kind", to_string(v.kind)},
                               {"role", to_string(v.role)},
                               {"units", v.units}};
        if (!v.levels.empty()) item["levels"] = v.levels;
        j.push_back(std::move(item));
    }
    return j;
}

Schema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return schema_from_json(j);
}

void validate_schema(const Schema& schema) {
    std::set<std::string_view> seen;
    for (const auto& v : schema) {
        if (v.name.empty()) throw DataError("schema variable with empty name");
        if (!seen.insert(v.name).second) throw DataError("duplicate variable name '" + v.name + "'");
    }
}

Schema with_roles(Schema schema, const std::map<std::string, Role>& overrides) {
    for (const auto& [name, role] : overrides) {
        bool found = false;
        for (auto& v : schema) {
            if (v.name == name) {
                v.role = role;
                found = true;
            }
        }
        if (!found) throw DataError("role override names unknown variable '" + name + "'");
    }
    return schema;
}

}  // namespace cml::data
