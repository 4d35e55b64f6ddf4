#include "cml/data/cohort.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "csv.hpp"
#include "cml/util/error.hpp"

namespace cml::data {

std::string_view to_string(Timepoint tp) {
    switch (tp) {
        case Timepoint::GestWeek15: return "week15";
        case Timepoint::GestWeek34: return "week34";
        case Timepoint::Postpartum12: return "postpartum12";
    }
    return "?";
}

Timepoint parse_timepoint(std::string_view text) {
    if (text == "week15") return Timepoint::GestWeek15;
    if (text == "week34") return Timepoint::GestWeek34;
    if (text == "postpartum12") return Timepoint::Postpartum12;
    throw DataError("unknown timepoint '" + std::string(text) + "' (expected week15, week34 or postpartum12)");
}

Cohort::Cohort(Schema schema, std::vector<std::vector<double>> columns, Timepoint timepoint)
    : schema_(std::move(schema)), columns_(std::move(columns)), timepoint_(timepoint) {
    validate_schema(schema_);
    if (columns_.size() != schema_.size())
        throw DataError(fmt::format("cohort has {} columns but schema declares {}", columns_.size(), schema_.size()));
    if (columns_.empty() || columns_.front().empty()) throw DataError("cohort must have at least one row and column");
    const std::size_t n = columns_.front().size();
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        const auto& var = schema_[c];
        if (columns_[c].size() != n)
            throw DataError(fmt::format("column '{}' has {} rows, expected {}", var.name, columns_[c].size(), n));
        for (std::size_t r = 0; r < n; ++r) {
            const double v = columns_[c][r];
            if (is_missing(v)) continue;
            if (var.kind == VarKind::Binary && v != 0.0 && v != 1.0)
                throw DataError(fmt::format("binary column '{}' has value {} in row {}", var.name, v, r + 1));
            if (var.kind == VarKind::Categorical) {
                const bool integral = std::floor(v) == v && v >= 0.0;
                if (!integral || (!var.levels.empty() && v >= static_cast<double>(var.levels.size())))
                    throw DataError(fmt::format("categorical column '{}' has invalid level {} in row {}", var.name, v, r + 1));
            }
        }
    }
}

std::vector<std::string> Cohort::names() const {
    std::vector<std::string> out;
    out.reserve(schema_.size());
    for (const auto& v : schema_) out.push_back(v.name);
    return out;
}

std::optional<std::size_t> Cohort::find(std::string_view name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i)
        if (schema_[i].name == name) return i;
    return std::nullopt;
}

std::size_t Cohort::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw DataError("unknown column '" + std::string(name) + "'");
}

std::string Cohort::single_role(Role role) const {
    const auto found = names_with_role(role);
    if (found.size() != 1)
        throw DataError(fmt::format("expected exactly one {} variable, found {}", to_string(role), found.size()));
    return found.front();
}

std::vector<std::string> Cohort::names_with_role(Role role) const {
    std::vector<std::string> out;
    for (const auto& v : schema_)
        if (v.role == role) out.push_back(v.name);
    return out;
}

Cohort Cohort::select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::vector<double>> cols(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        cols[c].reserve(rows.size());
        for (std::size_t r : rows) cols[c].push_back(columns_[c].at(r));
    }
    return Cohort(schema_, std::move(cols), timepoint_);
}

Cohort Cohort::select_columns(std::span<const std::string> names) const {
    Schema schema;
    std::vector<std::vector<double>> cols;
    for (const auto& name : names) {
        const std::size_t c = index_of(name);
        schema.push_back(schema_[c]);
        cols.push_back(columns_[c]);
    }
    return Cohort(std::move(schema), std::move(cols), timepoint_);
}

Cohort Cohort::with_column(VariableSchema var, std::vector<double> values) const {
    Schema schema = schema_;
    auto cols = columns_;
    schema.push_back(std::move(var));
    cols.push_back(std::move(values));
    return Cohort(std::move(schema), std::move(cols), timepoint_);
}

Cohort Cohort::with_values(std::string_view name, std::vector<double> values) const {
    auto cols = columns_;
    cols[index_of(name)] = std::move(values);
    return Cohort(schema_, std::move(cols), timepoint_);
}

Cohort Cohort::with_roles(const std::map<std::string, Role>& overrides) const {
    return Cohort(data::with_roles(schema_, overrides), columns_, timepoint_);
}

Eigen::MatrixXd Cohort::matrix(std::span<const std::string> names) const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto col = column(names[j]);
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (is_missing(col[r]))
                throw DataError(fmt::format("column '{}' has a missing cell in row {}", names[j], r + 1));
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = col[r];
        }
    }
    return m;
}

bool Cohort::operator==(const Cohort& other) const {
    if (schema_ != other.schema_ || timepoint_ != other.timepoint_) return false;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        const auto& a = columns_[c];
        const auto& b = other.columns_[c];
        if (a.size() != b.size()) return false;
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (is_missing(a[r]) != is_missing(b[r])) return false;
            if (!is_missing(a[r]) && a[r] != b[r]) return false;
        }
    }
    return true;
}

LoadedCohort load_cohort(std::istream& in, const Schema& schema, Timepoint timepoint) {
    validate_schema(schema);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!csv::trim(line).empty()) break;
    }
    if (csv::trim(line).empty()) throw DataError("cohort file is empty");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM

    const auto header = csv::split(line);
    std::vector<std::size_t> source_index;
    for (const auto& var : schema) {
        auto it = std::find(header.begin(), header.end(), var.name);
        if (it == header.end()) throw DataError("header mismatch: declared column '" + var.name + "' not found");
        if (std::find(std::next(it), header.end(), var.name) != header.end())
            throw DataError("header mismatch: column '" + var.name + "' appears twice");
        source_index.push_back(static_cast<std::size_t>(it - header.begin()));
    }

    std::vector<std::vector<double>> cols(schema.size());
    std::vector<std::size_t> missing(schema.size(), 0);
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto cells = csv::split(line);
        if (cells.size() != header.size())
            throw DataError(fmt::format("line {}: expected {} cells, found {}", line_no, header.size(), cells.size()));
        for (std::size_t c = 0; c < schema.size(); ++c) {
            const std::string& cell = cells[source_index[c]];
            if (cell.empty()) {
                cols[c].push_back(kMissing);
                ++missing[c];
                continue;
            }
            const auto v = csv::parse_number(cell);
            if (!v)
                throw DataError(fmt::format("line {}: non-numeric cell '{}' in column '{}'", line_no, cell, schema[c].name));
            if (schema[c].kind == VarKind::Binary && *v != 0.0 && *v != 1.0)
                throw DataError(fmt::format("line {}: binary column '{}' has value {}", line_no, schema[c].name, *v));
            cols[c].push_back(*v);
        }
    }
    if (cols.empty() || cols.front().empty()) throw DataError("cohort file has no data rows");

    LoadedCohort result{Cohort(schema, std::move(cols), timepoint), {}};
    for (std::size_t c = 0; c < schema.size(); ++c) result.missing.emplace_back(schema[c].name, missing[c]);
    return result;
}

LoadedCohort load_cohort(const std::filesystem::path& path, const Schema& schema, Timepoint timepoint) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open cohort file " + path.string());
    return load_cohort(in, schema, timepoint);
}

void write_cohort(std::ostream& out, const Cohort& cohort) {
    for (std::size_t c = 0; c < cohort.cols(); ++c) out << (c ? "," : "") << cohort.variable(c).name;
    out << '\n';
    for (std::size_t r = 0; r < cohort.rows(); ++r) {
        for (std::size_t c = 0; c < cohort.cols(); ++c) {
            if (c) out << ',';
            const double v = cohort.at(r, c);
            if (!is_missing(v)) out << fmt::format("{}", v);
        }
        out << '\n';
    }
}

void write_cohort(const std::filesystem::path& path, const Cohort& cohort) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_cohort(out, cohort);
}

DropResult drop_incomplete(const Cohort& cohort, std::span<const std::string> columns) {
    std::vector<std::size_t> idx;
    for (const auto& name : columns) idx.push_back(cohort.index_of(name));
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < cohort.rows(); ++r) {
        const bool complete = std::none_of(idx.begin(), idx.end(),
                                           [&](std::size_t c) { return is_missing(cohort.at(r, c)); });
        if (complete) keep.push_back(r);
    }
    if (keep.empty()) throw DataError("no complete rows remain after listwise deletion");
    const std::size_t dropped = cohort.rows() - keep.size();
    if (dropped == 0) return {cohort, 0};
    return {cohort.select_rows(keep), dropped};
}

StandardizeResult standardize(const Cohort& cohort) {
    std::vector<std::vector<double>> cols;
    std::vector<ColumnTransform> transforms;
    for (std::size_t c = 0; c < cohort.cols(); ++c) {
        const auto col = cohort.column(c);
        std::vector<double> values(col.begin(), col.end());
        const auto& var = cohort.variable(c);
        if (var.kind == VarKind::Continuous) {
            std::vector<double> present;
            for (double v : col)
                if (!is_missing(v)) present.push_back(v);
            std::set<double> distinct(present.begin(), present.end());
            if (distinct.size() < 2)
                throw DataError("zero-variance continuous column '" + var.name + "'");
            double mean = 0.0;
            for (double v : present) mean += v;
            mean /= static_cast<double>(present.size());
            double ss = 0.0;
            for (double v : present) ss += (v - mean) * (v - mean);
            const double sd = std::sqrt(ss / static_cast<double>(present.size() - 1));
            if (!(sd > 0.0)) throw DataError("zero-variance continuous column '" + var.name + "'");
            for (double& v : values)
                if (!is_missing(v)) v = (v - mean) / sd;
            transforms.push_back({var.name, mean, sd});
        }
        cols.push_back(std::move(values));
    }
    return {Cohort(cohort.schema(), std::move(cols), cohort.timepoint()), std::move(transforms)};
}

Eigen::MatrixXd covariance_matrix(const Cohort& cohort) {
    const auto names = cohort.names();
    const Eigen::MatrixXd x = cohort.matrix(names);
    if (x.rows() < 2) throw DataError("covariance needs at least two rows");
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
    // exact symmetry
    return (cov + cov.transpose()) * 0.5;
}

Eigen::MatrixXd correlation_from_covariance(const Eigen::MatrixXd& cov) {
    const Eigen::VectorXd inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
    return inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
}

}  // namespace cml::data
