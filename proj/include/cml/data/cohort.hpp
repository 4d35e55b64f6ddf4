#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cml/data/schema.hpp"

namespace cml::data {

enum class Timepoint { GestWeek15, GestWeek34, Postpartum12 };

std::string_view to_string(Timepoint tp);
Timepoint parse_timepoint(std::string_view text);

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Participants x variables table for one timepoint. Storage is column-major;
/// a missing cell is NaN.
class Cohort {
public:
    /// Validates: unique names, rectangular columns, at least one row,
    /// binary columns in {0, 1, missing}, categorical cells are level indices.
    Cohort(Schema schema, std::vector<std::vector<double>> columns,
           Timepoint timepoint = Timepoint::GestWeek15);

    std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
    std::size_t cols() const { return schema_.size(); }
    Timepoint timepoint() const { return timepoint_; }

    const Schema& schema() const { return schema_; }
    const VariableSchema& variable(std::size_t col) const { return schema_.at(col); }
    std::vector<std::string> names() const;

    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws DataError for an unknown column.
    std::size_t index_of(std::string_view name) const;

    std::span<const double> column(std::size_t col) const { return columns_.at(col); }
    std::span<const double> column(std::string_view name) const { return column(index_of(name)); }
    double at(std::size_t row, std::size_t col) const { return columns_[col][row]; }

    /// Name of the single variable holding `role`; throws unless exactly one does.
    std::string single_role(Role role) const;
    std::vector<std::string> names_with_role(Role role) const;

    Cohort select_rows(std::span<const std::size_t> rows) const;
    Cohort select_columns(std::span<const std::string> names) const;
    Cohort with_column(VariableSchema var, std::vector<double> values) const;
    Cohort with_values(std::string_view name, std::vector<double> values) const;
    Cohort with_roles(const std::map<std::string, Role>& overrides) const;

    /// rows x names.size() matrix; throws DataError if any selected cell is missing.
    Eigen::MatrixXd matrix(std::span<const std::string> names) const;

    bool operator==(const Cohort& other) const;

private:
    Schema schema_;
    std::vector<std::vector<double>> columns_;
    Timepoint timepoint_;
};

struct LoadedCohort {
    Cohort cohort;
    /// Missing-cell count per column, in schema order.
    std::vector<std::pair<std::string, std::size_t>> missing;
};

/// CSV with a header row naming every schema variable (any order; extra
/// columns are ignored). Empty cell = missing.
LoadedCohort load_cohort(std::istream& in, const Schema& schema,
                         Timepoint timepoint = Timepoint::GestWeek15);
LoadedCohort load_cohort(const std::filesystem::path& path, const Schema& schema,
                         Timepoint timepoint = Timepoint::GestWeek15);

void write_cohort(std::ostream& out, const Cohort& cohort);
void write_cohort(const std::filesystem::path& path, const Cohort& cohort);

struct DropResult {
    Cohort cohort;
    std::size_t dropped = 0;
};

/// Listwise deletion over `columns`.
DropResult drop_incomplete(const Cohort& cohort, std::span<const std::string> columns);

struct ColumnTransform {
    std::string column;
    double mean = 0.0;
    double sd = 1.0;
};

struct StandardizeResult {
    Cohort cohort;
    std::vector<ColumnTransform> transforms;
};

/// z-scores every continuous column with the sample sd (n - 1); binary and
/// categorical columns are left untouched. Missing cells stay missing.
StandardizeResult standardize(const Cohort& cohort);

/// Sample covariance (divisor n - 1) over every column.
Eigen::MatrixXd covariance_matrix(const Cohort& cohort);

/// Covariance rescaled to unit diagonal.
Eigen::MatrixXd correlation_from_covariance(const Eigen::MatrixXd& cov);

}  // namespace cml::data
