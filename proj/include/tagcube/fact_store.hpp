#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tagcube {

/// Delimited text exactly as uploaded, before any schema is chosen. Every
/// field is kept as text; numeric interpretation happens at binding time.
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    bool operator==(const RawTable&) const = default;
};

/// Parses RFC-4180 style text: double-quoted fields may contain the
/// delimiter, quotes (doubled) and line breaks. A UTF-8 byte order mark is
/// skipped and blank lines are ignored. Without a header the columns are
/// named col1..colN.
RawTable parse_table(std::string_view text, char delimiter = ',', bool has_header = true);

/// Writes `table` back as delimited text with a header row, quoting only
/// the fields that need it. `parse_table(serialize_table(t, d), d)` yields `t`.
std::string serialize_table(const RawTable& table, char delimiter = ',');

struct Schema {
    std::vector<std::string> dimensions;
    std::vector<std::string> measures;

    bool operator==(const Schema&) const = default;
};

/// Value substituted for an empty dimension field.
inline constexpr std::string_view kBlankValue = "(blank)";

/// Parses one measure field: optional sign, digits, optional fraction.
/// Surrounding whitespace and a single trailing "$" are tolerated.
std::optional<double> parse_measure(std::string_view text);

/// A raw table bound to a schema. Dimension columns are dictionary-encoded
/// (dictionaries sorted by code point) and measure columns are parsed to
/// doubles. Instances are immutable and shared between readers.
class BoundDataset {
public:
    BoundDataset(std::string id, std::shared_ptr<const RawTable> table, Schema schema);

    const std::string& id() const noexcept { return id_; }
    const RawTable& table() const noexcept { return *table_; }
    const Schema& schema() const noexcept { return schema_; }
    std::size_t fact_count() const noexcept { return table_->rows.size(); }

    bool has_dimension(std::string_view name) const noexcept;
    bool has_measure(std::string_view name) const noexcept;

    /// Sorted distinct values of a dimension. Throws QueryError when the
    /// dimension is not part of the schema.
    const std::vector<std::string>& dictionary(std::string_view dimension) const;

    /// Per-fact dictionary codes of a dimension.
    std::span<const std::uint32_t> codes(std::string_view dimension) const;

    /// Per-fact parsed values of a measure column.
    std::span<const double> measure_values(std::string_view measure) const;

    std::optional<std::uint32_t> code_of(std::string_view dimension, std::string_view value) const;

private:
    struct DimensionColumn {
        std::string name;
        std::vector<std::string> dictionary;
        std::vector<std::uint32_t> codes;
    };
    struct MeasureColumn {
        std::string name;
        std::vector<double> values;
    };

    const DimensionColumn& dimension_column(std::string_view name) const;

    std::string id_;
    std::shared_ptr<const RawTable> table_;
    Schema schema_;
    std::vector<DimensionColumn> dimensions_;
    std::vector<MeasureColumn> measures_;
};

using DatasetPtr = std::shared_ptr<const BoundDataset>;

/// Validates the schema against `table` and builds the encoded dataset.
/// Throws SchemaError on unknown, duplicate or overlapping columns, an
/// empty dimension list, or a measure field that is empty or non-numeric.
DatasetPtr bind_schema(std::shared_ptr<const RawTable> table,
                       const std::vector<std::string>& dimension_columns,
                       const std::vector<std::string>& measure_columns,
                       std::string id = "dataset");

const std::vector<std::string>& distinct_values(const BoundDataset& dataset,
                                                std::string_view dimension);

/// Content-derived identifier: identical uploads get identical ids, so a
/// descriptor names the same data in the service and in the CLI.
std::string dataset_id_for(std::string_view content, char delimiter, bool has_header);

}  // namespace tagcube
