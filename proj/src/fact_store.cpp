#include <tagcube/fact_store.hpp>

#include <tagcube/error.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace tagcube {

namespace {

bool is_valid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t extra = 0;
        if (lead < 0x80) {
            extra = 0;
        } else if ((lead >> 5) == 0x6) {
            extra = 1;
            if (lead < 0xC2) {
                return false;
            }
        } else if ((lead >> 4) == 0xE) {
            extra = 2;
        } else if ((lead >> 3) == 0x1E && lead <= 0xF4) {
            extra = 3;
        } else {
            return false;
        }
        if (i + extra >= text.size()) {
            return false;
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cont = static_cast<unsigned char>(text[i + k]);
            if ((cont >> 6) != 0x2) {
                return false;
            }
        }
        i += extra + 1;
    }
    return true;
}

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;
    bool any_quoted = false;

    bool blank() const { return !any_quoted && fields.size() == 1 && fields.front().empty(); }
};

class RecordReader {
public:
    RecordReader(std::string_view text, char delimiter) : text_(text), delimiter_(delimiter) {}

    bool next(Record& out) {
        if (pos_ >= text_.size()) {
            return false;
        }
        out.fields.clear();
        out.any_quoted = false;
        out.line = line_;
        std::string field;
        bool in_quotes = false;
        bool after_quote = false;
        while (pos_ < text_.size()) {
            const char ch = text_[pos_];
            if (in_quotes) {
                if (ch == '"') {
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
                        field.push_back('"');
                        pos_ += 2;
                        continue;
                    }
                    in_quotes = false;
                    after_quote = true;
                    ++pos_;
                    continue;
                }
                if (ch == '\n') {
                    ++line_;
                }
                field.push_back(ch);
                ++pos_;
                continue;
            }
            if (ch == delimiter_) {
                out.fields.push_back(std::move(field));
                field.clear();
                after_quote = false;
                ++pos_;
                continue;
            }
            if (ch == '\r' || ch == '\n') {
                ++pos_;
                if (ch == '\r' && pos_ < text_.size() && text_[pos_] == '\n') {
                    ++pos_;
                }
                ++line_;
                out.fields.push_back(std::move(field));
                return true;
            }
            if (after_quote) {
                throw ParseError("line " + std::to_string(line_) +
                                     ": unexpected character after closing quote",
                                 0);
            }
            if (ch == '"' && field.empty()) {
                in_quotes = true;
                out.any_quoted = true;
                ++pos_;
                continue;
            }
            field.push_back(ch);
            ++pos_;
        }
        if (in_quotes) {
            throw ParseError("line " + std::to_string(out.line) + ": unterminated quoted field", 0);
        }
        out.fields.push_back(std::move(field));
        return true;
    }

private:
    std::string_view text_;
    char delimiter_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

bool needs_quotes(std::string_view field, char delimiter) {
    return field.find_first_of(std::string{delimiter, '"', '\r', '\n'}) != std::string_view::npos;
}

void append_field(std::string& out, std::string_view field, char delimiter, bool force_quotes) {
    if (!force_quotes && !needs_quotes(field, delimiter)) {
        out.append(field);
        return;
    }
    out.push_back('"');
    for (char ch : field) {
        if (ch == '"') {
            out.push_back('"');
        }
        out.push_back(ch);
    }
    out.push_back('"');
}

void append_record(std::string& out, const std::vector<std::string>& fields, char delimiter) {
    // A lone empty field would otherwise read back as a blank line.
    const bool lone_empty = fields.size() == 1 && fields.front().empty();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out.push_back(delimiter);
        }
        append_field(out, fields[i], delimiter, lone_empty);
    }
    out.push_back('\n');
}

std::string_view trim(std::string_view text) {
    constexpr std::string_view kSpace = " \t\r\n";
    const auto first = text.find_first_not_of(kSpace);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(kSpace);
    return text.substr(first, last - first + 1);
}

}  // namespace

RawTable parse_table(std::string_view text, char delimiter, bool has_header) {
    if (delimiter == '"' || delimiter == '\r' || delimiter == '\n') {
        throw ParseError("invalid delimiter");
    }
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }
    if (!is_valid_utf8(text)) {
        throw ParseError("input is not valid UTF-8");
    }

    RawTable table;
    RecordReader reader(text, delimiter);
    Record record;
    std::size_t record_number = 0;
    bool have_columns = false;
    while (reader.next(record)) {
        if (record.blank()) {
            continue;
        }
        ++record_number;
        if (!have_columns) {
            have_columns = true;
            if (has_header) {
                std::unordered_set<std::string> seen;
                for (const auto& name : record.fields) {
                    if (name.empty()) {
                        throw ParseError("header: empty column name", record_number);
                    }
                    if (!seen.insert(name).second) {
                        throw ParseError("header: duplicate column name '" + name + "'",
                                         record_number);
                    }
                }
                table.columns = std::move(record.fields);
                continue;
            }
            for (std::size_t i = 0; i < record.fields.size(); ++i) {
                table.columns.push_back("col" + std::to_string(i + 1));
            }
        }
        if (record.fields.size() != table.columns.size()) {
            throw ParseError("row " + std::to_string(record_number) + " (line " +
                                 std::to_string(record.line) + "): expected " +
                                 std::to_string(table.columns.size()) + " fields, found " +
                                 std::to_string(record.fields.size()),
                             record_number);
        }
        table.rows.push_back(std::move(record.fields));
    }
    if (!have_columns) {
        throw ParseError("empty input");
    }
    return table;
}

std::string serialize_table(const RawTable& table, char delimiter) {
    std::string out;
    append_record(out, table.columns, delimiter);
    for (const auto& row : table.rows) {
        append_record(out, row, delimiter);
    }
    return out;
}

std::optional<double> parse_measure(std::string_view text) {
    text = trim(text);
    if (text.ends_with('$')) {
        text.remove_suffix(1);
        text = trim(text);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    std::size_t digits = 0;
    std::size_t dots = 0;
    for (char ch : text) {
        if (ch >= '0' && ch <= '9') {
            ++digits;
        } else if (ch == '.') {
            ++dots;
        } else {
            return std::nullopt;
        }
    }
    if (digits == 0 || dots > 1) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return negative ? -value : value;
}

BoundDataset::BoundDataset(std::string id, std::shared_ptr<const RawTable> table, Schema schema)
    : id_(std::move(id)), table_(std::move(table)), schema_(std::move(schema)) {
    if (!table_) {
        throw SchemaError("no table to bind");
    }
    if (schema_.dimensions.empty()) {
        throw SchemaError("a schema needs at least one dimension");
    }

    std::unordered_map<std::string_view, std::size_t> column_index;
    for (std::size_t i = 0; i < table_->columns.size(); ++i) {
        column_index.emplace(table_->columns[i], i);
    }
    auto resolve = [&](const std::string& name) {
        auto it = column_index.find(name);
        if (it == column_index.end()) {
            throw SchemaError("unknown column '" + name + "'");
        }
        return it->second;
    };

    std::unordered_set<std::string> used;
    for (const auto& name : schema_.dimensions) {
        if (!used.insert(name).second) {
            throw SchemaError("column '" + name + "' listed twice");
        }
    }
    for (const auto& name : schema_.measures) {
        if (!used.insert(name).second) {
            throw SchemaError("column '" + name + "' is both a dimension and a measure");
        }
    }

    const auto& rows = table_->rows;
    for (const auto& name : schema_.dimensions) {
        const auto col = resolve(name);
        DimensionColumn column;
        column.name = name;
        std::vector<std::string_view> values;
        values.reserve(rows.size());
        for (const auto& row : rows) {
            values.emplace_back(row[col].empty() ? kBlankValue : std::string_view(row[col]));
        }
        std::vector<std::string_view> sorted = values;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        column.dictionary.assign(sorted.begin(), sorted.end());

        std::unordered_map<std::string_view, std::uint32_t> code;
        for (std::uint32_t c = 0; c < column.dictionary.size(); ++c) {
            code.emplace(column.dictionary[c], c);
        }
        column.codes.reserve(rows.size());
        for (auto value : values) {
            column.codes.push_back(code.at(value));
        }
        dimensions_.push_back(std::move(column));
    }

    for (const auto& name : schema_.measures) {
        const auto col = resolve(name);
        MeasureColumn column;
        column.name = name;
        column.values.reserve(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& field = rows[r][col];
            auto value = parse_measure(field);
            if (!value) {
                // Row numbers count the header as row 1, matching parse errors.
                throw SchemaError("measure column '" + name + "', row " + std::to_string(r + 2) +
                                  ": " + (trim(field).empty() ? std::string("empty value")
                                                              : "non-numeric value '" + field + "'"));
            }
            column.values.push_back(*value);
        }
        measures_.push_back(std::move(column));
    }
}

bool BoundDataset::has_dimension(std::string_view name) const noexcept {
    return std::any_of(dimensions_.begin(), dimensions_.end(),
                       [&](const DimensionColumn& d) { return d.name == name; });
}

bool BoundDataset::has_measure(std::string_view name) const noexcept {
    return std::any_of(measures_.begin(), measures_.end(),
                       [&](const MeasureColumn& m) { return m.name == name; });
}

const BoundDataset::DimensionColumn& BoundDataset::dimension_column(std::string_view name) const {
    for (const auto& column : dimensions_) {
        if (column.name == name) {
            return column;
        }
    }
    throw QueryError("unknown dimension '" + std::string(name) + "'");
}

const std::vector<std::string>& BoundDataset::dictionary(std::string_view dimension) const {
    return dimension_column(dimension).dictionary;
}

std::span<const std::uint32_t> BoundDataset::codes(std::string_view dimension) const {
    return dimension_column(dimension).codes;
}

std::span<const double> BoundDataset::measure_values(std::string_view measure) const {
    for (const auto& column : measures_) {
        if (column.name == measure) {
            return column.values;
        }
    }
    throw QueryError("unknown measure '" + std::string(measure) + "'");
}

std::optional<std::uint32_t> BoundDataset::code_of(std::string_view dimension,
                                                   std::string_view value) const {
    const auto& dict = dictionary(dimension);
    auto it = std::lower_bound(dict.begin(), dict.end(), value);
    if (it == dict.end() || *it != value) {
        return std::nullopt;
    }
    return static_cast<std::uint32_t>(it - dict.begin());
}

DatasetPtr bind_schema(std::shared_ptr<const RawTable> table,
                       const std::vector<std::string>& dimension_columns,
                       const std::vector<std::string>& measure_columns, std::string id) {
    return std::make_shared<const BoundDataset>(std::move(id), std::move(table),
                                                Schema{dimension_columns, measure_columns});
}

const std::vector<std::string>& distinct_values(const BoundDataset& dataset,
                                                std::string_view dimension) {
    return dataset.dictionary(dimension);
}

std::string dataset_id_for(std::string_view content, char delimiter, bool has_header) {
    // FNV-1a, 64 bit.
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&](unsigned char byte) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    };
    mix(static_cast<unsigned char>(delimiter));
    mix(has_header ? 1 : 0);
    for (char ch : content) {
        mix(static_cast<unsigned char>(ch));
    }
    char buffer[20];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return std::string("ds-") + buffer;
}

}  // namespace tagcube
