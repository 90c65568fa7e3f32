#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace needles {

/// One `key = value` assignment and where it came from.
struct KeyValue {
    std::string key;
    std::string value;
    std::string origin;  ///< e.g. "run.cfg:12" or "--phi"
};

/// Grammar: one `key = value` per line; `#` starts a comment; blank lines are
/// ignored; keys are [a-z_][a-z0-9_]*; a key may appear once per file.
std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source);
std::vector<KeyValue> parse_key_values_file(const std::string& path);

enum class FieldKind {
    real,
    integer,
    seed,       ///< unsigned 64-bit
    flag,       ///< true/false, yes/no, 1/0, on/off
    text,
    real_list,  ///< comma-separated reals
};

using FieldValue = std::variant<double, std::int64_t, std::uint64_t, bool, std::string, std::vector<double>>;

struct FieldSpec {
    std::string name;
    FieldKind kind = FieldKind::real;
    std::string default_value;
    std::string help;
    double min = -std::numeric_limits<double>::infinity();
    double max = std::numeric_limits<double>::infinity();
    bool min_exclusive = false;
    std::vector<std::string> choices;  ///< allowed text values, empty = any
};

class ConfigSchema {
public:
    ConfigSchema& add(FieldSpec spec);
    const std::vector<FieldSpec>& fields() const { return fields_; }
    const FieldSpec* find(const std::string& name) const;

private:
    std::vector<FieldSpec> fields_;
};

/// Every schema field with a typed value, defaults applied.
class ResolvedConfig {
public:
    double real(const std::string& name) const;
    std::int64_t integer(const std::string& name) const;
    std::uint64_t seed(const std::string& name) const;
    bool flag(const std::string& name) const;
    const std::string& text(const std::string& name) const;
    const std::vector<double>& real_list(const std::string& name) const;

    const std::map<std::string, FieldValue>& values() const { return values_; }
    void set(const std::string& name, FieldValue v) { values_[name] = std::move(v); }

    friend bool operator==(const ResolvedConfig&, const ResolvedConfig&) = default;

private:
    const FieldValue& at(const std::string& name) const;
    std::map<std::string, FieldValue> values_;
};

/// Parses one value for `spec`; the error message names the field.
FieldValue parse_field(const FieldSpec& spec, const std::string& text);

/// Canonical text of a value; parse_field(spec, format_field(v)) == v.
std::string format_field(const FieldValue& v);

/// Defaults, then `file`, then `overrides`. Unknown keys, duplicate keys in
/// one layer, malformed and out-of-range values throw ValidationError.
ResolvedConfig resolve(const ConfigSchema& schema, const std::vector<KeyValue>& file,
                       const std::vector<KeyValue>& overrides = {});

}  // namespace needles
