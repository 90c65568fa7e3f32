#include "needles/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "needles/csv.hpp"
#include "needles/error.hpp"

namespace needles {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty() || !(std::islower(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
    return std::all_of(k.begin(), k.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
    });
}

[[noreturn]] void bad_value(const FieldSpec& spec, const std::string& text, const std::string& why) {
    throw ValidationError(spec.name + ": " + why + " (got '" + text + "')");
}

double parse_real(const FieldSpec& spec, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) bad_value(spec, text, "expected a real number");
    if (!std::isfinite(v)) bad_value(spec, text, "must be finite");
    return v;
}

void check_range(const FieldSpec& spec, double v, const std::string& text) {
    if (spec.min_exclusive ? !(v > spec.min) : !(v >= spec.min)) {
        bad_value(spec, text, std::string("must be ") + (spec.min_exclusive ? "> " : ">= ") + format_number(spec.min));
    }
    if (!(v <= spec.max)) bad_value(spec, text, "must be <= " + format_number(spec.max));
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source) {
    std::vector<KeyValue> out;
    std::set<std::string> seen;
    std::string line;
    for (int number = 1; std::getline(in, line); ++number) {
        const std::string where = source + ":" + std::to_string(number);
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ValidationError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (!valid_key(key)) throw ValidationError(where + ": malformed key '" + key + "'");
        if (!seen.insert(key).second) throw ValidationError(where + ": duplicate key '" + key + "'");
        out.push_back({key, trim(line.substr(eq + 1)), where});
    }
    return out;
}

std::vector<KeyValue> parse_key_values_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    return parse_key_values(in, path);
}

ConfigSchema& ConfigSchema::add(FieldSpec spec) {
    detail::require(valid_key(spec.name), "schema: malformed field name '" + spec.name + "'");
    detail::require(!find(spec.name), "schema: duplicate field '" + spec.name + "'");
    // the default must itself be valid
    parse_field(spec, spec.default_value);
    fields_.push_back(std::move(spec));
    return *this;
}

const FieldSpec* ConfigSchema::find(const std::string& name) const {
    for (const auto& f : fields_)
        if (f.name == name) return &f;
    return nullptr;
}

FieldValue parse_field(const FieldSpec& spec, const std::string& text) {
    const std::string t = trim(text);
    switch (spec.kind) {
        case FieldKind::real: {
            const double v = parse_real(spec, t);
            check_range(spec, v, t);
            return v;
        }
        case FieldKind::integer: {
            std::int64_t v = 0;
            const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) bad_value(spec, text, "expected an integer");
            check_range(spec, static_cast<double>(v), t);
            return v;
        }
        case FieldKind::seed: {
            std::uint64_t v = 0;
            const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) bad_value(spec, text, "expected an unsigned 64-bit integer");
            return v;
        }
        case FieldKind::flag: {
            std::string l = t;
            std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
            if (l == "false" || l == "no" || l == "off" || l == "0") return false;
            bad_value(spec, text, "expected true or false");
        }
        case FieldKind::text: {
            if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), t) == spec.choices.end()) {
                std::string allowed;
                for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : ", ") + c;
                bad_value(spec, text, "must be one of " + allowed);
            }
            return t;
        }
        case FieldKind::real_list: {
            std::vector<double> out;
            if (t.empty()) return out;
            std::stringstream ss(t);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const double v = parse_real(spec, item);
                check_range(spec, v, trim(item));
                out.push_back(v);
            }
            if (t.back() == ',') bad_value(spec, text, "trailing comma");
            return out;
        }
    }
    bad_value(spec, text, "unsupported field kind");
}

std::string format_field(const FieldValue& v) {
    struct Visitor {
        std::string operator()(double x) const { return format_number(x); }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(std::uint64_t x) const { return std::to_string(x); }
        std::string operator()(bool x) const { return x ? "true" : "false"; }
        std::string operator()(const std::string& x) const { return x; }
        std::string operator()(const std::vector<double>& xs) const {
            std::string out;
            for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_number(xs[i]);
            return out;
        }
    };
    return std::visit(Visitor{}, v);
}

ResolvedConfig resolve(const ConfigSchema& schema, const std::vector<KeyValue>& file, const std::vector<KeyValue>& overrides) {
    ResolvedConfig out;
    for (const auto& f : schema.fields()) out.set(f.name, parse_field(f, f.default_value));
    for (const auto* layer : {&file, &overrides}) {
        std::set<std::string> seen;
        for (const auto& kv : *layer) {
            const FieldSpec* spec = schema.find(kv.key);
            if (!spec) throw ValidationError(kv.origin + ": unknown key '" + kv.key + "'");
            if (!seen.insert(kv.key).second) throw ValidationError(kv.origin + ": duplicate key '" + kv.key + "'");
            try {
                out.set(kv.key, parse_field(*spec, kv.value));
            } catch (const ValidationError& e) {
                throw ValidationError(kv.origin + ": " + e.what());
            }
        }
    }
    return out;
}

const FieldValue& ResolvedConfig::at(const std::string& name) const {
    const auto it = values_.find(name);
    detail::require(it != values_.end(), "config: no field '" + name + "'");
    return it->second;
}

namespace {

template <class T>
const T& typed(const FieldValue& v, const std::string& name) {
    const T* p = std::get_if<T>(&v);
    detail::require(p != nullptr, "config: field '" + name + "' has a different type");
    return *p;
}

}  // namespace

double ResolvedConfig::real(const std::string& name) const { return typed<double>(at(name), name); }
std::int64_t ResolvedConfig::integer(const std::string& name) const { return typed<std::int64_t>(at(name), name); }
std::uint64_t ResolvedConfig::seed(const std::string& name) const { return typed<std::uint64_t>(at(name), name); }
bool ResolvedConfig::flag(const std::string& name) const { return typed<bool>(at(name), name); }
const std::string& ResolvedConfig::text(const std::string& name) const { return typed<std::string>(at(name), name); }
const std::vector<double>& ResolvedConfig::real_list(const std::string& name) const {
    return typed<std::vector<double>>(at(name), name);
}

}  // namespace needles
