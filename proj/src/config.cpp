#include "nfd/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "nfd/errors.hpp"
#include "nfd/io.hpp"

namespace nfd {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int64_t parse_int(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(value.c_str(), &end, 10);
    if (errno != 0 || end == value.c_str() || *end != '\0') {
        throw ConfigError("key '" + key + "' needs an integer, got '" + value + "'");
    }
    return v;
}

double parse_double(const std::string& key, const std::string& value) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (errno != 0 || end == value.c_str() || *end != '\0') {
        throw ConfigError("key '" + key + "' needs a number, got '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("key '" + key + "' needs true or false, got '" + value + "'");
}

std::string print_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Key {
    const char* name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define INT_KEY(name, field)                                                     \
    Key{name,                                                                    \
        [](RunConfig& c, const std::string& v) {                                 \
            c.field = static_cast<int>(parse_int(name, v));                      \
        },                                                                       \
        [](const RunConfig& c) { return std::to_string(c.field); }}

#define DOUBLE_KEY(name, field)                                                  \
    Key{name,                                                                    \
        [](RunConfig& c, const std::string& v) { c.field = parse_double(name, v); }, \
        [](const RunConfig& c) { return print_double(c.field); }}

#define BOOL_KEY(name, field)                                                    \
    Key{name,                                                                    \
        [](RunConfig& c, const std::string& v) { c.field = parse_bool(name, v); }, \
        [](const RunConfig& c) { return c.field ? "true" : "false"; }}

#define STRING_KEY(name, field)                                                  \
    Key{name, [](RunConfig& c, const std::string& v) { c.field = v; },           \
        [](const RunConfig& c) { return c.field; }}

const std::vector<Key>& key_table() {
    static const std::vector<Key> keys = {
        Key{"seed",
            [](RunConfig& c, const std::string& v) {
                c.seed = static_cast<uint64_t>(parse_int("seed", v));
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
        INT_KEY("schedule.steps", schedule.steps),
        DOUBLE_KEY("schedule.beta_start", schedule.beta_start),
        DOUBLE_KEY("schedule.beta_end", schedule.beta_end),
        INT_KEY("net.data_dim", net.data_dim),
        INT_KEY("net.cond_dim", net.cond_dim),
        INT_KEY("net.time_dim", net.time_dim),
        Key{"net.hidden",
            [](RunConfig& c, const std::string& v) {
                std::vector<int> dims;
                std::stringstream ss(v);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    dims.push_back(static_cast<int>(parse_int("net.hidden", trim(item))));
                }
                c.net.hidden = std::move(dims);
            },
            [](const RunConfig& c) {
                std::string out;
                for (std::size_t i = 0; i < c.net.hidden.size(); ++i) {
                    if (i) out += ",";
                    out += std::to_string(c.net.hidden[i]);
                }
                return out;
            }},
        INT_KEY("data.identities", data.identities),
        INT_KEY("data.samples_per_id", data.samples_per_id),
        DOUBLE_KEY("data.noise_scale", data.noise_scale),
        INT_KEY("train.epochs", train.epochs),
        INT_KEY("train.batch_size", train.batch_size),
        DOUBLE_KEY("train.learning_rate", train.learning_rate),
        DOUBLE_KEY("train.dropout", train.dropout),
        BOOL_KEY("contexts.normalize", contexts.normalize),
        STRING_KEY("sampler.mode", sampler.mode),
        INT_KEY("sampler.steps", sampler.steps),
        DOUBLE_KEY("sampler.guidance", sampler.guidance),
        INT_KEY("sample.identities", sample.identities),
        INT_KEY("sample.samples_per_id", sample.samples_per_id),
        STRING_KEY("eval.pairing", eval.pairing),
        Key{"eval.impostor_pairs",
            [](RunConfig& c, const std::string& v) {
                c.eval.impostor_pairs = parse_int("eval.impostor_pairs", v);
            },
            [](const RunConfig& c) { return std::to_string(c.eval.impostor_pairs); }},
        INT_KEY("eval.hist_bins", eval.hist_bins),
        INT_KEY("eval.folds", eval.folds),
        BOOL_KEY("run.parallel", run.parallel),
    };
    return keys;
}

#undef INT_KEY
#undef DOUBLE_KEY
#undef BOOL_KEY
#undef STRING_KEY

void set_key(RunConfig& config, const std::string& key, const std::string& value) {
    for (const Key& k : key_table()) {
        if (key == k.name) {
            k.set(config, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig config;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              " is not 'key = value'");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(lineno) +
                              " has an empty key");
        }
        set_key(config, key, value);
    }
    return config;
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    for (const Key& k : key_table()) {
        out += k.name;
        out += " = ";
        out += k.get(config);
        out += '\n';
    }
    return out;
}

void apply_override(RunConfig& config, const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + assignment + "' is not key=value");
    }
    set_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig load_config_file(const std::string& path) {
    std::vector<uint8_t> bytes = read_file(path);
    return parse_config(std::string(bytes.begin(), bytes.end()));
}

}  // namespace nfd
