// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#include "gamn/config.hpp"

#include "gamn/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace gamn::config {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
        throw ConfigError(key, "expected a finite number, got '" + v + "'");
    }
    return x;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v)
{
    Int x{};
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key, "expected an integer, got '" + v + "'");
    }
    return x;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += items[i];
    }
    return out;
}

struct Field {
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define GAMN_DOUBLE(KEY, MEMBER)                                                               \
    Field{KEY, [](ExperimentConfig& c, const std::string& v) { c.MEMBER = parse_double(KEY, v); }, \
          [](const ExperimentConfig& c) { return format_double(c.MEMBER); }}
#define GAMN_INT(KEY, TYPE, MEMBER)                                                            \
    Field{KEY, [](ExperimentConfig& c, const std::string& v) { c.MEMBER = parse_int<TYPE>(KEY, v); }, \
          [](const ExperimentConfig& c) { return std::to_string(c.MEMBER); }}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        GAMN_INT("system.N", std::size_t, n),
        GAMN_INT("system.M", std::size_t, m),
        GAMN_INT("system.K", std::size_t, k),
        GAMN_DOUBLE("system.power_dbm", power_dbm),
        GAMN_DOUBLE("system.noise_dbm", noise_dbm),
        Field{"system.weights",
              [](ExperimentConfig& c, const std::string& v) {
                  c.weights.clear();
                  if (v == "uniform") return;
                  for (const auto& s : split_list(v)) {
                      c.weights.push_back(parse_double("system.weights", s));
                  }
                  if (c.weights.empty()) throw ConfigError("system.weights", "empty list");
              },
              [](const ExperimentConfig& c) {
                  if (c.weights.empty()) return std::string("uniform");
                  std::vector<std::string> s;
                  for (double w : c.weights) s.push_back(format_double(w));
                  return join(s);
              }},

        GAMN_DOUBLE("geometry.bs_x", geometry.bs.x),
        GAMN_DOUBLE("geometry.bs_y", geometry.bs.y),
        GAMN_DOUBLE("geometry.ris_x", geometry.ris.x),
        GAMN_DOUBLE("geometry.ris_y", geometry.ris.y),
        GAMN_DOUBLE("geometry.user_x", geometry.user_center.x),
        GAMN_DOUBLE("geometry.user_y", geometry.user_center.y),
        GAMN_DOUBLE("geometry.user_radius", geometry.user_radius),
        GAMN_DOUBLE("geometry.carrier_hz", geometry.carrier_hz),
        GAMN_DOUBLE("geometry.antenna_spacing", geometry.antenna_spacing),

        GAMN_DOUBLE("rician.kappa_br", rician.kappa_br),
        GAMN_DOUBLE("rician.kappa_ru", rician.kappa_ru),
        GAMN_DOUBLE("rician.los_intercept", rician.los.intercept),
        GAMN_DOUBLE("rician.los_distance_slope", rician.los.distance_slope),
        GAMN_DOUBLE("rician.los_freq_slope", rician.los.freq_slope),
        GAMN_DOUBLE("rician.nlos_intercept", rician.nlos.intercept),
        GAMN_DOUBLE("rician.nlos_distance_slope", rician.nlos.distance_slope),
        GAMN_DOUBLE("rician.nlos_freq_slope", rician.nlos.freq_slope),

        GAMN_INT("hyper.n_M", int, hyper.n_outer),
        GAMN_INT("hyper.n_P", int, hyper.n_phase),
        GAMN_INT("hyper.n_PR", int, hyper.n_precoder),
        GAMN_INT("hyper.n_I", int, hyper.phase_period),
        GAMN_DOUBLE("hyper.alpha_P", hyper.alpha_phase),
        GAMN_DOUBLE("hyper.alpha_PR", hyper.alpha_precoder),
        GAMN_DOUBLE("hyper.h", hyper.euler),
        GAMN_INT("hyper.hidden", std::size_t, hyper.hidden),
        GAMN_DOUBLE("hyper.beta1", hyper.radam.beta1),
        GAMN_DOUBLE("hyper.beta2", hyper.radam.beta2),
        GAMN_DOUBLE("hyper.eps", hyper.radam.eps),
        Field{"hyper.pl_activation",
              [](ExperimentConfig& c, const std::string& v) {
                  try {
                      c.hyper.phase_activation = nets::parse_activation(v);
                  } catch (const Error& e) {
                      throw ConfigError("hyper.pl_activation", e.what());
                  }
              },
              [](const ExperimentConfig& c) {
                  return std::string(nets::activation_name(c.hyper.phase_activation));
              }},
        Field{"hyper.prl_activation",
              [](ExperimentConfig& c, const std::string& v) {
                  try {
                      c.hyper.precoder_activation = nets::parse_activation(v);
                  } catch (const Error& e) {
                      throw ConfigError("hyper.prl_activation", e.what());
                  }
              },
              [](const ExperimentConfig& c) {
                  return std::string(nets::activation_name(c.hyper.precoder_activation));
              }},
        Field{"hyper.input_gradient",
              [](ExperimentConfig& c, const std::string& v) {
                  if (v == "riemannian") c.hyper.input_gradient = meta::InputGradient::Riemannian;
                  else if (v == "euclidean") c.hyper.input_gradient = meta::InputGradient::Euclidean;
                  else throw ConfigError("hyper.input_gradient", "expected riemannian or euclidean");
              },
              [](const ExperimentConfig& c) {
                  return std::string(c.hyper.input_gradient == meta::InputGradient::Riemannian
                                         ? "riemannian"
                                         : "euclidean");
              }},
        Field{"hyper.precoder_units",
              [](ExperimentConfig& c, const std::string& v) {
                  if (v == "normalized") c.hyper.precoder_units = meta::PrecoderUnits::Normalized;
                  else if (v == "absolute") c.hyper.precoder_units = meta::PrecoderUnits::Absolute;
                  else throw ConfigError("hyper.precoder_units", "expected normalized or absolute");
              },
              [](const ExperimentConfig& c) {
                  return std::string(c.hyper.precoder_units == meta::PrecoderUnits::Normalized
                                         ? "normalized"
                                         : "absolute");
              }},
        Field{"hyper.zero_last_layer",
              [](ExperimentConfig& c, const std::string& v) {
                  c.hyper.zero_last_layer = parse_bool("hyper.zero_last_layer", v);
              },
              [](const ExperimentConfig& c) {
                  return std::string(c.hyper.zero_last_layer ? "true" : "false");
              }},
        GAMN_DOUBLE("hyper.pga_step_phase", hyper.pga_step_phase),
        GAMN_DOUBLE("hyper.pga_step_precoder", hyper.pga_step_precoder),
        GAMN_DOUBLE("hyper.pga_decay", hyper.pga_decay),

        Field{"run.variants",
              [](ExperimentConfig& c, const std::string& v) {
                  c.variants.clear();
                  for (const auto& s : split_list(v)) c.variants.push_back(meta::parse_variant(s));
                  if (c.variants.empty()) throw ConfigError("run.variants", "empty list");
              },
              [](const ExperimentConfig& c) {
                  std::vector<std::string> s;
                  for (auto v : c.variants) s.emplace_back(meta::variant_name(v));
                  return join(s);
              }},
        GAMN_INT("run.n_realizations", int, n_realizations),
        GAMN_INT("run.master_seed", std::uint64_t, master_seed),

        Field{"output.dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; },
              [](const ExperimentConfig& c) { return c.output_dir; }},
        Field{"output.prefix",
              [](ExperimentConfig& c, const std::string& v) { c.output_prefix = v; },
              [](const ExperimentConfig& c) { return c.output_prefix; }},
    };
    return table;
}

#undef GAMN_DOUBLE
#undef GAMN_INT

const char* const kRequired[] = {"system.N", "system.M", "system.K", "system.power_dbm"};

} // namespace

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double dbm_to_watts(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }

KeyValues parse_text(const std::string& text)
{
    KeyValues kv;
    std::stringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where, "empty key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (!section.empty()) key = section + "." + key;
        if (!kv.emplace(key, value).second) throw ConfigError(key, "duplicate key");
    }
    return kv;
}

KeyValues read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

metrics::LinkParams ExperimentConfig::link() const
{
    metrics::LinkParams l;
    l.weights = weights.empty() ? metrics::uniform_weights(k) : weights;
    l.sigma2 = noise_watts();
    return l;
}

void ExperimentConfig::validate() const
{
    if (n < 1) throw ConfigError("system.N", "must be >= 1");
    if (m < 1) throw ConfigError("system.M", "must be >= 1");
    if (k < 1) throw ConfigError("system.K", "must be >= 1");
    if (!weights.empty() && weights.size() != k) {
        throw ConfigError("system.weights", "expected " + std::to_string(k) + " entries");
    }
    metrics::validate_link(link(), k);
    if (!(power_watts() > 0.0)) throw ConfigError("system.power_dbm", "power underflows to zero");
    geometry.validate();
    rician.validate();
    hyper.validate();
    if (variants.empty()) throw ConfigError("run.variants", "empty list");
    if (n_realizations < 1) throw ConfigError("run.n_realizations", "must be >= 1");
    if (output_prefix.empty()) throw ConfigError("output.prefix", "must not be empty");
}

ExperimentConfig resolve(const KeyValues& kv)
{
    for (const char* key : kRequired) {
        if (!kv.count(key)) throw ConfigError(key, "required key is missing");
    }
    ExperimentConfig c;
    std::size_t used = 0;
    for (const auto& f : fields()) {
        const auto it = kv.find(f.key);
        if (it == kv.end()) continue;
        f.set(c, it->second);
        ++used;
    }
    if (used != kv.size()) {
        for (const auto& [key, value] : kv) {
            bool known = false;
            for (const auto& f : fields()) known = known || key == f.key;
            if (!known) throw ConfigError(key, "unknown key");
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load(const std::filesystem::path& path) { return resolve(read_file(path)); }

KeyValues to_keys(const ExperimentConfig& c)
{
    KeyValues kv;
    for (const auto& f : fields()) kv[f.key] = f.get(c);
    return kv;
}

std::string dump(const ExperimentConfig& c)
{
    std::string out = "# gamn resolved configuration, artifact version ";
    out += kArtifactVersion;
    out += "\n";
    std::string section;
    for (const auto& f : fields()) {
        const std::string key = f.key;
        const auto dot = key.find('.');
        const std::string sec = key.substr(0, dot);
        if (sec != section) {
            out += "\n[" + sec + "]\n";
            section = sec;
        }
        out += key.substr(dot + 1) + " = " + f.get(c) + "\n";
    }
    return out;
}

} // namespace gamn::config
