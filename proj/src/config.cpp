#include "chronoslit/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace chronoslit {
namespace {

enum class ValueKind { real, integer, boolean, text };

struct KeySpec {
  const char* name;
  ValueKind kind;
  bool required;
};

struct SectionSpec {
  const char* name;
  std::vector<KeySpec> keys;
};

// Single source of truth for the accepted grammar.
const std::vector<SectionSpec>& schema() {
  static const std::vector<SectionSpec> sections = {
      {"experiment",
       {{"wavelength", ValueKind::real, true},
        {"v_group", ValueKind::real, true},
        {"v_phase", ValueKind::real, true},
        {"slit_separation", ValueKind::real, true},
        {"screen_distance", ValueKind::real, true},
        {"extra_long_path", ValueKind::text, true},
        {"delta_T", ValueKind::real, true},
        {"pulse_sigma", ValueKind::real, true},
        {"t1", ValueKind::real, false},
        {"hbar", ValueKind::real, false}}},
      {"screen",
       {{"lo", ValueKind::real, true},
        {"hi", ValueKind::real, true},
        {"n", ValueKind::integer, true},
        {"periodic", ValueKind::boolean, false}}},
      {"emission",
       {{"model", ValueKind::text, false},
        {"weight_a", ValueKind::real, false},
        {"relative_phase", ValueKind::real, false}}},
      {"analysis",
       {{"window", ValueKind::real, false},
        {"events", ValueKind::integer, false},
        {"seed", ValueKind::integer, false}}},
      {"constraint",
       {{"hamiltonian", ValueKind::text, true},
        {"mass", ValueKind::real, false},
        {"omega", ValueKind::real, false},
        {"hbar", ValueKind::real, false},
        {"q_lo", ValueKind::real, true},
        {"q_hi", ValueKind::real, true},
        {"q_n", ValueKind::integer, true},
        {"t_lo", ValueKind::real, false},
        {"t_hi", ValueKind::real, true},
        {"t_n", ValueKind::integer, true},
        {"substeps", ValueKind::integer, false},
        {"packet_center", ValueKind::real, false},
        {"packet_sigma", ValueKind::real, false},
        {"packet_wavenumber", ValueKind::real, false},
        {"spectral_window", ValueKind::text, false}}},
  };
  return sections;
}

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

const SectionSpec* find_section(const std::string& name) {
  for (const auto& s : schema()) {
    if (name == s.name) return &s;
  }
  return nullptr;
}

const KeySpec* find_key(const SectionSpec& section, const std::string& key) {
  for (const auto& k : section.keys) {
    if (key == k.name) return &k;
  }
  return nullptr;
}

class Reader {
 public:
  Reader(std::string source, std::map<std::string, Section> sections)
      : source_(std::move(source)), sections_(std::move(sections)) {}

  bool has(const std::string& section) const { return sections_.count(section) > 0; }

  std::optional<double> real(const std::string& section, const std::string& key) const {
    const Entry* e = lookup(section, key);
    if (!e) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(e->value.c_str(), &end);
    if (end == e->value.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
      fail(*e, section + "." + key + " expects a real number, got '" + e->value + "'");
    }
    return v;
  }

  std::optional<std::int64_t> integer(const std::string& section, const std::string& key) const {
    const Entry* e = lookup(section, key);
    if (!e) return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(e->value.c_str(), &end, 10);
    if (end == e->value.c_str() || *end != '\0' || errno == ERANGE) {
      fail(*e, section + "." + key + " expects an integer, got '" + e->value + "'");
    }
    return v;
  }

  std::optional<bool> boolean(const std::string& section, const std::string& key) const {
    const Entry* e = lookup(section, key);
    if (!e) return std::nullopt;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    fail(*e, section + "." + key + " expects true or false, got '" + e->value + "'");
  }

  std::optional<std::string> text(const std::string& section, const std::string& key) const {
    const Entry* e = lookup(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  template <class T>
  T required(std::optional<T> value, const std::string& section, const std::string& key) const {
    if (!value) throw ConfigError(source_ + ": missing required key " + section + "." + key);
    return *value;
  }

  // Re-raises an invariant violation with the source name attached.
  [[noreturn]] void invalid(const std::string& section, const ConfigError& err) const {
    throw ConfigError(source_ + ": [" + section + "] " + err.what());
  }

 private:
  const Entry* lookup(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  [[noreturn]] void fail(const Entry& e, const std::string& message) const {
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": " + message);
  }

  std::string source_;
  std::map<std::string, Section> sections_;
};

std::size_t grid_size(std::int64_t n, const char* key) {
  if (n < 8) throw ConfigError(std::string(key) + " must be at least 8");
  return static_cast<std::size_t>(n);
}

}  // namespace

double RunConfig::resolved_window() const {
  if (window) return *window;
  if (!experiment) throw ConfigError("no experiment section to derive a visibility window from");
  return 4.0 * experiment->nominal_fringe_spacing();
}

EmissionModel parse_emission(const std::string& spec, double weight_a, double relative_phase) {
  if (spec == "coherent") return coherent_emission(weight_a, relative_phase);
  if (spec == "incoherent") return incoherent_emission(weight_a);
  if (spec == "single:A") return SingleEmission{Path::A};
  if (spec == "single:B") return SingleEmission{Path::B};
  throw ConfigError("unknown emission model '" + spec +
                    "' (expected coherent, single:A, single:B or incoherent)");
}

RunConfig parse_config_text(const std::string& text, const std::string& source_name) {
  std::map<std::string, Section> sections;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line_no = 0;
  const auto fail = [&](const std::string& message) {
    throw ConfigError(source_name + ":" + std::to_string(line_no) + ": " + message);
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      current = trim(line.substr(1, line.size() - 2));
      if (!find_section(current)) fail("unknown section [" + current + "]");
      if (sections.count(current)) fail("duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
    if (current.empty()) fail("key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    if (value.empty()) fail("empty value for key '" + key + "'");
    if (!find_key(*find_section(current), key)) {
      fail("unknown key '" + key + "' in section [" + current + "]");
    }
    if (sections[current].count(key)) fail("duplicate key '" + key + "'");
    sections[current][key] = Entry{value, line_no};
  }

  Reader r(source_name, std::move(sections));
  RunConfig cfg;
  Json echo = Json::object();

  if (r.has("experiment") != r.has("screen")) {
    throw ConfigError(source_name + ": [experiment] and [screen] must appear together");
  }
  if (r.has("experiment")) {
    ExperimentConfig e;
    const std::string s = "experiment";
    e.wavelength = r.required(r.real(s, "wavelength"), s, "wavelength");
    e.v_group = r.required(r.real(s, "v_group"), s, "v_group");
    e.v_phase = r.required(r.real(s, "v_phase"), s, "v_phase");
    e.slit_separation = r.required(r.real(s, "slit_separation"), s, "slit_separation");
    e.screen_distance = r.required(r.real(s, "screen_distance"), s, "screen_distance");
    e.delta_T = r.required(r.real(s, "delta_T"), s, "delta_T");
    e.pulse_sigma = r.required(r.real(s, "pulse_sigma"), s, "pulse_sigma");
    e.t1 = r.real(s, "t1").value_or(0.0);
    e.hbar = r.real(s, "hbar").value_or(kHbarSI);

    // extra_long_path = tuned sets the synchrony condition Delta L0 = v_group Delta T.
    const std::string excess = r.required(r.text(s, "extra_long_path"), s, "extra_long_path");
    if (excess == "tuned") {
      e.extra_long_path = e.v_group * e.delta_T;
    } else {
      e.extra_long_path = r.required(r.real(s, "extra_long_path"), s, "extra_long_path");
    }

    const std::string g = "screen";
    try {
      e.screen = make_grid(r.required(r.real(g, "lo"), g, "lo"), r.required(r.real(g, "hi"), g, "hi"),
                           grid_size(r.required(r.integer(g, "n"), g, "n"), "n"),
                           r.boolean(g, "periodic").value_or(false));
    } catch (const ConfigError& err) {
      if (std::string(err.what()).rfind(source_name, 0) == 0) throw;
      r.invalid(g, err);
    }
    try {
      validate(e);
    } catch (const ConfigError& err) {
      r.invalid(s, err);
    }
    cfg.experiment = e;
    echo["experiment"] = {{"wavelength", e.wavelength},
                          {"v_group", e.v_group},
                          {"v_phase", e.v_phase},
                          {"slit_separation", e.slit_separation},
                          {"screen_distance", e.screen_distance},
                          {"extra_long_path", e.extra_long_path},
                          {"delta_T", e.delta_T},
                          {"pulse_sigma", e.pulse_sigma},
                          {"t1", e.t1},
                          {"hbar", e.hbar}};
    echo["screen"] = {{"lo", e.screen.lo()},
                      {"hi", e.screen.hi()},
                      {"n", e.screen.size()},
                      {"periodic", e.screen.periodic()}};
  }

  {
    const std::string s = "emission";
    const std::string model = r.text(s, "model").value_or("coherent");
    cfg.emission_weight_a = r.real(s, "weight_a").value_or(0.5);
    cfg.emission_phase = r.real(s, "relative_phase").value_or(0.0);
    try {
      cfg.emission = parse_emission(model, cfg.emission_weight_a, cfg.emission_phase);
    } catch (const ConfigError& err) {
      r.invalid(s, err);
    }
    echo["emission"] = {{"model", model},
                        {"weight_a", cfg.emission_weight_a},
                        {"relative_phase", cfg.emission_phase}};
  }

  {
    const std::string s = "analysis";
    cfg.window = r.real(s, "window");
    const auto events = r.integer(s, "events").value_or(0);
    const auto seed = r.integer(s, "seed").value_or(1);
    if (events < 0) throw ConfigError(source_name + ": analysis.events must be non-negative");
    if (seed < 0) throw ConfigError(source_name + ": analysis.seed must be non-negative");
    if (cfg.window && !(*cfg.window > 0.0)) {
      throw ConfigError(source_name + ": analysis.window must be positive");
    }
    cfg.events = static_cast<std::uint64_t>(events);
    cfg.seed = static_cast<std::uint64_t>(seed);
    Json analysis = {{"events", cfg.events}, {"seed", cfg.seed}};
    if (cfg.experiment || cfg.window) analysis["window"] = cfg.resolved_window();
    echo["analysis"] = analysis;
  }

  if (r.has("constraint")) {
    const std::string s = "constraint";
    ConstraintSetup c;
    c.hamiltonian = r.required(r.text(s, "hamiltonian"), s, "hamiltonian");
    if (c.hamiltonian != "free" && c.hamiltonian != "harmonic") {
      throw ConfigError(source_name + ": constraint.hamiltonian must be free or harmonic");
    }
    c.mass = r.real(s, "mass").value_or(1.0);
    c.omega = r.real(s, "omega").value_or(1.0);
    c.hbar = r.real(s, "hbar").value_or(1.0);
    c.substeps = static_cast<int>(r.integer(s, "substeps").value_or(1));
    c.packet_center = r.real(s, "packet_center").value_or(0.0);
    c.packet_sigma = r.real(s, "packet_sigma").value_or(1.0);
    c.packet_wavenumber = r.real(s, "packet_wavenumber").value_or(0.0);
    c.spectral_window = r.text(s, "spectral_window").value_or("gaussian");
    try {
      c.grid_q = make_grid(r.required(r.real(s, "q_lo"), s, "q_lo"),
                           r.required(r.real(s, "q_hi"), s, "q_hi"),
                           grid_size(r.required(r.integer(s, "q_n"), s, "q_n"), "q_n"), true);
      c.grid_t = make_grid(r.real(s, "t_lo").value_or(0.0), r.required(r.real(s, "t_hi"), s, "t_hi"),
                           grid_size(r.required(r.integer(s, "t_n"), s, "t_n"), "t_n"), true);
      if (!(c.mass > 0.0)) throw ConfigError("mass must be positive");
      if (!(c.omega > 0.0)) throw ConfigError("omega must be positive");
      if (!(c.hbar > 0.0)) throw ConfigError("hbar must be positive");
      if (c.substeps < 1) throw ConfigError("substeps must be at least 1");
      if (!(c.packet_sigma > 0.0)) throw ConfigError("packet_sigma must be positive");
      if (c.spectral_window != "gaussian" && c.spectral_window != "rectangular") {
        throw ConfigError("spectral_window must be gaussian or rectangular");
      }
    } catch (const ConfigError& err) {
      if (std::string(err.what()).rfind(source_name, 0) == 0) throw;
      r.invalid(s, err);
    }
    cfg.constraint = c;
    echo["constraint"] = {{"hamiltonian", c.hamiltonian},
                          {"mass", c.mass},
                          {"omega", c.omega},
                          {"hbar", c.hbar},
                          {"q_lo", c.grid_q.lo()},
                          {"q_hi", c.grid_q.hi()},
                          {"q_n", c.grid_q.size()},
                          {"t_lo", c.grid_t.lo()},
                          {"t_hi", c.grid_t.hi()},
                          {"t_n", c.grid_t.size()},
                          {"substeps", c.substeps},
                          {"packet_center", c.packet_center},
                          {"packet_sigma", c.packet_sigma},
                          {"packet_wavenumber", c.packet_wavenumber},
                          {"spectral_window", c.spectral_window}};
  }

  cfg.echo = std::move(echo);
  return cfg;
}

RunConfig config_from_echo(const Json& echo, const std::string& source_name) {
  if (!echo.is_object()) throw ConfigError(source_name + ": configuration echo must be an object");
  std::ostringstream text;
  for (const auto& spec : schema()) {
    if (!echo.contains(spec.name)) continue;
    const Json& section = echo.at(spec.name);
    if (!section.is_object()) throw ConfigError(source_name + ": [" + spec.name + "] must be an object");
    text << '[' << spec.name << "]\n";
    for (const auto& [key, value] : section.items()) {
      text << key << " = ";
      if (value.is_string()) {
        text << value.get<std::string>();
      } else {
        text << value.dump();  // numbers print in round-trip form
      }
      text << '\n';
    }
  }
  return parse_config_text(text.str(), source_name);
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (const Json::parse_error& err) {
      throw ConfigError(path.string() + ": invalid JSON: " + err.what());
    }
    return config_from_echo(doc.contains("config_echo") ? doc.at("config_echo") : doc, path.string());
  }
  return parse_config_text(text, path.string());
}

std::string config_grammar() {
  std::ostringstream out;
  out << "Config file grammar: '[section]' headers, 'key = value' lines, '#' comments.\n"
         "Unknown sections or keys are errors. Keys marked * are required.\n";
  for (const auto& s : schema()) {
    out << "  [" << s.name << "]\n   ";
    for (const auto& k : s.keys) out << ' ' << k.name << (k.required ? "*" : "");
    out << '\n';
  }
  out << "  extra_long_path accepts a length in meters or 'tuned' (v_group * delta_T).\n";
  return out.str();
}

}  // namespace chronoslit
