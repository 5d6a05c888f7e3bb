#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <tuple>
#include <map>
#include <set>
#include <sstream>

namespace seaz::cli {

namespace {

constexpr const char* kAuto = "auto";

std::string normalize(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(c));
    }
    return out;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Longest known key that is a prefix of the unknown one, or the reverse.
std::string prefix_match(const std::string& u, const std::vector<std::string>& known) {
    std::string best;
    std::size_t best_len = 0;
    if (u.empty()) return best;
    for (const auto& k : known) {
        const std::string n = normalize(k);
        if (n.size() < 2) continue;
        const bool prefix = u.rfind(n, 0) == 0 || n.rfind(u, 0) == 0;
        if (prefix && n.size() > best_len) {
            best = k;
            best_len = n.size();
        }
    }
    return best;
}

// Closest key by edit distance, within roughly a third of the key length.
std::pair<std::string, std::size_t> edit_match(const std::string& u, const std::vector<std::string>& known) {
    std::string best;
    std::size_t best_d = std::max<std::size_t>(2, u.size() / 3) + 1;
    if (u.empty()) return {best, best_d};
    for (const auto& k : known) {
        const std::size_t d = levenshtein(u, normalize(k));
        if (d < best_d) {
            best = k;
            best_d = d;
        }
    }
    return {best, best_d};
}

// Leaf keys of every section, used for suggestions when a key sits at the wrong level.
const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"", {"schema_version", "plant", "nominal", "gains", "impedance", "q_filter", "architecture", "feedforward",
              "d_const", "condition", "analysis", "zregion", "sim", "scenario", "environments", "classifier",
              "sweep"}},
        {"plant", {"J_m", "B_m", "J_l", "B_l", "K", "N"}},
        {"nominal", {"J_m_hat", "B_m_hat"}},
        {"gains", {"K_p", "K_d"}},
        {"impedance", {"K_imp", "B_imp"}},
        {"q_filter", {"omega_dob", "zeta", "q0"}},
        {"analysis", {"tol_k", "margin_tol", "cap_factor", "post_check_points", "omega_lo", "omega_hi",
                      "points_per_decade", "refine"}},
        {"zregion", {"omega1", "eps_tail", "I_upper", "rel_tol", "omega_limit"}},
        {"zregion.I_upper", {"K_imp", "B_imp"}},
        {"sim", {"dt", "duration", "solver", "derivative_filter_cutoff", "noise_amplitude", "noise_seed", "coulomb",
                 "divergence_factor", "energy_sign"}},
        {"scenario", {"kind", "step", "approach_velocity", "command_offset"}},
        {"environments[]", {"K_e", "B_e", "m_e", "contact", "gap"}},
        {"classifier", {"tail_fraction", "window_cycles", "growth_threshold", "decay_threshold", "floor_factor",
                        "divergence_factor", "min_samples"}},
        {"sweep", {"K_p", "K_d", "omega_dob", "K_imp", "B_imp", "architecture", "feedforward", "task", "threads"}},
    };
    return s;
}

// Suggestion from any section, with the section it lives in.
std::pair<std::string, std::string> suggest_anywhere(const std::string& key) {
    const std::string u = normalize(key);
    const auto where = [](const std::string& sec) { return sec.empty() ? std::string("top level") : sec; };
    for (const auto& [sec, leaves] : schema()) {
        std::string hit = prefix_match(u, leaves);
        if (!hit.empty()) return {hit, where(sec)};
    }
    std::pair<std::string, std::string> best;
    std::size_t best_d = std::numeric_limits<std::size_t>::max();
    for (const auto& [sec, leaves] : schema()) {
        auto [hit, d] = edit_match(u, leaves);
        if (!hit.empty() && d < best_d) {
            best = {hit, where(sec)};
            best_d = d;
        }
    }
    return best;
}

enum class Check { Any, Positive, NonNegative };

// Reads one JSON object, records defaults and rejects unknown keys.
class Section {
public:
    Section(const json* obj, std::string path, std::string schema_key, std::vector<std::string>& defaults)
        : obj_(obj), path_(std::move(path)), defaults_(defaults) {
        if (obj_ && !obj_->is_object()) throw ConfigParseError(path_, "expected an object");
        const auto& keys = schema().at(schema_key);
        if (!obj_) return;
        for (const auto& [k, v] : obj_->items()) {
            if (std::find(keys.begin(), keys.end(), k) != keys.end()) continue;
            std::string msg = "unknown key '" + k + "'";
            std::string where;
            std::string hint = suggest_key(k, keys);
            if (hint.empty()) std::tie(hint, where) = suggest_anywhere(k);
            if (!hint.empty()) {
                msg += "; did you mean '" + hint + "'";
                if (!where.empty()) msg += " under '" + where + "'";
                msg += "?";
            }
            throw ConfigParseError(join(path_, k), msg);
        }
    }

    const std::string& path() const { return path_; }

    const json* get(const std::string& key) const {
        if (!obj_) return nullptr;
        auto it = obj_->find(key);
        return it == obj_->end() ? nullptr : &*it;
    }

    std::string key_path(const std::string& key) const { return join(path_, key); }

    void note_default(const std::string& key) { defaults_.push_back(key_path(key)); }

    double number(const std::string& key, double def, Check check = Check::Any) {
        const json* v = get(key);
        if (!v) {
            note_default(key);
            return def;
        }
        return as_number(*v, key_path(key), check);
    }

    int integer(const std::string& key, int def, Check check = Check::Any) {
        const json* v = get(key);
        if (!v) {
            note_default(key);
            return def;
        }
        if (!v->is_number_integer()) throw ConfigParseError(key_path(key), "expected an integer");
        const auto x = v->get<long long>();
        if ((check == Check::Positive && x <= 0) || (check == Check::NonNegative && x < 0)) {
            throw ConfigParseError(key_path(key), check == Check::Positive ? "must be > 0" : "must be >= 0");
        }
        return static_cast<int>(x);
    }

    bool boolean(const std::string& key, bool def) {
        const json* v = get(key);
        if (!v) {
            note_default(key);
            return def;
        }
        if (!v->is_boolean()) throw ConfigParseError(key_path(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& def) {
        const json* v = get(key);
        if (!v) {
            note_default(key);
            return def;
        }
        if (!v->is_string()) throw ConfigParseError(key_path(key), "expected a string");
        return v->get<std::string>();
    }

    // Number, or "auto" / absent for the library's automatic choice.
    std::optional<double> optional_number(const std::string& key, Check check, bool frequency = false) {
        const json* v = get(key);
        if (!v) {
            note_default(key);
            return std::nullopt;
        }
        if (v->is_string() && v->get<std::string>() == kAuto) return std::nullopt;
        return frequency ? checked(parse_frequency(*v, key_path(key)), key_path(key), check)
                         : as_number(*v, key_path(key), check);
    }

    double frequency(const std::string& key, double def) {
        const json* v = get(key);
        if (!v) {
            note_default(key);
            return def;
        }
        return checked(parse_frequency(*v, key_path(key)), key_path(key), Check::Positive);
    }

    static double as_number(const json& v, const std::string& path, Check check) {
        if (!v.is_number()) throw ConfigParseError(path, "expected a number");
        return checked(v.get<double>(), path, check);
    }

    static double checked(double x, const std::string& path, Check check) {
        if (!std::isfinite(x)) throw ConfigParseError(path, "must be finite");
        if (check == Check::Positive && !(x > 0.0)) throw ConfigParseError(path, "must be > 0");
        if (check == Check::NonNegative && !(x >= 0.0)) throw ConfigParseError(path, "must be >= 0");
        return x;
    }

private:
    const json* obj_;
    std::string path_;
    std::vector<std::string>& defaults_;
};

template <typename T, typename F>
std::vector<T> list(const Section& sec, const std::string& key, std::vector<std::string>& defaults, F&& item) {
    const json* v = sec.get(key);
    if (!v) {
        defaults.push_back(sec.key_path(key));
        return {};
    }
    if (!v->is_array()) throw ConfigParseError(sec.key_path(key), "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        out.push_back(item((*v)[i], sec.key_path(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
}

// Re-throws library validation errors with the section path in front.
template <typename F>
void validated(const std::string& path, F&& f) {
    try {
        f();
    } catch (const ConfigParseError&) {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigParseError(path, e.what());
    }
}

sim::Contact parse_contact(const std::string& s, const std::string& path) {
    if (s == "bilateral") return sim::Contact::Bilateral;
    if (s == "unilateral") return sim::Contact::Unilateral;
    throw ConfigParseError(path, "unknown contact '" + s + "' (expected bilateral or unilateral)");
}

std::string_view contact_name(sim::Contact c) { return c == sim::Contact::Bilateral ? "bilateral" : "unilateral"; }

sim::Scenario::Kind parse_scenario_kind(const std::string& s, const std::string& path) {
    if (s == "step_in_contact") return sim::Scenario::Kind::StepInContact;
    if (s == "collision") return sim::Scenario::Kind::Collision;
    throw ConfigParseError(path, "unknown scenario '" + s + "' (expected step_in_contact or collision)");
}

std::string_view scenario_name(sim::Scenario::Kind k) {
    return k == sim::Scenario::Kind::StepInContact ? "step_in_contact" : "collision";
}

metrics::SweepTask parse_task(const std::string& s, const std::string& path) {
    if (s == "maxstiff") return metrics::SweepTask::MaxStiff;
    if (s == "zregion") return metrics::SweepTask::ZRegion;
    if (s == "dc_stiffness") return metrics::SweepTask::DcStiffness;
    throw ConfigParseError(path, "unknown sweep task '" + s + "' (expected maxstiff, zregion or dc_stiffness)");
}

std::string_view task_name(metrics::SweepTask t) {
    switch (t) {
        case metrics::SweepTask::MaxStiff: return "maxstiff";
        case metrics::SweepTask::ZRegion: return "zregion";
        case metrics::SweepTask::DcStiffness: return "dc_stiffness";
    }
    return "?";
}

template <typename F>
auto enum_value(const std::string& path, F&& parse) {
    try {
        return parse();
    } catch (const ConfigParseError&) {
        throw;
    } catch (const ConfigError& e) {
        throw ConfigParseError(path, e.what());
    }
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(kAuto); }

}  // namespace

std::string suggest_key(const std::string& unknown, const std::vector<std::string>& known) {
    std::string best = prefix_match(normalize(unknown), known);
    if (best.empty()) best = edit_match(normalize(unknown), known).first;
    return best;
}

double parse_frequency(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw ConfigParseError(path, "expected a frequency (number in rad/s or \"<value> Hz\")");
    const std::string s = v.get<std::string>();
    std::istringstream is(s);
    double x = 0.0;
    if (!(is >> x)) throw ConfigParseError(path, "cannot parse frequency '" + s + "'");
    std::string unit;
    is >> unit;
    std::string rest;
    if (is >> rest) throw ConfigParseError(path, "cannot parse frequency '" + s + "'");
    if (unit == "Hz" || unit == "hz") return model::hz_to_rad(x);
    if (unit.empty() || unit == "rad/s") return x;
    throw ConfigParseError(path, "unknown frequency unit '" + unit + "' (expected Hz or rad/s)");
}

RunConfig parse_config(const json& doc) {
    RunConfig rc;
    auto& defs = rc.defaults_applied;
    Section top(&doc, "", "", defs);

    const int version = top.integer("schema_version", kSchemaVersion);
    if (version != kSchemaVersion) {
        throw ConfigParseError("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                                     std::to_string(kSchemaVersion) + ")");
    }

    auto& c = rc.sea;
    {
        Section s(top.get("plant"), "plant", "plant", defs);
        const model::PlantParams d;
        c.plant.J_m = s.number("J_m", d.J_m, Check::Positive);
        c.plant.B_m = s.number("B_m", d.B_m, Check::NonNegative);
        c.plant.J_l = s.number("J_l", d.J_l, Check::Positive);
        c.plant.B_l = s.number("B_l", d.B_l, Check::NonNegative);
        c.plant.K = s.number("K", d.K, Check::Positive);
        c.plant.N = s.number("N", d.N, Check::Positive);
        validated("plant", [&] { c.plant.validate(); });
    }
    {
        Section s(top.get("nominal"), "nominal", "nominal", defs);
        c.nominal.J_m_hat = s.number("J_m_hat", c.plant.J_m, Check::Positive);
        c.nominal.B_m_hat = s.number("B_m_hat", c.plant.B_m, Check::NonNegative);
        validated("nominal", [&] { c.nominal.validate(); });
    }
    {
        Section s(top.get("gains"), "gains", "gains", defs);
        const model::ControllerGains d;
        c.gains.K_p = s.number("K_p", d.K_p, Check::NonNegative);
        c.gains.K_d = s.number("K_d", d.K_d, Check::NonNegative);
        validated("gains", [&] { c.gains.validate(); });
    }
    {
        Section s(top.get("impedance"), "impedance", "impedance", defs);
        c.imp.K_imp = s.number("K_imp", 0.0, Check::NonNegative);
        c.imp.B_imp = s.number("B_imp", 0.0, Check::NonNegative);
    }
    {
        Section s(top.get("q_filter"), "q_filter", "q_filter", defs);
        const model::QFilterSpec d;
        c.q.omega = s.frequency("omega_dob", d.omega);
        c.q.zeta = s.number("zeta", d.zeta, Check::Positive);
        c.q.q0 = s.optional_number("q0", Check::Positive);
        validated("q_filter", [&] { c.q.validate(); });
    }
    c.arch = enum_value("architecture", [&] { return model::parse_architecture(top.string("architecture", "nodob")); });
    c.ff = enum_value("feedforward", [&] { return model::parse_feedforward(top.string("feedforward", "original")); });
    c.d_const = top.number("d_const", 0.0);
    validated("", [&] { c.validate(); });

    rc.condition = enum_value("condition", [&] { return metrics::parse_condition(top.string("condition", "load-strict")); });

    {
        Section s(top.get("analysis"), "analysis", "analysis", defs);
        auto& o = rc.stiffness;
        const metrics::StiffnessOptions d;
        o.tol_k = s.optional_number("tol_k", Check::Positive).value_or(-1.0);
        o.margin_tol = s.optional_number("margin_tol", Check::NonNegative).value_or(-1.0);
        o.cap_factor = s.number("cap_factor", d.cap_factor, Check::Positive);
        o.post_check_points = s.integer("post_check_points", d.post_check_points, Check::NonNegative);
        o.sweep.omega_lo = s.number("omega_lo", d.sweep.omega_lo, Check::Positive);
        o.sweep.omega_hi = s.number("omega_hi", d.sweep.omega_hi, Check::Positive);
        o.sweep.points_per_decade =
            static_cast<std::size_t>(s.integer("points_per_decade", static_cast<int>(d.sweep.points_per_decade),
                                               Check::Positive));
        o.sweep.refine = s.boolean("refine", d.sweep.refine);
        if (!(o.sweep.omega_hi > o.sweep.omega_lo)) {
            throw ConfigParseError("analysis.omega_hi", "must exceed analysis.omega_lo");
        }
    }
    {
        Section s(top.get("zregion"), "zregion", "zregion", defs);
        auto& z = rc.zregion;
        const metrics::ZRegionConfig d;
        z.omega1 = s.frequency("omega1", d.omega1);
        z.eps_tail = s.number("eps_tail", d.eps_tail, Check::Positive);
        z.rel_tol = s.number("rel_tol", d.rel_tol, Check::Positive);
        z.omega_limit = s.frequency("omega_limit", d.omega_limit);
        const json* iu = s.get("I_upper");
        if (!iu || (iu->is_string() && iu->get<std::string>() == kAuto)) {
            if (!iu) s.note_default("I_upper");
        } else {
            Section u(iu, "zregion.I_upper", "zregion.I_upper", defs);
            model::ImpedanceParams ip;
            ip.K_imp = u.number("K_imp", c.plant.K, Check::NonNegative);
            ip.B_imp = u.number("B_imp", 0.0, Check::NonNegative);
            z.I_upper = ip;
        }
        validated("zregion", [&] { z.validate(); });
    }
    {
        Section s(top.get("sim"), "sim", "sim", defs);
        auto& m = rc.sim;
        const sim::SimConfig d;
        m.dt = s.number("dt", d.dt, Check::Positive);
        m.duration = s.number("duration", d.duration, Check::Positive);
        m.solver = enum_value("sim.solver", [&] { return sim::parse_solver(s.string("solver", "exact")); });
        m.derivative_filter_cutoff = s.optional_number("derivative_filter_cutoff", Check::Positive, true);
        m.noise_amplitude = s.number("noise_amplitude", d.noise_amplitude, Check::NonNegative);
        m.noise_seed = static_cast<std::uint32_t>(s.integer("noise_seed", static_cast<int>(d.noise_seed), Check::NonNegative));
        m.coulomb = s.number("coulomb", d.coulomb, Check::NonNegative);
        m.divergence_factor = s.number("divergence_factor", d.divergence_factor, Check::Positive);
        rc.energy_sign = s.number("energy_sign", 1.0);
        if (rc.energy_sign != 1.0 && rc.energy_sign != -1.0) {
            throw ConfigParseError("sim.energy_sign", "must be 1 or -1");
        }
        validated("sim", [&] { m.validate(); });
    }
    {
        Section s(top.get("scenario"), "scenario", "scenario", defs);
        auto& sc = rc.scenario;
        const sim::Scenario d;
        sc.kind = parse_scenario_kind(s.string("kind", "step_in_contact"), "scenario.kind");
        sc.step = s.number("step", d.step);
        sc.approach_velocity = s.number("approach_velocity", d.approach_velocity);
        sc.command_offset = s.number("command_offset", d.command_offset);
    }
    {
        const json* envs = top.get("environments");
        if (!envs) {
            defs.push_back("environments");
            rc.environments = sim::default_environments(c.plant);
        } else {
            if (!envs->is_array() || envs->empty()) {
                throw ConfigParseError("environments", "expected a non-empty array");
            }
            for (std::size_t i = 0; i < envs->size(); ++i) {
                const std::string path = "environments[" + std::to_string(i) + "]";
                Section s(&(*envs)[i], path, "environments[]", defs);
                sim::EnvironmentModel e;
                e.K_e = s.number("K_e", 0.0, Check::NonNegative);
                e.B_e = s.number("B_e", 0.0, Check::NonNegative);
                e.m_e = s.number("m_e", 0.0, Check::NonNegative);
                e.contact = parse_contact(s.string("contact", "bilateral"), path + ".contact");
                e.gap = s.number("gap", 0.0, Check::NonNegative);
                validated(path, [&] { e.validate(); });
                rc.environments.push_back(e);
            }
        }
    }
    {
        Section s(top.get("classifier"), "classifier", "classifier", defs);
        auto& k = rc.classifier;
        const sim::ClassifierOptions d;
        k.tail_fraction = s.number("tail_fraction", d.tail_fraction, Check::Positive);
        k.window_cycles = s.integer("window_cycles", d.window_cycles, Check::Positive);
        k.growth_threshold = s.number("growth_threshold", d.growth_threshold, Check::Positive);
        k.decay_threshold = s.number("decay_threshold", d.decay_threshold, Check::Positive);
        k.floor_factor = s.number("floor_factor", d.floor_factor, Check::NonNegative);
        k.divergence_factor = s.number("divergence_factor", d.divergence_factor, Check::Positive);
        k.min_samples = static_cast<std::size_t>(s.integer("min_samples", static_cast<int>(d.min_samples), Check::Positive));
        if (k.tail_fraction > 1.0) throw ConfigParseError("classifier.tail_fraction", "must be <= 1");
        if (k.decay_threshold > k.growth_threshold) {
            throw ConfigParseError("classifier.decay_threshold", "must not exceed growth_threshold");
        }
    }
    {
        Section s(top.get("sweep"), "sweep", "sweep", defs);
        auto& g = rc.sweep;
        g.base = c;
        const auto num = [](Check chk) {
            return [chk](const json& v, const std::string& p) { return Section::as_number(v, p, chk); };
        };
        g.K_p = list<double>(s, "K_p", defs, num(Check::NonNegative));
        g.K_d = list<double>(s, "K_d", defs, num(Check::NonNegative));
        g.omega_dob = list<double>(s, "omega_dob", defs, [](const json& v, const std::string& p) {
            return Section::checked(parse_frequency(v, p), p, Check::Positive);
        });
        g.K_imp = list<double>(s, "K_imp", defs, num(Check::NonNegative));
        g.B_imp = list<double>(s, "B_imp", defs, num(Check::NonNegative));
        g.arch = list<model::Architecture>(s, "architecture", defs, [](const json& v, const std::string& p) {
            if (!v.is_string()) throw ConfigParseError(p, "expected a string");
            return enum_value(p, [&] { return model::parse_architecture(v.get<std::string>()); });
        });
        g.ff = list<model::FeedforwardKind>(s, "feedforward", defs, [](const json& v, const std::string& p) {
            if (!v.is_string()) throw ConfigParseError(p, "expected a string");
            return enum_value(p, [&] { return model::parse_feedforward(v.get<std::string>()); });
        });
        rc.sweep_task = parse_task(s.string("task", "maxstiff"), "sweep.task");
        rc.threads = static_cast<unsigned>(s.integer("threads", 0, Check::NonNegative));
    }
    return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("", "cannot open config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigParseError("", "cannot parse '" + path.string() + "': " + e.what());
    }
    return parse_config(doc);
}

json RunConfig::echo() const {
    const auto& c = sea;
    json j;
    j["schema_version"] = kSchemaVersion;
    j["plant"] = {{"J_m", c.plant.J_m}, {"B_m", c.plant.B_m}, {"J_l", c.plant.J_l},
                  {"B_l", c.plant.B_l}, {"K", c.plant.K},     {"N", c.plant.N}};
    j["nominal"] = {{"J_m_hat", c.nominal.J_m_hat}, {"B_m_hat", c.nominal.B_m_hat}};
    j["gains"] = {{"K_p", c.gains.K_p}, {"K_d", c.gains.K_d}};
    j["impedance"] = {{"K_imp", c.imp.K_imp}, {"B_imp", c.imp.B_imp}};
    j["q_filter"] = {{"omega_dob", c.q.omega}, {"zeta", c.q.zeta}, {"q0", optional_json(c.q.q0)}};
    j["architecture"] = std::string(model::to_string(c.arch));
    j["feedforward"] = std::string(model::to_string(c.ff));
    j["d_const"] = c.d_const;
    j["condition"] = std::string(metrics::to_string(condition));
    const auto opt_neg = [](double v) { return v < 0.0 ? json(kAuto) : json(v); };
    j["analysis"] = {{"tol_k", opt_neg(stiffness.tol_k)},
                     {"margin_tol", opt_neg(stiffness.margin_tol)},
                     {"cap_factor", stiffness.cap_factor},
                     {"post_check_points", stiffness.post_check_points},
                     {"omega_lo", stiffness.sweep.omega_lo},
                     {"omega_hi", stiffness.sweep.omega_hi},
                     {"points_per_decade", stiffness.sweep.points_per_decade},
                     {"refine", stiffness.sweep.refine}};
    j["zregion"] = {{"omega1", zregion.omega1},
                    {"eps_tail", zregion.eps_tail},
                    {"rel_tol", zregion.rel_tol},
                    {"omega_limit", zregion.omega_limit}};
    if (zregion.I_upper) {
        j["zregion"]["I_upper"] = {{"K_imp", zregion.I_upper->K_imp}, {"B_imp", zregion.I_upper->B_imp}};
    } else {
        j["zregion"]["I_upper"] = kAuto;
    }
    j["sim"] = {{"dt", sim.dt},
                {"duration", sim.duration},
                {"solver", std::string(sim::to_string(sim.solver))},
                {"derivative_filter_cutoff", optional_json(sim.derivative_filter_cutoff)},
                {"noise_amplitude", sim.noise_amplitude},
                {"noise_seed", sim.noise_seed},
                {"coulomb", sim.coulomb},
                {"divergence_factor", sim.divergence_factor},
                {"energy_sign", energy_sign}};
    j["scenario"] = {{"kind", std::string(scenario_name(scenario.kind))},
                     {"step", scenario.step},
                     {"approach_velocity", scenario.approach_velocity},
                     {"command_offset", scenario.command_offset}};
    j["environments"] = json::array();
    for (const auto& e : environments) {
        j["environments"].push_back({{"K_e", e.K_e},
                                     {"B_e", e.B_e},
                                     {"m_e", e.m_e},
                                     {"contact", std::string(contact_name(e.contact))},
                                     {"gap", e.gap}});
    }
    j["classifier"] = {{"tail_fraction", classifier.tail_fraction},
                       {"window_cycles", classifier.window_cycles},
                       {"growth_threshold", classifier.growth_threshold},
                       {"decay_threshold", classifier.decay_threshold},
                       {"floor_factor", classifier.floor_factor},
                       {"divergence_factor", classifier.divergence_factor},
                       {"min_samples", classifier.min_samples}};
    json sw;
    sw["K_p"] = sweep.K_p;
    sw["K_d"] = sweep.K_d;
    sw["omega_dob"] = sweep.omega_dob;
    sw["K_imp"] = sweep.K_imp;
    sw["B_imp"] = sweep.B_imp;
    sw["architecture"] = json::array();
    for (auto a : sweep.arch) sw["architecture"].push_back(std::string(model::to_string(a)));
    sw["feedforward"] = json::array();
    for (auto f : sweep.ff) sw["feedforward"].push_back(std::string(model::to_string(f)));
    sw["task"] = std::string(task_name(sweep_task));
    sw["threads"] = threads;
    j["sweep"] = sw;
    return j;
}

}  // namespace seaz::cli
