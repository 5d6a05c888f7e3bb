#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>

#include "criteria.hpp"
#include "seaz/error.hpp"

namespace seaz::cli {

namespace {

constexpr const char* kToolVersion = "0.1.0";

json verdict_json(const passivity::PassivityVerdict& v, double tol) {
    return {{"passive", v.passive},
            {"min_real", v.min_real},
            {"argmin_omega", v.argmin_omega},
            {"unstable_poles", v.unstable_poles},
            {"bad_axis_poles", v.bad_axis_poles},
            {"singular_samples", v.singular_samples},
            {"tolerance", tol}};
}

json sweep_options_json(const passivity::SweepOptions& s) {
    return {{"omega_lo", s.omega_lo},
            {"omega_hi", s.omega_hi},
            {"points_per_decade", s.points_per_decade},
            {"refine", s.refine}};
}

double margin_tol(const RunConfig& rc) {
    return rc.stiffness.margin_tol >= 0.0 ? rc.stiffness.margin_tol : passivity::default_tolerance(rc.sea.plant);
}

double tol_k(const RunConfig& rc) { return rc.stiffness.tol_k > 0.0 ? rc.stiffness.tol_k : 1e-3 * rc.sea.plant.K; }

json stiffness_json(const metrics::StiffnessResult& r) {
    return {{"k_max", r.k_max},
            {"k_max_normalized", r.k_max_normalized},
            {"condition", std::string(metrics::to_string(r.condition))},
            {"bracket_lo", r.bracket_lo},
            {"bracket_hi", r.bracket_hi},
            {"tol_k", r.tol_k},
            {"evaluations", r.evaluations}};
}

json config_row_json(const model::SeaConfig& c) {
    return {{"K_p", c.gains.K_p},
            {"K_d", c.gains.K_d},
            {"omega_dob", c.q.omega},
            {"K_imp", c.imp.K_imp},
            {"B_imp", c.imp.B_imp},
            {"architecture", std::string(model::to_string(c.arch))},
            {"feedforward", std::string(model::to_string(c.ff))}};
}

// Rows of Re/Im of Z_s and Z_l on the analysis grid.
struct FrequencyTable {
    std::vector<double> omega;
    std::vector<lti::Complex> z_s, z_l;
};

struct Output {
    json results;
    int exit_code = kExitOk;
    std::vector<std::pair<std::string, std::function<void(std::ostream&)>>> sidecars;
};

void csv_precision(std::ostream& os) { os << std::setprecision(12); }

Output analyze(const RunConfig& rc) {
    Output out;
    const double tol = margin_tol(rc);
    const auto ports = model::spring_port(rc.sea);
    const auto load = model::load_port(ports.Z_s, rc.sea.plant);
    const auto& sw = rc.stiffness.sweep;

    const auto spring = passivity::positive_real_margin(ports.Z_s, tol, sw);
    const auto strict =
        passivity::load_port_condition(ports.Z_s, rc.sea.plant, passivity::LoadVariant::StrictAdmittance, tol, sw);
    const auto threshold =
        passivity::load_port_condition(ports.Z_s, rc.sea.plant, passivity::LoadVariant::DampingThreshold, tol, sw);
    const auto dc = metrics::dc_rendered_stiffness(rc.sea);

    json& r = out.results;
    r["spring"] = verdict_json(spring, tol);
    r["load_strict"] = verdict_json(strict, tol);
    r["load_threshold"] = verdict_json(threshold, tol);
    r["grid"] = sweep_options_json(sw);
    r["dc_stiffness"] = {{"formula", dc.formula},
                         {"low_frequency", dc.low_frequency},
                         {"probe_omega", dc.probe_omega},
                         {"rel_diff", dc.rel_diff},
                         {"consistent", dc.consistent},
                         {"tolerance", 1e-3},
                         {"disturbance_gain", dc.disturbance_gain}};
    if (rc.sea.arch == model::Architecture::NoDob) {
        const auto d = passivity::rezl_coefficients(rc.sea.plant, rc.sea.gains);
        const auto p = passivity::rezl_coefficients_printed(rc.sea.plant, rc.sea.gains);
        r["rezl_coefficients"] = {{"derived", {{"c4", d.c4}, {"c2", d.c2}, {"c0", d.c0}}},
                                  {"printed", {{"c4", p.c4}, {"c2", p.c2}, {"c0", p.c0}}},
                                  {"note", "taken with impedance and feedforward set to zero"}};
    }

    const passivity::PassivityVerdict* requested = &strict;
    if (rc.condition == metrics::Condition::Spring) requested = &spring;
    if (rc.condition == metrics::Condition::LoadThreshold) requested = &threshold;
    r["requested_condition"] = std::string(metrics::to_string(rc.condition));
    r["requested_passive"] = requested->passive;
    if (!requested->passive) out.exit_code = kExitUnsafe;

    auto table = std::make_shared<FrequencyTable>();
    const auto grid = lti::FrequencyGrid::per_decade(sw.omega_lo, sw.omega_hi, sw.points_per_decade);
    for (double w : grid.points()) {
        table->omega.push_back(w);
        table->z_s.push_back(ports.Z_s.at_frequency(w));
        table->z_l.push_back(load.Z_l.at_frequency(w));
    }
    out.sidecars.emplace_back("frequency_response.csv", [table](std::ostream& os) {
        csv_precision(os);
        os << "omega,re_Z_s,im_Z_s,re_Z_l,im_Z_l\n";
        for (std::size_t k = 0; k < table->omega.size(); ++k) {
            os << table->omega[k] << ',' << table->z_s[k].real() << ',' << table->z_s[k].imag() << ','
               << table->z_l[k].real() << ',' << table->z_l[k].imag() << '\n';
        }
    });
    return out;
}

Output zregion(const RunConfig& rc) {
    Output out;
    auto z = std::make_shared<metrics::ZRegionResult>(metrics::z_region(rc.sea, rc.zregion));
    const auto iu = rc.zregion.upper(rc.sea.plant);
    out.results = {{"z_region", z->value},
                   {"omega1", rc.zregion.omega1},
                   {"omega2", z->omega2},
                   {"intervals", z->intervals},
                   {"I_upper", {{"K_imp", iu.K_imp}, {"B_imp", iu.B_imp}}},
                   {"eps_tail", rc.zregion.eps_tail},
                   {"rel_tol", rc.zregion.rel_tol}};
    out.sidecars.emplace_back("zregion_integrand.csv", [z](std::ostream& os) {
        csv_precision(os);
        os << "omega,integrand\n";
        for (const auto& [w, v] : z->integrand) os << w << ',' << v << '\n';
    });
    return out;
}

Output maxstiff(const RunConfig& rc) {
    Output out;
    try {
        const auto r = metrics::max_safe_stiffness(rc.sea, rc.condition, rc.stiffness);
        out.results = stiffness_json(r);
        out.results["margin_tol"] = margin_tol(rc);
        out.results["grid"] = sweep_options_json(rc.stiffness.sweep);
    } catch (const UnsafeBaseline& e) {
        out.results = {{"condition", std::string(metrics::to_string(rc.condition))},
                       {"k_max", nullptr},
                       {"unsafe_baseline", e.what()},
                       {"margin_tol", margin_tol(rc)},
                       {"tol_k", tol_k(rc)}};
        out.exit_code = kExitUnsafe;
    }
    return out;
}

std::string_view task_label(metrics::SweepTask t) {
    switch (t) {
        case metrics::SweepTask::MaxStiff: return "k_max_normalized";
        case metrics::SweepTask::ZRegion: return "z_region";
        case metrics::SweepTask::DcStiffness: return "dc_stiffness";
    }
    return "value";
}

Output sweep(const RunConfig& rc) {
    Output out;
    metrics::SweepGrid grid = rc.sweep;
    grid.base = rc.sea;
    metrics::SweepOptions opt;
    opt.condition = rc.condition;
    opt.stiffness = rc.stiffness;
    opt.zregion = rc.zregion;
    opt.threads = rc.threads;
    auto rows = std::make_shared<std::vector<metrics::SweepRow>>(metrics::param_sweep(grid, rc.sweep_task, opt));

    const std::string label(task_label(rc.sweep_task));
    json arr = json::array();
    int failed = 0;
    for (const auto& row : *rows) {
        json j = config_row_json(row.cfg);
        if (row.error.empty()) {
            j[label] = row.value;
        } else {
            j[label] = nullptr;
            j["error"] = row.error;
            ++failed;
        }
        arr.push_back(j);
    }
    out.results = {{"task", label},
                   {"rows", arr},
                   {"row_count", rows->size()},
                   {"failed_rows", failed}};
    if (rc.sweep_task == metrics::SweepTask::MaxStiff) {
        out.results["condition"] = std::string(metrics::to_string(rc.condition));
        out.results["tol_k"] = tol_k(rc);
        out.results["margin_tol"] = margin_tol(rc);
    }
    out.sidecars.emplace_back("sweep.csv", [rows, label](std::ostream& os) {
        csv_precision(os);
        os << "K_p,K_d,omega_dob,K_imp,B_imp,architecture,feedforward," << label << ",error\n";
        for (const auto& r : *rows) {
            const auto& c = r.cfg;
            os << c.gains.K_p << ',' << c.gains.K_d << ',' << c.q.omega << ',' << c.imp.K_imp << ',' << c.imp.B_imp
               << ',' << model::to_string(c.arch) << ',' << model::to_string(c.ff) << ',';
            if (r.error.empty()) os << r.value;
            os << ',' << (r.error.empty() ? "" : "\"" + r.error + "\"") << '\n';
        }
    });
    return out;
}

json ledger_json(const passivity::EnergyLedger& l) {
    return {{"final", l.energy.empty() ? 0.0 : l.energy.back()},
            {"min", l.min_energy},
            {"tol_energy", l.tol_energy},
            {"violation", l.violation}};
}

Output simulate(const RunConfig& rc) {
    Output out;
    json runs = json::array();
    bool all_stable = true;
    for (std::size_t i = 0; i < rc.environments.size(); ++i) {
        const auto& env = rc.environments[i];
        const sim::ClosedLoop sys(rc.sea, env, rc.sim);
        auto tr = std::make_shared<sim::Trajectory>(sim::run_scenario(sys, rc.scenario, rc.energy_sign));
        const auto v = sim::classify_stability(*tr, rc.classifier);
        all_stable = all_stable && v.outcome == sim::Outcome::Stable;
        const std::string file = "trajectory_" + std::to_string(i) + ".csv";
        runs.push_back({{"environment", {{"K_e", env.K_e}, {"B_e", env.B_e}, {"m_e", env.m_e}, {"gap", env.gap},
                                         {"contact", env.contact == sim::Contact::Bilateral ? "bilateral" : "unilateral"}}},
                        {"outcome", std::string(sim::to_string(v.outcome))},
                        {"reason", std::string(sim::to_string(v.reason))},
                        {"growth_ratio", std::isfinite(v.growth_ratio) ? json(v.growth_ratio) : json("inf")},
                        {"half_cycles", v.half_cycles},
                        {"diverged", tr->diverged},
                        {"samples", tr->size()},
                        {"final_tau_s", tr->tau_s.empty() ? 0.0 : tr->tau_s.back()},
                        {"spring_residual_max", tr->residual_max},
                        {"energy_spring", ledger_json(tr->spring_energy)},
                        {"energy_load", ledger_json(tr->load_energy)},
                        {"trajectory_csv", file}});
        out.sidecars.emplace_back(file, [tr](std::ostream& os) { sim::write_csv(*tr, os); });
    }
    const auto pred = metrics::evaluate_condition(rc.sea, rc.condition, rc.stiffness);
    out.results = {{"runs", runs},
                   {"prediction", {{"condition", std::string(metrics::to_string(rc.condition))},
                                   {"passive", pred.passive},
                                   {"min_real", pred.min_real},
                                   {"tolerance", margin_tol(rc)}}},
                   {"classifier", {{"growth_threshold", rc.classifier.growth_threshold},
                                   {"decay_threshold", rc.classifier.decay_threshold},
                                   {"window_cycles", rc.classifier.window_cycles},
                                   {"tail_fraction", rc.classifier.tail_fraction}}},
                   {"all_stable", all_stable}};
    if (!all_stable) out.exit_code = kExitUnsafe;
    return out;
}

json tally_json(const sim::Tally& t) { return {{"fp", t.fp}, {"fn", t.fn}, {"tp", t.tp}, {"tn", t.tn}}; }

Output study(const RunConfig& rc) {
    Output out;
    metrics::SweepGrid grid = rc.sweep;
    grid.base = rc.sea;
    sim::StudyOptions opt;
    opt.step = rc.scenario.step;
    opt.classifier = rc.classifier;
    opt.analysis = rc.stiffness;
    opt.threads = rc.threads;
    auto rep = std::make_shared<sim::StudyReport>(sim::fpfn_study(grid, rc.environments, rc.sim, opt));

    json tallies = json::object();
    for (const auto& [arch, per] : rep->tallies) {
        json a = json::object();
        for (const auto& [cond, t] : per) a[std::string(metrics::to_string(cond))] = tally_json(t);
        tallies[std::string(model::to_string(arch))] = a;
    }
    json totals = json::object();
    for (auto c : {metrics::Condition::Spring, metrics::Condition::LoadStrict, metrics::Condition::LoadThreshold}) {
        totals[std::string(metrics::to_string(c))] = tally_json(rep->total(c));
    }
    out.results = {{"grid_rows", grid.row_count()},
                   {"environments", rc.environments.size()},
                   {"runs", rep->rows.size()},
                   {"errors", rep->errors},
                   {"tallies", tallies},
                   {"totals", totals},
                   {"margin_tol", margin_tol(rc)},
                   {"step", rc.scenario.step}};
    out.sidecars.emplace_back("study.csv", [rep](std::ostream& os) {
        csv_precision(os);
        os << "K_p,K_d,omega_dob,K_imp,B_imp,architecture,feedforward,environment,spring_pass,load_strict_pass,"
              "load_threshold_pass,outcome,reason,error\n";
        for (const auto& r : rep->rows) {
            const auto& c = r.cfg;
            os << c.gains.K_p << ',' << c.gains.K_d << ',' << c.q.omega << ',' << c.imp.K_imp << ',' << c.imp.B_imp
               << ',' << model::to_string(c.arch) << ',' << model::to_string(c.ff) << ',' << r.env_index << ','
               << r.spring_pass << ',' << r.load_strict_pass << ',' << r.load_threshold_pass << ',';
            if (r.error.empty()) {
                os << sim::to_string(r.sim.outcome) << ',' << sim::to_string(r.sim.reason) << ",\n";
            } else {
                os << ",,\"" << r.error << "\"\n";
            }
        }
    });
    return out;
}

Output selftest() {
    Output out;
    json arr = json::array();
    bool all = true;
    for (const auto& r : acceptance::run_all()) {
        arr.push_back({{"id", r.id},
                       {"title", r.title},
                       {"pass", r.pass},
                       {"seconds", r.seconds},
                       {"budget_seconds", r.budget_seconds},
                       {"detail", r.detail}});
        all = all && r.pass;
    }
    out.results = {{"criteria", arr}, {"all_pass", all}};
    if (!all) out.exit_code = kExitUnsafe;
    return out;
}

Output dispatch(Command cmd, const RunConfig& rc) {
    switch (cmd) {
        case Command::Analyze: return analyze(rc);
        case Command::ZRegion: return zregion(rc);
        case Command::MaxStiff: return maxstiff(rc);
        case Command::Sweep: return sweep(rc);
        case Command::Simulate: return simulate(rc);
        case Command::Study: return study(rc);
        case Command::Selftest: return selftest();
    }
    throw ConfigError("unknown command");
}

CommandResult run(Command cmd, const RunConfig& rc, const std::filesystem::path* out_dir) {
    CommandResult res;
    json& rep = res.report;
    rep["tool"] = "seaz";
    rep["version"] = kToolVersion;
    rep["command"] = std::string(to_string(cmd));
    rep["inputs"] = rc.echo();
    rep["defaults_applied"] = rc.defaults_applied;
    Output out;
    try {
        out = dispatch(cmd, rc);
        rep["results"] = out.results;
    } catch (const std::exception& e) {
        rep["error"] = e.what();
        out.exit_code = kExitConfig;
        out.sidecars.clear();
    }
    res.exit_code = out.exit_code;
    rep["exit_code"] = res.exit_code;
    json files = json::array();
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        for (const auto& [name, write] : out.sidecars) {
            std::ofstream os(*out_dir / name);
            if (!os) throw ConfigError("cannot write '" + (*out_dir / name).string() + "'");
            write(os);
            files.push_back(name);
        }
        rep["sidecars"] = files;
        std::ofstream os(*out_dir / "report.json");
        if (!os) throw ConfigError("cannot write '" + (*out_dir / "report.json").string() + "'");
        os << rep.dump(2) << '\n';
    }
    return res;
}

}  // namespace

std::string_view to_string(Command c) {
    switch (c) {
        case Command::Analyze: return "analyze";
        case Command::ZRegion: return "zregion";
        case Command::MaxStiff: return "maxstiff";
        case Command::Sweep: return "sweep";
        case Command::Simulate: return "simulate";
        case Command::Study: return "study";
        case Command::Selftest: return "selftest";
    }
    return "?";
}

Command parse_command(std::string_view s) {
    for (auto c : {Command::Analyze, Command::ZRegion, Command::MaxStiff, Command::Sweep, Command::Simulate,
                   Command::Study, Command::Selftest}) {
        if (to_string(c) == s) return c;
    }
    throw ConfigError("unknown command '" + std::string(s) +
                      "' (expected analyze, zregion, maxstiff, sweep, simulate, study or selftest)");
}

void apply_overrides(RunConfig& rc, const Overrides& o) {
    const auto drop = [&](const std::string& key) {
        std::erase(rc.defaults_applied, key);
    };
    if (o.arch) {
        rc.sea.arch = *o.arch;
        drop("architecture");
    }
    if (o.ff) {
        rc.sea.ff = *o.ff;
        drop("feedforward");
    }
    if (o.condition) {
        rc.condition = *o.condition;
        drop("condition");
    }
    try {
        rc.sea.validate();
    } catch (const ConfigError& e) {
        throw ConfigParseError("", e.what());
    }
    rc.sweep.base = rc.sea;
}

CommandResult run_command(Command cmd, const RunConfig& rc, const std::filesystem::path& out_dir) {
    return run(cmd, rc, &out_dir);
}

CommandResult evaluate_command(Command cmd, const RunConfig& rc) { return run(cmd, rc, nullptr); }

}  // namespace seaz::cli
