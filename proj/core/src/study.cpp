#include <algorithm>

#include "seaz/error.hpp"
#include "seaz/simulate.hpp"

namespace seaz::sim {

Tally StudyReport::total(metrics::Condition c) const {
    Tally t;
    for (const auto& [arch, per] : tallies) {
        for (const auto& [cond, tally] : per) {
            if (cond != c) continue;
            t.fp += tally.fp;
            t.fn += tally.fn;
            t.tp += tally.tp;
            t.tn += tally.tn;
        }
    }
    return t;
}

StudyReport fpfn_study(const metrics::SweepGrid& grid, const std::vector<EnvironmentModel>& envs, const SimConfig& sim,
                       const StudyOptions& opt) {
    if (envs.empty()) throw InvalidInput("fpfn_study needs at least one environment");
    const auto cfgs = grid.rows();

    struct Prediction {
        bool spring = false;
        bool strict = false;
        bool threshold = false;
        std::string error;
    };
    std::vector<Prediction> pred(cfgs.size());
    metrics::parallel_for(cfgs.size(), opt.threads, [&](std::size_t i) {
        try {
            pred[i].spring = metrics::evaluate_condition(cfgs[i], metrics::Condition::Spring, opt.analysis).passive;
            pred[i].strict = metrics::evaluate_condition(cfgs[i], metrics::Condition::LoadStrict, opt.analysis).passive;
            pred[i].threshold =
                metrics::evaluate_condition(cfgs[i], metrics::Condition::LoadThreshold, opt.analysis).passive;
        } catch (const std::exception& e) {
            pred[i].error = e.what();
        }
    });

    StudyReport rep;
    rep.environments = envs;
    rep.rows.resize(cfgs.size() * envs.size());
    metrics::parallel_for(rep.rows.size(), opt.threads, [&](std::size_t k) {
        const std::size_t i = k / envs.size();
        StudyRow& row = rep.rows[k];
        row.cfg = cfgs[i];
        row.env_index = k % envs.size();
        row.spring_pass = pred[i].spring;
        row.load_strict_pass = pred[i].strict;
        row.load_threshold_pass = pred[i].threshold;
        row.error = pred[i].error;
        if (!row.error.empty()) return;
        try {
            const ClosedLoop sys(row.cfg, envs[row.env_index], sim);
            const Trajectory tr = run_scenario(sys, Scenario::step_in_contact(opt.step));
            row.sim = classify_stability(tr, opt.classifier);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });

    const metrics::Condition conds[] = {metrics::Condition::Spring, metrics::Condition::LoadStrict,
                                        metrics::Condition::LoadThreshold};
    for (const StudyRow& row : rep.rows) {
        if (!row.error.empty()) {
            ++rep.errors;
            continue;
        }
        auto it = std::find_if(rep.tallies.begin(), rep.tallies.end(),
                               [&](const auto& e) { return e.first == row.cfg.arch; });
        if (it == rep.tallies.end()) {
            std::vector<std::pair<metrics::Condition, Tally>> per;
            for (auto c : conds) per.emplace_back(c, Tally{});
            rep.tallies.emplace_back(row.cfg.arch, per);
            it = rep.tallies.end() - 1;
        }
        const bool stable = row.sim.outcome == Outcome::Stable;
        for (auto& [cond, tally] : it->second) {
            const bool safe = cond == metrics::Condition::Spring       ? row.spring_pass
                              : cond == metrics::Condition::LoadStrict ? row.load_strict_pass
                                                                        : row.load_threshold_pass;
            if (safe && stable) ++tally.tp;
            if (safe && !stable) ++tally.fp;
            if (!safe && stable) ++tally.fn;
            if (!safe && !stable) ++tally.tn;
        }
    }
    return rep;
}

}  // namespace seaz::sim
