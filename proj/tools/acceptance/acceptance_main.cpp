#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "criteria.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> ids;
    app.add_option("--criterion,-c", ids, "criterion ids to run (default: all)")
        ->check(CLI::Range(1, seaz::acceptance::kCriteria));
    CLI11_PARSE(app, argc, argv);
    if (ids.empty()) {
        for (int id = 1; id <= seaz::acceptance::kCriteria; ++id) ids.push_back(id);
    }
    int failed = 0;
    for (int id : ids) {
        const auto r = seaz::acceptance::run_criterion(id);
        std::cout << seaz::acceptance::format_line(r) << std::endl;
        failed += !r.pass;
    }
    std::cout << (ids.size() - failed) << "/" << ids.size() << " criteria passed" << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
