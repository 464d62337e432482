#pragma once

#include "tor/entropy.hpp"

#include <iosfwd>
#include <map>

namespace tor {

struct RunConfig {
    unsigned precision_bits = 128;
    std::uint64_t seed = 1;
    bool strict_ranges = false;
    std::string out = "out";
    /* budgets */
    size_t ball_elements = 100000; /* Mahler ball size cap */
    double sweep_points = 200000;  /* frequency ball size before sampling */
    long ideal_norm_cap = 500;
    /* effective constants left unspecified by the theory */
    std::map<std::string, double> constants;
};

RunConfig default_config();
/* JSON object merged over the defaults; throws InvalidConfig on unknown keys or bad values. */
RunConfig load_config(const std::string &path);
/* Canonical JSON of everything that affects results (the output directory excluded). */
std::string config_json(const RunConfig &cfg);
/* First 16 hex digits of SHA-256 over the canonical config and the command line. */
std::string config_hash(const RunConfig &cfg, const std::string &command);

/* {"d": n, "generators": [[row-major entries], ...]}; nested rows are accepted too. */
ToralGroup read_group(const std::string &path);
/* {"space": "torus" | "X", "points": [[decimal strings]], "weights": [...] (optional)} */
FiniteMeasure read_measure(const ConjugacyData &c, const std::string &path);

/* 2 input, 3 budget, 4 invariant failure */
int exit_code_for(const std::string &kind);

int run_cli(int argc, char **argv, std::ostream &out, std::ostream &err);

} // namespace tor
