#include "tor/cli.hpp"

#include "tor/density.hpp"
#include "tor/fourier.hpp"
#include "tor/idealmin.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tor {

using json = nlohmann::json;

namespace {

const std::map<std::string, double> kDefaultConstants = {
    {"c3", 4.0},       /* totally irreducible height vs F */
    {"c3_floor", 1.0}, /* irrationality floor exponent */
    {"c6", 1.0},  {"c7", 1.0}, {"c8", 1.0}, {"c9", 1.0}, {"c_esc", 1.0},
    {"c10", 3.0}, {"c16", 1.0}, {"c17", 1.0}, {"c_density", 1.0},
};

json read_json(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("InvalidInput", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw Error("InvalidInput", path + ": " + e.what());
    }
}

std::string num(const Real &x) { return dec(x, 12); }

std::string rat_str(const Rat &q)
{
    std::ostringstream os;
    os << q;
    return os.str();
}

GadgetConstants gadget_constants(const RunConfig &cfg)
{
    GadgetConstants k;
    k.c3 = cfg.constants.at("c3");
    k.c6 = cfg.constants.at("c6");
    k.c7 = cfg.constants.at("c7");
    k.c8 = cfg.constants.at("c8");
    k.c9 = cfg.constants.at("c9");
    k.c_esc = cfg.constants.at("c_esc");
    return k;
}

PlanConstants plan_constants(const RunConfig &cfg)
{
    PlanConstants k;
    k.c3 = cfg.constants.at("c3_floor");
    k.c8 = cfg.constants.at("c8");
    k.c9 = cfg.constants.at("c9");
    k.c10 = cfg.constants.at("c10");
    k.c16 = cfg.constants.at("c16");
    k.c17 = cfg.constants.at("c17");
    return k;
}

struct Output {
    std::filesystem::path dir;
    std::string hash;
    std::vector<std::string> written;

    void csv(const std::string &name, const std::string &header, const std::vector<std::string> &rows)
    {
        std::ofstream f(dir / name);
        f << "# config_hash=" << hash << "\n" << header << "\n";
        for (auto &r : rows)
            f << r << "\n";
        written.push_back((dir / name).string());
    }
    void json_file(const std::string &name, json j)
    {
        j["config_hash"] = hash;
        std::ofstream f(dir / name);
        f << j.dump(2) << "\n";
        written.push_back((dir / name).string());
    }
    void text(const std::string &name, const std::string &body)
    {
        std::ofstream f(dir / name);
        f << body;
        written.push_back((dir / name).string());
    }
};

std::vector<long> parse_ints(const std::string &s)
{
    std::vector<long> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            v.push_back(std::stol(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception &) {
            throw Error("InvalidInput", "not an integer list: " + s);
        }
    }
    return v;
}

/* 4 x 4 x 4 cluster, spacing 2^-14 */
FiniteMeasure default_cluster(const ConjugacyData &c)
{
    Real sp = exp2r(Real(-14));
    std::vector<Vec> pts;
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 4; j++)
            for (int k = 0; k < 4; k++)
                pts.push_back({Real("0.31") + sp * i, Real("0.47") + sp * j, Real("0.59") + sp * k});
    return uniform_measure(c, FiniteMeasure::Space::Torus, pts);
}

/* 4 x 4 x 4 grid, 1/8-separated */
FiniteMeasure default_grid(const ConjugacyData &c)
{
    std::vector<Vec> pts;
    for (int i = 0; i < 4; i++)
        for (int j = 0; j < 4; j++)
            for (int k = 0; k < 4; k++)
                pts.push_back({Real(i) / 4 + Real("0.013"), Real(j) / 4 + Real("0.021"),
                               Real(k) / 4 + Real("0.037")});
    return uniform_measure(c, FiniteMeasure::Space::Torus, pts);
}

void require_dim(const ConjugacyData &c, int d, const std::string &what)
{
    if (c.d() != d)
        throw Error("InvalidInput", what + " default fixture needs d = " + std::to_string(d) +
                                        "; pass --measure");
}

void cmd_analyze(const std::string &group, Output &out, std::ostream &os)
{
    ConjugacyData c = build_conjugacy(read_group(group));
    RankReport rr = rank_and_maximality(c);
    const NumberField &k = *c.field;
    json j;
    j["min_poly"] = json::array();
    for (auto &x : k.min_poly)
        j["min_poly"].push_back(x.convert_to<long>());
    j["precision_bits"] = precision();
    j["signature"] = {k.r1, k.r2};
    j["discriminant"] = k.disc.str();
    j["phi"] = json::array();
    for (auto &p : c.phi) {
        json a = json::array();
        for (auto &q : p.coords())
            a.push_back(rat_str(q));
        j["phi"].push_back(a);
    }
    j["witness"] = c.witness;
    j["psi"] = json::array();
    for (int r = 0; r < c.psi.rows; r++) {
        json row = json::array();
        for (int s = 0; s < c.psi.cols; s++)
            row.push_back(num(c.psi(r, s)));
        j["psi"].push_back(row);
    }
    j["uniformity_M"] = num(c.uniformity);
    j["scale_S"] = num(c.scale);
    j["conjugation_residual"] = num(conjugation_residual(c));
    j["rank"] = rr.rank;
    j["unit_rank"] = rr.unit_rank;
    j["maximal_rank"] = rr.maximal;
    j["rank_at_least_two"] = rr.rank_at_least_two;
    j["cm_field"] = is_cm(k);
    std::string F = "n/a";
    if (rr.rank >= 1) {
        F = num(fundamental_size(log_lattice(c)).value);
        j["fundamental_size_F"] = F;
    }
    out.json_file("conjugacy.json", j);

    std::ostringstream s;
    s << "field: min_poly " << to_string(k.min_poly) << ", discriminant " << k.disc << "\n";
    s << "signature: (" << k.r1 << "," << k.r2 << ")\n";
    s << "uniformity M: " << num(c.uniformity) << "\n";
    s << "scale S: " << num(c.scale) << "\n";
    s << "F: " << F << "\n";
    s << "rank: " << rr.rank << " of unit rank " << rr.unit_rank
      << (rr.maximal ? " (maximal)" : " (not maximal)")
      << (rr.rank_at_least_two ? "" : ", below two") << "\n";
    s << "CM field: " << (is_cm(k) ? "yes" : "no") << "\n";
    out.text("summary.txt", s.str());
    os << s.str();
}

void cmd_orbit(const RunConfig &cfg, const std::string &group, const std::string &point, long Q,
               int k, int steps, int grid, Output &out)
{
    ConjugacyData c = build_conjugacy(read_group(group));
    std::vector<long> v = parse_ints(point);
    if (static_cast<int>(v.size()) != c.d())
        throw Error("InvalidInput", "point has " + std::to_string(v.size()) + " entries");
    if (Q < 2 || k < 1 || steps < 1 || grid < 1)
        throw Error("InvalidInput", "need Q >= 2, k >= 1, steps >= 1, grid >= 1");
    DensityOptions o;
    o.grid_n = grid;
    o.max_elements = cfg.ball_elements;
    o.c_density = cfg.constants.at("c_density");

    RationalPoint x = rational_point(v, Q);
    Real top = (k + 2) * log2r(Real(Q));
    std::vector<std::string> rows;
    json jr = json::array();
    Real prev = -1;
    for (int s = 1; s <= steps; s++) {
        Real L = top * s / steps;
        MahlerBall ball = mahler_ball(c, L, o);
        std::vector<Vec> pts;
        for (auto &p : orbit_points(ball, std::vector<RationalPoint>{x}, o.max_points))
            pts.push_back(to_vec(p));
        DensityReport d = density_of(pts, L, ball.elements.size(), grid);
        std::string sep = d.separation.defined ? num(d.separation.min) : "";
        rows.push_back(num(L) + "," + std::to_string(d.elements) + "," + std::to_string(d.count) +
                       "," + num(d.cover.upper) + "," + num(d.cover.lower) + "," + sep);
        jr.push_back({{"L", num(L)}, {"elements", d.elements}, {"count", d.count},
                      {"covering_upper", num(d.cover.upper)}, {"covering_lower", num(d.cover.lower)},
                      {"separation", sep}});
        if (prev >= 0 && d.cover.upper > prev)
            throw Error("InvariantViolation", "covering radius grew with the ball");
        prev = d.cover.upper;
    }
    DioqReport r = harness_dioq(c, v, Q, k, o);
    out.csv("orbit.csv", "L,elements,count,covering_upper,covering_lower,separation", rows);
    json j;
    j["Q"] = Q;
    j["point"] = v;
    j["k"] = k;
    j["grid"] = grid;
    j["rows"] = jr;
    j["starting_block"] = {{"g", r.g}, {"g_height", num(r.g_height)}, {"F", num(r.F)},
                           {"m_count", r.m_count}, {"bound", num(r.bound)},
                           {"min_distance", num(r.min_distance)}, {"separated", r.separated}};
    out.json_file("orbit.json", j);
}

void cmd_fourier(const RunConfig &cfg, const std::string &group, const std::string &measure,
                 double eps_bits, double alpha, double delta, Output &out)
{
    ConjugacyData c = build_conjugacy(read_group(group));
    FiniteMeasure mu;
    if (measure.empty()) {
        require_dim(c, 3, "fourier");
        mu = default_cluster(c);
    } else {
        mu = read_measure(c, measure);
    }
    MuPrimeOptions o;
    o.plan.strict = cfg.strict_ranges;
    o.plan.k = plan_constants(cfg);
    o.plan.gadgets = gadget_constants(cfg);
    o.entropy.seed = cfg.seed;
    o.sweep.seed = cfg.seed;
    o.sweep.count_limit = cfg.sweep_points;
    MuPrimeReport r = build_mu_prime(mu, exp2r(Real(-eps_bits)), Real(alpha), Real(delta), c, o);

    std::map<Freq, Real> avg;
    for (auto &row : r.sweep_avg.rows)
        avg[row.q] = row.coef2;
    auto qstr = [](const Freq &q) {
        std::string s;
        for (size_t i = 0; i < q.size(); i++)
            s += (i ? " " : "") + std::to_string(q[i]);
        return s;
    };
    std::vector<std::string> rows;
    for (auto &row : r.sweep_nu.rows) {
        auto it = avg.find(row.q);
        rows.push_back(qstr(row.q) + "," + num(row.coef2) + "," +
                       (it == avg.end() ? std::string() : num(it->second)) + "," +
                       num(r.certificate.sum));
    }
    out.csv("fourier.csv", "q,coef2_nu,coef2_avg,bound", rows);
    json j;
    json logs = json::array();
    for (auto &x : r.certificate.log2_L)
        logs.push_back(num(x));
    j["certificate"] = {{"log2_L", logs},
                        {"sum", num(r.certificate.sum)},
                        {"measured", num(r.certificate.measured)},
                        {"xi_upper", r.certificate.xi_upper},
                        {"holds", r.certificate.holds}};
    j["plan"] = {{"T", r.plan.T}, {"s", r.plan.s}, {"l", r.plan.l}, {"n", r.plan.n},
                 {"i", r.plan.i}, {"R", num(r.plan.R)}, {"A", num(r.plan.A)},
                 {"flags", r.plan.flags}};
    j["max_coef2_nu"] = num(r.sweep_nu.max_coef2);
    j["max_coef2_avg"] = num(r.sweep_avg.max_coef2);
    j["decay"] = r.decay;
    j["mass"] = num(r.mass);
    j["mass_ok"] = r.mass_ok;
    j["dominated"] = r.dominated;
    j["elements"] = r.elements;
    j["mahler_radius"] = num(r.mahler_radius);
    out.json_file("fourier.json", j);
}

void cmd_entropy(const RunConfig &cfg, const std::string &group, const std::string &measure,
                 double alpha, double delta, long T, double eps, Output &out)
{
    ConjugacyData c = build_conjugacy(read_group(group));
    FiniteMeasure mu;
    if (measure.empty()) {
        require_dim(c, 3, "entropy");
        mu = default_grid(c);
    } else {
        mu = read_measure(c, measure);
        if (mu.space != FiniteMeasure::Space::Torus)
            mu = pull_to_torus(c, mu);
    }
    EntropyOptions o;
    o.seed = cfg.seed;
    EntropyConstants k;
    k.c16 = cfg.constants.at("c16");
    ScaleDirection sd = positive_scale_direction(c, mu, Real(alpha), Real(delta), T, Real(eps), o, k);
    std::vector<std::string> rows;
    for (auto &p : sd.profile)
        if (p.injective)
            rows.push_back(num(p.R) + ",all," + num(p.H.value) + "," + p.H.mode + "," +
                           num(p.H.stderr_));
    for (size_t i = 0; i < sd.H_dir.size(); i++)
        rows.push_back(num(sd.R) + "," + std::to_string(i + 1) + "," + num(sd.H_dir[i].value) + "," +
                       sd.H_dir[i].mode + "," + num(sd.H_dir[i].stderr_));
    out.csv("entropy.csv", "scale,direction,value,mode,stderr", rows);
    json j = {{"R0", num(sd.R0)},
              {"S", num(sd.S)},
              {"R", num(sd.R)},
              {"steps", sd.p},
              {"direction", sd.i},
              {"T", sd.T},
              {"H", num(sd.H.value)},
              {"grid_entropy", num(sd.grid_H)},
              {"entropy_hypothesis", sd.entropy_hypothesis},
              {"delta_lower_ok", sd.delta_lower_ok},
              {"delta_upper_ok", sd.delta_upper_ok},
              {"T_range_ok", sd.T_range_ok}};
    out.json_file("entropy.json", j);
}

void cmd_ideal(const RunConfig &cfg, const std::string &group, long cap, bool principal, Output &out,
               std::ostream &err)
{
    ConjugacyData c = build_conjugacy(read_group(group));
    std::vector<IdealLattice> ideals;
    if (principal) {
        for (long p = 2; p <= cap; p++) {
            bool prime = true;
            for (long q = 2; q * q <= p; q++)
                prime = prime && p % q != 0;
            if (prime)
                ideals.push_back(principal_ideal(c.field, p));
        }
    } else {
        ideals = ideals_up_to(c.field, cap);
    }
    IdealOptions o;
    o.norm_cap = cfg.ideal_norm_cap;
    o.seed = cfg.seed;
    SearchConstant sc = search_constant(c, o.samples, o.seed);
    std::vector<std::string> rows;
    json list = json::array();
    std::string failure;
    Real worst = 0;
    for (auto &I : ideals) {
        auto t0 = std::chrono::steady_clock::now();
        LInvariant L = L_invariant(c, I, o);
        ReducedBasis rb = reduced_basis(I);
        IdealUniformity u = ideal_uniformity(I, rb);
        if (u.ratio > worst)
            worst = u.ratio;
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        err << I.name << ": " << secs << " s\n";
        rows.push_back(I.norm.str() + "," + I.name + "," + L.L.str() + "," + num(L.ratio) + "," +
                       std::to_string(L.classes) + "," + std::to_string(L.orbits) + "," +
                       num(rb.minima[0]) + "," + num(u.M) + "," + num(u.ratio));
        json basis = json::array();
        for (int r = 0; r < I.basis.rows; r++) {
            json row = json::array();
            for (int s = 0; s < I.basis.cols; s++)
                row.push_back(I.basis(r, s).convert_to<long>());
            basis.push_back(row);
        }
        json minima = json::array();
        for (auto &m : rb.minima)
            minima.push_back(num(m));
        list.push_back({{"ideal", I.name},
                        {"basis", basis},
                        {"N", I.norm.str()},
                        {"L", L.L.str()},
                        {"L_over_N", num(L.ratio)},
                        {"classes", L.classes},
                        {"orbits", L.orbits},
                        {"rho", num(L.rho)},
                        {"minima", minima},
                        {"reduced_basis", rb.w},
                        {"membership", rb.membership},
                        {"unimodular", rb.unimodular},
                        {"M", num(u.M)},
                        {"M_ratio", num(u.ratio)}});
        if (failure.empty() && (!rb.membership || !rb.unimodular))
            failure = "reduced basis check failed for " + I.name;
        if (failure.empty() && I.norm >= 2 && L.L >= L.N)
            failure = "L(K, I) >= N(I) for " + I.name;
    }
    out.csv("ideal.csv", "N,ideal,L,L_over_N,classes,orbits,m1,M,M_ratio", rows);
    json j = {{"cap", cap},
              {"principal_only", principal},
              {"kappa", num(sc.kappa)},
              {"kappa_sample", num(sc.kappa_sample)},
              {"c_search", num(sc.c_search)},
              {"max_M_ratio", num(worst)},
              {"ideals", list}};
    out.json_file("ideal.json", j);
    if (!failure.empty())
        throw Error("InvariantViolation", failure);
}

} // namespace

RunConfig default_config()
{
    RunConfig c;
    c.constants = kDefaultConstants;
    return c;
}

RunConfig load_config(const std::string &path)
{
    RunConfig c = default_config();
    json j;
    try {
        j = read_json(path);
    } catch (const Error &e) {
        throw Error("InvalidConfig", e.what());
    }
    if (!j.is_object())
        throw Error("InvalidConfig", "config must be a JSON object");
    try {
        for (auto &[key, val] : j.items()) {
            if (key == "precision_bits")
                c.precision_bits = val.get<unsigned>();
            else if (key == "seed")
                c.seed = val.get<std::uint64_t>();
            else if (key == "strict_ranges")
                c.strict_ranges = val.get<bool>();
            else if (key == "out")
                c.out = val.get<std::string>();
            else if (key == "budgets") {
                for (auto &[b, bv] : val.items()) {
                    if (b == "ball_elements")
                        c.ball_elements = bv.get<size_t>();
                    else if (b == "sweep_points")
                        c.sweep_points = bv.get<double>();
                    else if (b == "ideal_norm_cap")
                        c.ideal_norm_cap = bv.get<long>();
                    else
                        throw Error("InvalidConfig", "unknown budget " + b);
                }
            } else if (key == "constants") {
                for (auto &[name, cv] : val.items()) {
                    if (!kDefaultConstants.count(name))
                        throw Error("InvalidConfig", "unknown constant " + name);
                    c.constants[name] = cv.get<double>();
                }
            } else {
                throw Error("InvalidConfig", "unknown key " + key);
            }
        }
    } catch (const json::exception &e) {
        throw Error("InvalidConfig", e.what());
    }
    if (c.precision_bits < 64 || c.ball_elements == 0 || c.sweep_points <= 0 || c.ideal_norm_cap <= 0)
        throw Error("InvalidConfig", "precision must be >= 64 and budgets positive");
    for (auto &[name, v] : c.constants)
        if (!(v > 0))
            throw Error("InvalidConfig", "constant " + name + " must be positive");
    return c;
}

std::string config_json(const RunConfig &cfg)
{
    json j;
    j["precision_bits"] = cfg.precision_bits;
    j["seed"] = cfg.seed;
    j["strict_ranges"] = cfg.strict_ranges;
    j["budgets"] = {{"ball_elements", cfg.ball_elements},
                    {"sweep_points", cfg.sweep_points},
                    {"ideal_norm_cap", cfg.ideal_norm_cap}};
    j["constants"] = cfg.constants;
    return j.dump();
}

std::string config_hash(const RunConfig &cfg, const std::string &command)
{
    std::string msg = config_json(cfg) + "\n" + command;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(msg.data(), msg.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned i = 0; i < 8 && i < len; i++)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

ToralGroup read_group(const std::string &path)
{
    json j = read_json(path);
    try {
        int d = j.at("d").get<int>();
        if (d < 1)
            throw Error("InvalidInput", "d must be positive");
        std::vector<IMat> gens;
        for (auto &g : j.at("generators")) {
            std::vector<long> flat;
            for (auto &e : g) {
                if (e.is_array())
                    for (auto &x : e)
                        flat.push_back(x.get<long>());
                else
                    flat.push_back(e.get<long>());
            }
            if (static_cast<long>(flat.size()) != static_cast<long>(d) * d)
                throw Error("InvalidInput", "generator is not " + std::to_string(d) + " x " +
                                                std::to_string(d));
            IMat m(d, d);
            for (size_t i = 0; i < flat.size(); i++)
                m.a[i] = flat[i];
            gens.push_back(m);
        }
        return validate_group(gens);
    } catch (const json::exception &e) {
        throw Error("InvalidInput", path + ": " + e.what());
    }
}

FiniteMeasure read_measure(const ConjugacyData &c, const std::string &path)
{
    json j = read_json(path);
    try {
        std::string space = j.value("space", "torus");
        FiniteMeasure::Space sp;
        if (space == "torus")
            sp = FiniteMeasure::Space::Torus;
        else if (space == "X")
            sp = FiniteMeasure::Space::X;
        else
            throw Error("InvalidInput", "space must be torus or X");
        auto real_of = [](const json &x) {
            return x.is_string() ? Real(x.get<std::string>()) : Real(x.get<double>());
        };
        std::vector<Vec> pts;
        for (auto &p : j.at("points")) {
            Vec v;
            for (auto &x : p)
                v.push_back(real_of(x));
            pts.push_back(v);
        }
        if (pts.empty())
            throw Error("InvalidInput", "measure has no atoms");
        if (!j.contains("weights"))
            return uniform_measure(c, sp, pts);
        Vec w;
        for (auto &x : j.at("weights"))
            w.push_back(real_of(x));
        return make_measure(c, sp, pts, w);
    } catch (const json::exception &e) {
        throw Error("InvalidInput", path + ": " + e.what());
    }
}

int exit_code_for(const std::string &kind)
{
    static const std::set<std::string> budget = {"BudgetExceeded", "SearchBudgetExceeded",
                                                 "InfeasiblePlan", "SearchExhausted",
                                                 "PrecisionExhausted"};
    static const std::set<std::string> invariant = {"InvariantViolation",
                                                    "ConjugationResidualTooLarge"};
    if (budget.count(kind))
        return 3;
    if (invariant.count(kind))
        return 4;
    return 2;
}

int run_cli(int argc, char **argv, std::ostream &os, std::ostream &err)
{
    CLI::App app{"Effective density tools for abelian groups of toral automorphisms"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    unsigned bits = 0;
    bool strict = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed, "sampling seed");
    app.add_option("--precision", bits, "working precision in bits");
    app.add_flag("--strict-ranges", strict, "fail on any parameter outside its proven range");
    app.add_option("--out", out_dir, "output directory");

    std::string group, measure, point = "1,0,0";
    long Q = 101, cap = 0;
    int k = 1, steps = 4, grid = 32;
    double eps_bits = 16, f_alpha = 0.5, f_delta = 0.125;
    double e_alpha = 0.66, e_delta = 0.5, e_eps = 0.125;
    long e_T = 2;
    bool principal = false;

    auto *analyze = app.add_subcommand("analyze", "conjugacy report for a group file");
    analyze->add_option("group", group, "group JSON")->required();
    auto *orbit = app.add_subcommand("orbit", "orbit density of a rational point under Mahler balls");
    orbit->add_option("group", group, "group JSON")->required();
    orbit->add_option("--point", point, "integer vector v, the point is v / Q");
    orbit->add_option("--Q", Q, "denominator");
    orbit->add_option("--k", k, "Diophantine exponent; the largest ball has radius (k+2) log2 Q");
    orbit->add_option("--steps", steps, "number of ball radii");
    orbit->add_option("--grid", grid, "covering-radius grid cells per axis");
    auto *fourier = app.add_subcommand("fourier", "averaged-measure Fourier decay and its certificate");
    fourier->add_option("group", group, "group JSON")->required();
    fourier->add_option("--measure", measure, "measure JSON (default: 64-atom cluster)");
    fourier->add_option("--eps-bits", eps_bits, "eps = 2^-bits");
    fourier->add_option("--alpha", f_alpha, "alpha");
    fourier->add_option("--delta", f_delta, "delta");
    auto *entropy = app.add_subcommand("entropy", "positive entropy scale and direction");
    entropy->add_option("group", group, "group JSON")->required();
    entropy->add_option("--measure", measure, "measure JSON (default: 64-atom grid)");
    entropy->add_option("--alpha", e_alpha, "alpha");
    entropy->add_option("--delta", e_delta, "delta");
    entropy->add_option("--T", e_T, "refinement depth");
    entropy->add_option("--eps", e_eps, "separation scale");
    auto *ideal = app.add_subcommand("ideal", "minimal-norm table of ideals");
    ideal->add_option("group", group, "group JSON")->required();
    ideal->add_option("--cap", cap, "largest ideal norm (default: the configured norm cap)");
    ideal->add_flag("--principal", principal, "use (p) for primes p <= cap instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e, os, err);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
        if (app.count("--seed"))
            cfg.seed = seed;
        if (app.count("--precision")) {
            if (bits < 64)
                throw Error("InvalidConfig", "precision must be >= 64");
            cfg.precision_bits = bits;
        }
        if (strict)
            cfg.strict_ranges = true;
        if (!out_dir.empty())
            cfg.out = out_dir;
        PrecisionGuard guard(cfg.precision_bits);

        /* the command line minus global flags identifies the run */
        std::string command;
        for (auto *sub : app.get_subcommands()) {
            command = sub->get_name();
            for (auto *opt : sub->get_options())
                if (opt->count() > 0)
                    for (auto &r : opt->results())
                        command += " " + opt->get_name() + "=" + r;
        }
        Output out{cfg.out, config_hash(cfg, command), {}};
        std::filesystem::create_directories(out.dir);

        if (*analyze)
            cmd_analyze(group, out, os);
        else if (*orbit)
            cmd_orbit(cfg, group, point, Q, k, steps, grid, out);
        else if (*fourier)
            cmd_fourier(cfg, group, measure, eps_bits, f_alpha, f_delta, out);
        else if (*entropy)
            cmd_entropy(cfg, group, measure, e_alpha, e_delta, e_T, e_eps, out);
        else if (*ideal)
            cmd_ideal(cfg, group, cap > 0 ? cap : cfg.ideal_norm_cap, principal, out, err);
        for (auto &f : out.written)
            os << "wrote " << f << "\n";
        return 0;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error &e) {
        err << "error: InvalidInput: " << e.what() << "\n";
        return 2;
    }
}

} // namespace tor
