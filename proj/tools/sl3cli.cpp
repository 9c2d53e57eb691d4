#include "commands.hpp"

#include "sl3/lattice.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>

using namespace sl3;
using namespace sl3::cli;

namespace {

struct GlobalFlags {
    std::string config;
    std::string flow;
    uint64_t seed = 0;
    std::string format = "csv";
    int64_t budget = 0;
    int threads = 1;
    double kappa = 0, kappa_prime = 0, kappa_double_prime = 0, C = 0, r0 = 0, epsilon0 = 0;
};

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw PreconditionError("format must be csv or json");
}

FlowParams parse_flow(const std::string& s) {
    std::vector<double> v;
    size_t start = 0;
    while (start <= s.size()) {
        size_t end = s.find(',', start);
        if (end == std::string::npos) end = s.size();
        v.push_back(parse_scalar(s.substr(start, end - start)).get_d());
        start = end + 1;
    }
    if (v.size() != 3) throw PreconditionError("flow: expected lambda1,lambda2,lambda3");
    return FlowParams(v[0], v[1], v[2]);
}

// Defaults, then the config file, then flags given on the command line.
RunConfig resolve(const CLI::App& app, const GlobalFlags& g) {
    RunConfig cfg;
    std::map<std::string, std::string> file;
    if (!g.config.empty()) file = read_config_file(g.config);
    double l1 = cfg.flow.lambda1, l2 = cfg.flow.lambda2, l3 = cfg.flow.lambda3;
    auto real = [](const std::string& v) { return parse_scalar(v).get_d(); };
    std::map<std::string, std::function<void(const std::string&)>> keys{
        {"flow.lambda1", [&](const std::string& v) { l1 = real(v); }},
        {"flow.lambda2", [&](const std::string& v) { l2 = real(v); }},
        {"flow.lambda3", [&](const std::string& v) { l3 = real(v); }},
        {"constants.kappa", [&](const std::string& v) { cfg.constants.kappa = real(v); }},
        {"constants.kappa_prime", [&](const std::string& v) { cfg.constants.kappa_prime = real(v); }},
        {"constants.kappa_double_prime", [&](const std::string& v) { cfg.constants.kappa_double_prime = real(v); }},
        {"constants.C", [&](const std::string& v) { cfg.constants.C = real(v); }},
        {"constants.r0", [&](const std::string& v) { cfg.constants.r0 = real(v); }},
        {"constants.epsilon0", [&](const std::string& v) { cfg.constants.epsilon0 = real(v); }},
        {"seed", [&](const std::string& v) { cfg.seed = std::stoull(v); }},
        {"format", [&](const std::string& v) { cfg.format = parse_format(v), cfg.format_given = true; }},
        {"budget", [&](const std::string& v) { cfg.budget = std::stoll(v); }},
        {"threads", [&](const std::string& v) { cfg.threads = std::stoi(v); }},
    };
    for (auto& [k, v] : file) {
        auto it = keys.find(k);
        if (it == keys.end()) throw PreconditionError("unknown config key " + k);
        try {
            it->second(v);
        } catch (const std::logic_error&) {
            throw PreconditionError("bad value for config key " + k);
        }
    }
    cfg.flow = FlowParams(l1, l2, l3);
    auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
    if (given("--flow")) cfg.flow = parse_flow(g.flow);
    if (given("--seed")) cfg.seed = g.seed;
    if (given("--format")) cfg.format = parse_format(g.format), cfg.format_given = true;
    if (given("--budget")) cfg.budget = g.budget;
    if (given("--threads")) cfg.threads = g.threads;
    if (given("--kappa")) cfg.constants.kappa = g.kappa;
    if (given("--kappa-prime")) cfg.constants.kappa_prime = g.kappa_prime;
    if (given("--kappa-double-prime")) cfg.constants.kappa_double_prime = g.kappa_double_prime;
    if (given("--C")) cfg.constants.C = g.C;
    if (given("--r0")) cfg.constants.r0 = g.r0;
    if (given("--epsilon0")) cfg.constants.epsilon0 = g.epsilon0;
    cfg.constants.validate();
    if (cfg.budget <= 0) throw PreconditionError("budget must be positive");
    if (cfg.threads < 1) throw PreconditionError("threads must be >= 1");
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rational points, Diophantine orbits and dimension estimates for SL3(R)/SL3(Z)"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalFlags g;
    app.add_option("--config", g.config, "key=value config file");
    app.add_option("--flow", g.flow, "lambda1,lambda2,lambda3");
    app.add_option("--seed", g.seed, "seed for sampling commands");
    app.add_option("--format", g.format, "csv or json");
    app.add_option("--budget", g.budget, "enumeration budget");
    app.add_option("--threads", g.threads, "worker threads");
    app.add_option("--kappa", g.kappa);
    app.add_option("--kappa-prime", g.kappa_prime);
    app.add_option("--kappa-double-prime", g.kappa_double_prime);
    app.add_option("--C", g.C);
    app.add_option("--r0", g.r0);
    app.add_option("--epsilon0", g.epsilon0);

    std::function<int(const RunConfig&)> run;

    DenominatorArgs den;
    auto* c_den = app.add_subcommand("denominator", "canonical tuple and denominator of a rational point");
    c_den->add_option("--tuple", den.tuple, "a,b,p1,p2,q");
    c_den->add_option("--coords", den.coords, "x12,x23,x13 (fractions allowed)");
    c_den->callback([&] { run = [&](const RunConfig& c) { return cmd_denominator(c, den, std::cout); }; });

    CountArgs cnt;
    auto* c_cnt = app.add_subcommand("count", "band and family counts");
    c_cnt->add_option("--band", cnt.band, "band parameter l (points with l/2 <= d_p <= l)");
    c_cnt->add_option("--doublings", cnt.doublings, "also report 2l, 4l, ...");
    c_cnt->add_option("--family", cnt.family, "E1, E2 or E3");
    c_cnt->add_option("--max", cnt.max_l, "largest l for family counts");
    c_cnt->add_option("--box", cnt.box, "lo1,lo2,lo3,hi1,hi2,hi3");
    c_cnt->add_option("--K", cnt.K, "half-width of the ker-nu window");
    c_cnt->add_flag("--list", cnt.list, "list the band points instead of counting");
    c_cnt->callback([&] { run = [&](const RunConfig& c) { return cmd_count(c, cnt, std::cout); }; });

    OrbitArgs orb;
    auto* c_orb = app.add_subcommand("orbit", "eta along the diagonal orbit");
    c_orb->add_option("--point", orb.point, "x12,x23,x13");
    c_orb->add_option("--tuple", orb.tuple, "a,b,p1,p2,q");
    c_orb->add_option("--random", orb.random, "number of seeded random base points");
    c_orb->add_option("--t-min", orb.t_min);
    c_orb->add_option("--t-max", orb.t_max);
    c_orb->add_option("--steps", orb.steps, "number of samples");
    c_orb->add_option("--radius", orb.radius, "stabilizer search radius");
    c_orb->callback([&] { run = [&](const RunConfig& c) { return cmd_orbit(c, orb, std::cout); }; });

    ClassifyArgs cls;
    auto* c_cls = app.add_subcommand("classify", "Bruhat cell, Weyl type and gamma-condition of a matrix");
    c_cls->add_option("--matrix", cls.matrix, "rows separated by ';'")->required();
    c_cls->add_option("--t", cls.t);
    c_cls->add_option("--gamma", cls.gamma);
    c_cls->callback([&] { run = [&](const RunConfig& c) { return cmd_classify(c, cls, std::cout); }; });

    CantorArgs can;
    auto add_cantor = [](CLI::App* sub, CantorArgs& a) {
        sub->add_option("--epsilon", a.epsilon);
        sub->add_option("--K", a.K, "half-width of the ker-nu window");
        sub->add_option("--schedule", a.schedule, "l_1,l_2,...");
        sub->add_option("--U0", a.U0, "half-widths of the base box");
        sub->add_option("--box-scales", a.box_scales, "scales for box counting of the deepest level");
        sub->add_flag("--strict-schedule", a.strict_schedule, "reject schedules violating the growth condition");
    };
    auto* c_can = app.add_subcommand("cantor", "tree-like Cantor construction");
    c_can->add_option("--gamma", can.gamma);
    add_cantor(c_can, can);
    c_can->callback([&] { run = [&](const RunConfig& c) { return cmd_cantor(c, can, std::cout); }; });

    DimensionArgs dim;
    auto* c_dim = app.add_subcommand("dimension", "dimension bounds for the exceptional set");
    c_dim->add_option("--gamma", dim.gamma)->required();
    c_dim->add_flag("--lower", dim.lower, "also build the Cantor lower bound");
    c_dim->add_option("--depth", dim.depth);
    add_cantor(c_dim, dim.cantor);
    c_dim->callback([&] { run = [&](const RunConfig& c) { return cmd_dimension(c, dim, std::cout); }; });

    MatrixArgs sys;
    auto* c_sys = app.add_subcommand("systole", "shortest vector of the lattice g Z^3");
    c_sys->add_option("--matrix", sys.matrix)->required();
    c_sys->callback([&] { run = [&](const RunConfig& c) { return cmd_systole(c, sys, std::cout); }; });

    MatrixArgs inj;
    auto* c_inj = app.add_subcommand("injrad", "injectivity radius at g SL3(Z)");
    c_inj->add_option("--matrix", inj.matrix)->required();
    c_inj->add_option("--radius", inj.radius);
    c_inj->callback([&] { run = [&](const RunConfig& c) { return cmd_injrad(c, inj, std::cout); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kPrecondition;
    }
    try {
        RunConfig cfg = resolve(app, g);
        return run(cfg);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << '\n';
        return kBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "precondition violated: " << e.what() << '\n';
        return kPrecondition;
    } catch (const std::overflow_error& e) {
        std::cerr << "precondition violated: " << e.what() << '\n';
        return kPrecondition;
    }
}
