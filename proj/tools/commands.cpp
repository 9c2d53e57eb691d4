#include "commands.hpp"

#include "sl3/dimension.hpp"
#include "sl3/diophantine.hpp"
#include "sl3/exact.hpp"
#include "sl3/lattice.hpp"
#include "sl3/rational_points.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

namespace sl3::cli {

using Json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::vector<ExactScalar> parse_scalars(const std::string& s, size_t expected, const char* what) {
    auto parts = split(s, ',');
    if (parts.size() != expected)
        throw PreconditionError(std::string(what) + ": expected " + std::to_string(expected) + " comma-separated values");
    std::vector<ExactScalar> out;
    for (auto& p : parts) out.push_back(parse_scalar(p));
    return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    for (auto& p : split(s, ',')) {
        if (p.empty()) continue;
        out.push_back(parse_scalar(p).get_d());
    }
    if (out.empty()) throw PreconditionError(std::string(what) + ": empty list");
    return out;
}

ExactMat3 parse_matrix(const std::string& s) {
    auto rows = split(s, ';');
    if (rows.size() != 3) throw PreconditionError("matrix: expected 3 rows separated by ';'");
    ExactMat3 m;
    for (int i = 0; i < 3; ++i) {
        auto r = parse_scalars(rows[i], 3, "matrix row");
        for (int j = 0; j < 3; ++j) m(i, j) = r[j];
    }
    return m;
}

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string matrix_string(const IntegerMat3& m) {
    std::string s;
    for (int i = 0; i < 3; ++i) {
        if (i) s += ';';
        for (int j = 0; j < 3; ++j) {
            if (j) s += ',';
            s += m(i, j).get_str();
        }
    }
    return s;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

// Flat report: JSON object or a two-column key,value CSV.
void emit_report(const RunConfig& cfg, const Json& report, std::ostream& out) {
    if (cfg.format == Format::Json) {
        out << report.dump(2) << '\n';
        return;
    }
    out << "key,value\n";
    std::function<void(const std::string&, const Json&)> walk = [&](const std::string& prefix, const Json& v) {
        if (v.is_object()) {
            for (auto it = v.begin(); it != v.end(); ++it) walk(prefix.empty() ? it.key() : prefix + "." + it.key(), *it);
        } else if (v.is_array()) {
            for (size_t i = 0; i < v.size(); ++i) walk(prefix + "." + std::to_string(i), v[i]);
        } else if (v.is_string()) {
            out << csv_field(prefix) << ',' << csv_field(v.get<std::string>()) << '\n';
        } else if (v.is_number_float()) {
            out << csv_field(prefix) << ',' << num(v.get<double>()) << '\n';
        } else {
            out << csv_field(prefix) << ',' << v.dump() << '\n';
        }
    };
    walk("", report);
}

RationalPointCanon parse_tuple(const std::string& s) {
    auto v = parse_scalars(s, 5, "tuple a,b,p1,p2,q");
    for (auto& x : v)
        if (x.get_den() != 1) throw PreconditionError("tuple entries must be integers");
    return RationalPointCanon::make(v[0].get_num(), v[1].get_num(), v[2].get_num(), v[3].get_num(), v[4].get_num());
}

Json canon_json(const RationalPointCanon& p) {
    Json j;
    j["a"] = p.a.get_str();
    j["b"] = p.b.get_str();
    j["p1"] = p.p1.get_str();
    j["p2"] = p.p2.get_str();
    j["q"] = p.q.get_str();
    return j;
}

CountBox parse_box(const std::optional<std::string>& s) {
    CountBox box;
    if (!s) return box;
    auto v = parse_doubles(*s, "box");
    if (v.size() != 6) throw PreconditionError("box: expected lo1,lo2,lo3,hi1,hi2,hi3");
    for (int i = 0; i < 3; ++i) {
        box.lo[i] = v[i];
        box.hi[i] = v[i + 3];
    }
    return box;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw PreconditionError(path + ":" + std::to_string(lineno) + ": expected key=value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

int cmd_denominator(const RunConfig& cfg, const DenominatorArgs& args, std::ostream& out) {
    if (args.tuple.has_value() == args.coords.has_value())
        throw PreconditionError("denominator: give exactly one of --tuple or --coords");
    RationalPointCanon p;
    if (args.tuple) {
        p = parse_tuple(*args.tuple);
    } else {
        auto c = parse_scalars(*args.coords, 3, "coords x12,x23,x13");
        p = canonicalize(ExactUnipotent{c[0], c[1], c[2]});
    }
    ExactInt formula = denominator_formula(p);
    ExactInt oracle = denominator_oracle(p.expand());
    Json r;
    r["canonical"] = canon_json(p);
    r["d"] = p.d.get_str();
    r["d_p_formula"] = formula.get_str();
    r["d_p_oracle"] = oracle.get_str();
    r["a_p"] = Json::array({to_string(p.a_p[0]), to_string(p.a_p[1]), to_string(p.a_p[2])});
    r["agree"] = formula == oracle;
    emit_report(cfg, r, out);
    return kOk;
}

int cmd_count(const RunConfig& cfg, const CountArgs& args, std::ostream& out) {
    if (args.band.has_value() == args.family.has_value())
        throw PreconditionError("count: give exactly one of --band or --family");
    if (args.family) {
        Family fam;
        if (*args.family == "E1") fam = Family::E1;
        else if (*args.family == "E2") fam = Family::E2;
        else if (*args.family == "E3") fam = Family::E3;
        else throw PreconditionError("count: family must be E1, E2 or E3");
        if (!(args.max_l >= 1)) throw PreconditionError("count: --max must be >= 1");
        out << "l,count,count_over_l2,doubling_ratio\n";
        int64_t prev = -1;
        for (int64_t l = 1; l <= int64_t(args.max_l); l *= 2) {
            int64_t c = count_family(fam, l);
            out << l << ',' << c << ',' << num(double(c) / double(l) / double(l)) << ','
                << (prev > 0 ? num(double(c) / double(prev)) : "") << '\n';
            prev = c;
        }
        return kOk;
    }

    CountSpec spec;
    spec.box = parse_box(args.box);
    spec.flow = cfg.flow;
    spec.K_halfwidth = args.K;
    spec.l = *args.band;
    if (args.list) {
        BandStream s = enumerate_band(spec, cfg.budget);
        write_points_csv(out, s.points, cfg.flow);
        if (s.truncated) {
            out << "# truncated: budget exhausted\n";
            return kBudget;
        }
        return kOk;
    }
    if (args.doublings < 0) throw PreconditionError("count: --doublings must be >= 0");
    out << "l,count,count_over_l2,doubling_ratio\n";
    double l = *args.band;
    for (int k = 0; k <= args.doublings; ++k, l *= 2) {
        spec.l = l;
        int64_t c = count_band(spec);
        std::string ratio;
        if (l / 2 >= 1) {
            CountSpec half = spec;
            half.l = l / 2;
            int64_t ch = count_band(half);
            if (ch > 0) ratio = num(double(c) / double(ch));
        }
        out << num(l) << ',' << c << ',' << num(double(c) / (l * l)) << ',' << ratio << '\n';
    }
    return kOk;
}

int cmd_orbit(const RunConfig& cfg, const OrbitArgs& args, std::ostream& out) {
    int given = int(args.point.has_value()) + int(args.tuple.has_value()) + int(args.random > 0);
    if (given != 1) throw PreconditionError("orbit: give exactly one of --point, --tuple or --random");
    std::vector<ExactUnipotent> base;
    if (args.point) {
        auto c = parse_scalars(*args.point, 3, "point x12,x23,x13");
        base.push_back({c[0], c[1], c[2]});
    } else if (args.tuple) {
        base.push_back(parse_tuple(*args.tuple).expand());
    } else {
        std::mt19937_64 rng(cfg.seed);
        // 40-bit dyadic coordinates in [0,1)
        auto coord = [&] { return ExactScalar(ExactInt(std::to_string(rng() >> 24)), ExactInt(1) << 40); };
        for (int i = 0; i < args.random; ++i) {
            ExactScalar a = coord(), b = coord(), c = coord();
            base.push_back({a, b, c});
        }
    }
    std::vector<double> grid;
    if (args.steps == 1) grid.push_back(args.t_min);
    if (args.steps >= 2 && args.t_max > args.t_min)
        for (int i = 0; i < args.steps; ++i) grid.push_back(args.t_min + (args.t_max - args.t_min) * i / (args.steps - 1));

    std::vector<OrbitSeries> series(base.size());
    std::vector<std::string> errors(base.size());
    std::vector<int> codes(base.size(), kOk);
    auto work = [&](size_t i) {
        try {
            series[i] = orbit_eta_series(base[i], cfg.flow, grid, args.radius, cfg.budget);
        } catch (const BudgetExceeded& e) {
            errors[i] = e.what();
            codes[i] = kBudget;
        }
    };
    const int threads = std::max(1, std::min<int>(cfg.threads, int(base.size())));
    if (threads == 1) {
        for (size_t i = 0; i < base.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (size_t i = t; i < base.size(); i += threads) work(i);
            });
        for (auto& th : pool) th.join();
    }
    const bool many = base.size() > 1;
    if (cfg.format == Format::Json) {
        Json r = Json::array();
        for (size_t i = 0; i < base.size(); ++i) {
            Json o;
            o["point"] = Json::array({to_string(base[i].x12), to_string(base[i].x23), to_string(base[i].x13)});
            Json samples = Json::array();
            for (auto& s : series[i].samples)
                samples.push_back({{"t", s.t}, {"eta", s.eta}, {"gauge", gauge_name(s.gauge)}, {"certified", s.certified}});
            o["samples"] = samples;
            if (series[i].samples.size() >= 8) o["type_estimate"] = estimate_type(series[i], args.t_min, args.t_max);
            if (codes[i] != kOk) o["error"] = errors[i];
            r.push_back(o);
        }
        out << (many ? r : r[0]).dump(2) << '\n';
    } else {
        out << (many ? "point,t,eta,gauge,certified\n" : "t,eta,gauge,certified\n");
        for (size_t i = 0; i < base.size(); ++i) {
            for (auto& s : series[i].samples) {
                if (many) out << i << ',';
                out << num(s.t) << ',' << num(s.eta) << ',' << gauge_name(s.gauge) << ','
                    << (s.certified ? "true" : "false") << '\n';
            }
            if (codes[i] != kOk) out << "# point " << i << ": " << errors[i] << '\n';
        }
    }
    for (int c : codes)
        if (c != kOk) return c;
    return kOk;
}

int cmd_classify(const RunConfig& cfg, const ClassifyArgs& args, std::ostream& out) {
    ExactMat3 m = parse_matrix(args.matrix);
    if (m.det() != 1) throw PreconditionError("classify: matrix must have determinant 1");
    Json r;
    BruhatCell cell = bruhat_decompose(m);
    r["bruhat_cell"] = cell.cell_index;
    try {
        WeylType w = weyl_type(m);
        r["weyl_type"] = "w" + std::to_string(w.index);
        r["pivot_pair"] = Json::array({w.pivot_pair.first, w.pivot_pair.second});
    } catch (const NotNuConjugate&) {
        r["weyl_type"] = "not N_nu-conjugate";
    }
    if (args.gamma && args.t) {
        Json g;
        try {
            auto [ok, w] = gamma_condition_check(Mat3::from_exact(m), *args.t, *args.gamma, cfg.constants);
            g["satisfied"] = ok;
            g["v_minus_norm"] = w.v_minus_norm;
            g["v_zero_norm"] = w.v_zero_norm;
            g["v_plus_norm"] = w.v_plus_norm;
            g["band"] = std::exp(-*args.gamma * *args.t);
        } catch (const PreconditionError& e) {
            g["error"] = e.what();
        }
        r["gamma_condition"] = g;
    }
    emit_report(cfg, r, out);
    return kOk;
}

namespace {

Json cantor_json(const RunConfig& cfg, const CantorArgs& args, int depth_limit) {
    std::vector<double> schedule = parse_doubles(args.schedule, "schedule");
    if (depth_limit > 0) {
        // extend or trim the schedule with l_{j+1} = l_j^{7/2}
        while (int(schedule.size()) < depth_limit) schedule.push_back(std::round(std::pow(schedule.back(), 3.5)));
        schedule.resize(depth_limit);
    }
    auto u = parse_doubles(args.U0, "U0");
    if (u.size() != 3) throw PreconditionError("U0: expected r1,r2,r3");
    CantorOptions opt;
    opt.epsilon0 = cfg.constants.epsilon0;
    opt.desk_mode = !args.strict_schedule;
    opt.budget = cfg.budget;
    opt.keep_children = args.box_scales.has_value();
    auto levels = cantor_build(Box3{u[0], u[1], u[2]}, args.gamma, args.epsilon, args.K, schedule, cfg.flow, opt);
    Json r;
    r["gamma"] = args.gamma;
    r["epsilon"] = args.epsilon;
    r["K_halfwidth"] = args.K;
    Json lv = Json::array();
    for (auto& l : levels) {
        Json o;
        o["j"] = l.j;
        o["l_j"] = l.l_j;
        o["parent_count"] = l.parent_count;
        o["child_count"] = l.child_count;
        o["cube_count"] = l.cube_count;
        o["delta_j"] = l.delta_j;
        o["d_j"] = l.d_j;
        o["epsilon0_final"] = l.epsilon0_final;
        o["paper_faithful"] = l.paper_faithful;
        if (!l.warning.empty()) o["warning"] = l.warning;
        lv.push_back(o);
    }
    r["levels"] = lv;
    r["treelike_lower_bound"] = treelike_lower_bound(levels);
    if (args.box_scales) {
        std::vector<std::array<double, 3>> pts;
        for (auto& c : levels.back().children) pts.push_back(c.point.coords());
        r["box_counting_dim"] = box_counting_dim(pts, parse_doubles(*args.box_scales, "box scales"));
    }
    return r;
}

RunConfig json_by_default(const RunConfig& cfg) {
    RunConfig c = cfg;
    if (!c.format_given) c.format = Format::Json;
    return c;
}

}  // namespace

int cmd_cantor(const RunConfig& cfg, const CantorArgs& args, std::ostream& out) {
    Json r = cantor_json(cfg, args, 0);
    if (json_by_default(cfg).format == Format::Json) {
        out << r.dump(2) << '\n';
        return kOk;
    }
    out << "j,l_j,parent_count,child_count,cube_count,delta_j,d_j,epsilon0_final,paper_faithful\n";
    for (auto& o : r["levels"])
        out << o["j"].get<int>() << ',' << num(o["l_j"].get<double>()) << ',' << o["parent_count"].get<int64_t>() << ','
            << o["child_count"].get<int64_t>() << ',' << o["cube_count"].get<int64_t>() << ','
            << num(o["delta_j"].get<double>()) << ',' << num(o["d_j"].get<double>()) << ','
            << num(o["epsilon0_final"].get<double>()) << ',' << (o["paper_faithful"].get<bool>() ? "true" : "false")
            << '\n';
    return kOk;
}

int cmd_dimension(const RunConfig& cfg, const DimensionArgs& args, std::ostream& out) {
    Json r;
    r["gamma"] = args.gamma;
    r["threshold"] = nonemptiness_threshold(cfg.flow);
    DimensionValue up = dim_upper_bound(args.gamma, cfg.flow);
    if (up.empty) {
        r["exceptional_set"] = "empty";
        r["upper_bound"] = nullptr;
        r["full_space"] = nullptr;
    } else {
        r["exceptional_set"] = "nonempty";
        r["upper_bound"] = up.value;
        r["full_space"] = dim_full_space(args.gamma, cfg.flow).value;
        Json crit;
        for (int f = 1; f <= 5; ++f) {
            try {
                crit["E" + std::to_string(f)] = critical_dimension(f, args.gamma, cfg.flow);
            } catch (const PreconditionError&) {
                crit["E" + std::to_string(f)] = nullptr;
            }
        }
        r["critical_dimensions"] = crit;
        if (args.lower) {
            if (args.depth < 1) throw PreconditionError("dimension: --depth must be >= 1");
            CantorArgs c = args.cantor;
            c.gamma = args.gamma;
            Json t = cantor_json(cfg, c, args.depth);
            r["lower"] = {{"depth", args.depth}, {"treelike_lower_bound", t["treelike_lower_bound"]}, {"levels", t["levels"]}};
        }
    }
    emit_report(json_by_default(cfg), r, out);
    return kOk;
}

int cmd_systole(const RunConfig& cfg, const MatrixArgs& args, std::ostream& out) {
    Mat3 g = Mat3::from_exact(parse_matrix(args.matrix));
    ShortVectorResult s = shortest_vector(lattice_of(g), cfg.budget);
    Json r;
    r["systole"] = s.value;
    r["witness"] = Json::array({s.witness[0], s.witness[1], s.witness[2]});
    emit_report(cfg, r, out);
    return kOk;
}

int cmd_injrad(const RunConfig& cfg, const MatrixArgs& args, std::ostream& out) {
    ExactMat3 g = parse_matrix(args.matrix);
    if (g.det() != 1) throw PreconditionError("injrad: matrix must have determinant 1");
    StabilizerSearch search(g);
    InjectivityResult res = search.search({0, 0, 0}, args.radius, cfg.budget);
    Json r;
    r["eta"] = res.eta;
    r["gauge"] = gauge_name(res.gauge);
    r["certified"] = res.certified;
    r["searched_radius"] = res.searched_radius;
    r["witness"] = matrix_string(res.witness);
    emit_report(cfg, r, out);
    return kOk;
}

}  // namespace sl3::cli
