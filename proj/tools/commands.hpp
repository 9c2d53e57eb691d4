#pragma once

#include "sl3/lie.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sl3::cli {

enum class Format { Csv, Json };

struct RunConfig {
    FlowParams flow;
    ConstantsProfile constants;
    uint64_t seed = 0;
    Format format = Format::Csv;
    bool format_given = false;  // dimension and cantor default to JSON otherwise
    int64_t budget = 50'000'000;
    int threads = 1;
};

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path);

enum ExitCode { kOk = 0, kPrecondition = 2, kBudget = 3 };

struct DenominatorArgs {
    std::optional<std::string> tuple;   // a,b,p1,p2,q
    std::optional<std::string> coords;  // x12,x23,x13
};
int cmd_denominator(const RunConfig& cfg, const DenominatorArgs& args, std::ostream& out);

struct CountArgs {
    std::optional<double> band;
    int doublings = 0;
    std::optional<std::string> family;
    double max_l = 0;
    std::optional<std::string> box;  // lo1,lo2,lo3,hi1,hi2,hi3
    std::optional<double> K;
    bool list = false;
};
int cmd_count(const RunConfig& cfg, const CountArgs& args, std::ostream& out);

struct OrbitArgs {
    std::optional<std::string> point;  // x12,x23,x13
    std::optional<std::string> tuple;  // a,b,p1,p2,q
    int random = 0;
    double t_min = 0, t_max = 0;
    int steps = 0;
    double radius = 4.0;
};
int cmd_orbit(const RunConfig& cfg, const OrbitArgs& args, std::ostream& out);

struct ClassifyArgs {
    std::string matrix;  // rows separated by ';', entries by ','
    std::optional<double> t;
    std::optional<double> gamma;
};
int cmd_classify(const RunConfig& cfg, const ClassifyArgs& args, std::ostream& out);

struct CantorArgs {
    double gamma = 0.5;
    double epsilon = 0.05;
    double K = 0.25;
    std::string schedule = "16,16384";
    std::string U0 = "0.5,0.5,0.5";
    std::optional<std::string> box_scales;
    bool strict_schedule = false;
};
int cmd_cantor(const RunConfig& cfg, const CantorArgs& args, std::ostream& out);

struct DimensionArgs {
    double gamma = 0;
    bool lower = false;
    int depth = 2;
    CantorArgs cantor;
};
int cmd_dimension(const RunConfig& cfg, const DimensionArgs& args, std::ostream& out);

struct MatrixArgs {
    std::string matrix;
    double radius = 4.0;
};
int cmd_systole(const RunConfig& cfg, const MatrixArgs& args, std::ostream& out);
int cmd_injrad(const RunConfig& cfg, const MatrixArgs& args, std::ostream& out);

}  // namespace sl3::cli
