// Command-line frontend: every solver capability behind one binary with
// deterministic human/csv/json output.

#include "yamabe/errors.hpp"
#include "yamabe/profile_cache.hpp"
#include "yamabe/quadrature.hpp"
#include "yamabe/stability.hpp"
#include "yamabe/table_runner.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace yamabe;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitUnstable = 4;

struct Options {
    int m = 2;
    int n = 2;
    double lambda = 0.0;
    double lambda_1 = 0.0;
    double vol_m = 0.0;
    std::string format = "human";
    std::string output;
    std::string cache_dir;
    std::string pairs = "all";
    std::string grid;
    bool reference = false;
    int jobs = 0;
    SolveSettings settings;
};

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fixed4(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

double round4(double x) { return std::round(x * 1e4) / 1e4; }

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

const char* kind_name(TrajectoryKind k) {
    switch (k) {
        case TrajectoryKind::ZeroCrossing: return "zero-crossing";
        case TrajectoryKind::LocalMin: return "local-min";
        case TrajectoryKind::DecreasingPositive: return "decreasing-positive";
        case TrajectoryKind::Ambiguous: return "ambiguous";
    }
    return "?";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Stable: return "stable";
        case Verdict::Unstable: return "unstable";
        case Verdict::Marginal: return "marginal";
    }
    return "?";
}

void emit(const Options& opt, const std::string& payload) {
    if (opt.output.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(opt.output);
    if (!out) throw DomainError("cannot open output file " + opt.output);
    out << payload;
}

ProfileCache make_cache(const Options& opt) {
    std::string dir = opt.cache_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("YAMABE_CACHE_DIR")) dir = env;
    }
    return dir.empty() ? ProfileCache{} : ProfileCache{dir};
}

json settings_meta(const Options& opt) {
    json s;
    s["tol_beta"] = opt.settings.shoot.tol_beta;
    s["tol_lambda"] = opt.settings.stability.tol_lambda;
    s["abs_tol"] = opt.settings.shoot.ode.abs_tol;
    s["rel_tol"] = opt.settings.shoot.ode.rel_tol;
    s["grid_intervals"] = opt.settings.shoot.grid_intervals;
    return s;
}

std::string csv_header(const std::string& command, const std::string& extra = "") {
    std::string head = "# yamabe " + command + " schema_version=1";
    if (!extra.empty()) head += " " + extra;
    head += "\n";
    return head;
}

std::vector<DimensionPair> parse_pairs(const std::string& spec) {
    std::vector<DimensionPair> pairs;
    if (spec == "all") {
        for (const auto& r : reference_thresholds()) pairs.push_back({r.m, r.n});
        return pairs;
    }
    if (spec.empty() || spec == "none") return pairs;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        int m = 0, n = 0;
        if (std::sscanf(item.c_str(), "%d,%d", &m, &n) != 2) {
            throw DomainError("malformed pair '" + item + "' (expected m,n)");
        }
        pairs.push_back({m, n});
    }
    return pairs;
}

std::vector<double> parse_grid(const std::string& spec, double fallback_hi) {
    std::vector<double> grid;
    if (spec.empty()) {
        for (int i = 0; i < 21; ++i) grid.push_back(fallback_hi * i / 20.0);
        return grid;
    }
    double a = 0, b = 0;
    int count = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &a, &b, &count) == 3) {
        if (count < 2 || !(b > a)) throw DomainError("malformed grid range '" + spec + "'");
        for (int i = 0; i < count; ++i) grid.push_back(a + (b - a) * i / (count - 1));
        return grid;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        grid.push_back(std::stod(item));
    }
    if (grid.empty()) throw DomainError("empty lambda grid");
    return grid;
}

RadialProfile obtain_profile(const Options& opt, const ProblemDims& dims, bool unit) {
    return make_cache(opt).get_or_compute(dims, unit, opt.settings.shoot);
}

// ---------------------------------------------------------------- commands

int cmd_ground_state(const Options& opt) {
    const ProblemDims dims = make_dims(opt.m, opt.n);
    const RadialProfile f = obtain_profile(opt, dims, false);
    if (opt.format == "csv") {
        std::string out = csv_header("ground-state");
        out += "t,f,df\n";
        for (size_t i = 0; i < f.values.size(); ++i) {
            out += g17(i * f.grid_step) + "," + g17(f.values[i]) + "," + g17(f.derivs[i]) + "\n";
        }
        emit(opt, out);
    } else if (opt.format == "json") {
        json j;
        j["schema_version"] = 1;
        j["command"] = "ground-state";
        j["m"] = dims.m;
        j["n"] = dims.n;
        j["beta"] = f.beta;
        j["grid_step"] = f.grid_step;
        j["t_grid"] = f.t_grid();
        j["nodes"] = f.values.size();
        j["tail_rate"] = f.tail_rate;
        j["tail_amplitude"] = f.tail_amplitude;
        j["settings"] = settings_meta(opt);
        emit(opt, j.dump(2) + "\n");
    } else {
        std::string out;
        out += "ground state m=" + std::to_string(dims.m) + " n=" + std::to_string(dims.n) + "\n";
        out += "  f(0)            " + g17(f.beta) + "\n";
        out += "  grid            " + std::to_string(f.values.size()) + " nodes on [0, " +
               g17(f.t_grid()) + "]\n";
        out += "  tail rate       " + g17(f.tail_rate) + "\n";
        out += "  tail amplitude  " + g17(f.tail_amplitude) + "\n";
        emit(opt, out);
    }
    return kExitOk;
}

int cmd_lambda(const Options& opt) {
    const ProblemDims dims = make_dims(opt.m, opt.n);
    const RadialProfile f = obtain_profile(opt, dims, false);
    const LambdaResult r = find_lambda(dims, f, opt.settings.stability);
    if (opt.format == "csv") {
        std::string out = csv_header("lambda");
        out += "m,n,lambda,bracket_lo,bracket_hi,iterations,horizon,beta\n";
        out += std::to_string(dims.m) + "," + std::to_string(dims.n) + "," + g17(r.lambda_mn) +
               "," + g17(r.bracket_lo) + "," + g17(r.bracket_hi) + "," +
               std::to_string(r.iterations) + "," + g17(r.horizon_used) + "," +
               g17(r.ground_state_beta) + "\n";
        emit(opt, out);
    } else if (opt.format == "json") {
        json j;
        j["schema_version"] = 1;
        j["command"] = "lambda";
        j["m"] = dims.m;
        j["n"] = dims.n;
        j["lambda"] = r.lambda_mn;
        j["bracket_lo"] = r.bracket_lo;
        j["bracket_hi"] = r.bracket_hi;
        j["iterations"] = r.iterations;
        j["horizon"] = r.horizon_used;
        j["beta"] = r.ground_state_beta;
        j["settings"] = settings_meta(opt);
        emit(opt, j.dump(2) + "\n");
    } else {
        std::string out = "lambda(" + std::to_string(dims.m) + "," + std::to_string(dims.n) +
                          ") = " + g17(r.lambda_mn) + "\n";
        out += "  bracket    [" + g17(r.bracket_lo) + ", " + g17(r.bracket_hi) + "]\n";
        out += "  iterations " + std::to_string(r.iterations) + "\n";
        out += "  horizon    " + g17(r.horizon_used) + "\n";
        out += "  f(0)       " + g17(r.ground_state_beta) + "\n";
        emit(opt, out);
    }
    return kExitOk;
}

int cmd_table(const Options& opt) {
    const std::vector<DimensionPair> pairs = parse_pairs(opt.pairs);
    const ProfileCache cache = make_cache(opt);
    const auto outcomes = run_pairs(pairs, opt.settings, opt.jobs, cache);

    if (opt.format == "csv") {
        std::string out = csv_header("table");
        out += opt.reference ? "m,n,lambda,reference,abs_dev,status\n" : "m,n,lambda,status\n";
        for (const auto& o : outcomes) {
            out += std::to_string(o.m) + "," + std::to_string(o.n) + ",";
            if (o.ok) {
                out += fixed4(o.result.lambda_mn);
                if (opt.reference) {
                    const auto* ref = find_reference(o.m, o.n);
                    if (ref) {
                        out += "," + fixed4(ref->lambda) + "," +
                               fixed4(std::abs(o.result.lambda_mn - ref->lambda));
                    } else {
                        out += ",,";
                    }
                }
                out += ",ok";
            } else {
                out += opt.reference ? ",,," : ",";
                out += csv_quote(o.error);
            }
            out += "\n";
        }
        emit(opt, out);
    } else if (opt.format == "json") {
        json j;
        j["schema_version"] = 1;
        j["command"] = "table";
        j["settings"] = settings_meta(opt);
        j["rows"] = json::array();
        for (const auto& o : outcomes) {
            json row;
            row["m"] = o.m;
            row["n"] = o.n;
            if (o.ok) {
                row["lambda"] = round4(o.result.lambda_mn);
                if (opt.reference) {
                    if (const auto* ref = find_reference(o.m, o.n)) {
                        row["reference"] = ref->lambda;
                        row["abs_dev"] = round4(std::abs(o.result.lambda_mn - ref->lambda));
                    }
                }
            } else {
                row["error"] = o.error;
            }
            j["rows"].push_back(row);
        }
        emit(opt, j.dump(2) + "\n");
    } else {
        std::string out = opt.reference ? "  m   n  lambda    reference  abs_dev\n"
                                        : "  m   n  lambda\n";
        for (const auto& o : outcomes) {
            char buf[160];
            if (o.ok) {
                if (opt.reference) {
                    const auto* ref = find_reference(o.m, o.n);
                    if (ref) {
                        std::snprintf(buf, sizeof buf, "%3d %3d  %8.4f  %8.4f  %.1e\n", o.m,
                                      o.n, o.result.lambda_mn, ref->lambda,
                                      std::abs(o.result.lambda_mn - ref->lambda));
                    } else {
                        std::snprintf(buf, sizeof buf, "%3d %3d  %8.4f         -        -\n",
                                      o.m, o.n, o.result.lambda_mn);
                    }
                } else {
                    std::snprintf(buf, sizeof buf, "%3d %3d  %8.4f\n", o.m, o.n,
                                  o.result.lambda_mn);
                }
                out += buf;
            } else {
                std::snprintf(buf, sizeof buf, "%3d %3d  error: %s\n", o.m, o.n,
                              o.error.c_str());
                out += buf;
            }
        }
        emit(opt, out);
    }
    for (const auto& o : outcomes) {
        if (!o.ok) return kExitConvergence;
    }
    return kExitOk;
}

int cmd_a_curve(const Options& opt) {
    const ProblemDims dims = make_dims(opt.m, opt.n);
    const RadialProfile f = obtain_profile(opt, dims, false);
    const double cap = lambda_admissible_cap(dims, f);
    const std::vector<double> grid = parse_grid(opt.grid, 0.9 * cap);
    const double critical = (dims.p - 1.0) * dims.s_g;

    struct Row {
        double lambda;
        bool ok;
        double a;
        std::string error;
    };
    std::vector<Row> rows;
    for (double lambda : grid) {
        Row row{lambda, false, 0.0, {}};
        try {
            row.a = a_of_lambda(f, dims, lambda, opt.settings.stability.tol_alpha,
                                opt.settings.stability);
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }

    if (opt.format == "csv") {
        std::string out = csv_header("a-curve", "critical_level=" + g17(critical));
        out += "lambda,a,status\n";
        for (const auto& r : rows) {
            out += g17(r.lambda) + ",";
            if (r.ok) {
                out += g17(r.a) + ",ok";
            } else {
                out += "," + csv_quote(r.error);
            }
            out += "\n";
        }
        emit(opt, out);
    } else if (opt.format == "json") {
        json j;
        j["schema_version"] = 1;
        j["command"] = "a-curve";
        j["m"] = dims.m;
        j["n"] = dims.n;
        j["critical_level"] = critical;
        j["settings"] = settings_meta(opt);
        j["rows"] = json::array();
        for (const auto& r : rows) {
            json row;
            row["lambda"] = r.lambda;
            if (r.ok) row["a"] = r.a;
            else row["error"] = r.error;
            j["rows"].push_back(row);
        }
        emit(opt, j.dump(2) + "\n");
    } else {
        std::string out = "A(lambda) for m=" + std::to_string(dims.m) +
                          " n=" + std::to_string(dims.n) +
                          "   critical level (p-1)m(m-1) = " + g17(critical) + "\n";
        for (const auto& r : rows) {
            char buf[160];
            if (r.ok) {
                std::snprintf(buf, sizeof buf, "  %12.6f  %14.8f\n", r.lambda, r.a);
            } else {
                std::snprintf(buf, sizeof buf, "  %12.6f  error: %s\n", r.lambda,
                              r.error.c_str());
            }
            out += buf;
        }
        emit(opt, out);
    }
    for (const auto& r : rows) {
        if (!r.ok) return kExitConvergence;
    }
    return kExitOk;
}

int cmd_classify(const Options& opt) {
    const ProblemDims dims = make_dims(opt.m, opt.n);
    const RadialProfile f = obtain_profile(opt, dims, false);
    const Trajectory traj =
        trajectory_at_lambda(f, dims, opt.lambda, 0.0, opt.settings.stability);
    const TrajectoryClass cls = classify(traj, opt.settings.stability.events);
    const double horizon = default_figure_horizon(dims, opt.settings.stability);

    if (opt.format == "csv") {
        std::string out = csv_header("classify", "class=" + std::string(kind_name(cls.kind)));
        out += "t,u,du\n";
        for (size_t i = 0; i < traj.t.size(); ++i) {
            out += g17(traj.t[i]) + "," + g17(traj.u[i]) + "," + g17(traj.v[i]) + "\n";
        }
        emit(opt, out);
    } else if (opt.format == "json") {
        json j;
        j["schema_version"] = 1;
        j["command"] = "classify";
        j["m"] = dims.m;
        j["n"] = dims.n;
        j["lambda"] = opt.lambda;
        j["horizon"] = horizon;
        j["class"] = kind_name(cls.kind);
        j["t_event"] = cls.t_event;
        j["u_event"] = cls.u_event;
        j["settings"] = settings_meta(opt);
        emit(opt, j.dump(2) + "\n");
    } else {
        std::string out = "class " + std::string(kind_name(cls.kind)) + " at lambda=" +
                          g17(opt.lambda) + " (horizon " + g17(horizon) + ")\n";
        if (cls.kind == TrajectoryKind::ZeroCrossing) {
            out += "  zero crossing at t = " + g17(cls.t_event) + "\n";
        } else if (cls.kind == TrajectoryKind::LocalMin) {
            out += "  local minimum u = " + g17(cls.u_event) + " at t = " + g17(cls.t_event) +
                   "\n";
        }
        out += "  samples " + std::to_string(traj.t.size()) + "\n";
        emit(opt, out);
    }
    return kExitOk;
}

int cmd_check_stability(const Options& opt) {
    const ProblemDims dims = make_dims(opt.m, opt.n);
    const RadialProfile f = obtain_profile(opt, dims, false);
    const LambdaResult r = find_lambda(dims, f, opt.settings.stability);
    const StabilityReport rep =
        stability_verdict(dims, opt.lambda_1, r, opt.settings.stability.tol_lambda);

    if (opt.format == "csv") {
        std::string out = csv_header("check-stability");
        out += "m,n,lambda1,lambda,verdict,yamabe_metric_sufficient,bracket_lo,bracket_hi,"
               "marginal_band\n";
        out += std::to_string(dims.m) + "," + std::to_string(dims.n) + "," +
               g17(rep.lambda_1) + "," + g17(rep.lambda_mn) + "," +
               verdict_name(rep.verdict) + "," +
               (rep.yamabe_metric_sufficient ? "true" : "false") + "," + g17(r.bracket_lo) +
               "," + g17(r.bracket_hi) + "," + g17(rep.marginal_band) + "\n";
        emit(opt, out);
    } else if (opt.format == "json") {
        json j;
        j["schema_version"] = 1;
        j["command"] = "check-stability";
        j["m"] = dims.m;
        j["n"] = dims.n;
        j["lambda1"] = rep.lambda_1;
        j["lambda"] = rep.lambda_mn;
        j["verdict"] = verdict_name(rep.verdict);
        j["yamabe_metric_sufficient"] = rep.yamabe_metric_sufficient;
        j["marginal_band"] = rep.marginal_band;
        json prov;
        prov["bracket_lo"] = r.bracket_lo;
        prov["bracket_hi"] = r.bracket_hi;
        prov["iterations"] = r.iterations;
        prov["horizon"] = r.horizon_used;
        prov["beta"] = r.ground_state_beta;
        j["provenance"] = prov;
        j["settings"] = settings_meta(opt);
        emit(opt, j.dump(2) + "\n");
    } else {
        std::string out;
        out += "verdict: " + std::string(verdict_name(rep.verdict)) + "\n";
        out += "  lambda_1        " + g17(rep.lambda_1) + "\n";
        out += "  threshold       " + g17(rep.lambda_mn) + "  bracket [" + g17(r.bracket_lo) +
               ", " + g17(r.bracket_hi) + "]\n";
        out += "  marginal band   +-" + g17(rep.marginal_band) + "\n";
        out += std::string("  yamabe metrics  ") +
               (rep.yamabe_metric_sufficient ? "m >= threshold: minimizer stable for every "
                                               "Yamabe metric on the closed factor"
                                             : "m < threshold: no blanket conclusion") +
               "\n";
        emit(opt, out);
    }
    return rep.verdict == Verdict::Unstable ? kExitUnstable : kExitOk;
}

int cmd_verify_identities(const Options& opt) {
    const ProblemDims dims = make_dims(opt.m, opt.n);
    const RadialProfile f = obtain_profile(opt, dims, false);
    const IntegralReport rep = ground_state_report(f);
    if (opt.format == "csv") {
        std::string out = csv_header("verify-identities");
        out += "m,n,l2_sq,lp_p,grad_sq,sphere_factor,residual_grad_l2,residual_grad_lp,"
               "residual_l2_lp\n";
        out += std::to_string(dims.m) + "," + std::to_string(dims.n) + "," + g17(rep.l2_sq) +
               "," + g17(rep.lp_p) + "," + g17(rep.grad_sq) + "," + g17(rep.sphere_factor) +
               "," + g17(rep.virial_grad_l2) + "," + g17(rep.virial_grad_lp) + "," +
               g17(rep.virial_l2_lp) + "\n";
        emit(opt, out);
    } else if (opt.format == "json") {
        json j;
        j["schema_version"] = 1;
        j["command"] = "verify-identities";
        j["m"] = dims.m;
        j["n"] = dims.n;
        j["l2_sq"] = rep.l2_sq;
        j["lp_p"] = rep.lp_p;
        j["grad_sq"] = rep.grad_sq;
        j["sphere_factor"] = rep.sphere_factor;
        j["residual_grad_l2"] = rep.virial_grad_l2;
        j["residual_grad_lp"] = rep.virial_grad_lp;
        j["residual_l2_lp"] = rep.virial_l2_lp;
        j["settings"] = settings_meta(opt);
        emit(opt, j.dump(2) + "\n");
    } else {
        std::string out = "ground-state integrals m=" + std::to_string(dims.m) +
                          " n=" + std::to_string(dims.n) + "\n";
        out += "  ||f||_2^2        " + g17(rep.l2_sq) + "\n";
        out += "  ||f||_p^p        " + g17(rep.lp_p) + "\n";
        out += "  ||grad f||_2^2   " + g17(rep.grad_sq) + "\n";
        out += "  virial residuals " + g17(rep.virial_grad_l2) + "  " +
               g17(rep.virial_grad_lp) + "  " + g17(rep.virial_l2_lp) + "\n";
        emit(opt, out);
    }
    return kExitOk;
}

int cmd_yamabe_constant(const Options& opt) {
    const ProblemDims dims = make_dims(opt.m, opt.n);
    const RadialProfile f = obtain_profile(opt, dims, false);
    const double y = yamabe_constant_rn(f, dims, opt.vol_m);
    if (opt.format == "csv") {
        std::string out = csv_header("yamabe-constant");
        out += "m,n,vol_m,value\n";
        out += std::to_string(dims.m) + "," + std::to_string(dims.n) + "," + g17(opt.vol_m) +
               "," + g17(y) + "\n";
        emit(opt, out);
    } else if (opt.format == "json") {
        json j;
        j["schema_version"] = 1;
        j["command"] = "yamabe-constant";
        j["m"] = dims.m;
        j["n"] = dims.n;
        j["vol_m"] = opt.vol_m;
        j["value"] = y;
        j["settings"] = settings_meta(opt);
        emit(opt, j.dump(2) + "\n");
    } else {
        emit(opt, "restricted Yamabe constant = " + g17(y) + "  (vol_M = " + g17(opt.vol_m) +
                      ")\n");
    }
    return kExitOk;
}

int cmd_gn_constant(const Options& opt) {
    const ProblemDims dims = make_dims(opt.m, opt.n);
    const RadialProfile w = obtain_profile(opt, dims, true);
    const double sigma = gn_best_constant(w, dims);
    if (opt.format == "csv") {
        std::string out = csv_header("gn-constant");
        out += "m,n,sigma,minimizer_peak\n";
        out += std::to_string(dims.m) + "," + std::to_string(dims.n) + "," + g17(sigma) + "," +
               g17(w.beta) + "\n";
        emit(opt, out);
    } else if (opt.format == "json") {
        json j;
        j["schema_version"] = 1;
        j["command"] = "gn-constant";
        j["m"] = dims.m;
        j["n"] = dims.n;
        j["sigma"] = sigma;
        j["minimizer_peak"] = w.beta;
        j["settings"] = settings_meta(opt);
        emit(opt, j.dump(2) + "\n");
    } else {
        emit(opt, "Gagliardo-Nirenberg best constant sigma(" + std::to_string(dims.m) + "," +
                      std::to_string(dims.n) + ") = " + g17(sigma) + "\n");
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{
        "Stability thresholds for product-manifold Yamabe ground states.\n"
        "CSV payloads start with a '# yamabe <command> schema_version=1' line followed by a\n"
        "fixed header row; JSON payloads carry schema_version and a settings block. Output\n"
        "is byte-deterministic for identical inputs.\n"
        "Exit codes: 0 ok, 2 input error, 3 convergence failure, 4 unstable verdict."};
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* sub, bool with_mn = true) {
        if (with_mn) {
            sub->add_option("--m", opt.m, "closed-factor dimension (>= 2)");
            sub->add_option("--n", opt.n, "Euclidean dimension (>= 2)");
        }
        sub->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"human", "csv", "json"}));
        sub->add_option("--output", opt.output, "write the payload to a file instead of stdout");
        sub->add_option("--cache-dir", opt.cache_dir,
                        "profile cache directory (default: $YAMABE_CACHE_DIR)");
        sub->add_option("--tol-beta", opt.settings.shoot.tol_beta,
                        "relative bracket tolerance on f(0)");
        sub->add_option("--tol-lambda", opt.settings.stability.tol_lambda,
                        "bracket tolerance on the threshold");
        sub->add_option("--abs-tol", opt.settings.shoot.ode.abs_tol,
                        "integrator absolute tolerance");
        sub->add_option("--rel-tol", opt.settings.shoot.ode.rel_tol,
                        "integrator relative tolerance");
        sub->add_option("--grid-nodes", opt.settings.shoot.grid_intervals,
                        "profile grid intervals (even)");
        sub->add_option("--horizon", opt.settings.stability.horizon_override,
                        "absolute integration horizon override");
    };

    auto* gs = app.add_subcommand("ground-state",
                                  "Compute the radial ground state. CSV columns: t,f,df");
    add_common(gs);
    auto* lam = app.add_subcommand(
        "lambda", "Compute the stability threshold lambda(m,n). CSV columns: "
                  "m,n,lambda,bracket_lo,bracket_hi,iterations,horizon,beta");
    add_common(lam);
    auto* table = app.add_subcommand(
        "table", "Thresholds for a set of pairs (default: the 21 bundled reference pairs). "
                 "CSV columns: m,n,lambda[,reference,abs_dev],status");
    add_common(table, false);
    table->add_option("--pairs", opt.pairs,
                      "semicolon list 'm1,n1;m2,n2;...', 'all', or 'none'");
    table->add_flag("--reference", opt.reference,
                    "compare against the bundled reference thresholds");
    table->add_option("--jobs", opt.jobs,
                      "worker count (1 = serial reference path, 0 = hardware)");
    auto* ac = app.add_subcommand(
        "a-curve", "Sample the quotient-infimum curve A(lambda). CSV columns: lambda,a,status");
    add_common(ac);
    ac->add_option("--grid", opt.grid, "lambda grid: 'start:stop:count' or comma list");
    auto* cl = app.add_subcommand(
        "classify", "Classify the linear stability trajectory at one shift. CSV columns: t,u,du");
    add_common(cl);
    cl->add_option("--lambda", opt.lambda, "spectral shift")->required();
    auto* cs = app.add_subcommand(
        "check-stability",
        "Stability verdict for a first eigenvalue lambda_1. CSV columns: m,n,lambda1,lambda,"
        "verdict,yamabe_metric_sufficient,bracket_lo,bracket_hi,marginal_band");
    add_common(cs);
    cs->add_option("--lambda1", opt.lambda_1, "first positive eigenvalue of -Delta on (M,g)")
        ->required();
    auto* vi = app.add_subcommand(
        "verify-identities",
        "Ground-state integrals and virial-identity residuals. CSV columns: m,n,l2_sq,lp_p,"
        "grad_sq,sphere_factor,residual_grad_l2,residual_grad_lp,residual_l2_lp");
    add_common(vi);
    auto* yc = app.add_subcommand("yamabe-constant",
                                  "Restricted Yamabe constant. CSV columns: m,n,vol_m,value");
    add_common(yc);
    yc->add_option("--vol-m", opt.vol_m, "volume of the closed factor (M,g)")->required();
    auto* gn = app.add_subcommand(
        "gn-constant",
        "Gagliardo-Nirenberg best constant. CSV columns: m,n,sigma,minimizer_peak");
    add_common(gn);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitInput;
    }

    // The stability solver shares the integrator tolerances with the shooter.
    opt.settings.stability.ode = opt.settings.shoot.ode;

    try {
        if (gs->parsed()) return cmd_ground_state(opt);
        if (lam->parsed()) return cmd_lambda(opt);
        if (table->parsed()) return cmd_table(opt);
        if (ac->parsed()) return cmd_a_curve(opt);
        if (cl->parsed()) return cmd_classify(opt);
        if (cs->parsed()) return cmd_check_stability(opt);
        if (vi->parsed()) return cmd_verify_identities(opt);
        if (yc->parsed()) return cmd_yamabe_constant(opt);
        if (gn->parsed()) return cmd_gn_constant(opt);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const BracketError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
