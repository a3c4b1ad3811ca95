// Command-line front end: loads a model and control files, runs the periodic
// solver / GOE analyses, and writes CSV or JSON results.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "entrain/diagnostics.hpp"
#include "entrain/goe.hpp"
#include "entrain/models.hpp"
#include "entrain/quadrature.hpp"

using nlohmann::json;
using namespace entrain;

namespace {

// ---------------------------------------------------------------------------
// Logging (ENTRAIN_LOG={error,info,debug}, default error)
// ---------------------------------------------------------------------------

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("ENTRAIN_LOG");
        if (!env) return 0;
        const std::string v(env);
        if (v == "debug") return 2;
        if (v == "info") return 1;
        return 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[info] " << msg << "\n";
}

// ---------------------------------------------------------------------------
// Formatting: every number with 17 significant digits
// ---------------------------------------------------------------------------

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

json jnum(double x) { return json::parse(num(x)); }

json jvec(const Vector& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(jnum(v(i)));
    return a;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
}

// ---------------------------------------------------------------------------
// Config loading
// ---------------------------------------------------------------------------

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    return json::parse(f);
}

Vector to_vector(const json& a) {
    if (!a.is_array()) throw std::runtime_error("expected a JSON array of numbers");
    Vector v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
    return v;
}

Matrix to_matrix(const json& a) {
    if (!a.is_array() || a.empty()) throw std::runtime_error("expected a JSON matrix");
    Matrix m(a.size(), a[0].size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != a[0].size()) throw std::runtime_error("ragged JSON matrix");
        for (std::size_t j = 0; j < a[i].size(); ++j) m(i, j) = a[i][j].get<double>();
    }
    return m;
}

struct Model {
    BilinearSystem sys;
    bool augmented = false;  // controls in files lack the pinned drift channel
    std::optional<MasterSystem> master;
};

Model load_model(const std::string& path) {
    const json j = load_json(path);
    const std::string name = j.at("name").get<std::string>();
    Model m;
    if (name == "rfm") {
        RfmSpec spec;
        spec.n = j.value("n", 2);
        spec.c = j.value("c", 1e-3);
        m.sys = build_rfm(spec);
    } else if (name == "master") {
        MasterChainSpec spec;
        spec.n = j.value("n", 2);
        spec.c = j.value("c", 1e-3);
        if (j.contains("transitions")) {
            for (const auto& e : j.at("transitions"))
                spec.transitions.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        } else {
            spec = MasterChainSpec::complete(spec.n, spec.c);
        }
        MasterSystem ms = build_master(spec);
        m.sys = ms.sys;
        m.master = std::move(ms);
    } else if (name == "linear") {
        m.sys = build_example_linear(to_matrix(j.at("A")), to_vector(j.at("b")),
                                     to_vector(j.at("c")));
        m.augmented = true;
    } else if (name == "pavlov") {
        m.sys = build_example_pavlov();
        m.augmented = true;
    } else if (name == "scalar") {
        m.sys = build_example_scalar();
    } else {
        throw std::runtime_error("unknown model name: " + name);
    }
    return m;
}

ControlInterp parse_interp(const json& j) {
    const std::string s = j.value("interp", "trig");
    if (s == "linear") return ControlInterp::LinearPeriodic;
    if (s == "trig") return ControlInterp::Trigonometric;
    throw std::runtime_error("unknown interp mode: " + s);
}

PeriodicControl load_control(const std::string& path, int grid_k,
                             std::optional<unsigned> seed) {
    const json j = load_json(path);
    const std::string type = j.at("type").get<std::string>();
    const int k = j.value("k", grid_k);
    if (type == "constant") {
        return PeriodicControl::constant(j.at("period").get<double>(),
                                         to_vector(j.at("value")), k);
    }
    if (type == "harmonic") {
        const double omega = j.at("omega").get<double>();
        const Vector amp = to_vector(j.at("amplitude"));
        const Vector offset = j.contains("offset") ? to_vector(j.at("offset"))
                                                   : Vector(Vector::Zero(amp.size()));
        return PeriodicControl::harmonic(2.0 * M_PI / omega, offset, amp, omega,
                                         j.value("phase", 0.0), k);
    }
    if (type == "samples") {
        return PeriodicControl(j.at("period").get<double>(), to_matrix(j.at("samples")),
                               parse_interp(j));
    }
    if (type == "random") {
        if (!seed) throw std::runtime_error("random control requires --seed");
        const double scale = j.value("scale", 1.0);
        const int m = j.at("channels").get<int>();
        std::mt19937_64 rng(*seed);
        std::uniform_real_distribution<double> dist(-scale, scale);
        Matrix samples(k, m);
        for (int i = 0; i < k; ++i)
            for (int c = 0; c < m; ++c) samples(i, c) = dist(rng);
        return PeriodicControl(j.at("period").get<double>(), std::move(samples));
    }
    throw std::runtime_error("unknown control type: " + type);
}

struct Cli {
    std::string model_path, control_path, perturb_path, out_path;
    std::string format = "csv";
    double tol = 1e-12;
    int grid_k = 256;
    std::optional<unsigned> seed;
    bool zero_mean = false;
    int jobs = 1;
    // sweep
    std::string axis = "epsilon";
    std::vector<double> values;
    // diagnose
    std::string measure = "l1";
    std::vector<double> weights;

    SolverOptions solver() const {
        SolverOptions o;
        o.newton_tol = tol;
        o.grid_k = grid_k;
        return o;
    }
};

PeriodicControl adapt(const PeriodicControl& u, const Model& m, double pin) {
    PeriodicControl out = m.augmented ? u.with_prefix_channel(pin) : u;
    if (out.channels() != m.sys.m)
        throw std::runtime_error("control has " + std::to_string(out.channels()) +
                                 " channels, model expects " +
                                 std::to_string(m.sys.m - (m.augmented ? 1 : 0)));
    return out;
}

PeriodicControl load_base(const Cli& cli, const Model& m) {
    return adapt(load_control(cli.control_path, cli.grid_k, cli.seed), m, 1.0);
}

PeriodicControl load_perturb(const Cli& cli, const Model& m) {
    PeriodicControl du = load_control(cli.perturb_path, cli.grid_k, cli.seed);
    if (cli.zero_mean) du = du.zero_mean();
    return adapt(du, m, 0.0);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_periodic(const Cli& cli) {
    const Model m = load_model(cli.model_path);
    const PeriodicControl u = load_base(cli, m);
    const PeriodicSolution sol = solve_periodic(m.sys, u, cli.solver());
    const C3Report c3 = check_c3(sol);

    if (cli.format == "json") {
        json out;
        out["model"] = m.sys.name;
        out["gamma0"] = jvec(sol.gamma0);
        out["residual"] = jnum(sol.residual);
        out["nondegenerate"] = c3.nondegenerate;
        out["spectral_radius"] = jnum(c3.spectral_radius);
        out["min_distance_to_one"] = jnum(c3.min_distance_to_one);
        json eig = json::array();
        for (int i = 0; i < sol.monodromy.eigenvalues.size(); ++i)
            eig.push_back({{"re", jnum(sol.monodromy.eigenvalues(i).real())},
                           {"im", jnum(sol.monodromy.eigenvalues(i).imag())}});
        out["monodromy_eigenvalues"] = eig;
        json rows = json::array();
        const auto& g = sol.trajectory.grid;
        for (int i = 0; i < g.size(); ++i)
            rows.push_back({{"t", jnum(g.nodes[i])},
                            {"x", jvec(sol.trajectory.states[i])},
                            {"u", jvec(u.eval(g.nodes[i]))}});
        out["samples"] = rows;
        write_text(cli.out_path, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "t";
        for (int i = 0; i < m.sys.n; ++i) os << ",x" << i + 1;
        for (int i = 0; i < m.sys.m; ++i) os << ",u" << i + 1;
        os << "\n";
        const auto& g = sol.trajectory.grid;
        for (int i = 0; i < g.size(); ++i) {
            os << num(g.nodes[i]);
            const Vector& x = sol.trajectory.states[i];
            const Vector uc = u.eval(g.nodes[i]);
            for (int c = 0; c < x.size(); ++c) os << "," << num(x(c));
            for (int c = 0; c < uc.size(); ++c) os << "," << num(uc(c));
            os << "\n";
        }
        os << "# gamma0 =";
        for (int i = 0; i < sol.gamma0.size(); ++i) os << " " << num(sol.gamma0(i));
        os << "\n# residual = " << num(sol.residual) << "\n";
        os << "# eigenvalues =";
        for (int i = 0; i < sol.monodromy.eigenvalues.size(); ++i)
            os << " " << num(sol.monodromy.eigenvalues(i).real()) << (sol.monodromy.eigenvalues(i).imag() < 0 ? "-" : "+")
               << num(std::abs(sol.monodromy.eigenvalues(i).imag())) << "i";
        os << "\n# nondegenerate = " << (c3.nondegenerate ? "yes" : "no")
           << "\n# spectral_radius = " << num(c3.spectral_radius) << "\n";
        write_text(cli.out_path, os.str());
    }
    return c3.nondegenerate ? 0 : 3;
}

json report_json(const GoeReport& r) {
    return {{"ybar_base", jnum(r.ybar_base)},     {"ybar_pert", jnum(r.ybar_pert)},
            {"goe", jnum(r.goe)},                 {"first_order_prediction", jnum(r.first_order_prediction)},
            {"residual", jnum(r.residual)},       {"du_norm", jnum(r.du_norm)}};
}

int cmd_goe(const Cli& cli) {
    const Model m = load_model(cli.model_path);
    const PeriodicControl u = load_base(cli, m);
    const PeriodicControl du = load_perturb(cli, m);
    const GoeReport r = goe_exact(m.sys, u, du, cli.solver());

    if (cli.format == "json") {
        write_text(cli.out_path, report_json(r).dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "ybar_base,ybar_pert,goe,first_order_prediction,residual,du_norm\n"
           << num(r.ybar_base) << "," << num(r.ybar_pert) << "," << num(r.goe) << ","
           << num(r.first_order_prediction) << "," << num(r.residual) << ","
           << num(r.du_norm) << "\n";
        write_text(cli.out_path, os.str());
    }
    return 0;
}

int cmd_kernel(const Cli& cli) {
    const Model m = load_model(cli.model_path);
    const PeriodicControl u = load_base(cli, m);
    const SolverOptions opts = cli.solver();
    const PeriodicSolution sol = solve_periodic(m.sys, u, opts);
    const KernelSamples ker = goe_kernel(m.sys, sol, opts);
    const PeriodicControl sign_dir = optimal_direction_sign(ker);

    // Constant-direction vector is defined at a constant base; report it
    // against the mean control and the base solution's initial state.
    json extras;
    try {
        const Vector vbar = u.mean();
        extras["optimal_constant_direction"] =
            jvec(optimal_constant_direction(m.sys, vbar, sol.gamma0));
    } catch (const SolverError&) {
        extras["optimal_constant_direction"] = nullptr;
    }

    std::optional<double> check_fo, check_quad;
    if (!cli.perturb_path.empty()) {
        const PeriodicControl du = load_perturb(cli, m);
        check_fo = goe_first_order(m.sys, sol, du, opts);
        const auto& g = ker.grid;
        check_quad = simpson([&](int i) { return ker.values[i].dot(du.eval(g.nodes[i])); },
                             g.size(), g.spacing()) /
                     g.span();
        log_info("kernel quadrature " + num(*check_quad) + " vs first order " +
                 num(*check_fo));
    }

    if (cli.format == "json") {
        json out;
        out["model"] = m.sys.name;
        json rows = json::array();
        for (int i = 0; i < ker.grid.size(); ++i)
            rows.push_back({{"t", jnum(ker.grid.nodes[i])},
                            {"K", jvec(ker.values[i].transpose())},
                            {"sign", jvec(sign_dir.eval(ker.grid.nodes[i]))}});
        out["samples"] = rows;
        out["optimal_constant_direction"] = extras["optimal_constant_direction"];
        if (check_fo) {
            out["first_order_prediction"] = jnum(*check_fo);
            out["kernel_quadrature"] = jnum(*check_quad);
        }
        write_text(cli.out_path, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "t";
        for (int i = 0; i < m.sys.m; ++i) os << ",K" << i + 1;
        for (int i = 0; i < m.sys.m; ++i) os << ",sign" << i + 1;
        os << "\n";
        for (int i = 0; i < ker.grid.size(); ++i) {
            os << num(ker.grid.nodes[i]);
            for (int c = 0; c < m.sys.m; ++c) os << "," << num(ker.values[i](c));
            const Vector s = sign_dir.eval(ker.grid.nodes[i]);
            for (int c = 0; c < m.sys.m; ++c) os << "," << num(s(c));
            os << "\n";
        }
        if (!extras["optimal_constant_direction"].is_null()) {
            os << "# optimal_constant_direction =";
            for (const auto& v : extras["optimal_constant_direction"])
                os << " " << num(v.get<double>());
            os << "\n";
        }
        if (check_fo)
            os << "# kernel_quadrature = " << num(*check_quad)
               << "\n# first_order_prediction = " << num(*check_fo) << "\n";
        write_text(cli.out_path, os.str());
    }
    return 0;
}

int cmd_sweep(const Cli& cli) {
    if (cli.values.empty()) throw std::runtime_error("sweep needs a nonempty --values list");
    const Model m = load_model(cli.model_path);
    const SolverOptions opts = cli.solver();

    auto point = [&](double p) -> GoeReport {
        if (cli.axis == "epsilon" || cli.axis == "amplitude") {
            PeriodicControl u = load_base(cli, m);
            PeriodicControl du = load_perturb(cli, m);
            const double scale = cli.axis == "epsilon"
                                     ? p
                                     : (du.norm() > 0 ? p / du.norm() : p);
            return goe_exact(m.sys, u, du.scaled(scale), opts);
        }
        // frequency axis: rebuild base (mean) and harmonic perturbation at
        // period 2*pi/omega.
        const json pj = load_json(cli.perturb_path);
        if (pj.at("type").get<std::string>() != "harmonic")
            throw std::runtime_error("frequency sweep needs a harmonic perturbation");
        const Vector amp = to_vector(pj.at("amplitude"));
        const Vector offset = pj.contains("offset") ? to_vector(pj.at("offset"))
                                                    : Vector(Vector::Zero(amp.size()));
        const double T = 2.0 * M_PI / p;
        PeriodicControl du =
            PeriodicControl::harmonic(T, offset, amp, p, pj.value("phase", 0.0), cli.grid_k);
        if (cli.zero_mean) du = du.zero_mean();
        PeriodicControl u0 = load_control(cli.control_path, cli.grid_k, cli.seed);
        PeriodicControl u = PeriodicControl::constant(T, u0.mean(), cli.grid_k);
        return goe_exact(m.sys, adapt(u, m, 1.0), adapt(du, m, 0.0), opts);
    };

    // Worker pool; rows come back ordered by index regardless of completion.
    const int jobs = std::max(1, cli.jobs);
    std::vector<GoeReport> reports(cli.values.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> workers;
    for (int w = 0; w < jobs; ++w)
        workers.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next.fetch_add(1); i < cli.values.size();
                 i = next.fetch_add(1))
                reports[i] = point(cli.values[i]);
        }));
    for (auto& f : workers) f.get();

    std::vector<double> absgoe;
    for (const auto& r : reports) absgoe.push_back(std::abs(r.goe));
    const double slope = loglog_slope(cli.values, absgoe);

    if (cli.format == "json") {
        json out;
        out["axis"] = cli.axis;
        json rows = json::array();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            json r = report_json(reports[i]);
            r["parameter"] = jnum(cli.values[i]);
            rows.push_back(r);
        }
        out["rows"] = rows;
        out["loglog_slope"] = jnum(slope);
        write_text(cli.out_path, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "parameter,goe,first_order_prediction,residual\n";
        for (std::size_t i = 0; i < reports.size(); ++i)
            os << num(cli.values[i]) << "," << num(reports[i].goe) << ","
               << num(reports[i].first_order_prediction) << ","
               << num(reports[i].residual) << "\n";
        os << "slope," << num(slope) << ",,\n";
        write_text(cli.out_path, os.str());
    }
    return 0;
}

int cmd_diagnose(const Cli& cli) {
    const Model m = load_model(cli.model_path);
    const PeriodicControl u = load_base(cli, m);
    const PeriodicSolution sol = solve_periodic(m.sys, u, cli.solver());
    const C3Report c3 = check_c3(sol);

    MeasureKind kind = MeasureKind::l1();
    if (cli.measure == "linf") kind = MeasureKind::linf();
    else if (cli.measure == "weighted-l1") {
        Vector w(cli.weights.size());
        for (std::size_t i = 0; i < cli.weights.size(); ++i) w(i) = cli.weights[i];
        kind = MeasureKind::weighted_l1(std::move(w));
    } else if (cli.measure != "l1") {
        throw std::runtime_error("unknown measure: " + cli.measure);
    }
    const double eta = contraction_scan(m.sys, sol, kind);

    if (cli.format == "json") {
        json out;
        out["model"] = m.sys.name;
        out["measure"] = cli.measure;
        out["eta_hat"] = jnum(eta);
        out["contractive_along_orbit"] = eta < 0;
        out["spectral_radius"] = jnum(c3.spectral_radius);
        out["nondegenerate"] = c3.nondegenerate;
        write_text(cli.out_path, out.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "measure,eta_hat,contractive_along_orbit,spectral_radius,nondegenerate\n"
           << cli.measure << "," << num(eta) << "," << (eta < 0 ? 1 : 0) << ","
           << num(c3.spectral_radius) << "," << (c3.nondegenerate ? 1 : 0) << "\n";
        write_text(cli.out_path, os.str());
    }
    return c3.nondegenerate ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entrained periodic solutions and gain of entrainment for bilinear systems"};
    app.require_subcommand(1);
    Cli cli;

    auto add_common = [&](CLI::App* sub, bool needs_control) {
        sub->add_option("--model", cli.model_path, "model JSON file")->required();
        auto* c = sub->add_option("--control", cli.control_path, "base control JSON file");
        if (needs_control) c->required();
        sub->add_option("--perturb", cli.perturb_path, "perturbation JSON file");
        sub->add_option("--out", cli.out_path, "output path ('-' = stdout)");
        sub->add_option("--format", cli.format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--tol", cli.tol, "Newton tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--grid-k", cli.grid_k, "grid segments per period (even)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", cli.seed, "seed for random controls");
        sub->add_flag("--zero-mean", cli.zero_mean, "project the perturbation to zero mean");
        sub->add_option("--jobs", cli.jobs, "sweep worker threads");
    };

    auto* periodic = app.add_subcommand("periodic", "solve for the entrained solution");
    add_common(periodic, true);
    auto* goe = app.add_subcommand("goe", "gain of entrainment of a perturbation");
    add_common(goe, true);
    goe->get_option("--perturb")->required();
    auto* kernel = app.add_subcommand("kernel", "first-order GOE kernel and optimal directions");
    add_common(kernel, true);
    auto* sweep = app.add_subcommand("sweep", "GOE across a parameter axis");
    add_common(sweep, true);
    sweep->get_option("--perturb")->required();
    sweep->add_option("--axis", cli.axis, "epsilon|amplitude|frequency")
        ->check(CLI::IsMember({"epsilon", "amplitude", "frequency"}));
    sweep->add_option("--values", cli.values, "sweep points")->delimiter(',');
    auto* diagnose = app.add_subcommand("diagnose", "contraction scan along the orbit");
    add_common(diagnose, true);
    diagnose->add_option("--measure", cli.measure, "l1|linf|weighted-l1");
    diagnose->add_option("--weights", cli.weights, "weights for weighted-l1")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors map to 1 (--help stays 0)
    }

    try {
        if (cli.grid_k % 2 != 0) throw std::runtime_error("--grid-k must be even");
        if (periodic->parsed()) return cmd_periodic(cli);
        if (goe->parsed()) return cmd_goe(cli);
        if (kernel->parsed()) return cmd_kernel(cli);
        if (sweep->parsed()) return cmd_sweep(cli);
        if (diagnose->parsed()) return cmd_diagnose(cli);
    } catch (const NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SingularMonodromy& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
